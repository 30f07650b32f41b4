#pragma once

#include "singlab/density.hpp"
#include "singlab/eigensolve.hpp"
#include "singlab/grid.hpp"

namespace singlab {

struct HardyResult {
    double tau = 0;
    Vec minimizer;
};

/// Hardy constant of a sampled space: the smallest Rayleigh quotient
///   (int |grad f|^2 [+ |A|^2 f^2]) / (int rho^2 f^2)
/// over functions vanishing on the domain boundary, computed as the smallest
/// weighted Dirichlet eigenvalue of the graph system. The curvature term is
/// included when base_operator is true (then curvature must be supplied).
inline HardyResult hardy_constant(const SampledSpace& sp, const DensityField& density,
                                  bool base_operator = false,
                                  const std::vector<double>* curvature = nullptr) {
    require(!sp.boundary_vertices().empty(),
            "hardy_constant needs Dirichlet boundary vertices");
    std::vector<double> potential;
    if (base_operator) {
        require(curvature != nullptr, "base operator needs the curvature field |A|");
        potential.resize(curvature->size());
        for (std::size_t i = 0; i < curvature->size(); ++i)
            potential[i] = (*curvature)[i] * (*curvature)[i];
    }
    const GridSystem sys =
        discretize_graph(sp, &density, base_operator ? &potential : nullptr, true);
    const auto eig = weighted_smallest_eigenpair(sys);
    HardyResult res;
    res.tau = eig.value;
    res.minimizer = eig.vector;
    return res;
}

}  // namespace singlab
