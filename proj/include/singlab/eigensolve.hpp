#pragma once

#include "singlab/grid.hpp"

namespace singlab {

struct EigenResult {
    double value = 0;
    Vec vector;
    int iterations = 0;
    int factorizations = 0;
};

/// Smallest eigenvalue of the pencil K v = nu * diag(m) v for symmetric K and
/// positive diagonal mass m, by shift-and-invert iteration with certified
/// shifts: LDLT inertia (Sylvester) tells whether a shift overshot the bottom
/// of the spectrum, so every accepted shift lies strictly below nu_1 and the
/// iteration provably targets it. Throws on stagnation.
inline EigenResult smallest_eigenpair(const SpMat& K, const Vec& m, double tol = 1e-11,
                                      int max_phases = 24, int iters_per_phase = 400) {
    const Eigen::Index n = K.rows();
    require(m.size() == n, "mass size mismatch");
    require(m.minCoeff() > 0, "mass must be positive");

    // Gershgorin bound on M^{-1/2} K M^{-1/2}: row i has center K_ii/m_i and
    // radius sum_{j!=i} |K_ij| / sqrt(m_i m_j).
    double lower = kInf;
    {
        Vec center = Vec::Zero(n), radius = Vec::Zero(n);
        for (int k = 0; k < K.outerSize(); ++k)
            for (SpMat::InnerIterator it(K, k); it; ++it) {
                if (it.row() == it.col())
                    center[it.row()] += it.value() / m[it.row()];
                else
                    radius[it.row()] += std::abs(it.value()) / std::sqrt(m[it.row()] * m[it.col()]);
            }
        for (Eigen::Index i = 0; i < n; ++i) lower = std::min(lower, center[i] - radius[i]);
    }

    EigenResult res;
    Vec v = Vec::Ones(n);
    v /= std::sqrt(v.dot(m.asDiagonal() * v));
    double certified = lower - 0.01 * std::max(1.0, std::abs(lower));
    double sigma = certified;
    double nu = kInf;

    auto shifted = [&](double s) {
        SpMat S = K;
        for (Eigen::Index i = 0; i < n; ++i) S.coeffRef(i, i) -= s * m[i];
        return S;
    };

    for (int phase = 0; phase < max_phases; ++phase) {
        Eigen::SimplicialLDLT<SpMat> ldlt(shifted(sigma));
        ++res.factorizations;
        bool overshoot = ldlt.info() != Eigen::Success;
        if (!overshoot) {
            const auto& D = ldlt.vectorD();
            for (Eigen::Index i = 0; i < D.size(); ++i)
                if (D[i] <= 0) {
                    overshoot = true;
                    break;
                }
        }
        if (overshoot) {
            sigma = 0.5 * (sigma + certified);
            continue;
        }
        certified = sigma;

        double prev = kInf;
        bool converged = false;
        for (int it = 0; it < iters_per_phase; ++it) {
            Vec w = ldlt.solve(m.asDiagonal() * v);
            const double nrm = std::sqrt(w.dot(m.asDiagonal() * w));
            require(nrm > 0 && std::isfinite(nrm), "eigensolver breakdown");
            v = w / nrm;
            nu = v.dot(K.selfadjointView<Eigen::Lower>() * v) / v.dot(m.asDiagonal() * v);
            ++res.iterations;
            if (std::abs(nu - prev) <= tol * std::max(1.0, std::abs(nu))) {
                converged = true;
                break;
            }
            prev = nu;
        }
        if (converged) {
            res.value = nu;
            res.vector = v;
            return res;
        }
        // Rayleigh quotient bounds nu_1 from above: move the shift up but keep
        // a margin; the inertia check above catches any overshoot.
        const double proposed = nu - std::max(1e-10 * std::max(1.0, std::abs(nu)),
                                              0.02 * std::abs(nu - sigma));
        if (!(proposed > sigma)) {
            res.value = nu;
            res.vector = v;
            return res;
        }
        sigma = proposed;
    }
    fail("eigensolver failed to converge (phase cap reached)");
}

/// Smallest weighted Dirichlet eigenvalue of a symmetric system: K v = nu W v
/// with W = diag(vol * weight), the discrete Rayleigh quotient
/// (gradient energy + potential mass) / weighted mass.
inline EigenResult weighted_smallest_eigenpair(const GridSystem& sys, double tol = 1e-11) {
    require(sys.matrix_symmetric, "weighted eigenproblem needs a symmetric system");
    Vec w(sys.size());
    for (Eigen::Index i = 0; i < sys.size(); ++i)
        w[i] = sys.vol[static_cast<std::size_t>(i)] * sys.weight[static_cast<std::size_t>(i)];
    return smallest_eigenpair(sys.A, w, tol);
}

}  // namespace singlab
