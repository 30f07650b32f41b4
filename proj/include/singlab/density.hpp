#pragma once

#include "singlab/sampled_space.hpp"
#include "singlab/shortest_paths.hpp"

namespace singlab {

enum class DensityMode { InvDistSigma, SkinModel, Hybrid, Custom };

inline const char* to_string(DensityMode m) {
    switch (m) {
        case DensityMode::InvDistSigma: return "INV_DIST_SIGMA";
        case DensityMode::SkinModel: return "SKIN_MODEL";
        case DensityMode::Hybrid: return "HYBRID";
        case DensityMode::Custom: return "CUSTOM";
    }
    return "?";
}

/// Per-vertex positive conformal density rho (units 1/length) with its
/// reciprocal delta = 1/rho and the measured Lipschitz estimate of delta.
struct DensityField {
    DensityMode mode = DensityMode::Custom;
    std::vector<double> rho;
    std::vector<double> delta;
    double lipschitz_estimate = 0;  // sup over edges of |delta(u)-delta(v)| / l_g(u,v)

    double rho_at(Index v) const { return rho[static_cast<std::size_t>(v)]; }
    double delta_at(Index v) const { return delta[static_cast<std::size_t>(v)]; }
};

namespace detail {

inline DensityField finalize_density(const SampledSpace& sp, DensityMode mode,
                                     std::vector<double> rho) {
    require(rho.size() == static_cast<std::size_t>(sp.size()), "density size mismatch");
    DensityField d;
    d.mode = mode;
    d.rho = std::move(rho);
    d.delta.resize(d.rho.size());
    for (std::size_t i = 0; i < d.rho.size(); ++i) {
        require(d.rho[i] > 0 && std::isfinite(d.rho[i]), "density must be positive and finite");
        d.delta[i] = 1.0 / d.rho[i];
    }
    double lip = 0;
    for (const auto& e : sp.edges()) {
        const double dd = std::abs(d.delta[static_cast<std::size_t>(e.u)] -
                                   d.delta[static_cast<std::size_t>(e.v)]);
        lip = std::max(lip, dd / e.length);
    }
    d.lipschitz_estimate = lip;
    return d;
}

}  // namespace detail

/// Quasi-hyperbolic density rho = 1/dist(., Sigma).
inline DensityField attach_inv_dist(const SampledSpace& sp) {
    require(!sp.sigma_samples().empty(), "INV_DIST_SIGMA needs sigma samples");
    std::vector<double> rho(static_cast<std::size_t>(sp.size()));
    for (Index v = 0; v < sp.size(); ++v) {
        const double d = sp.dist_to_sigma(v);
        require(d > 0, "vertex at zero distance from sigma");
        rho[static_cast<std::size_t>(v)] = 1.0 / d;
    }
    return detail::finalize_density(sp, DensityMode::InvDistSigma, std::move(rho));
}

/// Model skin density rho = max{|A|, lambda/dist(., Sigma)}.
inline DensityField attach_skin_model(const SampledSpace& sp,
                                      const std::vector<double>& curvature_norm,
                                      double lambda = 1.0) {
    require(lambda > 0, "lambda must be positive");
    require(curvature_norm.size() == static_cast<std::size_t>(sp.size()),
            "curvature field size mismatch");
    std::vector<double> rho(static_cast<std::size_t>(sp.size()));
    for (Index v = 0; v < sp.size(); ++v) {
        const double d = sp.dist_to_sigma(v);
        require(d > 0, "vertex at zero distance from sigma");
        const double a = curvature_norm[static_cast<std::size_t>(v)];
        require(a >= 0, "negative curvature norm");
        rho[static_cast<std::size_t>(v)] = std::max(a, lambda / d);
    }
    return detail::finalize_density(sp, DensityMode::SkinModel, std::move(rho));
}

/// Hybrid density 1/rho(z) = min{L * dist(z, boundary), delta_base(z)}.
/// Boundary distance is the base-length graph distance to the marked
/// domain-boundary vertices; a boundary vertex itself stands for a half cell
/// reaching inward, so its distance is floored at half its shortest edge.
inline DensityField attach_hybrid(const SampledSpace& sp, const DensityField& base,
                                  double lipschitz_const) {
    require(lipschitz_const > 0, "Lipschitz constant must be positive");
    const auto bdry = sp.boundary_vertices();
    require(!bdry.empty(), "hybrid density needs marked boundary vertices");
    const auto bd = base_distance_map(sp, bdry);
    std::vector<double> rho(static_cast<std::size_t>(sp.size()));
    for (Index v = 0; v < sp.size(); ++v) {
        const std::size_t i = static_cast<std::size_t>(v);
        double dist_bdry = bd.dist[i];
        if (sp.is_boundary(v)) {
            double h = kInf;
            for (const auto& [u, len] : sp.neighbors(v)) {
                (void)u;
                h = std::min(h, len);
            }
            dist_bdry = 0.5 * h;
        }
        const double d = std::min(lipschitz_const * dist_bdry, base.delta[i]);
        require(d > 0, "hybrid density degenerate at a vertex");
        rho[i] = 1.0 / d;
    }
    return detail::finalize_density(sp, DensityMode::Hybrid, std::move(rho));
}

inline DensityField attach_custom(const SampledSpace& sp, std::vector<double> rho) {
    return detail::finalize_density(sp, DensityMode::Custom, std::move(rho));
}

struct DensityParams {
    double lambda = 1.0;                 // SkinModel: rho = max{|A|, lambda/dist}
    std::vector<double> curvature_norm;  // SkinModel: |A| per vertex
    double lipschitz_const = 1.0;        // Hybrid: L in min{L dist(., bdry), delta}
    const DensityField* hybrid_base = nullptr;
    std::vector<double> custom_rho;
};

/// Mode dispatcher over the specific attach_* constructors.
inline DensityField attach_density(const SampledSpace& sp, DensityMode mode,
                                   const DensityParams& params = {}) {
    switch (mode) {
        case DensityMode::InvDistSigma: return attach_inv_dist(sp);
        case DensityMode::SkinModel:
            return attach_skin_model(sp, params.curvature_norm, params.lambda);
        case DensityMode::Hybrid:
            require(params.hybrid_base != nullptr, "hybrid density needs a base density");
            return attach_hybrid(sp, *params.hybrid_base, params.lipschitz_const);
        case DensityMode::Custom: return attach_custom(sp, params.custom_rho);
    }
    fail("unknown density mode");
}

/// Pointwise hybrid rule on raw numbers: d(z) = min{L*dist(z,bdry), delta(z)}.
inline double hybrid_delta(double lipschitz_const, double dist_to_boundary, double delta_skin) {
    return std::min(lipschitz_const * dist_to_boundary, delta_skin);
}

struct SmoothingReport {
    DensityField density;
    double c1 = 1;  // measured inf delta*/delta
    double c2 = 1;  // measured sup delta*/delta
    // quasi-isometry spot check: range of d_rho*(x,y)/d_rho(x,y) over sampled pairs
    double qi_ratio_min = 1;
    double qi_ratio_max = 1;
};

/// Graph-neighborhood averaging of delta with radius proportional to the local
/// delta. The output obeys the sandwich c1*delta <= delta* <= c2*delta with the
/// measured constants reported.
inline SmoothingReport smooth_density(const SampledSpace& sp, const DensityField& d,
                                      double radius_in_delta_units, int qi_pairs = 16,
                                      std::uint64_t seed = 7) {
    require(radius_in_delta_units >= 0, "smoothing radius must be non-negative");
    SmoothingReport rep;
    std::vector<double> delta_s(d.delta.size());
    if (radius_in_delta_units == 0) {
        delta_s = d.delta;
    } else {
        for (Index v = 0; v < sp.size(); ++v) {
            const double radius = radius_in_delta_units * d.delta_at(v);
            const auto ball = base_ball(sp, v, radius);
            double acc = 0;
            for (Index u : ball) acc += d.delta_at(u);
            delta_s[static_cast<std::size_t>(v)] = acc / static_cast<double>(ball.size());
        }
    }
    double c1 = kInf, c2 = 0;
    std::vector<double> rho_s(delta_s.size());
    for (std::size_t i = 0; i < delta_s.size(); ++i) {
        const double ratio = delta_s[i] / d.delta[i];
        c1 = std::min(c1, ratio);
        c2 = std::max(c2, ratio);
        rho_s[i] = 1.0 / delta_s[i];
    }
    rep.density = detail::finalize_density(sp, DensityMode::Custom, std::move(rho_s));
    rep.c1 = c1;
    rep.c2 = c2;

    if (qi_pairs > 0 && sp.size() > 2) {
        Rng rng(seed);
        double lo = kInf, hi = 0;
        for (int k = 0; k < qi_pairs; ++k) {
            const Index x = static_cast<Index>(rng.index(static_cast<std::size_t>(sp.size())));
            const Index y = static_cast<Index>(rng.index(static_cast<std::size_t>(sp.size())));
            if (x == y) continue;
            const double d0 = conformal_distance(sp, d, x, y);
            const double d1 = conformal_distance(sp, rep.density, x, y);
            if (d0 > 0) {
                lo = std::min(lo, d1 / d0);
                hi = std::max(hi, d1 / d0);
            }
        }
        if (std::isfinite(lo)) {
            rep.qi_ratio_min = lo;
            rep.qi_ratio_max = hi;
        }
    }
    return rep;
}

}  // namespace singlab
