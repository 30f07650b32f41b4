#pragma once

#include "singlab/density.hpp"
#include "singlab/gromov.hpp"

namespace singlab {

struct UniformityCheck {
    bool pass = true;
    double worst_ratio = 0;      // max of l_g/(c d_g) and l_min/(c delta)
    Index worst_vertex = -1;     // station of the worst twisted-cone ratio
    double quasi_geodesic_ratio = 0;  // l_g(path) / d_g(endpoints)
    double cone_ratio = 0;            // max_z l_min(z) / delta(z)
};

/// Checks the two skin-uniformity conditions of a curve against parameter c:
/// quasi-geodesic l_g <= c*d_g and twisted double cones l_min(z) <= c*delta(z).
inline UniformityCheck check_uniform_curve(const SampledSpace& sp, const DensityField& d,
                                           const GeodesicPath& path, double c) {
    require(c > 0, "uniformity parameter must be positive");
    UniformityCheck out;
    if (path.vertices.size() < 2) return out;  // degenerate: passes trivially
    const double dg = base_distance(sp, path.front(), path.back());
    out.quasi_geodesic_ratio = dg > 0 ? path.length_g() / dg : 1.0;
    for (std::size_t i = 0; i < path.vertices.size(); ++i) {
        const double r = path.l_min_g(i) / d.delta_at(path.vertices[i]);
        if (r > out.cone_ratio) {
            out.cone_ratio = r;
            out.worst_vertex = path.vertices[i];
        }
    }
    out.worst_ratio = std::max(out.quasi_geodesic_ratio, out.cone_ratio) / c;
    out.pass = out.worst_ratio <= 1.0;
    return out;
}

// Bounds from the hyperbolicity proof chain; they explode quickly in a but
// stay finite in double precision for a up to ~1.5.
inline double skin_uniformity_b(double a) { return 64 * std::pow(a, 4) * std::exp(32 * std::pow(a, 4)); }
inline double skin_uniformity_b_star(double a) {
    return std::expm1(4 * a * a * std::log1p(4 * skin_uniformity_b(a)));
}
inline double skin_uniformity_c_bound(double a) {
    return 1 + skin_uniformity_b_star(a) * (4 * a * a + 1) + 8 * a * a;
}
inline double thinness_bound(double a) {
    const double c = skin_uniformity_c_bound(a);
    return 4 * a * a * std::log1p(c * (2 * c + 3));
}

struct SkinUniformityResult {
    double c_measured = 0;
    double c_bound = 0;
    bool bound_holds = false;
};

/// Measures the smallest c for which a d_rho-geodesic is c-skin uniform and
/// compares against the closed-form bound c(a) = 1 + b*(a)(4a^2+1) + 8a^2.
inline SkinUniformityResult skin_uniformity_from_geodesic(const SampledSpace& sp,
                                                          const DensityField& d,
                                                          const GeodesicPath& path, double a,
                                                          double geodesic_tol = 1e-9) {
    require(a >= 1, "skin uniformity parameter must be >= 1");
    if (path.vertices.size() >= 2) {
        const double d_rho = conformal_distance(sp, d, path.front(), path.back());
        require(path.length_rho() <= d_rho * (1 + geodesic_tol) + geodesic_tol,
                "input path is not a d_rho geodesic");
    }
    SkinUniformityResult res;
    const auto chk = check_uniform_curve(sp, d, path, 1.0);
    res.c_measured = std::max(1.0, std::max(chk.quasi_geodesic_ratio, chk.cone_ratio));
    res.c_bound = skin_uniformity_c_bound(a);
    res.bound_holds = res.c_measured <= res.c_bound;
    return res;
}

/// Smallest a making all sampled-pair geodesics a-skin-uniform. Reused as the
/// parameter in the metric inequality suite.
inline double fit_skin_uniformity(const SampledSpace& sp, const DensityField& d,
                                  std::size_t pair_samples, std::uint64_t seed) {
    Rng rng(seed);
    double a = 1.0;
    const std::size_t n = static_cast<std::size_t>(sp.size());
    for (std::size_t k = 0; k < pair_samples; ++k) {
        const Index x = static_cast<Index>(rng.index(n));
        const Index y = static_cast<Index>(rng.index(n));
        if (x == y) continue;
        const auto path = geodesic_between(sp, d, x, y);
        const auto chk = check_uniform_curve(sp, d, path, 1.0);
        a = std::max(a, std::max(chk.quasi_geodesic_ratio, chk.cone_ratio));
    }
    return a;
}

struct InequalityRecord {
    double worst_slack = -kInf;  // max over pairs of lhs - rhs (violation if > 0)
    Index worst_x = -1, worst_y = -1;
    bool pass(double tol_scale) const { return worst_slack <= tol_scale; }
};

struct MetricInequalityReport {
    // (i) quasi-hyperbolic lower bound chain, both links
    InequalityRecord lower_vs_k;       // (L/2)log(...) - L*k  <= 0
    InequalityRecord k_vs_rho;         // L*k - d_rho          <= 0
    // (ii) upper bound via skin uniformity
    InequalityRecord upper;            // d_rho - 4a^2 log(1+d_g max rho) <= 0
    // (iii) logarithmic lower bound
    InequalityRecord log_lower;        // log(1+d_g max rho) - d_rho <= 0
    // (iv) delta oscillation bound
    InequalityRecord delta_osc;        // |log dx - log dy| - d_rho <= 0
    std::size_t pairs_checked = 0;
    double a_used = 1;
    double lipschitz_used = 0;

    bool all_pass(double rel_tol) const;
};

/// Samples vertex pairs and evaluates the distance-comparison inequalities
/// between d_g, the quasi-hyperbolic metric and d_rho, reporting the worst
/// slack of each. Slacks are normalized by the magnitude of the bounding side
/// so a 5% tolerance means 5% of the bound.
inline MetricInequalityReport metric_inequality_suite(const SampledSpace& sp,
                                                      const DensityField& d,
                                                      std::size_t pair_samples, double a,
                                                      std::uint64_t seed) {
    require(a >= 1, "skin uniformity parameter must be >= 1");
    MetricInequalityReport rep;
    rep.a_used = a;
    const double L = d.lipschitz_estimate;
    rep.lipschitz_used = L;
    const DensityField qh = attach_inv_dist(sp);

    // Pool of sources; pairs are drawn within it to reuse distance maps.
    Rng rng(seed);
    const std::size_t n = static_cast<std::size_t>(sp.size());
    const std::size_t want_pairs = pair_samples;
    std::size_t pool_size = 2;
    while (pool_size * (pool_size - 1) / 2 < want_pairs && pool_size < n) ++pool_size;
    std::vector<Index> pool;
    for (std::size_t i : rng.distinct(n, std::min(n, pool_size)))
        pool.push_back(static_cast<Index>(i));

    // pool-to-pool distance tables; full maps are discarded per source
    const std::size_t m = pool.size();
    std::vector<double> rho_tab(m * m), g_tab(m * m), k_tab(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto mr = conformal_distance_map(sp, d, pool[i]);
        const auto mg = base_distance_map(sp, pool[i]);
        const auto mk = conformal_distance_map(sp, qh, pool[i]);
        for (std::size_t j = 0; j < m; ++j) {
            rho_tab[i * m + j] = mr.at(pool[j]);
            g_tab[i * m + j] = mg.at(pool[j]);
            k_tab[i * m + j] = mk.at(pool[j]);
        }
    }

    auto update = [](InequalityRecord& r, double lhs, double rhs, Index x, Index y) {
        // normalized slack: positive means violated by that fraction of the bound
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-12});
        const double slack = (lhs - rhs) / scale;
        if (slack > r.worst_slack) {
            r.worst_slack = slack;
            r.worst_x = x;
            r.worst_y = y;
        }
    };

    for (std::size_t i = 0; i < m && rep.pairs_checked < want_pairs; ++i) {
        for (std::size_t j = i + 1; j < m && rep.pairs_checked < want_pairs; ++j) {
            const Index x = pool[i], y = pool[j];
            const double d_rho = rho_tab[i * m + j];
            const double d_g = g_tab[i * m + j];
            const double k = k_tab[i * m + j];
            const double max_rho = std::max(d.rho_at(x), d.rho_at(y));
            const double sx = sp.dist_to_sigma(x), sy = sp.dist_to_sigma(y);

            update(rep.lower_vs_k, 0.5 * L * (std::log1p(d_g / sx) + std::log1p(d_g / sy)),
                   L * k, x, y);
            update(rep.k_vs_rho, L * k, d_rho, x, y);
            update(rep.upper, d_rho, 4 * a * a * std::log1p(d_g * max_rho), x, y);
            update(rep.log_lower, std::log1p(d_g * max_rho), d_rho, x, y);
            update(rep.delta_osc, std::abs(std::log(d.delta_at(x)) - std::log(d.delta_at(y))),
                   d_rho, x, y);
            ++rep.pairs_checked;
        }
    }
    return rep;
}

inline bool MetricInequalityReport::all_pass(double rel_tol) const {
    return lower_vs_k.pass(rel_tol) && k_vs_rho.pass(rel_tol) && upper.pass(rel_tol) &&
           log_lower.pass(rel_tol) && delta_osc.pass(rel_tol);
}

}  // namespace singlab
