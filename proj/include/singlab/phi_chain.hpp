#pragma once

#include <set>

#include "singlab/density.hpp"
#include "singlab/gromov.hpp"

namespace singlab {

enum class PhiChainKind { Halfspace, GromovProduct };

// Separation functions of the two standard chain constructions.
inline double phi_halfspace(double delta, double t) {
    return std::max(std::min(delta, delta / 22.0), t - 6.0 * delta);
}
inline double phi_gromov(double delta, double t) {
    return std::max(t - 2.0 * (delta + 2.0), delta - 2.0);
}

/// Nested open vertex sets V_i with basepoints x_i on their boundaries and a
/// separation function Phi. The c0-window of the chain definition couples the
/// basepoint spacing to Phi(0), which is not scale invariant; every chain
/// therefore records the metric scale at which its formulas are normalized
/// (halfspace chains at delta'=1, Gromov-product chains at delta'=2.05).
/// Conditions 1 and 3 are scale invariant and are checked in d_rho directly.
struct PhiChain {
    PhiChainKind kind = PhiChainKind::Halfspace;
    std::vector<std::vector<Index>> sets;  // V_i, sorted vertex lists
    std::vector<Index> basepoints;         // x_i on the boundary of V_i
    double delta = 1;                      // chain parameter in scaled units
    double metric_scale = 1;               // scaled distance = metric_scale * d_rho
    double c0 = 0;                         // Phi(0) in scaled units

    double phi(double t) const {
        return kind == PhiChainKind::Halfspace ? phi_halfspace(delta, t) : phi_gromov(delta, t);
    }
    std::size_t levels() const { return sets.size(); }
};

// The Gromov-product construction needs delta slightly above 2 for
// Phi(0) = delta-2 to be positive while the spacing window stays satisfiable.
inline constexpr double kGromovChainDelta = 2.05;

namespace detail {

inline bool contains(const std::vector<Index>& sorted, Index v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

// boundary of a vertex set: members with a neighbor outside
inline std::vector<Index> set_boundary(const SampledSpace& sp, const std::vector<Index>& sorted) {
    std::vector<Index> out;
    for (Index v : sorted) {
        for (const auto& [u, len] : sp.neighbors(v)) {
            (void)len;
            if (!contains(sorted, u)) {
                out.push_back(v);
                break;
            }
        }
    }
    return out;
}

// station index of the path vertex nearest to conformal arclength t
inline std::size_t station_at(const GeodesicPath& ray, double t) {
    std::size_t best = 0;
    double err = kInf;
    for (std::size_t i = 0; i < ray.vertices.size(); ++i) {
        const double e = std::abs(ray.prefix_rho[i] - t);
        if (e < err) {
            err = e;
            best = i;
        }
    }
    return best;
}

}  // namespace detail

/// Builds a Phi-chain along a d_rho-geodesic ray toward a boundary point.
/// HALFSPACE uses the sets W_t = {x : dist(x, gamma[0,t]) < dist(x, gamma[t,end])}
/// at t_i = i*22*delta'; GROMOV_PRODUCT uses U*_i = {x : (x . gamma(4 i delta'))_p
/// >= (4i-2) delta'}. All arclengths are taken in the chain's scaled metric.
template <class Density>
PhiChain build_phi_chain(const SampledSpace& sp, const Density& d, const GeodesicPath& ray,
                         PhiChainKind kind, double delta_measured, int m) {
    require(delta_measured > 0, "delta must be positive");
    require(m >= 2, "need at least two chain levels");
    PhiChain chain;
    chain.kind = kind;
    chain.delta = kind == PhiChainKind::Halfspace ? 1.0 : kGromovChainDelta;
    chain.metric_scale = chain.delta / delta_measured;
    chain.c0 = chain.phi(0.0);

    const double s = chain.metric_scale;
    const double step = (kind == PhiChainKind::Halfspace ? 22.0 : 4.0) * chain.delta;
    const double needed = (m + 1) * step / s;
    require(ray.length_rho() >= needed,
            "ray shorter than the chain needs (" + std::to_string(ray.length_rho()) + " < " +
                std::to_string(needed) + " in d_rho)");

    if (kind == PhiChainKind::Halfspace) {
        for (int i = 1; i <= m; ++i) {
            const double t = i * step / s;  // back to d_rho units
            const std::size_t cut = detail::station_at(ray, t);
            std::vector<Index> head(ray.vertices.begin(),
                                    ray.vertices.begin() + static_cast<std::ptrdiff_t>(cut) + 1);
            std::vector<Index> tail(ray.vertices.begin() + static_cast<std::ptrdiff_t>(cut),
                                    ray.vertices.end());
            const auto dm_head = conformal_distance_map(sp, d, head);
            const auto dm_tail = conformal_distance_map(sp, d, tail);
            std::vector<Index> set;
            for (Index v = 0; v < sp.size(); ++v)
                if (dm_tail.at(v) < dm_head.at(v)) set.push_back(v);
            chain.sets.push_back(std::move(set));
            chain.basepoints.push_back(ray.vertices[cut]);
        }
    } else {
        const Index p = ray.front();
        const auto dm_p = conformal_distance_map(sp, d, p);
        for (int i = 1; i <= m; ++i) {
            const double t_target = 4.0 * i * chain.delta / s;
            const std::size_t anchor = detail::station_at(ray, t_target);
            const Index g = ray.vertices[anchor];
            const auto dm_g = conformal_distance_map(sp, d, g);
            const double thresh = (4.0 * i - 2.0) * chain.delta / s;
            std::vector<Index> set;
            for (Index v = 0; v < sp.size(); ++v) {
                const double prod = gromov_product(dm_p.at(v), dm_p.at(g), dm_g.at(v));
                if (prod >= thresh) set.push_back(v);
            }
            chain.sets.push_back(std::move(set));
            chain.basepoints.push_back(ray.vertices[detail::station_at(ray, thresh)]);
        }
    }
    // discrete near-ties can nick the nesting; enforce it so validation
    // failures downstream always point at genuine separation violations
    for (std::size_t i = 0; i + 1 < chain.sets.size(); ++i) {
        std::vector<Index> inter;
        std::set_intersection(chain.sets[i].begin(), chain.sets[i].end(),
                              chain.sets[i + 1].begin(), chain.sets[i + 1].end(),
                              std::back_inserter(inter));
        chain.sets[i + 1] = std::move(inter);
    }
    return chain;
}

struct PhiChainValidation {
    bool nesting_ok = true;
    bool spacing_ok = true;
    bool separation_ok = true;
    double worst_spacing = 0;        // scaled basepoint distance furthest out of window
    double worst_separation = 0;     // max of Phi(d(x,x_i)) - d(x,V_{i+1}), scaled
    Index worst_vertex = -1;
    std::size_t worst_level = 0;

    bool pass() const { return nesting_ok && spacing_ok && separation_ok; }
};

/// Checks the three chain conditions on sampled boundary vertices of each
/// level: nesting, the c0-window on basepoint spacing (in the chain's scaled
/// metric) and the separation d(x, V_{i+1}) >= Phi(d(x, x_i)).
template <class Density>
PhiChainValidation validate_phi_chain(const SampledSpace& sp, const Density& d,
                                      const PhiChain& chain, double tol = 1e-9) {
    require(!chain.sets.empty(), "empty chain");
    PhiChainValidation out;
    const double s = chain.metric_scale;

    for (std::size_t i = 0; i + 1 < chain.levels(); ++i) {
        for (Index v : chain.sets[i + 1])
            if (!detail::contains(chain.sets[i], v)) {
                out.nesting_ok = false;
                out.worst_vertex = v;
                out.worst_level = i + 1;
            }
    }

    for (std::size_t i = 0; i + 1 < chain.basepoints.size(); ++i) {
        const double dist_s =
            s * conformal_distance(sp, d, chain.basepoints[i], chain.basepoints[i + 1]);
        const double lo = chain.c0, hi = 1.0 / chain.c0;
        const double excess = std::max(lo - dist_s, dist_s - hi);
        if (excess > tol) {
            out.spacing_ok = false;
            out.worst_level = i;
        }
        out.worst_spacing = std::max(out.worst_spacing, excess);
    }

    for (std::size_t i = 0; i + 1 < chain.levels(); ++i) {
        const auto bdry = detail::set_boundary(sp, chain.sets[i]);
        if (bdry.empty()) continue;
        const auto dm_next = conformal_distance_map(sp, d, chain.sets[i + 1]);
        const auto dm_base = conformal_distance_map(sp, d, chain.basepoints[i]);
        for (Index x : bdry) {
            const double lhs = s * dm_next.at(x);
            const double rhs = chain.phi(s * dm_base.at(x));
            const double gap = rhs - lhs;
            if (gap > out.worst_separation) {
                out.worst_separation = gap;
                if (gap > tol) {
                    out.separation_ok = false;
                    out.worst_vertex = x;
                    out.worst_level = i;
                }
            }
        }
    }
    return out;
}

}  // namespace singlab
