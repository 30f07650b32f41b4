#pragma once

#include "singlab/density.hpp"
#include "singlab/shortest_paths.hpp"

namespace singlab {

enum class RayLabel { SigmaDirected, Diverging };

struct TracedRay {
    GeodesicPath path;
    RayLabel label = RayLabel::SigmaDirected;
    Index endpoint = -1;
    double endpoint_sigma_dist = kInf;  // g_H distance from endpoint to nearest Sigma sample
};

struct RayClassification {
    std::vector<TracedRay> rays;
    std::size_t sigma_directed = 0;
    std::size_t diverging = 0;
};

/// Traces maximal geodesics from the basepoint: each ray starts as the
/// geodesic to a sampled target, then continues greedily through neighbors
/// that increase the conformal distance from the basepoint. A ray ending
/// within reach of a Sigma sample is sigma-directed; one whose g_H length
/// exceeds the divergence cap (a multiple of the domain diameter) or stops at
/// the domain boundary counts as diverging.
template <class Density>
RayClassification classify_boundary_rays(const SampledSpace& sp, const Density& d,
                                         std::size_t ray_count, std::uint64_t seed,
                                         double divergence_multiple = 10.0,
                                         double sigma_snap_factor = 4.0) {
    require(ray_count >= 1, "ray_count must be positive");
    RayClassification out;
    Rng rng(seed);
    const Index p = sp.basepoint();
    const auto dm = conformal_distance_map(sp, d, p);
    const double diam = sp.diameter_estimate();
    const double cap = divergence_multiple * diam;

    // snapping radius: a few local mesh widths at the endpoint
    auto local_mesh = [&](Index v) {
        double h = kInf;
        for (const auto& [u, len] : sp.neighbors(v)) {
            (void)u;
            h = std::min(h, len);
        }
        return h;
    };

    for (std::size_t k = 0; k < ray_count; ++k) {
        const Index target = static_cast<Index>(rng.index(static_cast<std::size_t>(sp.size())));
        if (target == p) continue;
        GeodesicPath path = extract_path(sp, d, dm, p, target);
        // greedy farthest-point continuation in d_rho
        Index cur = path.back();
        while (path.length_g() <= cap) {
            Index next = -1;
            double best = dm.at(cur);
            for (const auto& [u, len] : sp.neighbors(cur)) {
                (void)len;
                if (dm.at(u) > best) {
                    best = dm.at(u);
                    next = u;
                } else if (next >= 0 && dm.at(u) == best && u < next) {
                    next = u;
                }
            }
            if (next < 0) break;  // local maximum of d_rho(p, .): maximal geodesic ends
            double len_edge = 0;
            for (const auto& [u, l] : sp.neighbors(cur))
                if (u == next) {
                    len_edge = l;
                    break;
                }
            path.vertices.push_back(next);
            path.prefix_g.push_back(path.length_g() + len_edge);
            path.prefix_rho.push_back(path.length_rho() + conformal_weight(d, cur, next, len_edge));
            cur = next;
        }

        TracedRay ray;
        ray.endpoint = cur;
        ray.path = std::move(path);
        if (!sp.sigma_samples().empty()) ray.endpoint_sigma_dist = sp.dist_to_sigma(cur);
        const bool near_sigma = ray.endpoint_sigma_dist <= sigma_snap_factor * local_mesh(cur);
        const bool too_long = ray.path.length_g() > cap;
        ray.label = (near_sigma && !too_long) ? RayLabel::SigmaDirected : RayLabel::Diverging;
        if (ray.label == RayLabel::SigmaDirected)
            ++out.sigma_directed;
        else
            ++out.diverging;
        out.rays.push_back(std::move(ray));
    }
    require(!out.rays.empty(), "no rays traced (all targets degenerate)");
    return out;
}

enum class ConeRayLabel { TipDirected, InfinityDirected };

struct ConeRayClassification {
    std::vector<ConeRayLabel> labels;
    std::size_t tip_directed = 0;
    std::size_t infinity_directed = 0;
};

/// Specialization for truncated cone graphs: rays are labeled by the radius of
/// their endpoint, tip-directed near r_min and infinity-directed near r_max.
template <class Density>
ConeRayClassification classify_cone_rays(const SampledSpace& sp, const Density& d,
                                         std::size_t ray_count, std::uint64_t seed, double r_min,
                                         double r_max) {
    const auto base = classify_boundary_rays(sp, d, ray_count, seed, kInf);
    ConeRayClassification out;
    const double r_split = std::sqrt(r_min * r_max);  // geometric midpoint of the truncation
    for (const auto& ray : base.rays) {
        const double r = norm(sp.coords(ray.endpoint));
        if (r <= r_split) {
            out.labels.push_back(ConeRayLabel::TipDirected);
            ++out.tip_directed;
        } else {
            out.labels.push_back(ConeRayLabel::InfinityDirected);
            ++out.infinity_directed;
        }
    }
    return out;
}

}  // namespace singlab
