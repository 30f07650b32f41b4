#pragma once

#include "singlab/density.hpp"
#include "singlab/shortest_paths.hpp"

namespace singlab {

/// Gromov product (y.z)_x = (d(x,y)+d(x,z)-d(y,z))/2; non-negative for any
/// metric by the triangle inequality.
inline double gromov_product(double d_xy, double d_xz, double d_yz) {
    return 0.5 * (d_xy + d_xz - d_yz);
}

template <class Density>
double gromov_product(const SampledSpace& sp, const Density& d, Index x, Index y, Index z) {
    const auto dm = conformal_distance_map(sp, d, x);
    const double d_yz = conformal_distance(sp, d, y, z);
    return gromov_product(dm.at(y), dm.at(z), d_yz);
}

struct HyperbolicityReport {
    double delta_fourpoint = 0;
    double delta_thin = 0;
    std::size_t quadruples_used = 0;
    std::size_t triangles_used = 0;
    bool exhaustive = false;
};

namespace detail {

// Four-point defect of one quadruple: the sup over labelings of
// min{(y.w)_x,(z.w)_x} - (y.z)_x equals (largest - middle)/2 of the three
// pairwise sums d(a,b)+d(c,d).
inline double fourpoint_defect(double dab, double dac, double dad, double dbc, double dbd,
                               double dcd) {
    double s1 = dab + dcd, s2 = dac + dbd, s3 = dad + dbc;
    if (s1 < s2) std::swap(s1, s2);
    if (s1 < s3) std::swap(s1, s3);
    if (s2 < s3) std::swap(s2, s3);
    return std::max(0.0, 0.5 * (s1 - s2));
}

}  // namespace detail

struct DeltaOptions {
    std::size_t pool_size = 48;          // sources for the pairwise distance table
    Index exhaustive_threshold = 12;     // exhaust all quadruples when n <= this
    std::size_t triangle_probe_cap = 64; // stations checked per triangle edge
};

/// Seeded estimation of the hyperbolicity constant: four-point defects over
/// sampled quadruples and edge-to-other-edges distances over sampled geodesic
/// triangles. Deterministic for a fixed seed; growing the sample counts can
/// only increase both estimates.
template <class Density>
HyperbolicityReport estimate_delta(const SampledSpace& sp, const Density& d,
                                   std::size_t quadruple_samples, std::size_t triangle_samples,
                                   std::uint64_t seed, const DeltaOptions& opt = {}) {
    require(quadruple_samples >= 1, "sample counts must be positive");
    HyperbolicityReport rep;
    // Separate streams so that growing one sample count never reshuffles the
    // other draws; prefixes of a longer run reproduce a shorter one.
    Rng rng_pool(seed);
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    Rng rng_tri(seed ^ 0xc2b2ae3d27d4eb4fULL);
    const std::size_t n = static_cast<std::size_t>(sp.size());

    std::vector<Index> pool;
    if (sp.size() <= opt.exhaustive_threshold) {
        for (Index v = 0; v < sp.size(); ++v) pool.push_back(v);
        rep.exhaustive = true;
    } else {
        for (std::size_t i : rng_pool.distinct(n, std::min(n, opt.pool_size)))
            pool.push_back(static_cast<Index>(i));
    }
    const std::size_t m = pool.size();

    std::vector<DistanceMap> maps;
    maps.reserve(m);
    for (Index s : pool) maps.push_back(conformal_distance_map(sp, d, s));
    const auto dd = [&](std::size_t i, std::size_t j) { return maps[i].at(pool[j]); };

    if (rep.exhaustive) {
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b)
                for (std::size_t c = b + 1; c < m; ++c)
                    for (std::size_t e = c + 1; e < m; ++e) {
                        rep.delta_fourpoint =
                            std::max(rep.delta_fourpoint,
                                     detail::fourpoint_defect(dd(a, b), dd(a, c), dd(a, e),
                                                              dd(b, c), dd(b, e), dd(c, e)));
                        ++rep.quadruples_used;
                    }
    } else {
        for (std::size_t k = 0; k < quadruple_samples; ++k) {
            const auto pick = rng.distinct(m, 4);
            rep.delta_fourpoint = std::max(
                rep.delta_fourpoint,
                detail::fourpoint_defect(dd(pick[0], pick[1]), dd(pick[0], pick[2]),
                                         dd(pick[0], pick[3]), dd(pick[1], pick[2]),
                                         dd(pick[1], pick[3]), dd(pick[2], pick[3])));
            ++rep.quadruples_used;
        }
    }

    const std::size_t tri_count =
        rep.exhaustive ? std::min<std::size_t>(triangle_samples, m * (m - 1) * (m - 2) / 6)
                       : triangle_samples;
    for (std::size_t k = 0; k < tri_count; ++k) {
        const auto pick = rng_tri.distinct(m, 3);
        const Index x = pool[pick[0]], y = pool[pick[1]], z = pool[pick[2]];
        GeodesicPath exy = extract_path(sp, d, maps[pick[0]], x, y);
        GeodesicPath eyz = extract_path(sp, d, maps[pick[1]], y, z);
        GeodesicPath exz = extract_path(sp, d, maps[pick[0]], x, z);
        const GeodesicPath* tri[3] = {&exy, &eyz, &exz};
        for (int side = 0; side < 3; ++side) {
            std::vector<Index> other;
            for (int o = 0; o < 3; ++o)
                if (o != side)
                    other.insert(other.end(), tri[o]->vertices.begin(), tri[o]->vertices.end());
            std::sort(other.begin(), other.end());
            other.erase(std::unique(other.begin(), other.end()), other.end());
            const auto dm = conformal_distance_map(sp, d, other);
            const auto& verts = tri[side]->vertices;
            const std::size_t stride =
                std::max<std::size_t>(1, verts.size() / opt.triangle_probe_cap);
            for (std::size_t i = 0; i < verts.size(); i += stride)
                rep.delta_thin = std::max(rep.delta_thin, dm.at(verts[i]));
        }
        ++rep.triangles_used;
    }
    return rep;
}

}  // namespace singlab
