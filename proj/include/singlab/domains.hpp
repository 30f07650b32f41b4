#pragma once

#include "singlab/sampled_space.hpp"

namespace singlab {

struct DomainSpec {
    enum class Kind { PuncturedDisk, Annulus, HalfDisk, FromFile } kind = Kind::PuncturedDisk;
    double r_min = 0;   // inner radius; 0 means resolution-dependent default
    double r_max = 1;   // outer radius
    std::string path;   // for FromFile

    static DomainSpec punctured_disk(double r_inner = 0) {
        DomainSpec s;
        s.kind = Kind::PuncturedDisk;
        s.r_min = r_inner;
        return s;
    }
    static DomainSpec annulus(double r0, double r1) {
        DomainSpec s;
        s.kind = Kind::Annulus;
        s.r_min = r0;
        s.r_max = r1;
        return s;
    }
    static DomainSpec half_disk() {
        DomainSpec s;
        s.kind = Kind::HalfDisk;
        return s;
    }
    static DomainSpec from_file(std::string p) {
        DomainSpec s;
        s.kind = Kind::FromFile;
        s.path = std::move(p);
        return s;
    }
};

namespace detail {

// Polar mesh over [r_lo, r_hi] x angular range. Geometric radial spacing keeps
// the quasi-hyperbolic trapezoid error uniform across rings.
inline SampledSpace polar_mesh(double r_lo, double r_hi, int n_radial, int n_angular,
                               double theta_lo, double theta_hi, bool periodic,
                               bool inner_is_boundary, bool outer_is_boundary) {
    require(0 < r_lo && r_lo < r_hi, "invalid radial range");
    require(n_radial >= 1 && n_angular >= 2, "mesh too coarse");
    SampledSpace sp;
    const double q = std::pow(r_hi / r_lo, 1.0 / n_radial);
    const int n_theta = periodic ? n_angular : n_angular + 1;
    const double dtheta = (theta_hi - theta_lo) / n_angular;
    std::vector<std::vector<Index>> ring(static_cast<std::size_t>(n_radial + 1));
    for (int k = 0; k <= n_radial; ++k) {
        const double r = r_lo * std::pow(q, k);
        const bool bdry = (k == 0 && inner_is_boundary) || (k == n_radial && outer_is_boundary);
        for (int j = 0; j < n_theta; ++j) {
            const double th = theta_lo + dtheta * j;
            ring[static_cast<std::size_t>(k)].push_back(
                sp.add_vertex({r * std::cos(th), r * std::sin(th)}, bdry));
        }
    }
    for (int k = 0; k <= n_radial; ++k) {
        const double r = r_lo * std::pow(q, k);
        const int arcs = periodic ? n_theta : n_theta - 1;
        for (int j = 0; j < arcs; ++j) {
            const Index a = ring[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            const Index b =
                ring[static_cast<std::size_t>(k)][static_cast<std::size_t>((j + 1) % n_theta)];
            sp.add_edge(a, b, r * dtheta);
        }
        if (k < n_radial) {
            const double r_next = r * q;
            for (int j = 0; j < n_theta; ++j) {
                sp.add_edge(ring[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)],
                            ring[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(j)],
                            r_next - r);
            }
        }
    }
    sp.set_basepoint(ring[static_cast<std::size_t>(n_radial / 2)][0]);
    return sp;
}

}  // namespace detail

/// Discretizes a model domain into a SampledSpace. Edge lengths converge to
/// geodesic distances as the resolution grows.
inline SampledSpace build_space(const DomainSpec& spec, int resolution) {
    require(resolution >= 2, "resolution must be >= 2");
    switch (spec.kind) {
        case DomainSpec::Kind::PuncturedDisk: {
            const double r_in = spec.r_min > 0 ? spec.r_min : 0.25 / resolution;
            SampledSpace sp = detail::polar_mesh(r_in, spec.r_max, resolution, resolution, 0,
                                                 2 * M_PI, true, false, true);
            sp.add_sigma_sample({0.0, 0.0});
            sp.validate();
            return sp;
        }
        case DomainSpec::Kind::Annulus: {
            SampledSpace sp = detail::polar_mesh(spec.r_min, spec.r_max, resolution, resolution,
                                                 0, 2 * M_PI, true, true, true);
            sp.add_sigma_sample({0.0, 0.0});
            sp.validate();
            return sp;
        }
        case DomainSpec::Kind::HalfDisk: {
            // Upper half disk; the diameter is represented by Sigma samples just
            // outside the mesh, the outer arc by boundary vertices.
            const double r_in = spec.r_min > 0 ? spec.r_min : 0.25 / resolution;
            const double gap = M_PI / (4.0 * resolution);
            SampledSpace sp = detail::polar_mesh(r_in, spec.r_max, resolution, resolution, gap,
                                                 M_PI - gap, false, false, true);
            const int n_sigma = 4 * resolution;
            for (int i = 0; i <= n_sigma; ++i) {
                const double x = -spec.r_max + 2 * spec.r_max * i / n_sigma;
                sp.add_sigma_sample({x, 0.0});
            }
            sp.validate();
            return sp;
        }
        case DomainSpec::Kind::FromFile: {
            SampledSpace sp = SampledSpace::load_file(spec.path);
            sp.validate();
            return sp;
        }
    }
    fail("unknown domain kind");
}

/// 1D chain graph on [r_lo, r_hi]; geometric spacing when geometric=true.
/// Sigma sits at the origin, both ends are domain boundary unless open_left,
/// in which case the left end approaches Sigma as an interior vertex.
inline SampledSpace radial_interval_space(double r_lo, double r_hi, int n, bool geometric,
                                          bool open_left = false) {
    require(0 < r_lo && r_lo < r_hi && n >= 2, "invalid interval spec");
    SampledSpace sp;
    std::vector<Index> ids;
    for (int i = 0; i <= n; ++i) {
        const double r = geometric ? r_lo * std::pow(r_hi / r_lo, double(i) / n)
                                   : r_lo + (r_hi - r_lo) * double(i) / n;
        const bool bdry = (i == n) || (i == 0 && !open_left);
        ids.push_back(sp.add_vertex({r}, bdry));
    }
    for (int i = 0; i < n; ++i) {
        const double la = sp.coords(ids[static_cast<std::size_t>(i + 1)])[0] -
                          sp.coords(ids[static_cast<std::size_t>(i)])[0];
        sp.add_edge(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(i + 1)], la);
    }
    sp.add_sigma_sample({0.0});
    sp.set_basepoint(ids[static_cast<std::size_t>(n / 2)]);
    sp.validate();
    return sp;
}

/// Straight corridor: a path graph with unit-ish segments, for control tests.
inline SampledSpace corridor_space(int n, double segment = 1.0) {
    require(n >= 2, "corridor needs at least two vertices");
    SampledSpace sp;
    for (int i = 0; i < n; ++i) sp.add_vertex({segment * i, 0.0});
    for (int i = 0; i + 1 < n; ++i) sp.add_edge(i, i + 1, segment);
    sp.add_sigma_sample({-1.0, 0.0});
    return sp;
}

}  // namespace singlab
