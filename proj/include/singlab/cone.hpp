#pragma once

#include "singlab/sampled_space.hpp"

namespace singlab {

/// Lawson cone C^{p,q}: the cone over S^p(a) x S^q(b) inside the unit sphere,
/// a = sqrt(p/(p+q)), b = sqrt(q/(p+q)). Minimality of the link is equivalent
/// to p(b/a) = q(a/b); the link's second fundamental form has norm sqrt(p+q).
struct ConeSpec {
    int p = 3, q = 3;
    int n = 7;                    // cone dimension p+q+1
    double a_link = 0, b_link = 0;
    double link_curvature_norm = 0;  // |A| of the cone at r=1
    bool certified_minimizing = false;  // p+q >= 6 regime

    double minimality_residual() const {
        return p * (b_link / a_link) - q * (a_link / b_link);
    }
};

inline ConeSpec make_lawson_cone(int p, int q) {
    require(p >= 1 && q >= 1, "sphere dimensions must be positive");
    ConeSpec c;
    c.p = p;
    c.q = q;
    c.n = p + q + 1;
    c.a_link = std::sqrt(double(p) / (p + q));
    c.b_link = std::sqrt(double(q) / (p + q));
    c.link_curvature_norm = std::sqrt(double(p + q));
    c.certified_minimizing = (p + q >= 6);
    return c;
}

/// |A|(r) = sqrt(p+q)/r; homogeneity weight -1.
inline double second_fundamental_norm(const ConeSpec& c, double r) {
    require(r > 0, "radius must be positive");
    return c.link_curvature_norm / r;
}

/// scal_C(r) = -|A|^2 = -(p+q)/r^2 for minimal hypersurfaces in flat space.
inline double scalar_curvature(const ConeSpec& c, double r) {
    require(r > 0, "radius must be positive");
    return -double(c.p + c.q) / (r * r);
}

/// Model skin density on a tip-singular cone: rho(x) = max{|A|(x), lambda/r}
/// = A_cross / r with link-constant A_cross = max{sqrt(p+q), lambda}.
struct ConeDensityRule {
    double lambda = 1;
    double a_cross = 0;  // <A>^x, constant on the link

    double rho(double r) const {
        require(r > 0, "radius must be positive");
        return a_cross / r;
    }
    double delta(double r) const { return r / a_cross; }
};

inline ConeDensityRule skin_density_on_cone(const ConeSpec& c, double lambda = 1.0) {
    require(lambda > 0, "lambda must be positive");
    ConeDensityRule rule;
    rule.lambda = lambda;
    rule.a_cross = std::max(c.link_curvature_norm, lambda);
    return rule;
}

/// Point on the desk-scale cone realization: radius plus angles on the two
/// great circles of the link (|omega_1| = a r, |omega_2| = b r in the ambient
/// embedding).
struct ConePoint {
    double r = 1;
    double theta = 0;
    double phi = 0;
};

inline std::vector<double> embed(const ConeSpec& c, const ConePoint& x) {
    return {x.r * c.a_link * std::cos(x.theta), x.r * c.a_link * std::sin(x.theta),
            x.r * c.b_link * std::cos(x.phi), x.r * c.b_link * std::sin(x.phi)};
}

struct PencilSpec {
    double aperture = 1;  // rho in the membership test delta(x) > rho * d(x, tip)
};

/// Nontangential pencil membership. Cone lines through the tip are geodesics,
/// so d(x, tip) = r and the test reduces to delta(r) > aperture * r; the
/// outcome is scale invariant.
inline bool pencil_contains(const ConeSpec&, const ConeDensityRule& rule, const ConePoint& x,
                            const PencilSpec& pencil) {
    require(x.r > 0, "pencil excludes the tip");
    return rule.delta(x.r) > pencil.aperture * x.r;
}

/// Product mesh for the truncated cone: geometric radial spacing times a
/// two-great-circle sampling of the link, embedded as the cone over a torus
/// T(a,b) in R^4 so ambient radii and edge lengths are exact. Sigma marker at
/// the origin; both truncation rims are domain boundary.
inline SampledSpace export_cone_graph(const ConeSpec& c, double r_min, double r_max,
                                      int radial_steps, int link_steps) {
    require(0 < r_min && r_min < r_max, "invalid radial range");
    require(radial_steps >= 2 && link_steps >= 2, "steps must be >= 2");
    SampledSpace sp;
    const double h = std::pow(r_max / r_min, 1.0 / radial_steps);
    const double dtheta = 2 * M_PI / link_steps;
    auto id = [&](int k, int i, int j) {
        return static_cast<Index>((static_cast<std::size_t>(k) * link_steps + i) * link_steps + j);
    };
    for (int k = 0; k <= radial_steps; ++k) {
        const double r = r_min * std::pow(h, k);
        const bool rim = (k == 0) || (k == radial_steps);
        for (int i = 0; i < link_steps; ++i)
            for (int j = 0; j < link_steps; ++j) {
                ConePoint pt{r, dtheta * i, dtheta * j};
                sp.add_vertex(embed(c, pt), rim);
            }
    }
    for (int k = 0; k <= radial_steps; ++k) {
        const double r = r_min * std::pow(h, k);
        for (int i = 0; i < link_steps; ++i)
            for (int j = 0; j < link_steps; ++j) {
                sp.add_edge(id(k, i, j), id(k, (i + 1) % link_steps, j), r * c.a_link * dtheta);
                sp.add_edge(id(k, i, j), id(k, i, (j + 1) % link_steps), r * c.b_link * dtheta);
                if (k < radial_steps)
                    sp.add_edge(id(k, i, j), id(k + 1, i, j), r * (h - 1));
            }
    }
    sp.add_sigma_sample({0, 0, 0, 0});
    sp.set_basepoint(id(radial_steps / 2, 0, 0));
    sp.validate();
    return sp;
}

/// |A| sampled at every vertex of an exported cone graph, for skin densities.
inline std::vector<double> cone_curvature_field(const ConeSpec& c, const SampledSpace& sp) {
    std::vector<double> a(static_cast<std::size_t>(sp.size()));
    for (Index v = 0; v < sp.size(); ++v)
        a[static_cast<std::size_t>(v)] = second_fundamental_norm(c, norm(sp.coords(v)));
    return a;
}

}  // namespace singlab
