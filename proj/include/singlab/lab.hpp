#pragma once

#include <Eigen/Dense>

#include "singlab/eigensolve.hpp"
#include "singlab/grid.hpp"

namespace singlab {

using RegionPredicate = std::function<bool(double, double)>;

/// Solves L F = 0 with Dirichlet data f on all boundary hits. When constants
/// solve the equation, the discrete maximum principle min f <= F <= max f is
/// asserted (up to a small quadrature tolerance).
inline Vec solve_dirichlet(const GridSystem& sys,
                           const std::function<double(const BoundaryHit&)>& f,
                           bool check_max_principle = true) {
    const Vec fv = sys.boundary_vector(f);
    const Vec rhs = -(sys.B * fv);
    Vec F = sys.solve(rhs);
    if (check_max_principle && sys.constants_solve && fv.size() > 0) {
        const double lo = fv.minCoeff(), hi = fv.maxCoeff();
        const double tol = 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
        require(F.minCoeff() >= lo - tol && F.maxCoeff() <= hi + tol,
                "maximum principle violated by the discrete solution");
    }
    return F;
}

/// Green's function with a discrete Dirac load at an interior node: the load
/// is 1/cellvol so it integrates to one, which makes G comparable across
/// resolutions. Positivity (the discrete maximum principle certificate) is
/// required; for symmetric systems subcriticality is additionally certified
/// by the smallest weighted Dirichlet eigenvalue.
inline Vec green_function(const GridSystem& sys, int pole, bool check_subcritical = false) {
    require(pole >= 0 && pole < sys.size(), "pole must be an interior node");
    if (check_subcritical && sys.matrix_symmetric) {
        const auto eig = weighted_smallest_eigenpair(sys, 1e-8);
        require(eig.value > 0, "system is not subcritical (Dirichlet eigenvalue <= 0)");
    }
    Vec rhs = Vec::Zero(sys.size());
    rhs[pole] = 1.0;
    Vec G = sys.solve(rhs);
    const double floor = G.maxCoeff() * (-1e-10);
    require(G.minCoeff() >= floor, "Green's function lost positivity (non-subcritical system?)");
    for (Eigen::Index i = 0; i < G.size(); ++i) G[i] = std::max(G[i], 0.0);
    return G;
}

struct MartinSequence {
    std::vector<Vec> kernels;       // normalized G(., p_n) / G(p0, p_n)
    Vec limit;                      // Richardson-extrapolated limit of the last two
    std::vector<double> cauchy_sup; // sup over the compact set of |K_{n+1} - K_n|
};

/// Green's-function ratios along a pole sequence approaching the boundary.
/// Each kernel is normalized to one at the basepoint; Cauchy differences on
/// the compact set |x| <= compact_radius are reported as convergence
/// evidence. The stored limit extrapolates in the pole-to-boundary gap: the
/// last three kernels combine with Vandermonde weights that cancel the linear
/// and quadratic error terms (the last two when only two poles are given).
/// pole_gap holds each pole's distance to the boundary; when empty, a
/// geometrically halving gap is assumed.
inline MartinSequence martin_sequence(const GridSystem& sys, int basepoint,
                                      const std::vector<int>& poles, double compact_radius = 0.5,
                                      std::vector<double> pole_gap = {}) {
    require(poles.size() >= 2, "need at least two poles");
    MartinSequence seq;
    for (int p : poles) {
        Vec G = green_function(sys, p);
        const double norm0 = G[basepoint];
        require(norm0 > 0, "normalizer G(p0, p_n) must be positive");
        seq.kernels.push_back(G / norm0);
    }
    for (std::size_t k = 0; k + 1 < seq.kernels.size(); ++k) {
        double sup = 0;
        for (Eigen::Index i = 0; i < seq.kernels[k].size(); ++i) {
            const auto& p = sys.pos[static_cast<std::size_t>(i)];
            if (p[0] * p[0] + p[1] * p[1] <= compact_radius * compact_radius)
                sup = std::max(sup, std::abs(seq.kernels[k + 1][i] - seq.kernels[k][i]));
        }
        seq.cauchy_sup.push_back(sup);
    }
    if (pole_gap.empty()) {
        pole_gap.resize(poles.size());
        for (std::size_t k = 0; k < poles.size(); ++k)
            pole_gap[k] = std::pow(0.5, static_cast<double>(k));
    }
    require(pole_gap.size() == poles.size(), "pole gap list size mismatch");
    const std::size_t tail = std::min<std::size_t>(3, seq.kernels.size());
    const std::size_t base = seq.kernels.size() - tail;
    Eigen::MatrixXd V(tail, tail);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tail));
    rhs[0] = 1;
    for (std::size_t r = 0; r < tail; ++r)
        for (std::size_t c = 0; c < tail; ++c)
            V(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                std::pow(pole_gap[base + c], static_cast<double>(r));
    const Eigen::VectorXd w = V.fullPivLu().solve(rhs);
    seq.limit = Vec::Zero(seq.kernels[0].size());
    for (std::size_t c = 0; c < tail; ++c)
        seq.limit += w[static_cast<Eigen::Index>(c)] * seq.kernels[base + c];
    return seq;
}

/// Finite non-negative boundary measure: sample points with weights, supports
/// on the Dirichlet or singular segments.
struct DiscreteMeasure {
    struct Atom {
        std::array<double, 2> pos{0, 0};
        double weight = 0;
    };
    std::vector<Atom> atoms;

    double total_mass() const {
        double m = 0;
        for (const auto& a : atoms) {
            require(a.weight >= 0 && std::isfinite(a.weight),
                    "measure weights must be non-negative and finite");
            m += a.weight;
        }
        return m;
    }
    std::vector<double> weights() const {
        std::vector<double> w;
        w.reserve(atoms.size());
        for (const auto& a : atoms) w.push_back(a.weight);
        return w;
    }
};

/// Martin integral of a discrete boundary measure: u = sum_j mu_j k(.; y_j).
inline Vec martin_integral(const std::vector<Vec>& kernels, const std::vector<double>& weights) {
    require(kernels.size() == weights.size(), "kernel/measure support mismatch");
    require(!kernels.empty(), "empty measure");
    Vec u = Vec::Zero(kernels[0].size());
    for (std::size_t j = 0; j < kernels.size(); ++j) {
        require(weights[j] >= 0, "measure weights must be non-negative");
        u += weights[j] * kernels[j];
    }
    return u;
}

inline Vec martin_integral(const std::vector<Vec>& kernels, const DiscreteMeasure& mu) {
    mu.total_mass();  // validates weights
    return martin_integral(kernels, mu.weights());
}

/// Boundary Harnack ratio sup_{x,y in U} (u(x)/v(x)) * (v(y)/u(y)). Finite
/// whenever both functions are positive on U; symmetric in (u, v) and equal
/// to 1 when u = v.
inline double bhp_ratio(const GridSystem& sys, const Vec& u, const Vec& v,
                        const RegionPredicate& inner) {
    double max_uv = 0, max_vu = 0;
    std::size_t used = 0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const auto& p = sys.pos[static_cast<std::size_t>(i)];
        if (!inner(p[0], p[1])) continue;
        require(v[i] > 0 && u[i] > 0, "bhp_ratio needs positive solutions on the inner region");
        max_uv = std::max(max_uv, u[i] / v[i]);
        max_vu = std::max(max_vu, v[i] / u[i]);
        ++used;
    }
    require(used > 0, "inner region contains no nodes");
    return max_uv * max_vu;
}

struct OscillationReport {
    std::vector<double> osc;
    std::vector<double> level_harnack;  // Harnack constant of the auxiliary pairs per step
    double c_star = 1;                  // max over levels
    double fitted_rate = 0;             // geometric mean of successive osc ratios
    double predicted_rate = 0;          // (C*-1)/(C*+1)
};

inline double oscillation_predicted_rate(double c_star) { return (c_star - 1) / (c_star + 1); }

/// Oscillation of u/v along a nested chain of node sets shrinking toward a
/// boundary point. The decay argument compares the auxiliary solutions
/// sup(k) v - u and u - inf(k) v across consecutive levels; the measured
/// Harnack constant C* of those pairs makes osc(k+1) <= (C*-1)/(C*+1) osc(k)
/// a sharp, checkable bound on the fitted rate.
inline OscillationReport oscillation_decay(const GridSystem& sys, const Vec& u, const Vec& v,
                                           const std::vector<std::vector<int>>& chain) {
    (void)sys;
    require(chain.size() >= 3, "oscillation chain too short (< 3 levels)");
    OscillationReport rep;
    std::vector<double> sup_k, inf_k;
    for (const auto& level : chain) {
        require(!level.empty(), "empty chain level");
        double lo = kInf, hi = -kInf;
        for (int i : level) {
            require(v[i] > 0, "oscillation quotient undefined (v <= 0)");
            const double q = u[i] / v[i];
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        sup_k.push_back(hi);
        inf_k.push_back(lo);
        rep.osc.push_back(hi - lo);
    }
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        double ck = 1;
        for (double sign : {+1.0, -1.0}) {
            // w/v = sup(k) - u/v resp. u/v - inf(k), both positive on N_k
            const double ref = sign > 0 ? sup_k[k] : inf_k[k];
            double hi = -kInf, lo = kInf;
            for (int i : chain[k + 1]) {
                const double q = sign * (ref - u[i] / v[i]);
                hi = std::max(hi, q);
                lo = std::min(lo, q);
            }
            ck = lo > 0 ? std::max(ck, hi / lo) : kInf;
        }
        rep.level_harnack.push_back(ck);
        rep.c_star = std::max(rep.c_star, ck);
    }
    rep.predicted_rate = oscillation_predicted_rate(rep.c_star);
    double acc = 0;
    int cnt = 0;
    for (std::size_t k = 0; k + 1 < rep.osc.size(); ++k) {
        if (rep.osc[k] > 0 && rep.osc[k + 1] > 0) {
            acc += std::log(rep.osc[k + 1] / rep.osc[k]);
            ++cnt;
        }
    }
    rep.fitted_rate = cnt > 0 ? std::exp(acc / cnt) : 0.0;
    return rep;
}

struct PrincipalEigenvalue {
    std::vector<double> lambda_m;
    double lambda_limit = 0;
    Vec ground_state;           // eigenfunction on the last exhaustion element
    bool strictly_decreasing = true;
};

/// First Dirichlet eigenvalues of the weighted problem along a nested
/// exhaustion, with the generalized principal eigenvalue extrapolated from a
/// linear fit in the supplied abscissae (when given; otherwise the last
/// value). The eigenvalue sequence must be non-increasing; strict decrease is
/// reported.
inline PrincipalEigenvalue weighted_principal_eigenvalue(
    const std::vector<GridSystem>& exhaustion, const std::vector<double>* extrap_x = nullptr) {
    require(!exhaustion.empty(), "empty exhaustion");
    PrincipalEigenvalue out;
    for (const auto& sys : exhaustion) {
        const auto eig = weighted_smallest_eigenpair(sys);
        if (!out.lambda_m.empty() && eig.value >= out.lambda_m.back())
            out.strictly_decreasing = false;
        out.lambda_m.push_back(eig.value);
        if (&sys == &exhaustion.back()) out.ground_state = eig.vector;
    }
    if (extrap_x && extrap_x->size() == out.lambda_m.size() && out.lambda_m.size() >= 2) {
        // least-squares line lambda = a + b x, intercept a is the limit
        const std::size_t n = out.lambda_m.size();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sx += (*extrap_x)[i];
            sy += out.lambda_m[i];
            sxx += (*extrap_x)[i] * (*extrap_x)[i];
            sxy += (*extrap_x)[i] * out.lambda_m[i];
        }
        const double denom = n * sxx - sx * sx;
        require(std::abs(denom) > 0, "degenerate extrapolation abscissae");
        const double b = (n * sxy - sx * sy) / denom;
        out.lambda_limit = (sy - b * sx) / n;
    } else {
        out.lambda_limit = out.lambda_m.back();
    }
    return out;
}

enum class Criticality { Subcritical, Critical, Supercritical };

inline const char* to_string(Criticality c) {
    switch (c) {
        case Criticality::Subcritical: return "SUBCRITICAL";
        case Criticality::Critical: return "CRITICAL";
        case Criticality::Supercritical: return "SUPERCRITICAL";
    }
    return "?";
}

struct CriticalityResult {
    Criticality cls = Criticality::Subcritical;
    double lambda_hat = 0;
    double band = 0;
    bool green_positive = false;          // subcritical witness
    double dirichlet_eig_witness = kInf;  // supercritical witness (< 0)
};

// Shifted system L_lambda = L - lambda * weight: subtract lambda from the
// weighted diagonal.
inline GridSystem shift_system(const GridSystem& base, double lambda) {
    GridSystem sys = base;
    SpMat shifted = base.A;
    for (Eigen::Index i = 0; i < shifted.rows(); ++i)
        shifted.coeffRef(i, i) -= lambda * base.vol[static_cast<std::size_t>(i)] *
                                  base.weight[static_cast<std::size_t>(i)];
    GridSystem fresh;
    fresh.pos = base.pos;
    fresh.vol = base.vol;
    fresh.weight = base.weight;
    fresh.A = std::move(shifted);
    fresh.B = base.B;
    fresh.hits = base.hits;
    fresh.matrix_symmetric = base.matrix_symmetric;
    fresh.constants_solve = false;
    fresh.h = base.h;
    fresh.resolution = base.resolution;
    return fresh;
}

/// Sign-of-(lambda_hat - lambda) trichotomy with a tolerance band mapped to
/// CRITICAL. The subcritical branch is certified by a positive Green's
/// function of the shifted operator on the largest exhaustion element, the
/// supercritical branch by its negative first Dirichlet eigenvalue.
inline CriticalityResult criticality_classify(const GridSystem& largest_element, double lambda,
                                              double lambda_hat, double band = 1e-3) {
    require(std::isfinite(lambda_hat), "principal eigenvalue estimate unavailable");
    CriticalityResult res;
    res.lambda_hat = lambda_hat;
    res.band = band;
    if (std::abs(lambda - lambda_hat) <= band) {
        res.cls = Criticality::Critical;
        return res;
    }
    const GridSystem shifted = shift_system(largest_element, lambda);
    if (lambda < lambda_hat) {
        res.cls = Criticality::Subcritical;
        const Vec G = green_function(shifted, static_cast<int>(shifted.size() / 2));
        res.green_positive = G.minCoeff() >= 0 && G.maxCoeff() > 0;
        require(res.green_positive, "subcritical classification without positive Green's function");
    } else {
        res.cls = Criticality::Supercritical;
        const auto eig = weighted_smallest_eigenpair(shifted, 1e-9);
        res.dirichlet_eig_witness = eig.value;
        require(eig.value < 0,
                "supercritical classification needs a negative Dirichlet eigenvalue witness");
    }
    return res;
}

/// Minimal-growth comparison sup_U G(p0,.)/v for a positive solution v.
inline double minimal_growth_check(const GridSystem& sys, const Vec& G, const Vec& v,
                                   const RegionPredicate& region) {
    double c = 0;
    std::size_t used = 0;
    for (Eigen::Index i = 0; i < G.size(); ++i) {
        const auto& p = sys.pos[static_cast<std::size_t>(i)];
        if (!region(p[0], p[1])) continue;
        require(v[i] > 0, "comparison solution vanishes inside the region");
        c = std::max(c, G[i] / v[i]);
        ++used;
    }
    require(used > 0, "region contains no nodes");
    return c;
}

// --- helpers for the model-domain experiments ---

/// Pole sequence marching radially toward the boundary direction theta:
/// radii 1 - 2^{-k} for k = k0 .. k0+count-1, snapped to grid nodes. The
/// second member reports each snapped pole's actual gap to the unit circle,
/// which feeds the kernel extrapolation.
struct PoleSequence {
    std::vector<int> nodes;
    std::vector<double> gap;
};

inline PoleSequence radial_pole_sequence(const GridSystem& sys, double theta, int k0, int count,
                                         double angle_offset = 0) {
    PoleSequence seq;
    for (int k = k0; k < k0 + count; ++k) {
        const double r = 1.0 - std::pow(2.0, -k);
        const double th = theta + angle_offset * std::pow(2.0, -k);
        const int node = sys.nearest_node(r * std::cos(th), r * std::sin(th));
        seq.nodes.push_back(node);
        const auto& p = sys.pos[static_cast<std::size_t>(node)];
        seq.gap.push_back(1.0 - std::hypot(p[0], p[1]));
    }
    return seq;
}

/// Nested half-disk neighborhoods of a diameter point for oscillation chains.
inline std::vector<std::vector<int>> nested_half_disk_chain(const GridSystem& sys, double cx,
                                                            double r0, double factor,
                                                            int levels) {
    std::vector<std::vector<int>> chain;
    double r = r0;
    for (int k = 0; k < levels; ++k) {
        std::vector<int> level;
        for (std::size_t i = 0; i < sys.pos.size(); ++i) {
            const double dx = sys.pos[i][0] - cx, dy = sys.pos[i][1];
            if (dx * dx + dy * dy <= r * r) level.push_back(static_cast<int>(i));
        }
        require(!level.empty(), "oscillation chain level has no nodes (radius too small)");
        chain.push_back(std::move(level));
        r *= factor;
    }
    return chain;
}

}  // namespace singlab
