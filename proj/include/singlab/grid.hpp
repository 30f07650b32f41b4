#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <mutex>

#include "singlab/density.hpp"
#include "singlab/sampled_space.hpp"

namespace singlab {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

enum class BoundaryKind { DirichletZero, Singular };

struct BoundaryHit {
    std::array<double, 2> pos{0, 0};
    BoundaryKind kind = BoundaryKind::DirichletZero;
};

/// Discretized second-order elliptic system. A is the cell-volume-scaled
/// operator on the unknown nodes and B couples them to boundary hits:
///   (A u)_i + (B f)_i = vol_i * (L u)(node i)
/// for boundary data f sampled at the hits. Factorizations are cached behind
/// a shared handle, so repeated solves against the same matrix are cheap.
class GridSystem {
  public:
    std::vector<std::array<double, 2>> pos;
    std::vector<double> vol;
    std::vector<double> weight;  // w per node (rho^2 for weighted problems, else 1)
    SpMat A;
    SpMat B;
    std::vector<BoundaryHit> hits;
    bool matrix_symmetric = false;
    bool constants_solve = false;  // c == 0: constants solve L v = 0
    double h = 0;
    int resolution = 0;

    Eigen::Index size() const { return A.rows(); }

    // Serialized: the factorization cache is shared between copies and solves
    // from concurrent workers take the same lock.
    Vec solve(const Vec& rhs) const {
        require(rhs.size() == A.rows(), "rhs size mismatch");
        const std::lock_guard<std::mutex> lock(*solve_mutex_);
        if (matrix_symmetric) {
            if (!ldlt_) {
                ldlt_ = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
                ldlt_->compute(A);
                require(ldlt_->info() == Eigen::Success, "singular linear system (LDLT)");
            }
            Vec x = ldlt_->solve(rhs);
            require(ldlt_->info() == Eigen::Success, "linear solve failed");
            return x;
        }
        if (!lu_) {
            lu_ = std::make_shared<Eigen::SparseLU<SpMat>>();
            lu_->analyzePattern(A);
            lu_->factorize(A);
            require(lu_->info() == Eigen::Success, "singular linear system (LU)");
        }
        Vec x = lu_->solve(rhs);
        require(lu_->info() == Eigen::Success, "linear solve failed");
        return x;
    }

    int nearest_node(double x, double y) const {
        int best = 0;
        double bd = kInf;
        for (std::size_t i = 0; i < pos.size(); ++i) {
            const double dx = pos[i][0] - x, dy = pos[i][1] - y;
            const double d = dx * dx + dy * dy;
            if (d < bd) {
                bd = d;
                best = static_cast<int>(i);
            }
        }
        return best;
    }

    // boundary-data vector from a callable on hits
    Vec boundary_vector(const std::function<double(const BoundaryHit&)>& f) const {
        Vec fv(static_cast<Eigen::Index>(hits.size()));
        for (std::size_t k = 0; k < hits.size(); ++k) fv[static_cast<Eigen::Index>(k)] = f(hits[k]);
        return fv;
    }

  private:
    mutable std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt_;
    mutable std::shared_ptr<Eigen::SparseLU<SpMat>> lu_;
    std::shared_ptr<std::mutex> solve_mutex_ = std::make_shared<std::mutex>();
};

/// Nodal values over a system's unknown set.
using GridFunction = Vec;

struct OperatorSpec {
    // isotropic diffusion coefficient a(x,y) > 0; identity by default
    std::function<double(double, double)> coeff_a;
    // zeroth-order coefficient c(x,y); zero by default
    std::function<double(double, double)> coeff_c;
    // per-node weight w(x,y) for weighted eigenproblems; one by default
    std::function<double(double, double)> weight;

    double a_at(double x, double y) const { return coeff_a ? coeff_a(x, y) : 1.0; }
    double c_at(double x, double y) const { return coeff_c ? coeff_c(x, y) : 0.0; }
    double w_at(double x, double y) const { return weight ? weight(x, y) : 1.0; }
    bool has_c() const { return static_cast<bool>(coeff_c); }
};

// Rejects anisotropic coefficient matrices that violate ellipticity.
inline void check_elliptic_2x2(double a11, double a12, double a22, double k_max) {
    const double tr = a11 + a22, det = a11 * a22 - a12 * a12;
    require(tr > 0 && det > 0, "coefficient matrix is not positive definite");
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
    const double lo = tr / 2 - disc, hi = tr / 2 + disc;
    require(hi / lo <= k_max, "ellipticity ratio exceeds bound");
}

namespace detail {

struct Lattice {
    // maps lattice (i,j) to unknown id or -1
    std::vector<int> id;
    int nx = 0, ny = 0;
    double x0 = 0, y0 = 0, h = 0;

    int at(int i, int j) const {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return -1;
        return id[static_cast<std::size_t>(j) * nx + i];
    }
    double x(int i) const { return x0 + h * i; }
    double y(int j) const { return y0 + h * j; }
};

// Shortley-Weller row for one axis: second difference with unequal arms.
// Writes the three coefficients of -a*u'' scaled by cell volume.
struct Arm {
    int nbr = -1;     // unknown id, or -1 when the arm hits the boundary
    int hit = -1;     // hit id when nbr < 0
    double dist = 0;  // arm length
};

inline void emit_axis(std::vector<Triplet>& ta, std::vector<Triplet>& tb, int row, double scale,
                      const Arm& lo, const Arm& hi) {
    const double dl = lo.dist, dr = hi.dist;
    const double c_lo = scale * 2.0 / (dl * (dl + dr));
    const double c_hi = scale * 2.0 / (dr * (dl + dr));
    ta.emplace_back(row, row, scale * 2.0 / (dl * dr));
    if (lo.nbr >= 0)
        ta.emplace_back(row, lo.nbr, -c_lo);
    else
        tb.emplace_back(row, lo.hit, -c_lo);
    if (hi.nbr >= 0)
        ta.emplace_back(row, hi.nbr, -c_hi);
    else
        tb.emplace_back(row, hi.hit, -c_hi);
}

}  // namespace detail

/// Unit disk with a Cartesian Shortley-Weller mesh: boundary arms carry their
/// exact cut distance to the circle, which keeps the scheme second order up
/// to the boundary.
inline GridSystem discretize_disk(int res, const OperatorSpec& op = {}) {
    require(res >= 8, "resolution too coarse for the disk");
    GridSystem sys;
    detail::Lattice lat;
    lat.nx = lat.ny = res + 1;
    lat.h = 2.0 / res;
    lat.x0 = lat.y0 = -1.0;
    sys.h = lat.h;
    sys.resolution = res;
    lat.id.assign(static_cast<std::size_t>(lat.nx) * lat.ny, -1);
    const double R = 1.0;
    for (int j = 0; j < lat.ny; ++j)
        for (int i = 0; i < lat.nx; ++i) {
            const double x = lat.x(i), y = lat.y(j);
            if (x * x + y * y < R * R - 1e-12) {
                lat.id[static_cast<std::size_t>(j) * lat.nx + i] = static_cast<int>(sys.pos.size());
                sys.pos.push_back({x, y});
            }
        }

    std::vector<Triplet> ta, tb;
    const double floor_cut = 1e-8 * lat.h;
    auto arm = [&](double x, double y, double ex, double ey, int nbr) -> detail::Arm {
        detail::Arm a;
        if (nbr >= 0) {
            a.nbr = nbr;
            a.dist = lat.h;
            return a;
        }
        const double pe = x * ex + y * ey;
        const double t = -pe + std::sqrt(std::max(0.0, pe * pe + R * R - (x * x + y * y)));
        BoundaryHit hit;
        hit.pos = {x + t * ex, y + t * ey};
        hit.kind = BoundaryKind::DirichletZero;
        a.hit = static_cast<int>(sys.hits.size());
        sys.hits.push_back(hit);
        a.dist = std::max(t, floor_cut);
        return a;
    };

    for (int j = 0; j < lat.ny; ++j)
        for (int i = 0; i < lat.nx; ++i) {
            const int row = lat.at(i, j);
            if (row < 0) continue;
            const double x = lat.x(i), y = lat.y(j);
            const double volume = lat.h * lat.h;
            sys.vol.push_back(volume);
            sys.weight.push_back(op.w_at(x, y));
            const double a = op.a_at(x, y);
            require(a > 0, "diffusion coefficient must be positive");
            detail::emit_axis(ta, tb, row, a * volume, arm(x, y, -1, 0, lat.at(i - 1, j)),
                              arm(x, y, 1, 0, lat.at(i + 1, j)));
            detail::emit_axis(ta, tb, row, a * volume, arm(x, y, 0, -1, lat.at(i, j - 1)),
                              arm(x, y, 0, 1, lat.at(i, j + 1)));
            const double c = op.c_at(x, y);
            if (c != 0) ta.emplace_back(row, row, c * volume);
        }

    const auto n = static_cast<Eigen::Index>(sys.pos.size());
    sys.A.resize(n, n);
    sys.A.setFromTriplets(ta.begin(), ta.end());
    sys.B.resize(n, static_cast<Eigen::Index>(sys.hits.size()));
    sys.B.setFromTriplets(tb.begin(), tb.end());
    sys.matrix_symmetric = false;  // cut arms break exact symmetry
    sys.constants_solve = !op.has_c();
    return sys;
}

/// Upper half disk; the diameter lies exactly on the y=0 lattice line and is
/// tagged Singular (it is the designated vanishing segment in the boundary
/// experiments), the arc is DirichletZero.
inline GridSystem discretize_half_disk(int res, const OperatorSpec& op = {}) {
    require(res >= 8, "resolution too coarse for the half disk");
    GridSystem sys;
    detail::Lattice lat;
    lat.nx = res + 1;
    lat.ny = res / 2 + 1;
    lat.h = 2.0 / res;
    lat.x0 = -1.0;
    lat.y0 = 0.0;
    sys.h = lat.h;
    sys.resolution = res;
    lat.id.assign(static_cast<std::size_t>(lat.nx) * lat.ny, -1);
    const double R = 1.0;
    for (int j = 1; j < lat.ny; ++j)
        for (int i = 0; i < lat.nx; ++i) {
            const double x = lat.x(i), y = lat.y(j);
            if (x * x + y * y < R * R - 1e-12) {
                lat.id[static_cast<std::size_t>(j) * lat.nx + i] = static_cast<int>(sys.pos.size());
                sys.pos.push_back({x, y});
            }
        }

    std::vector<Triplet> ta, tb;
    const double floor_cut = 1e-8 * lat.h;
    auto arm = [&](double x, double y, double ex, double ey, int nbr) -> detail::Arm {
        detail::Arm a;
        if (nbr >= 0) {
            a.nbr = nbr;
            a.dist = lat.h;
            return a;
        }
        BoundaryHit hit;
        double t;
        if (ey < 0 && y - lat.h <= 1e-12) {  // hits the diameter
            t = y;
            hit.pos = {x, 0.0};
            hit.kind = BoundaryKind::Singular;
        } else {
            const double pe = x * ex + y * ey;
            t = -pe + std::sqrt(std::max(0.0, pe * pe + R * R - (x * x + y * y)));
            hit.pos = {x + t * ex, y + t * ey};
            hit.kind = BoundaryKind::DirichletZero;
        }
        a.hit = static_cast<int>(sys.hits.size());
        sys.hits.push_back(hit);
        a.dist = std::max(t, floor_cut);
        return a;
    };

    for (int j = 1; j < lat.ny; ++j)
        for (int i = 0; i < lat.nx; ++i) {
            const int row = lat.at(i, j);
            if (row < 0) continue;
            const double x = lat.x(i), y = lat.y(j);
            const double volume = lat.h * lat.h;
            sys.vol.push_back(volume);
            sys.weight.push_back(op.w_at(x, y));
            const double a = op.a_at(x, y);
            require(a > 0, "diffusion coefficient must be positive");
            detail::emit_axis(ta, tb, row, a * volume, arm(x, y, -1, 0, lat.at(i - 1, j)),
                              arm(x, y, 1, 0, lat.at(i + 1, j)));
            detail::emit_axis(ta, tb, row, a * volume, arm(x, y, 0, -1, lat.at(i, j - 1)),
                              arm(x, y, 0, 1, lat.at(i, j + 1)));
            const double c = op.c_at(x, y);
            if (c != 0) ta.emplace_back(row, row, c * volume);
        }

    const auto n = static_cast<Eigen::Index>(sys.pos.size());
    sys.A.resize(n, n);
    sys.A.setFromTriplets(ta.begin(), ta.end());
    sys.B.resize(n, static_cast<Eigen::Index>(sys.hits.size()));
    sys.B.setFromTriplets(tb.begin(), tb.end());
    sys.matrix_symmetric = false;
    sys.constants_solve = !op.has_c();
    return sys;
}

/// Polar annulus [r0, r1] x S^1 with uniform spacing in r and theta; the inner
/// rim is tagged Singular, the outer DirichletZero.
inline GridSystem discretize_annulus(int res, double r0, double r1, const OperatorSpec& op = {}) {
    require(0 < r0 && r0 < r1, "invalid radii");
    require(res >= 8, "resolution too coarse for the annulus");
    GridSystem sys;
    const int nr = res, nt = res;
    const double dr = (r1 - r0) / nr;
    const double dth = 2 * M_PI / nt;
    sys.h = std::max(dr, r1 * dth);
    sys.resolution = res;
    auto node = [&](int k, int j) { return (k - 1) * nt + ((j % nt) + nt) % nt; };
    std::vector<Triplet> ta, tb;
    for (int k = 1; k < nr; ++k) {
        const double r = r0 + k * dr;
        for (int j = 0; j < nt; ++j) {
            const double th = j * dth;
            const double x = r * std::cos(th), y = r * std::sin(th);
            sys.pos.push_back({x, y});
            const double volume = r * dr * dth;
            sys.vol.push_back(volume);
            sys.weight.push_back(op.w_at(x, y));
            const int row = node(k, j);
            const double a = op.a_at(x, y);
            // -a (u_rr + u_r / r + u_tt / r^2) + c u
            const double crr = a * volume / (dr * dr);
            const double cr = a * volume / (2 * r * dr);
            const double ctt = a * volume / (r * r * dth * dth);
            ta.emplace_back(row, row, 2 * crr + 2 * ctt + op.c_at(x, y) * volume);
            ta.emplace_back(row, node(k, j + 1), -ctt);
            ta.emplace_back(row, node(k, j - 1), -ctt);
            auto couple = [&](int kk, double coeff, BoundaryKind kind) {
                if (kk >= 1 && kk <= nr - 1) {
                    ta.emplace_back(row, node(kk, j), coeff);
                } else {
                    BoundaryHit hit;
                    const double rr = r0 + kk * dr;
                    hit.pos = {rr * std::cos(th), rr * std::sin(th)};
                    hit.kind = kind;
                    tb.emplace_back(row, static_cast<int>(sys.hits.size()), coeff);
                    sys.hits.push_back(hit);
                }
            };
            couple(k + 1, -(crr + cr), BoundaryKind::DirichletZero);
            couple(k - 1, -(crr - cr), BoundaryKind::Singular);
        }
    }
    const auto n = static_cast<Eigen::Index>(sys.pos.size());
    sys.A.resize(n, n);
    sys.A.setFromTriplets(ta.begin(), ta.end());
    sys.B.resize(n, static_cast<Eigen::Index>(sys.hits.size()));
    sys.B.setFromTriplets(tb.begin(), tb.end());
    sys.matrix_symmetric = false;
    sys.constants_solve = !op.has_c();
    return sys;
}

struct RadialOperator {
    double n_dim = 1;                          // -u'' - (n-1)/r u' + V(r) u
    std::function<double(double)> potential;   // V(r); zero by default
    std::function<double(double)> weight;      // w(r); one by default

    double v_at(double r) const { return potential ? potential(r) : 0.0; }
    double w_at(double r) const { return weight ? weight(r) : 1.0; }
};

/// Radial two-point operator on explicit nodes (central differences; second
/// order on uniform meshes). The r->0 end is tagged Singular.
inline GridSystem discretize_radial(const std::vector<double>& nodes, const RadialOperator& op) {
    require(nodes.size() >= 4, "too few radial nodes");
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        require(nodes[i] > 0 && nodes[i] < nodes[i + 1], "radial nodes must be increasing and positive");
    GridSystem sys;
    const std::size_t n = nodes.size() - 2;  // interior unknowns
    std::vector<Triplet> ta, tb;
    sys.hits.push_back({{nodes.front(), 0}, BoundaryKind::Singular});
    sys.hits.push_back({{nodes.back(), 0}, BoundaryKind::DirichletZero});
    bool symmetric = op.n_dim == 1;
    double h_uniform = nodes[1] - nodes[0];
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        const double r = nodes[i];
        const double hl = nodes[i] - nodes[i - 1], hr = nodes[i + 1] - nodes[i];
        if (std::abs(hl - hr) > 1e-12 * h_uniform) symmetric = false;
        const int row = static_cast<int>(i - 1);
        const double volume = 0.5 * (hl + hr);
        sys.pos.push_back({r, 0});
        sys.vol.push_back(volume);
        sys.weight.push_back(op.w_at(r));
        // second derivative, unequal arms
        const double dl = 2.0 / (hl * (hl + hr)), dc = 2.0 / (hl * hr), dr2 = 2.0 / (hr * (hl + hr));
        // first derivative, central
        const double fl = -hr / (hl * (hl + hr)), fc = (hr - hl) / (hl * hr),
                     fr = hl / (hr * (hl + hr));
        const double drift = (op.n_dim - 1.0) / r;
        auto put = [&](std::size_t idx, double coeff) {
            if (idx == 0)
                tb.emplace_back(row, 0, coeff * volume);
            else if (idx + 1 == nodes.size())
                tb.emplace_back(row, 1, coeff * volume);
            else
                ta.emplace_back(row, static_cast<int>(idx - 1), coeff * volume);
        };
        put(i - 1, -dl - drift * fl);
        put(i, dc - drift * fc + op.v_at(r));
        put(i + 1, -dr2 - drift * fr);
    }
    const auto nn = static_cast<Eigen::Index>(n);
    sys.A.resize(nn, nn);
    sys.A.setFromTriplets(ta.begin(), ta.end());
    sys.B.resize(nn, 2);
    sys.B.setFromTriplets(tb.begin(), tb.end());
    sys.matrix_symmetric = symmetric;
    sys.constants_solve = !op.potential;
    sys.h = h_uniform;
    return sys;
}

/// Symmetric form of -u'' + V u on arbitrary increasing nodes (P1 stiffness
/// plus lumped potential/weight), for weighted eigenproblems.
inline GridSystem discretize_radial_symmetric(const std::vector<double>& nodes,
                                              const std::function<double(double)>& potential,
                                              const std::function<double(double)>& weight) {
    require(nodes.size() >= 4, "too few radial nodes");
    GridSystem sys;
    const std::size_t n = nodes.size() - 2;
    std::vector<Triplet> ta, tb;
    sys.hits.push_back({{nodes.front(), 0}, BoundaryKind::Singular});
    sys.hits.push_back({{nodes.back(), 0}, BoundaryKind::DirichletZero});
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        const double r = nodes[i];
        const double hl = nodes[i] - nodes[i - 1], hr = nodes[i + 1] - nodes[i];
        const int row = static_cast<int>(i - 1);
        const double volume = 0.5 * (hl + hr);
        sys.pos.push_back({r, 0});
        sys.vol.push_back(volume);
        sys.weight.push_back(weight ? weight(r) : 1.0);
        ta.emplace_back(row, row, 1.0 / hl + 1.0 / hr + (potential ? potential(r) : 0.0) * volume);
        if (i >= 2) ta.emplace_back(row, row - 1, -1.0 / hl);
        else tb.emplace_back(row, 0, -1.0 / hl);
        if (i + 2 < nodes.size()) ta.emplace_back(row, row + 1, -1.0 / hr);
        else tb.emplace_back(row, 1, -1.0 / hr);
    }
    const auto nn = static_cast<Eigen::Index>(n);
    sys.A.resize(nn, nn);
    sys.A.setFromTriplets(ta.begin(), ta.end());
    sys.B.resize(nn, 2);
    sys.B.setFromTriplets(tb.begin(), tb.end());
    sys.matrix_symmetric = true;
    sys.constants_solve = !potential;
    sys.h = nodes[1] - nodes[0];
    return sys;
}

/// Graph Laplacian system on the interior of a SampledSpace: stiffness with
/// conductance 1/l per edge, vertex volume = half the incident length, plus an
/// optional per-vertex potential and the density weight rho^2. Marked boundary
/// vertices become DirichletZero hits.
inline GridSystem discretize_graph(const SampledSpace& sp, const DensityField* density,
                                   const std::vector<double>* potential = nullptr,
                                   bool weight_by_density = true) {
    GridSystem sys;
    std::vector<int> id(static_cast<std::size_t>(sp.size()), -1);
    std::vector<int> hit_of(static_cast<std::size_t>(sp.size()), -1);
    for (Index v = 0; v < sp.size(); ++v) {
        if (sp.is_boundary(v)) {
            hit_of[static_cast<std::size_t>(v)] = static_cast<int>(sys.hits.size());
            BoundaryHit hit;
            const auto& c = sp.coords(v);
            hit.pos = {c[0], c.size() > 1 ? c[1] : 0.0};
            hit.kind = BoundaryKind::DirichletZero;
            sys.hits.push_back(hit);
        } else {
            id[static_cast<std::size_t>(v)] = static_cast<int>(sys.pos.size());
            const auto& c = sp.coords(v);
            sys.pos.push_back({c[0], c.size() > 1 ? c[1] : 0.0});
        }
    }
    std::vector<Triplet> ta, tb;
    for (Index v = 0; v < sp.size(); ++v) {
        const int row = id[static_cast<std::size_t>(v)];
        if (row < 0) continue;
        double volume = 0;
        double diag = 0;
        for (const auto& [u, len] : sp.neighbors(v)) {
            volume += 0.5 * len;
            const double cond = 1.0 / len;
            diag += cond;
            const int cu = id[static_cast<std::size_t>(u)];
            if (cu >= 0)
                ta.emplace_back(row, cu, -cond);
            else
                tb.emplace_back(row, hit_of[static_cast<std::size_t>(u)], -cond);
        }
        if (potential) diag += (*potential)[static_cast<std::size_t>(v)] * volume;
        ta.emplace_back(row, row, diag);
        sys.vol.push_back(volume);
        double w = 1.0;
        if (weight_by_density && density) {
            const double rho = density->rho_at(v);
            w = rho * rho;
        }
        sys.weight.push_back(w);
    }
    const auto nn = static_cast<Eigen::Index>(sys.pos.size());
    sys.A.resize(nn, nn);
    sys.A.setFromTriplets(ta.begin(), ta.end());
    sys.B.resize(nn, static_cast<Eigen::Index>(sys.hits.size()));
    sys.B.setFromTriplets(tb.begin(), tb.end());
    sys.matrix_symmetric = true;
    sys.constants_solve = potential == nullptr;
    return sys;
}

/// Measured skin-adaptedness constants of a system against a per-node delta
/// field: the discrete analogues of delta^beta |a|_Cbeta <= k, delta |b| <= k,
/// delta^2 |c| <= k. Coefficients are recovered from the assembled rows.
struct AdaptednessReport {
    double k_ellipticity = 1;
    double k_holder = 0;
    double k_drift = 0;
    double k_zeroth = 0;
};

/// Named grid substrates for the umbrella discretizer; the specific builders
/// remain the primary entry points.
struct GridDomainSpec {
    enum class Kind { Disk, HalfDisk, AnnulusPolar, Radial1D, Imported } kind = Kind::Disk;
    int resolution = 64;
    double r0 = 0.1, r1 = 1.0;          // AnnulusPolar / Radial1D range
    bool geometric = false;              // Radial1D spacing
    RadialOperator radial;               // Radial1D operator data
    const SampledSpace* space = nullptr;         // Imported
    const DensityField* density = nullptr;       // Imported weight source
    const std::vector<double>* potential = nullptr;  // Imported zeroth order
};

inline GridSystem discretize(const GridDomainSpec& dom, const OperatorSpec& op = {}) {
    switch (dom.kind) {
        case GridDomainSpec::Kind::Disk: return discretize_disk(dom.resolution, op);
        case GridDomainSpec::Kind::HalfDisk: return discretize_half_disk(dom.resolution, op);
        case GridDomainSpec::Kind::AnnulusPolar:
            return discretize_annulus(dom.resolution, dom.r0, dom.r1, op);
        case GridDomainSpec::Kind::Radial1D: {
            std::vector<double> nodes(static_cast<std::size_t>(dom.resolution) + 1);
            for (int i = 0; i <= dom.resolution; ++i)
                nodes[static_cast<std::size_t>(i)] =
                    dom.geometric ? dom.r0 * std::pow(dom.r1 / dom.r0, double(i) / dom.resolution)
                                  : dom.r0 + (dom.r1 - dom.r0) * i / dom.resolution;
            return discretize_radial(nodes, dom.radial);
        }
        case GridDomainSpec::Kind::Imported:
            require(dom.space != nullptr, "imported domain needs a SampledSpace");
            return discretize_graph(*dom.space, dom.density, dom.potential);
    }
    fail("unknown grid domain kind");
}

/// Coordinate-format dump (row col value) of the assembled system, interior
/// block first, then the boundary coupling with negative column ids.
inline void dump_system(const GridSystem& sys, std::ostream& os) {
    os.precision(17);
    for (int k = 0; k < sys.A.outerSize(); ++k)
        for (SpMat::InnerIterator it(sys.A, k); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    for (int k = 0; k < sys.B.outerSize(); ++k)
        for (SpMat::InnerIterator it(sys.B, k); it; ++it)
            os << it.row() << ' ' << -(it.col() + 1) << ' ' << it.value() << '\n';
}

/// Node coordinates plus value per row, with a header.
inline void write_grid_function_csv(const GridSystem& sys, const GridFunction& u,
                                    std::ostream& os) {
    require(u.size() == sys.size(), "grid function does not conform to the node set");
    os.precision(12);
    os << "x,y,value\n";
    for (Eigen::Index i = 0; i < u.size(); ++i)
        os << sys.pos[static_cast<std::size_t>(i)][0] << ','
           << sys.pos[static_cast<std::size_t>(i)][1] << ',' << u[i] << '\n';
}

inline AdaptednessReport adaptedness_report(const GridSystem& sys,
                                            const std::function<double(double, double)>& delta,
                                            const std::function<double(double, double)>& a_coeff,
                                            const std::function<double(double, double)>& b_norm,
                                            const std::function<double(double, double)>& c_coeff,
                                            double beta) {
    AdaptednessReport rep;
    double a_min = kInf, a_max = 0;
    for (std::size_t i = 0; i < sys.pos.size(); ++i) {
        const double x = sys.pos[i][0], y = sys.pos[i][1];
        const double dl = delta(x, y);
        const double a = a_coeff(x, y);
        a_min = std::min(a_min, a);
        a_max = std::max(a_max, a);
        rep.k_drift = std::max(rep.k_drift, dl * std::abs(b_norm(x, y)));
        rep.k_zeroth = std::max(rep.k_zeroth, dl * dl * std::abs(c_coeff(x, y)));
        // Hoelder quotient against the nearest other node
        if (i + 1 < sys.pos.size()) {
            const double x2 = sys.pos[i + 1][0], y2 = sys.pos[i + 1][1];
            const double dd = std::hypot(x2 - x, y2 - y);
            if (dd > 0) {
                const double quot = std::abs(a_coeff(x2, y2) - a) / std::pow(dd, beta);
                rep.k_holder = std::max(rep.k_holder, std::pow(dl, beta) * quot);
            }
        }
    }
    rep.k_ellipticity = a_max / std::max(a_min, 1e-300);
    return rep;
}

}  // namespace singlab
