#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "singlab/cone.hpp"
#include "singlab/density.hpp"
#include "singlab/domains.hpp"
#include "singlab/hardy.hpp"

using namespace singlab;

namespace {

// Independent oracle: second fundamental form of the explicit embedding
// (r a u(alpha), r b v(beta)) in R^{p+q+2}, differentiated numerically.
// Richardson-extrapolated central differences keep the truncation error
// around 1e-10 so the 1e-8 comparison is meaningful.

Eigen::VectorXd unit_sphere_point(const Eigen::VectorXd& angles) {
    const int k = static_cast<int>(angles.size());
    Eigen::VectorXd u(k + 1);
    double sprod = 1;
    for (int i = 0; i < k; ++i) {
        u[i] = sprod * std::cos(angles[i]);
        sprod *= std::sin(angles[i]);
    }
    u[k] = sprod;
    return u;
}

Eigen::VectorXd cone_embed(const ConeSpec& c, const Eigen::VectorXd& t) {
    const double r = t[0];
    const Eigen::VectorXd u = unit_sphere_point(t.segment(1, c.p));
    const Eigen::VectorXd v = unit_sphere_point(t.segment(1 + c.p, c.q));
    Eigen::VectorXd x(c.p + c.q + 2);
    x.head(c.p + 1) = r * c.a_link * u;
    x.tail(c.q + 1) = r * c.b_link * v;
    return x;
}

struct ShapeOracle {
    double norm_A_sq;
    double mean_curvature;
};

ShapeOracle shape_operator_oracle(const ConeSpec& c, const Eigen::VectorXd& t0) {
    const int dim = static_cast<int>(t0.size());
    const int amb = c.p + c.q + 2;
    auto f = [&](const Eigen::VectorXd& t) { return cone_embed(c, t); };

    auto first_at = [&](double h) {
        Eigen::MatrixXd J(amb, dim);
        for (int i = 0; i < dim; ++i) {
            Eigen::VectorXd tp = t0, tm = t0;
            tp[i] += h;
            tm[i] -= h;
            J.col(i) = (f(tp) - f(tm)) / (2 * h);
        }
        return J;
    };
    const double h = 5e-3;
    const Eigen::MatrixXd J = (4.0 * first_at(h / 2) - first_at(h)) / 3.0;

    auto second_at = [&](double hh) {
        std::vector<Eigen::MatrixXd> H(static_cast<std::size_t>(dim),
                                       Eigen::MatrixXd(amb, dim));
        // store H[i].col(j) = d^2 x / dt_i dt_j
        for (int i = 0; i < dim; ++i)
            for (int jj = 0; jj < dim; ++jj) {
                if (i == jj) {
                    Eigen::VectorXd tp = t0, tm = t0;
                    tp[i] += hh;
                    tm[i] -= hh;
                    H[static_cast<std::size_t>(i)].col(jj) =
                        (f(tp) - 2 * f(t0) + f(tm)) / (hh * hh);
                } else {
                    Eigen::VectorXd tpp = t0, tpm = t0, tmp = t0, tmm = t0;
                    tpp[i] += hh; tpp[jj] += hh;
                    tpm[i] += hh; tpm[jj] -= hh;
                    tmp[i] -= hh; tmp[jj] += hh;
                    tmm[i] -= hh; tmm[jj] -= hh;
                    H[static_cast<std::size_t>(i)].col(jj) =
                        (f(tpp) - f(tpm) - f(tmp) + f(tmm)) / (4 * hh * hh);
                }
            }
        return H;
    };
    const auto Hh = second_at(h);
    const auto Hh2 = second_at(h / 2);

    // unit normal: orthogonal complement of the tangent space
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(J);
    const Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::VectorXd nu = Q.col(amb - 1);

    const Eigen::MatrixXd g = J.transpose() * J;
    Eigen::MatrixXd hform(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int jj = 0; jj < dim; ++jj) {
            const double dh = Hh[static_cast<std::size_t>(i)].col(jj).dot(nu);
            const double dh2 = Hh2[static_cast<std::size_t>(i)].col(jj).dot(nu);
            hform(i, jj) = (4 * dh2 - dh) / 3.0;
        }
    const Eigen::MatrixXd S = g.ldlt().solve(hform);
    ShapeOracle out;
    out.norm_A_sq = (S * S).trace();
    out.mean_curvature = S.trace();
    return out;
}

Eigen::VectorXd generic_cone_point(const ConeSpec& c, double r) {
    Eigen::VectorXd t(1 + c.p + c.q);
    t[0] = r;
    for (int i = 0; i < c.p + c.q; ++i) t[1 + i] = 0.6 + 0.15 * i;
    return t;
}

}  // namespace

TEST_CASE("lawson cone construction") {
    const auto simons = make_lawson_cone(3, 3);
    CHECK(simons.n == 7);
    CHECK(simons.a_link == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(simons.b_link == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(simons.link_curvature_norm == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
    CHECK(simons.certified_minimizing);

    const auto clifford = make_lawson_cone(1, 1);
    CHECK_FALSE(clifford.certified_minimizing);

    const auto c24 = make_lawson_cone(2, 4);
    CHECK(c24.n == 7);
    CHECK(c24.a_link == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));
    CHECK(c24.b_link == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));

    CHECK_THROWS_AS(make_lawson_cone(0, 3), SinglabError);
    CHECK_THROWS_AS(make_lawson_cone(3, -1), SinglabError);
}

TEST_CASE("link minimality residual vanishes for every built cone") {
    for (int p = 1; p <= 6; ++p)
        for (int q = 1; q <= 6; ++q) {
            const auto c = make_lawson_cone(p, q);
            CHECK(std::abs(c.minimality_residual()) <= 1e-10);
        }
}

TEST_CASE("curvature norm against the embedding oracle") {
    for (auto [p, q] : {std::pair{3, 3}, {2, 4}, {2, 5}, {3, 4}}) {
        const auto c = make_lawson_cone(p, q);
        const auto oracle = shape_operator_oracle(c, generic_cone_point(c, 1.0));
        const double claimed = second_fundamental_norm(c, 1.0);
        CHECK(std::abs(oracle.norm_A_sq - claimed * claimed) <= 1e-8);
        CHECK(std::abs(oracle.mean_curvature) <= 1e-7);  // minimal hypersurface
    }
}

TEST_CASE("curvature homogeneity") {
    const auto c = make_lawson_cone(3, 3);
    CHECK(second_fundamental_norm(c, 1.0) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
    CHECK(second_fundamental_norm(c, 2.0) ==
          doctest::Approx(std::sqrt(6.0) / 2).epsilon(1e-15));
    const auto c24 = make_lawson_cone(2, 4);
    CHECK(second_fundamental_norm(c24, 1.0) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));

    for (double t : {0.5, 2.0, 10.0}) {
        for (double r : {0.3, 1.0, 4.2}) {
            CHECK(second_fundamental_norm(c, t * r) ==
                  doctest::Approx(second_fundamental_norm(c, r) / t).epsilon(1e-12));
            CHECK(scalar_curvature(c, t * r) ==
                  doctest::Approx(scalar_curvature(c, r) / (t * t)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(second_fundamental_norm(c, 0.0), SinglabError);
    CHECK_THROWS_AS(scalar_curvature(c, -1.0), SinglabError);
}

TEST_CASE("scalar curvature values") {
    const auto simons = make_lawson_cone(3, 3);
    CHECK(scalar_curvature(simons, 1.0) == doctest::Approx(-6.0).epsilon(1e-15));
    CHECK(scalar_curvature(simons, 2.0) == doctest::Approx(-1.5).epsilon(1e-15));
    const auto c34 = make_lawson_cone(3, 4);
    CHECK(scalar_curvature(c34, 1.0) == doctest::Approx(-7.0).epsilon(1e-15));
}

TEST_CASE("model skin density on the cone") {
    const auto c = make_lawson_cone(3, 3);
    const auto rule = skin_density_on_cone(c, 1.0);
    CHECK(rule.a_cross == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
    CHECK(rule.rho(1.0) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
    CHECK(rule.rho(2.0) == doctest::Approx(std::sqrt(6.0) / 2).epsilon(1e-15));

    const auto big = skin_density_on_cone(c, 10.0);
    CHECK(big.rho(1.0) == doctest::Approx(10.0).epsilon(1e-15));

    // homogeneity rho(t x) * t = rho(x)
    for (double t : {0.5, 2.0, 10.0})
        CHECK(rule.rho(t * 1.7) * t == doctest::Approx(rule.rho(1.7)).epsilon(1e-12));

    // wrapping axiom rho >= |A| pointwise, any lambda
    for (double lam : {0.2, 1.0, 5.0}) {
        const auto rl = skin_density_on_cone(c, lam);
        for (double r : {0.01, 0.5, 1.0, 30.0})
            CHECK(rl.rho(r) >= second_fundamental_norm(c, r));
    }
    CHECK_THROWS_AS(skin_density_on_cone(c, 0.0), SinglabError);
}

TEST_CASE("pencil membership is a scale-invariant aperture test") {
    const auto c = make_lawson_cone(3, 3);
    const auto rule = skin_density_on_cone(c, 1.0);
    const PencilSpec narrow{1.0 / (2 * std::sqrt(6.0))};
    const PencilSpec wide{1.0};
    for (double r : {0.05, 0.7, 1.0, 13.0}) {
        const ConePoint x{r, 0.3, 1.2};
        CHECK(pencil_contains(c, rule, x, narrow));
        CHECK_FALSE(pencil_contains(c, rule, x, wide));
        for (double t : {0.5, 2.0, 10.0}) {
            const ConePoint tx{t * r, 0.3, 1.2};
            CHECK(pencil_contains(c, rule, tx, narrow) == pencil_contains(c, rule, x, narrow));
        }
    }
}

TEST_CASE("exported cone graph edge lengths and structure") {
    const auto c = make_lawson_cone(3, 3);
    const auto sp = export_cone_graph(c, 0.25, 4.0, 4, 8);
    sp.validate();
    CHECK(sp.sigma_samples().size() == 1);

    const double h = std::pow(4.0 / 0.25, 0.25);  // radial growth factor
    const double dtheta = 2 * M_PI / 8;
    double worst_radial = 0, worst_link = 0;
    for (const auto& e : sp.edges()) {
        const double ru = norm(sp.coords(e.u)), rv = norm(sp.coords(e.v));
        if (std::abs(ru - rv) > 1e-12) {
            const double r = std::min(ru, rv);
            worst_radial = std::max(worst_radial, std::abs(e.length - r * (h - 1)));
        } else {
            const double expect_a = ru * c.a_link * dtheta;
            const double expect_b = ru * c.b_link * dtheta;
            worst_link = std::max(
                worst_link, std::min(std::abs(e.length - expect_a), std::abs(e.length - expect_b)));
        }
    }
    CHECK(worst_radial <= 1e-12);
    CHECK(worst_link <= 1e-12);

    // a vertex exactly at radius 1 carries rho = sqrt(6)
    const auto curv = cone_curvature_field(c, sp);
    const auto d = attach_skin_model(sp, curv, 1.0);
    const Index v1 = sp.nearest_vertex({c.a_link, 0, c.b_link, 0});
    CHECK(norm(sp.coords(v1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.rho_at(v1) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));

    CHECK_THROWS_AS(export_cone_graph(c, 2.0, 1.0, 4, 8), SinglabError);
    CHECK_THROWS_AS(export_cone_graph(c, 1.0, 2.0, 1, 8), SinglabError);
}

TEST_CASE("hardy constant: 1d model approaches 1/4") {
    const auto sp = radial_interval_space(1e-14, 1.0, 1000, true);
    const auto d = attach_inv_dist(sp);
    const auto res = hardy_constant(sp, d, false);
    CHECK(rel_err(res.tau, 0.25) <= 0.05);
    CHECK(res.tau > 0.25);  // Dirichlet truncation approaches from above
}

TEST_CASE("hardy constant: simons cone with base operator is at least one") {
    const auto c = make_lawson_cone(3, 3);
    const auto sp = export_cone_graph(c, 0.05, 20.0, 32, 8);
    const auto curv = cone_curvature_field(c, sp);
    const auto d = attach_skin_model(sp, curv, 1.0);  // rho = |A| here
    const auto res = hardy_constant(sp, d, true, &curv);
    CHECK(res.tau >= 1.0);
    CHECK(res.tau < 3.0);  // 1 + Dirichlet-energy correction, finite
}

TEST_CASE("degenerate densities are rejected") {
    const auto sp = radial_interval_space(0.1, 1.0, 8, false);
    CHECK_THROWS_AS(attach_custom(sp, std::vector<double>(static_cast<std::size_t>(sp.size()), 0.0)),
                    SinglabError);
}
