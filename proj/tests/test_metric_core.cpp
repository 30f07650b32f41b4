#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "singlab/boundary_rays.hpp"
#include "singlab/cone.hpp"
#include "singlab/domains.hpp"
#include "singlab/experiments_core.hpp"
#include "singlab/phi_chain.hpp"
#include "singlab/uniformity.hpp"

using namespace singlab;

namespace {

SampledSpace simons_graph(int radial = 24, int link = 8) {
    const auto c = make_lawson_cone(3, 3);
    return export_cone_graph(c, 0.05, 20.0, radial, link);
}

}  // namespace

TEST_CASE("build_space: punctured disk and degenerate inputs") {
    const auto sp = build_space(DomainSpec::punctured_disk(), 4);
    CHECK(sp.interior_connected());
    REQUIRE(sp.sigma_samples().size() == 1);
    CHECK(norm(sp.sigma_samples()[0]) == 0.0);

    CHECK_THROWS_AS(build_space(DomainSpec::punctured_disk(), 1), SinglabError);

    std::istringstream one_vertex("V 0 0.0 0.0\n");
    auto loaded = SampledSpace::load(one_vertex);
    CHECK_THROWS_WITH_AS(loaded.validate(), doctest::Contains("degenerate"), SinglabError);

    // two components signal a bad spec
    std::istringstream split("V 0 0 0\nV 1 1 0\nV 2 3 0\nV 3 4 0\nE 0 1 1\nE 2 3 1\n");
    auto split_space = SampledSpace::load(split);
    CHECK_THROWS_WITH_AS(split_space.validate(), doctest::Contains("disconnected"), SinglabError);
}

TEST_CASE("build_space: annulus mesh pitch") {
    const auto sp = build_space(DomainSpec::annulus(0.1, 1.0), 64);
    double max_edge = 0;
    for (const auto& e : sp.edges()) max_edge = std::max(max_edge, e.length);
    CHECK(max_edge <= 2 * M_PI / 64 + 0.9 / 64 + 1e-12);
}

TEST_CASE("text format round trip") {
    auto sp = simons_graph(4, 4);
    std::ostringstream os;
    sp.save(os);
    std::istringstream is(os.str());
    const auto back = SampledSpace::load(is);
    CHECK(back.size() == sp.size());
    CHECK(back.edges().size() == sp.edges().size());
    CHECK(back.sigma_samples().size() == sp.sigma_samples().size());
    CHECK(back.basepoint() == sp.basepoint());
    for (Index v = 0; v < sp.size(); ++v) {
        CHECK(dist(back.coords(v), sp.coords(v)) == 0.0);
        CHECK(back.is_boundary(v) == sp.is_boundary(v));
    }

    std::istringstream bad("V 0 0 0\nV 1 1 0\nE 0 1 1.0\nW 2\n");
    CHECK_THROWS_WITH_AS(SampledSpace::load(bad), doctest::Contains("unknown record"),
                         SinglabError);
}

TEST_CASE("densities: values, invariants, modes") {
    SampledSpace sp;
    sp.add_vertex({0.5, 0.0});
    sp.add_vertex({1.0, 0.0});
    sp.add_edge(0, 1, 0.5);
    sp.add_sigma_sample({0.0, 0.0});

    const auto inv = attach_inv_dist(sp);
    CHECK(inv.rho_at(0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(inv.rho_at(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(inv.delta_at(0) * inv.rho_at(0) == 1.0);
    CHECK(inv.lipschitz_estimate == doctest::Approx(1.0).epsilon(1e-12));

    // skin model dominates both |A| and lambda/dist
    const auto skin = attach_skin_model(sp, {3.0, 0.5}, 1.0);
    CHECK(skin.rho_at(0) == doctest::Approx(3.0));   // |A| wins
    CHECK(skin.rho_at(1) == doctest::Approx(1.0));   // 1/dist wins
    CHECK(skin.rho_at(0) >= 3.0);

    CHECK(hybrid_delta(1.0, 0.1, 0.3) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(hybrid_delta(1.0, 0.5, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("hybrid density on a marked-boundary graph") {
    auto sp = radial_interval_space(0.1, 1.0, 10, false);
    const auto base = attach_inv_dist(sp);
    const auto hyb = attach_hybrid(sp, base, 1.0);
    const auto bdry = sp.boundary_vertices();
    const auto bd = base_distance_map(sp, bdry);
    const double half_cell = 0.5 * 0.09;  // uniform spacing on [0.1, 1] / 10
    for (Index v = 0; v < sp.size(); ++v) {
        const double dist_bdry = sp.is_boundary(v) ? half_cell : bd.at(v);
        const double expect = std::min(dist_bdry, base.delta_at(v));
        CHECK(hyb.delta_at(v) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("conformal distance: identity, symmetry, triangle inequality") {
    const auto sp = build_space(DomainSpec::punctured_disk(), 24);
    const auto d = attach_inv_dist(sp);
    CHECK(conformal_distance(sp, d, 5, 5) == 0.0);

    Rng rng(3);
    for (int k = 0; k < 12; ++k) {
        const Index x = static_cast<Index>(rng.index(static_cast<std::size_t>(sp.size())));
        const Index y = static_cast<Index>(rng.index(static_cast<std::size_t>(sp.size())));
        const Index z = static_cast<Index>(rng.index(static_cast<std::size_t>(sp.size())));
        const double dxy = conformal_distance(sp, d, x, y);
        const double dyx = conformal_distance(sp, d, y, x);
        CHECK(std::abs(dxy - dyx) <= 1e-12 * std::max(1.0, dxy));
        const double dxz = conformal_distance(sp, d, x, z);
        const double dyz = conformal_distance(sp, d, y, z);
        CHECK(dxy <= dxz + dyz + 1e-12 * std::max(1.0, dxy));
    }
}

TEST_CASE("constant density reduces to the base graph metric") {
    const auto sp = simons_graph(6, 6);
    const auto ones = attach_custom(sp, std::vector<double>(static_cast<std::size_t>(sp.size()), 1.0));
    Rng rng(9);
    for (int k = 0; k < 8; ++k) {
        const Index x = static_cast<Index>(rng.index(static_cast<std::size_t>(sp.size())));
        const Index y = static_cast<Index>(rng.index(static_cast<std::size_t>(sp.size())));
        CHECK(conformal_distance(sp, ones, x, y) ==
              doctest::Approx(base_distance(sp, x, y)).epsilon(1e-13));
    }
}

TEST_CASE("punctured-disk radial distance matches the log-ratio integral") {
    const auto sp = build_space(DomainSpec::punctured_disk(), 128);
    const auto d = attach_inv_dist(sp);
    const Index x = sp.nearest_vertex({0.1, 0.0});
    const Index y = sp.nearest_vertex({0.9, 0.0});
    const double r1 = norm(sp.coords(x)), r2 = norm(sp.coords(y));
    const double measured = conformal_distance(sp, d, x, y);
    CHECK(rel_err(measured, std::log(r2 / r1)) <= 0.01);
    CHECK(rel_err(measured, std::log(9.0)) <= 0.02);
}

TEST_CASE("geodesics: trivial cases and the outward detour") {
    const auto corridor = corridor_space(9);
    const auto ones =
        attach_custom(corridor, std::vector<double>(static_cast<std::size_t>(corridor.size()), 1.0));
    const auto straight = geodesic_between(corridor, ones, 0, 8);
    CHECK(straight.vertices.size() == 9);
    CHECK(straight.length_g() == doctest::Approx(8.0));

    const auto self = geodesic_between(corridor, ones, 3, 3);
    CHECK(self.vertices.size() == 1);
    CHECK(self.length_g() == 0.0);
    CHECK(self.length_rho() == 0.0);

    // the 1/dist density makes the punctured disk a flat cylinder in
    // log-polar coordinates, so the same-radius arc is itself a geodesic:
    // no outward detour, and the geodesic cost equals the arc cost pi
    const auto sp = build_space(DomainSpec::punctured_disk(), 96);
    const auto d = attach_inv_dist(sp);
    const Index x = sp.nearest_vertex({0.5, 0.0});
    const Index y = sp.nearest_vertex({-0.5, 0.0});
    const auto geo = geodesic_between(sp, d, x, y);
    double max_radius = 0, min_radius = kInf;
    for (Index v : geo.vertices) {
        max_radius = std::max(max_radius, norm(sp.coords(v)));
        min_radius = std::min(min_radius, norm(sp.coords(v)));
    }
    CHECK(max_radius <= 0.55);
    CHECK(min_radius >= 0.45);  // never dips toward the puncture

    const double r0 = norm(sp.coords(x));
    const double arc_cost = M_PI * r0 * (1.0 / r0);  // rho = 1/r along the arc
    CHECK(geo.length_rho() <= arc_cost + 1e-9);      // geodesic optimality
    CHECK(geo.length_rho() == doctest::Approx(arc_cost).epsilon(1e-6));
}

TEST_CASE("gromov products") {
    CHECK(gromov_product(3.0, 5.0, 2.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(gromov_product(4.0, 0.0, 4.0) == 0.0);  // z = x

    const auto sp = experiments::random_tree_space(10, 21);
    const auto ones = attach_custom(sp, std::vector<double>(static_cast<std::size_t>(sp.size()), 1.0));
    Rng rng(13);
    for (int k = 0; k < 24; ++k) {
        const Index x = static_cast<Index>(rng.index(10));
        const Index y = static_cast<Index>(rng.index(10));
        const Index z = static_cast<Index>(rng.index(10));
        const double prod = gromov_product(sp, ones, x, y, z);
        CHECK(prod >= -1e-12);
        // (y.y)_x = d(x,y) exactly
        const double dxy = conformal_distance(sp, ones, x, y);
        CHECK(gromov_product(dxy, dxy, 0.0) == dxy);
        // on a tree: distance from x to the geodesic segment [y,z]
        const auto path = geodesic_between(sp, ones, y, z);
        const auto dm = conformal_distance_map(sp, ones, x);
        double to_path = kInf;
        for (Index v : path.vertices) to_path = std::min(to_path, dm.at(v));
        CHECK(prod == doctest::Approx(to_path).epsilon(1e-12));
    }
}

TEST_CASE("four-point defect formula matches the labeling sup") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        // random metric via random points in the plane
        std::array<std::array<double, 2>, 4> pts;
        for (auto& p : pts) p = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        auto dd = [&](int i, int j) {
            return std::hypot(pts[static_cast<std::size_t>(i)][0] - pts[static_cast<std::size_t>(j)][0],
                              pts[static_cast<std::size_t>(i)][1] - pts[static_cast<std::size_t>(j)][1]);
        };
        double by_labels = 0;
        int perm[4] = {0, 1, 2, 3};
        std::sort(perm, perm + 4);
        do {
            const int x = perm[0], y = perm[1], z = perm[2], w = perm[3];
            const double pyw = 0.5 * (dd(x, y) + dd(x, w) - dd(y, w));
            const double pzw = 0.5 * (dd(x, z) + dd(x, w) - dd(z, w));
            const double pyz = 0.5 * (dd(x, y) + dd(x, z) - dd(y, z));
            by_labels = std::max(by_labels, std::min(pyw, pzw) - pyz);
        } while (std::next_permutation(perm, perm + 4));
        const double by_sums =
            detail::fourpoint_defect(dd(0, 1), dd(0, 2), dd(0, 3), dd(1, 2), dd(1, 3), dd(2, 3));
        CHECK(by_sums == doctest::Approx(std::max(0.0, by_labels)).epsilon(1e-12));
    }
}

TEST_CASE("delta estimates: trees vanish, samples grow monotonically") {
    const auto tree = experiments::random_tree_space(24, 7);
    const auto ones =
        attach_custom(tree, std::vector<double>(static_cast<std::size_t>(tree.size()), 1.0));
    DeltaOptions opt;
    opt.exhaustive_threshold = tree.size();
    const auto rep = estimate_delta(tree, ones, 10, 0, 7, opt);
    CHECK(rep.delta_fourpoint == 0.0);
    CHECK(rep.exhaustive);

    const auto sp = build_space(DomainSpec::punctured_disk(), 24);
    const auto d = attach_inv_dist(sp);
    double prev = 0;
    for (std::size_t quads : {50, 200, 800}) {
        const auto r = estimate_delta(sp, d, quads, 0, 42);
        CHECK(r.delta_fourpoint >= prev);
        prev = r.delta_fourpoint;
    }
    double prev_thin = 0;
    for (std::size_t tris : {2, 6, 12}) {
        const auto r = estimate_delta(sp, d, 10, tris, 42);
        CHECK(r.delta_thin >= prev_thin);
        prev_thin = r.delta_thin;
    }
}

TEST_CASE("uniformity checks along explicit curves") {
    const auto sp = build_space(DomainSpec::punctured_disk(), 96);
    const auto d = attach_inv_dist(sp);

    // d_rho geodesic between radii 0.25 and 1 along one ray
    const Index a = sp.nearest_vertex({0.25, 0.0});
    const Index b = sp.nearest_vertex({0.97, 0.0});
    const auto radial = geodesic_between(sp, d, a, b);
    const auto c1 = check_uniform_curve(sp, d, radial, 1.0);
    // along a radial segment the twisted-cone ratio peaks near the midpoint at
    // (b-a)/(a+b) < 1, so both c=1 and c=2 pass
    CHECK(c1.pass);
    CHECK(c1.cone_ratio ==
          doctest::Approx((0.97 - 0.25) / (0.97 + 0.25)).epsilon(0.08));
    CHECK(check_uniform_curve(sp, d, radial, 2.0).pass);

    // degenerate curve passes trivially
    GeodesicPath degenerate;
    degenerate.vertices = {a};
    degenerate.prefix_g = {0};
    degenerate.prefix_rho = {0};
    CHECK(check_uniform_curve(sp, d, degenerate, 1.0).pass);

    // a straight diameter through the near-singular region fails c = 1 with
    // the witness at the minimum-delta vertex
    std::vector<Index> diag;
    const int res = 96;
    for (int k = res; k >= 1; --k) diag.push_back(sp.nearest_vertex({k / double(res), 0.0}));
    for (int k = 1; k <= res; ++k) diag.push_back(sp.nearest_vertex({-k / double(res), 0.0}));
    GeodesicPath diameter;
    double acc_g = 0, acc_rho = 0;
    diameter.vertices.push_back(diag[0]);
    diameter.prefix_g.push_back(0);
    diameter.prefix_rho.push_back(0);
    for (std::size_t i = 1; i < diag.size(); ++i) {
        if (diag[i] == diag[i - 1]) continue;
        const double step = dist(sp.coords(diag[i]), sp.coords(diag[i - 1]));
        acc_g += step;
        acc_rho += 0.5 * (d.rho_at(diag[i]) + d.rho_at(diag[i - 1])) * step;
        diameter.vertices.push_back(diag[i]);
        diameter.prefix_g.push_back(acc_g);
        diameter.prefix_rho.push_back(acc_rho);
    }
    const auto diag_check = check_uniform_curve(sp, d, diameter, 1.0);
    CHECK_FALSE(diag_check.pass);
    CHECK(norm(sp.coords(diag_check.worst_vertex)) <= 0.1);  // near the puncture
}

TEST_CASE("skin uniformity bounds") {
    CHECK(skin_uniformity_b(1.0) == doctest::Approx(64 * std::exp(32.0)).epsilon(1e-12));
    const double bstar = skin_uniformity_b_star(1.0);
    CHECK(std::isfinite(bstar));
    CHECK(skin_uniformity_c_bound(1.0) == doctest::Approx(1 + bstar * 5 + 8).epsilon(1e-12));

    const auto sp = build_space(DomainSpec::punctured_disk(), 48);
    const auto d = attach_inv_dist(sp);
    const Index x = sp.nearest_vertex({0.4, 0.0});
    const Index y = sp.nearest_vertex({-0.4, 0.0});
    const auto geo = geodesic_between(sp, d, x, y);
    const auto res = skin_uniformity_from_geodesic(sp, d, geo, 1.0);
    CHECK(res.bound_holds);
    CHECK(std::isfinite(res.c_measured));
    CHECK(res.c_measured >= 1.0);

    // single-edge geodesic measures exactly one
    GeodesicPath edge = geodesic_between(sp, d, 0, sp.neighbors(0)[0].first);
    const auto single = skin_uniformity_from_geodesic(sp, d, edge, 1.0);
    CHECK(single.c_measured == doctest::Approx(1.0).epsilon(1e-12));

    // a non-geodesic input is rejected by the length audit
    GeodesicPath detour = geo;
    detour.prefix_rho.back() += 1.0;
    CHECK_THROWS_WITH_AS(skin_uniformity_from_geodesic(sp, d, detour, 1.0),
                         doctest::Contains("not a d_rho geodesic"), SinglabError);
}

TEST_CASE("metric inequality suite on the punctured disk") {
    const auto sp = build_space(DomainSpec::punctured_disk(), 64);
    const auto d = attach_inv_dist(sp);
    const double a = fit_skin_uniformity(sp, d, 16, 77);
    CHECK(a >= 1.0);
    const auto rep = metric_inequality_suite(sp, d, 300, a, 77);
    CHECK(rep.pairs_checked >= 300);
    CHECK(rep.lower_vs_k.pass(0.05));
    CHECK(rep.k_vs_rho.pass(0.05));
    CHECK(rep.upper.pass(0.05));
    CHECK(rep.log_lower.pass(0.05));
    CHECK(rep.delta_osc.pass(0.05));

    // spot value: pair near the puncture, lower bound (i) right side
    SampledSpace tiny;
    tiny.add_vertex({0.1, 0.0});
    tiny.add_vertex({0.1 * std::cos(2.0), 0.1 * std::sin(2.0)});
    tiny.add_edge(0, 1, 0.2);
    tiny.add_sigma_sample({0.0, 0.0});
    const auto td = attach_inv_dist(tiny);
    const double k = conformal_distance(tiny, td, 0, 1);
    CHECK(k >= std::log(3.0) - 1e-12);  // (1/2) log((1+2)(1+2)) = log 3
}

TEST_CASE("phi formula records") {
    CHECK(phi_halfspace(1.0, 0.0) == doctest::Approx(1.0 / 22.0).epsilon(1e-15));
    CHECK(phi_halfspace(2.0, 20.0) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(phi_gromov(2.05, 0.0) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(phi_gromov(3.0, 20.0) == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("phi chains on the punctured disk: build, validate, corrupt") {
    // long cusp so the gromov-product chain fits
    const double r_in = std::exp(-40.0);
    SampledSpace sp = detail::polar_mesh(r_in, 1.0, 280, 16, 0, 2 * M_PI, true, false, true);
    sp.add_sigma_sample({0.0, 0.0});
    const auto d = attach_inv_dist(sp);

    const auto drep = estimate_delta(sp, d, 1500, 6, 5);
    const double delta = std::max(drep.delta_fourpoint, drep.delta_thin);
    CHECK(delta > 0);

    sp.set_basepoint(sp.nearest_vertex({1.0, 0.0}));
    const Index tip = sp.nearest_vertex({r_in, 0.0});
    const auto ray = geodesic_between(sp, d, sp.basepoint(), tip);

    const auto chain = build_phi_chain(sp, d, ray, PhiChainKind::GromovProduct, delta, 2);
    REQUIRE(chain.levels() == 2);
    // nesting by construction
    for (Index v : chain.sets[1]) CHECK(detail::contains(chain.sets[0], v));

    const auto ok = validate_phi_chain(sp, d, chain, 0.1);
    CHECK(ok.nesting_ok);
    CHECK(ok.spacing_ok);
    CHECK(ok.separation_ok);

    // corrupted basepoint breaks the spacing window
    PhiChain bad = chain;
    bad.basepoints[1] = ray.back();  // far beyond 1/c0 in scaled distance
    const auto broken = validate_phi_chain(sp, d, bad, 0.1);
    CHECK_FALSE(broken.spacing_ok);

    // removing the shrinkage breaks separation: boundary points sit at
    // distance zero from the "next" set while Phi demands at least Phi(0)
    PhiChain worse = chain;
    worse.sets[1] = worse.sets[0];
    const auto sep = validate_phi_chain(sp, d, worse, 1e-9);
    CHECK_FALSE(sep.separation_ok);
    CHECK(sep.worst_vertex >= 0);

    // too short a ray is refused
    const auto stub = geodesic_between(sp, d, sp.basepoint(), sp.nearest_vertex({0.5, 0.0}));
    CHECK_THROWS_WITH_AS(build_phi_chain(sp, d, stub, PhiChainKind::GromovProduct, delta, 2),
                         doctest::Contains("shorter"), SinglabError);
}

TEST_CASE("boundary rays on the punctured disk") {
    const auto sp = build_space(DomainSpec::punctured_disk(), 48);
    const auto d = attach_inv_dist(sp);
    const auto cls = classify_boundary_rays(sp, d, 40, 3);
    CHECK(cls.rays.size() > 0);
    CHECK(cls.sigma_directed + cls.diverging == cls.rays.size());
    // every ray ends either at the puncture or at the outer boundary ring
    for (const auto& ray : cls.rays) {
        const double r = norm(sp.coords(ray.endpoint));
        const bool at_sigma = r <= 0.02;
        const bool at_outer = r >= 0.9;
        CHECK((at_sigma || at_outer));
    }
    CHECK_THROWS_AS(classify_boundary_rays(sp, d, 0, 3), SinglabError);
}

TEST_CASE("density smoothing") {
    const auto sp = build_space(DomainSpec::punctured_disk(), 32);
    const auto ones = attach_custom(sp, std::vector<double>(static_cast<std::size_t>(sp.size()), 1.0));
    const auto flat = smooth_density(sp, ones, 1.0, 4, 2);
    CHECK(flat.c1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(flat.c2 == doctest::Approx(1.0).epsilon(1e-12));

    const auto d = attach_inv_dist(sp);
    const auto id = smooth_density(sp, d, 0.0, 0);
    for (Index v = 0; v < sp.size(); ++v)
        CHECK(id.density.rho_at(v) == doctest::Approx(d.rho_at(v)).epsilon(1e-15));

    const auto sm = smooth_density(sp, d, 0.5, 8, 4);
    CHECK(sm.c1 > 0);
    CHECK(std::isfinite(sm.c2));
    CHECK(sm.c1 <= 1.0 + 1e-12);
    CHECK(sm.c2 >= 1.0 - 1e-12);
    // SW1 sandwich holds pointwise with the measured constants
    for (Index v = 0; v < sp.size(); ++v) {
        const double ratio = sm.density.delta_at(v) / d.delta_at(v);
        CHECK(ratio >= sm.c1 - 1e-12);
        CHECK(ratio <= sm.c2 + 1e-12);
    }
    CHECK(sm.qi_ratio_min > 0);
    CHECK(std::isfinite(sm.qi_ratio_max));
}
