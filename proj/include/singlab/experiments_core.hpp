#pragma once

#include <json.hpp>

#include "singlab/boundary_rays.hpp"
#include "singlab/domains.hpp"
#include "singlab/hardy.hpp"
#include "singlab/phi_chain.hpp"
#include "singlab/report.hpp"
#include "singlab/sov.hpp"
#include "singlab/uniformity.hpp"

namespace singlab::experiments {

using nlohmann::json;

inline double jget(const json& j, const std::string& key, double dflt) {
    return j.contains(key) ? j.at(key).get<double>() : dflt;
}
inline int jgeti(const json& j, const std::string& key, int dflt) {
    return j.contains(key) ? j.at(key).get<int>() : dflt;
}
inline std::string jgets(const json& j, const std::string& key, const std::string& dflt) {
    return j.contains(key) ? j.at(key).get<std::string>() : dflt;
}
inline std::uint64_t jseed(const json& j) {
    return j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 1;
}
inline std::vector<int> jresolutions(const json& j, std::vector<int> dflt) {
    if (j.contains("resolutions")) return j.at("resolutions").get<std::vector<int>>();
    if (j.contains("resolution")) return {j.at("resolution").get<int>()};
    return dflt;
}

struct ConeGraphConfig {
    int p = 3, q = 3;
    double r_min = 0.05, r_max = 20.0;
    int radial_steps = 64, link_steps = 12;
    double lambda = 1.0;
};

inline ConeGraphConfig cone_config(const json& j) {
    ConeGraphConfig c;
    c.p = jgeti(j, "p", 3);
    c.q = jgeti(j, "q", 3);
    c.r_min = jget(j, "r_min", 0.05);
    c.r_max = jget(j, "r_max", 20.0);
    c.radial_steps = jgeti(j, "radial_steps", 64);
    c.link_steps = jgeti(j, "link_steps", 12);
    c.lambda = jget(j, "lambda_density", 1.0);
    return c;
}

struct ConeGraph {
    ConeSpec cone;
    SampledSpace space;
    DensityField density;
};

inline ConeGraph make_cone_graph(const ConeGraphConfig& cfg) {
    ConeGraph g;
    g.cone = make_lawson_cone(cfg.p, cfg.q);
    g.space = export_cone_graph(g.cone, cfg.r_min, cfg.r_max, cfg.radial_steps, cfg.link_steps);
    g.density = attach_skin_model(g.space, cone_curvature_field(g.cone, g.space), cfg.lambda);
    return g;
}

// Unit-spacing N x N grid with constant density; hyperbolicity control case.
inline SampledSpace euclidean_grid_space(int n) {
    SampledSpace sp;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) sp.add_vertex({double(i), double(j)});
    auto id = [n](int i, int j) { return static_cast<Index>(j * n + i); };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (i + 1 < n) sp.add_edge(id(i, j), id(i + 1, j), 1.0);
            if (j + 1 < n) sp.add_edge(id(i, j), id(i, j + 1), 1.0);
        }
    return sp;
}

// Edge lengths are dyadic rationals, so path sums and Gromov products stay
// exact in floating point and the tree's four-point defect is exactly zero.
inline SampledSpace random_tree_space(int n, std::uint64_t seed) {
    SampledSpace sp;
    Rng rng(seed);
    sp.add_vertex({0.0, 0.0});
    for (int v = 1; v < n; ++v) {
        sp.add_vertex({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        const Index parent = static_cast<Index>(rng.index(static_cast<std::size_t>(v)));
        sp.add_edge(parent, static_cast<Index>(v), (4.0 + double(rng.index(13))) / 8.0);
    }
    return sp;
}

// --- experiment: delta-estimate ---
inline ExperimentResult run_delta_estimate(const json& j) {
    ExperimentResult r;
    r.id = "delta-estimate";
    r.plot_kind = "delta_vs_resolution";
    const std::string domain = jgets(j, "domain", "punctured-disk");
    const std::uint64_t seed = jseed(j);
    const std::size_t quads = static_cast<std::size_t>(jgeti(j, "quad_samples", 4000));
    const std::size_t tris = static_cast<std::size_t>(jgeti(j, "tri_samples", 12));

    if (domain == "tree") {
        auto sp = random_tree_space(jgeti(j, "size", 24), seed);
        auto d = attach_custom(sp, std::vector<double>(static_cast<std::size_t>(sp.size()), 1.0));
        DeltaOptions opt;
        opt.exhaustive_threshold = sp.size();  // trees are small: exhaust
        auto rep = estimate_delta(sp, d, quads, 0, seed, opt);
        r.scalar("delta_fourpoint", rep.delta_fourpoint);
        r.flag("tree_delta_zero", rep.delta_fourpoint == 0.0);
        return r;
    }
    if (domain == "euclid-grid") {
        double prev = -1;
        bool grows = true;
        for (int n : {jgeti(j, "size_small", 4), jgeti(j, "size_large", 8)}) {
            auto sp = euclidean_grid_space(n);
            auto d =
                attach_custom(sp, std::vector<double>(static_cast<std::size_t>(sp.size()), 1.0));
            DeltaOptions opt;
            opt.exhaustive_threshold = sp.size();
            auto rep = estimate_delta(sp, d, quads, 0, seed, opt);
            r.scalar("delta_fourpoint_n" + std::to_string(n), rep.delta_fourpoint);
            r.plot_xy.push_back({double(n), rep.delta_fourpoint});
            if (prev >= 0 && rep.delta_fourpoint <= prev) grows = false;
            prev = rep.delta_fourpoint;
        }
        r.flag("delta_grows_with_diameter", grows);
        return r;
    }

    const auto resolutions = jresolutions(j, {64, 128, 256});
    const double conv_tol = jget(j, "self_convergence_tol", 0.15);
    // the domain stays fixed across refinements; only the mesh changes
    const double r_inner = jget(j, "r_inner", 0.25 / 256);
    std::vector<double> deltas;
    for (int res : resolutions) {
        SampledSpace sp;
        DensityField d;
        if (domain == "punctured-disk") {
            sp = build_space(DomainSpec::punctured_disk(r_inner), res);
            d = attach_inv_dist(sp);
        } else if (domain == "simons-cone") {
            auto cfg = cone_config(j);
            cfg.radial_steps = res;
            auto g = make_cone_graph(cfg);
            sp = std::move(g.space);
            d = std::move(g.density);
        } else {
            fail("unknown delta-estimate domain '" + domain + "'");
        }
        auto rep = estimate_delta(sp, d, quads, tris, seed);
        const double delta = std::max(rep.delta_fourpoint, rep.delta_thin);
        r.scalar("delta_fourpoint_r" + std::to_string(res), rep.delta_fourpoint);
        r.scalar("delta_thin_r" + std::to_string(res), rep.delta_thin);
        r.plot_xy.push_back({double(res), delta});
        deltas.push_back(delta);
    }
    bool converged = true;
    for (std::size_t k = 0; k + 1 < deltas.size(); ++k)
        if (std::abs(deltas[k + 1] - deltas[k]) > conv_tol * std::abs(deltas[k])) converged = false;
    if (deltas.size() >= 2) r.flag("self_convergence", converged);
    return r;
}

// --- experiment: metric-suite ---
inline ExperimentResult run_metric_suite(const json& j) {
    ExperimentResult r;
    r.id = "metric-suite";
    const std::string domain = jgets(j, "domain", "punctured-disk");
    const int res = jgeti(j, "resolution", 128);
    const std::size_t pairs = static_cast<std::size_t>(jgeti(j, "pairs", 1000));
    const double slack = jget(j, "slack", 0.05);
    const std::uint64_t seed = jseed(j);

    SampledSpace sp;
    DensityField d;
    if (domain == "punctured-disk") {
        sp = build_space(DomainSpec::punctured_disk(), res);
        d = attach_inv_dist(sp);
    } else if (domain == "simons-cone") {
        auto cfg = cone_config(j);
        cfg.radial_steps = res;
        auto g = make_cone_graph(cfg);
        sp = std::move(g.space);
        d = std::move(g.density);
    } else {
        fail("unknown metric-suite domain '" + domain + "'");
    }

    const double a = fit_skin_uniformity(sp, d, static_cast<std::size_t>(jgeti(j, "fit_pairs", 24)),
                                         seed + 100);
    const auto rep = metric_inequality_suite(sp, d, pairs, a, seed);
    r.scalar("a_fitted", a);
    r.scalar("lipschitz_estimate", rep.lipschitz_used);
    r.scalar("pairs_checked", double(rep.pairs_checked));
    r.scalar("worst_slack_lower_vs_k", rep.lower_vs_k.worst_slack);
    r.scalar("worst_slack_k_vs_rho", rep.k_vs_rho.worst_slack);
    r.scalar("worst_slack_upper", rep.upper.worst_slack);
    r.scalar("worst_slack_log_lower", rep.log_lower.worst_slack);
    r.scalar("worst_slack_delta_osc", rep.delta_osc.worst_slack);
    r.flag("lower_vs_k", rep.lower_vs_k.pass(slack));
    r.flag("k_vs_rho", rep.k_vs_rho.pass(slack));
    r.flag("upper", rep.upper.pass(slack));
    r.flag("log_lower", rep.log_lower.pass(slack));
    r.flag("delta_osc", rep.delta_osc.pass(slack));

    if (domain == "punctured-disk") {
        // radial quasi-hyperbolic distance against the closed-form log ratio
        const Index x = sp.nearest_vertex({0.1, 0.0});
        const Index y = sp.nearest_vertex({0.9, 0.0});
        const double r1 = norm(sp.coords(x)), r2 = norm(sp.coords(y));
        const double measured = conformal_distance(sp, d, x, y);
        const double expected = std::log(r2 / r1);
        r.scalar("radial_distance", measured);
        r.scalar("radial_expected", expected);
        r.flag("radial_within_2pct", rel_err(measured, expected) <= jget(j, "radial_tol", 0.02));
    }
    return r;
}

// --- experiment: phi-chain ---
inline ExperimentResult run_phi_chain(const json& j) {
    ExperimentResult r;
    r.id = "phi-chain";
    const std::string kind_s = jgets(j, "kind", "both");
    const int m = jgeti(j, "m", 2);
    const std::uint64_t seed = jseed(j);
    const double tol = jget(j, "tolerance", 0.1);

    // formula spot value: Phi_delta(0) = delta/22
    r.scalar("phi_halfspace_at0_delta1", phi_halfspace(1.0, 0.0));
    r.flag("phi_formula", phi_halfspace(1.0, 0.0) == 1.0 / 22.0);

    // delta measured on a moderate cone graph with the same density model
    ConeGraphConfig probe_cfg = cone_config(j);
    auto probe = make_cone_graph(probe_cfg);
    const auto drep = estimate_delta(probe.space, probe.density,
                                     static_cast<std::size_t>(jgeti(j, "quad_samples", 3000)),
                                     static_cast<std::size_t>(jgeti(j, "tri_samples", 8)), seed);
    const double delta = std::max(drep.delta_fourpoint, drep.delta_thin);
    r.scalar("delta_measured", delta);

    auto run_kind = [&](PhiChainKind kind, const std::string& name) {
        // span needed in d_rho: (m+1) * step * delta_measured; along a radial
        // line d_rho = a_cross * |dln r|, so the log-range follows
        const double step = kind == PhiChainKind::Halfspace ? 22.0 : 4.0;
        const double a_cross = skin_density_on_cone(probe.cone, probe_cfg.lambda).a_cross;
        const double ln_span = 1.15 * (m + 1) * step * delta / a_cross;
        ConeGraphConfig cfg = probe_cfg;
        cfg.r_max = 1.0;
        cfg.r_min = std::exp(-ln_span);
        cfg.radial_steps = std::max(64, static_cast<int>(ln_span / 0.15));
        cfg.link_steps = jgeti(j, "chain_link_steps", 10);
        auto g = make_cone_graph(cfg);
        // tip-directed ray: basepoint on the outer rim, geodesic to the inner rim
        g.space.set_basepoint(g.space.nearest_vertex({cfg.r_max * g.cone.a_link, 0.0,
                                                      cfg.r_max * g.cone.b_link, 0.0}));
        const Index tip_target = g.space.nearest_vertex(
            {cfg.r_min * g.cone.a_link, 0.0, cfg.r_min * g.cone.b_link, 0.0});
        const auto ray = geodesic_between(g.space, g.density, g.space.basepoint(), tip_target);
        const auto chain = build_phi_chain(g.space, g.density, ray, kind, delta, m);
        const auto check = validate_phi_chain(g.space, g.density, chain, tol);
        r.scalar(name + "_levels", double(chain.levels()));
        r.scalar(name + "_worst_separation", check.worst_separation);
        r.scalar(name + "_worst_spacing", check.worst_spacing);
        r.flag(name + "_nesting", check.nesting_ok);
        r.flag(name + "_spacing", check.spacing_ok);
        r.flag(name + "_separation", check.separation_ok);
    };

    if (kind_s == "halfspace" || kind_s == "both") run_kind(PhiChainKind::Halfspace, "halfspace");
    if (kind_s == "gromov" || kind_s == "both") run_kind(PhiChainKind::GromovProduct, "gromov");
    return r;
}

// --- experiment: boundary-rays ---
inline ExperimentResult run_boundary_rays(const json& j) {
    ExperimentResult r;
    r.id = "boundary-rays";
    const std::size_t rays = static_cast<std::size_t>(jgeti(j, "rays", 50));
    auto cfg = cone_config(j);
    auto g = make_cone_graph(cfg);
    const auto cls = classify_cone_rays(g.space, g.density, rays, jseed(j), cfg.r_min, cfg.r_max);
    r.scalar("rays", double(cls.labels.size()));
    r.scalar("tip_directed", double(cls.tip_directed));
    r.scalar("infinity_directed", double(cls.infinity_directed));
    r.flag("all_labeled", cls.tip_directed + cls.infinity_directed == cls.labels.size());
    r.flag("both_classes_nonempty", cls.tip_directed > 0 && cls.infinity_directed > 0);
    return r;
}

// --- experiment: cone-exponents ---
inline LinkPotential parse_potential(const std::string& s) {
    if (s == "jacobi") return LinkPotential::Jacobi;
    if (s == "conformal") return LinkPotential::Conformal;
    if (s == "shifted-conformal") return LinkPotential::ShiftedConformal;
    if (s == "base") return LinkPotential::Base;
    fail("unknown potential '" + s + "'");
}

inline ExperimentResult run_cone_exponents(const json& j) {
    ExperimentResult r;
    r.id = "cone-exponents";
    const auto cone = make_lawson_cone(jgeti(j, "p", 3), jgeti(j, "q", 3));
    const auto pot = parse_potential(jgets(j, "potential", "jacobi"));
    const double lambda = jget(j, "lambda", 0.0);
    const auto op = make_link_operator(cone, pot, lambda, jgeti(j, "m", 0));
    const auto eig = link_principal_eigenvalue(op);
    const auto ind = indicial_exponents(eig.mu, cone.n);
    r.scalar("mu", eig.mu);
    r.scalar("alpha_plus", ind.alpha_plus);
    r.scalar("alpha_minus", ind.alpha_minus);
    r.flag("root_sum_identity",
           std::abs(ind.alpha_plus + ind.alpha_minus + (cone.n - 2)) <= 1e-12);
    r.flag("root_product_identity",
           std::abs(ind.alpha_plus * ind.alpha_minus + eig.mu) <= 1e-12);

    if (jgeti(j, "fit", 1)) {
        const int nodes = jgeti(j, "fit_nodes", 1000);
        const double r_lo = jget(j, "fit_r_lo", 0.5), r_hi = jget(j, "fit_r_hi", 2.0);
        const double fit_tol = jget(j, "fit_tol", 1e-3);
        for (auto [alpha, name] : {std::pair{ind.alpha_plus, std::string("plus")},
                                   std::pair{ind.alpha_minus, std::string("minus")}}) {
            const auto fit = radial_exponent_fit(
                op, r_lo, r_hi, nodes, [alpha](double rr) { return std::pow(rr, alpha); });
            r.scalar("alpha_fit_" + name, fit.alpha);
            r.flag("fit_" + name + "_within_tol", std::abs(fit.alpha - alpha) <= fit_tol);
            r.flag("fit_" + name + "_monomial", fit.monomial);
        }
    }
    return r;
}

// --- experiment: thm12-scan / shifted-scan ---
inline void bounds_to_result(const BoundsSuite& suite, ExperimentResult& r) {
    const auto& b = suite.at_lambda;
    r.scalar("lambda", b.lambda);
    r.scalar("mu", b.mu);
    r.scalar("alpha_plus", b.alpha_plus);
    r.scalar("alpha_minus", b.alpha_minus);
    r.scalar("largest_passing_lambda", suite.largest_passing_lambda);
    r.flag("real_exponents", b.real_exponents);
    r.flag("alpha_plus_negative", b.alpha_plus_negative);
    r.flag("alpha_plus_above_bound", b.alpha_plus_above_bound);
    r.flag("alpha_minus_below_bound", b.alpha_minus_below_bound);
    r.flag("alpha_minus_above_dimension", b.alpha_minus_above_dimension);
    r.flag("mu_above_bound", b.mu_above_bound);
}

inline ExperimentResult run_thm12_scan(const json& j) {
    ExperimentResult r;
    r.id = "thm12-scan";
    const auto cone = make_lawson_cone(jgeti(j, "p", 3), jgeti(j, "q", 3));
    bounds_to_result(theorem12_bounds_check(cone, jget(j, "lambda", 0.01)), r);
    return r;
}

inline ExperimentResult run_shifted_scan(const json& j) {
    ExperimentResult r;
    r.id = "shifted-scan";
    const auto cone = make_lawson_cone(jgeti(j, "p", 3), jgeti(j, "q", 3));
    bounds_to_result(shifted_bounds_check(cone, jgeti(j, "m", cone.n), jget(j, "lambda", 0.01)),
                     r);
    return r;
}

// --- experiment: scaling-attractor ---
inline ExperimentResult run_scaling_attractor(const json& j) {
    ExperimentResult r;
    r.id = "scaling-attractor";
    const auto cone = make_lawson_cone(jgeti(j, "p", 3), jgeti(j, "q", 3));
    const auto op = make_link_operator(cone, parse_potential(jgets(j, "potential", "jacobi")),
                                       jget(j, "lambda", 0.0), jgeti(j, "m", 0));
    const auto ind = indicial_exponents(link_principal_eigenvalue(op).mu, cone.n);
    r.scalar("alpha_plus", ind.alpha_plus);
    r.scalar("alpha_minus", ind.alpha_minus);

    SolutionRecord mixed{{{0.5, ind.alpha_minus}, {0.5, ind.alpha_plus}}};

    // group law on normalized records, exact coefficient arithmetic
    const double e1 = 3.7, e2 = 0.21;
    const auto lhs = scaling_action(scaling_action(mixed, e2), e1);
    const auto rhs = scaling_action(mixed, e1 * e2);
    double group_err = 0;
    for (std::size_t i = 0; i < lhs.terms.size(); ++i)
        group_err = std::max(group_err, std::abs(lhs.terms[i].coeff - rhs.terms[i].coeff));
    r.scalar("group_law_error", group_err);
    r.flag("group_law", group_err <= 1e-12);

    // pure records are fixed points
    SolutionRecord plus{{{1.0, ind.alpha_plus}}};
    const auto moved = scaling_action(plus, 17.0);
    r.flag("plus_fixed_point", std::abs(moved.terms[0].coeff - 1.0) <= 1e-14);

    std::vector<double> to_zero, to_inf;
    for (int k = 1; k <= 8; ++k) {
        to_zero.push_back(std::pow(10.0, -k));
        to_inf.push_back(std::pow(10.0, k));
    }
    const auto lim0 =
        attractor_limit_check(mixed, ScalingDirection::ToZero, to_zero, ind.alpha_minus,
                              ind.alpha_plus);
    const auto limI =
        attractor_limit_check(mixed, ScalingDirection::ToInfinity, to_inf, ind.alpha_minus,
                              ind.alpha_plus);
    r.flag("to_zero_minus", lim0.label == FixedPointLabel::Minus);
    r.flag("to_infinity_plus", limI.label == FixedPointLabel::Plus);
    r.flag("statement_direction_flagged", lim0.statement_direction_flagged);
    return r;
}

// --- experiment: hardy ---
inline ExperimentResult run_hardy(const json& j) {
    ExperimentResult r;
    r.id = "hardy";
    const std::string model = jgets(j, "model", "interval");
    if (model == "interval") {
        const int nodes = jgeti(j, "nodes", 1000);
        const double a = jget(j, "inner_cutoff", 1e-14);
        auto sp = radial_interval_space(a, 1.0, nodes, true);
        auto d = attach_inv_dist(sp);
        const auto res = hardy_constant(sp, d, false);
        r.scalar("tau", res.tau);
        r.flag("tau_within_5pct_of_quarter", rel_err(res.tau, 0.25) <= jget(j, "tol", 0.05));
    } else if (model == "simons-cone") {
        auto g = make_cone_graph(cone_config(j));
        const auto curv = cone_curvature_field(g.cone, g.space);
        const auto res = hardy_constant(g.space, g.density, true, &curv);
        r.scalar("tau", res.tau);
        r.flag("tau_at_least_one", res.tau >= 1.0);
    } else {
        fail("unknown hardy model '" + model + "'");
    }
    return r;
}

}  // namespace singlab::experiments
