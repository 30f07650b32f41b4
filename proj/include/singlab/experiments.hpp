#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <set>
#include <thread>

#include "singlab/experiments_lab.hpp"

namespace singlab::experiments {

struct ExperimentKind {
    ExperimentResult (*run)(const json&);
    std::set<std::string> keys;  // accepted manifest keys besides "experiment"
};

inline const std::map<std::string, ExperimentKind>& registry() {
    static const std::set<std::string> common{"seed", "resolution", "resolutions"};
    auto with = [&](std::set<std::string> extra) {
        extra.insert(common.begin(), common.end());
        return extra;
    };
    static const std::map<std::string, ExperimentKind> reg{
        {"delta-estimate",
         {run_delta_estimate,
          with({"domain", "quad_samples", "tri_samples", "self_convergence_tol", "size",
                "size_small", "size_large", "r_inner", "p", "q", "r_min", "r_max",
                "radial_steps", "link_steps", "lambda_density"})}},
        {"metric-suite",
         {run_metric_suite,
          with({"domain", "pairs", "slack", "fit_pairs", "radial_tol", "p", "q", "r_min", "r_max",
                "radial_steps", "link_steps", "lambda_density"})}},
        {"phi-chain",
         {run_phi_chain,
          with({"kind", "m", "tolerance", "quad_samples", "tri_samples", "chain_link_steps", "p",
                "q", "r_min", "r_max", "radial_steps", "link_steps", "lambda_density"})}},
        {"boundary-rays",
         {run_boundary_rays,
          with({"rays", "p", "q", "r_min", "r_max", "radial_steps", "link_steps",
                "lambda_density"})}},
        {"cone-exponents",
         {run_cone_exponents,
          with({"p", "q", "potential", "lambda", "m", "fit", "fit_nodes", "fit_r_lo", "fit_r_hi",
                "fit_tol"})}},
        {"thm12-scan", {run_thm12_scan, with({"p", "q", "lambda"})}},
        {"shifted-scan", {run_shifted_scan, with({"p", "q", "m", "lambda"})}},
        {"scaling-attractor", {run_scaling_attractor, with({"p", "q", "potential", "lambda", "m"})}},
        {"hardy",
         {run_hardy,
          with({"model", "nodes", "inner_cutoff", "tol", "p", "q", "r_min", "r_max",
                "radial_steps", "link_steps", "lambda_density"})}},
        {"green", {run_green, with({"domain", "pole", "tol"})}},
        {"martin", {run_martin, with({"theta", "k0", "depth", "tol", "independence_tol", "slant"})}},
        {"bhp", {run_bhp, with({"stability_tol"})}},
        {"oscillation",
         {run_oscillation, with({"levels", "center_x", "r0", "factor", "rate_slack"})}},
        {"dirichlet", {run_dirichlet, with({"data", "tol"})}},
        {"criticality",
         {run_criticality,
          with({"nodes", "inner_cutoff", "exhaustion_levels", "band", "tol", "lambda_sub",
                "lambda_crit", "lambda_super"})}},
        {"fatou",
         {run_fatou, with({"atoms", "k0", "depth", "trace_depth", "tol", "point_mass_tol"})}},
        {"minimal-growth", {run_minimal_growth, with({"stability_tol"})}},
    };
    return reg;
}

struct ManifestError : SinglabError {
    using SinglabError::SinglabError;
};

inline void validate_manifest(const json& j) {
    require(j.is_object(), "manifest entry must be a JSON object");
    if (!j.contains("experiment")) throw ManifestError("manifest lacks an 'experiment' key");
    const std::string kind = j.at("experiment").get<std::string>();
    const auto it = registry().find(kind);
    if (it == registry().end()) throw ManifestError("unknown experiment kind '" + kind + "'");
    for (const auto& [key, val] : j.items()) {
        (void)val;
        if (key == "experiment") continue;
        if (!it->second.keys.count(key))
            throw ManifestError("unknown key '" + key + "' for experiment '" + kind + "'");
    }
}

inline ExperimentResult run_one(const json& j) {
    validate_manifest(j);
    const std::string kind = j.at("experiment").get<std::string>();
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res;
    try {
        res = registry().at(kind).run(j);
    } catch (const SinglabError& e) {
        res.id = kind;
        res.error = e.what();
    }
    res.digest = fnv1a(j.dump());
    res.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

inline std::size_t worker_cap() {
    if (const char* env = std::getenv("SINGLAB_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs a manifest: either a single experiment object or {"experiments":
/// [...]}. List entries run concurrently up to the worker cap; results are
/// merged in manifest order, so reports are deterministic.
inline std::vector<ExperimentResult> run_manifest_json(const json& manifest) {
    std::vector<json> entries;
    if (manifest.contains("experiments")) {
        for (const auto& e : manifest.at("experiments")) entries.push_back(e);
        for (const auto& [key, val] : manifest.items()) {
            (void)val;
            if (key != "experiments")
                throw ManifestError("unknown top-level key '" + key + "' beside 'experiments'");
        }
    } else {
        entries.push_back(manifest);
    }
    for (const auto& e : entries) validate_manifest(e);

    std::vector<ExperimentResult> results(entries.size());
    const std::size_t cap = std::min(worker_cap(), entries.size());
    if (cap <= 1) {
        for (std::size_t i = 0; i < entries.size(); ++i) results[i] = run_one(entries[i]);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < cap; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= entries.size()) return;
                results[i] = run_one(entries[i]);
            }
        });
    for (auto& t : pool) t.join();
    return results;
}

inline json summary_json(const std::vector<ExperimentResult>& results) {
    json out;
    out["rows"] = json::array();
    bool all_pass = true;
    for (const auto& r : results) {
        json row;
        row["experiment"] = r.id;
        char digest[32];
        std::snprintf(digest, sizeof digest, "%016llx",
                      static_cast<unsigned long long>(r.digest));
        row["digest"] = digest;
        for (const auto& [k, v] : r.scalars) row["scalars"][k] = v;
        for (const auto& [k, v] : r.flags) row["flags"][k] = v;
        if (!r.error.empty()) row["error"] = r.error;
        if (!r.plot_xy.empty()) {
            row["plot_kind"] = r.plot_kind;
            json pts = json::array();
            for (const auto& [x, y] : r.plot_xy) pts.push_back({x, y});
            row["plot"] = pts;
        }
        row["pass"] = r.pass();
        all_pass = all_pass && r.pass();
        out["rows"].push_back(row);
    }
    out["pass"] = all_pass;
    json rt = json::array();
    for (const auto& r : results) rt.push_back(r.runtime_ms);
    out["runtime_ms"] = rt;
    return out;
}

/// Columnar (x, y) plot text extracted from a JSON summary.
inline std::string emit_plotdata(const json& summary, const std::string& kind) {
    static const std::set<std::string> known{"osc_vs_i", "lambda_vs_m", "ratio_trace",
                                            "delta_vs_resolution"};
    if (!known.count(kind)) throw ManifestError("unknown plot kind '" + kind + "'");
    std::ostringstream os;
    os << "# " << kind << "\n";
    for (const auto& row : summary.at("rows")) {
        if (!row.contains("plot_kind") || row.at("plot_kind") != kind) continue;
        for (const auto& pt : row.at("plot"))
            os << format_double(pt[0].get<double>()) << ' '
               << format_double(pt[1].get<double>()) << '\n';
    }
    return os.str();
}

}  // namespace singlab::experiments
