// Experiment runner: `singlab run manifest.json`, direct subcommands that
// mirror manifest keys one to one, and `singlab plot` for columnar output.
// Exit codes: 0 all assertions pass, 1 assertion failure, 2 manifest/usage
// error, 3 solver failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "singlab/experiments.hpp"

namespace {

using nlohmann::json;
using namespace singlab;
using namespace singlab::experiments;

struct LineCol {
    std::size_t line = 1, col = 1;
};

LineCol locate(const std::string& text, std::size_t byte) {
    LineCol lc;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++lc.line;
            lc.col = 1;
        } else {
            ++lc.col;
        }
    }
    return lc;
}

int emit_outputs(const std::vector<ExperimentResult>& results, const std::string& out_prefix) {
    const json summary = summary_json(results);
    if (!out_prefix.empty()) {
        std::ofstream csv(out_prefix + ".csv");
        write_report_csv(results, csv);
        std::ofstream js(out_prefix + ".json");
        js << summary.dump(2) << '\n';
    } else {
        write_report_csv(results, std::cout);
    }
    bool solver_failure = false;
    for (const auto& r : results) {
        std::cerr << (r.pass() ? "pass" : "FAIL") << "  " << r.id;
        if (!r.error.empty()) {
            std::cerr << "  [" << r.error << "]";
            if (r.error.find("solve") != std::string::npos ||
                r.error.find("eigensolver") != std::string::npos ||
                r.error.find("singular linear system") != std::string::npos)
                solver_failure = true;
        }
        std::cerr << "  (" << static_cast<long>(r.runtime_ms) << " ms)\n";
    }
    if (solver_failure) return 3;
    return summary.at("pass").get<bool>() ? 0 : 1;
}

int cmd_run(const std::string& path, const std::string& out_prefix) {
    std::ifstream is(path);
    if (!is.good()) {
        std::cerr << "cannot open manifest " << path << "\n";
        return 2;
    }
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    json manifest;
    try {
        manifest = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto lc = locate(text, e.byte);
        std::cerr << "manifest parse error at line " << lc.line << ", column " << lc.col << ": "
                  << e.what() << "\n";
        return 2;
    }
    try {
        const auto results = run_manifest_json(manifest);
        return emit_outputs(results, out_prefix);
    } catch (const ManifestError& e) {
        std::cerr << "manifest error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_plot(const std::string& report_path, const std::string& kind, const std::string& out) {
    std::ifstream is(report_path);
    if (!is.good()) {
        std::cerr << "cannot open report " << report_path << "\n";
        return 2;
    }
    json summary;
    try {
        summary = json::parse(is);
    } catch (const json::parse_error& e) {
        std::cerr << "report parse error: " << e.what() << "\n";
        return 2;
    }
    try {
        const std::string text = emit_plotdata(summary, kind);
        if (out.empty()) {
            std::cout << text;
        } else {
            std::ofstream os(out);
            os << text;
        }
        return 0;
    } catch (const ManifestError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"singlab: numerical experiments on hyperbolized singular spaces"};
    app.require_subcommand(1);

    std::string manifest_path, out_prefix;
    auto* run = app.add_subcommand("run", "run a manifest file");
    run->add_option("manifest", manifest_path, "manifest JSON path")->required();
    run->add_option("--out", out_prefix, "output prefix (writes <out>.csv and <out>.json)");

    std::string report_path, plot_kind = "osc_vs_i", plot_out;
    auto* plot = app.add_subcommand("plot", "extract columnar plot data from a report");
    plot->add_option("report", report_path, "report JSON path")->required();
    plot->add_option("--kind", plot_kind, "osc_vs_i | lambda_vs_m | ratio_trace | delta_vs_resolution");
    plot->add_option("--out", plot_out, "output file (stdout when omitted)");

    // direct subcommands: every experiment kind, flags mirroring manifest keys
    struct DirectCmd {
        std::string kind;
        std::vector<std::pair<std::string, std::string>> kv;  // raw key=value strings
        std::string out_prefix;
    };
    std::vector<std::shared_ptr<DirectCmd>> direct;
    for (const auto& [kind, entry] : singlab::experiments::registry()) {
        auto state = std::make_shared<DirectCmd>();
        state->kind = kind;
        auto* sub = app.add_subcommand(kind, "run a single " + kind + " experiment");
        for (const auto& key : entry.keys) {
            sub->add_option_function<std::string>(
                "--" + key,
                [state, key = key](const std::string& v) { state->kv.emplace_back(key, v); },
                "manifest key '" + key + "'");
        }
        sub->add_option("--out", state->out_prefix, "output prefix");
        direct.push_back(state);
    }

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(manifest_path, out_prefix);
    if (plot->parsed()) return cmd_plot(report_path, plot_kind, plot_out);

    for (const auto& state : direct) {
        if (!app.get_subcommand(state->kind)->parsed()) continue;
        json manifest;
        manifest["experiment"] = state->kind;
        for (const auto& [k, v] : state->kv) {
            // numbers stay numbers, lists split on commas, the rest is a string
            json parsed;
            try {
                parsed = json::parse(v);
            } catch (const json::parse_error&) {
                if (v.find(',') != std::string::npos) {
                    parsed = json::array();
                    std::istringstream ss(v);
                    std::string tok;
                    while (std::getline(ss, tok, ',')) parsed.push_back(json::parse(tok));
                } else {
                    parsed = v;
                }
            }
            manifest[k] = parsed;
        }
        try {
            const auto results = run_manifest_json(manifest);
            return emit_outputs(results, state->out_prefix);
        } catch (const ManifestError& e) {
            std::cerr << "manifest error: " << e.what() << "\n";
            return 2;
        }
    }
    return 2;
}
