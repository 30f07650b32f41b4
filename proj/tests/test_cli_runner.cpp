#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "singlab/experiments.hpp"

using namespace singlab;
using namespace singlab::experiments;
using nlohmann::json;

namespace {

std::string csv_of(const std::vector<ExperimentResult>& rows) {
    std::ostringstream os;
    write_report_csv(rows, os);
    return os.str();
}

}  // namespace

TEST_CASE("manifest validation: unknown kinds and keys are rejected") {
    CHECK_THROWS_WITH_AS(validate_manifest(json{{"experiment", "frobnicate"}}),
                         doctest::Contains("unknown experiment kind"), ManifestError);
    CHECK_THROWS_WITH_AS(validate_manifest(json{{"experiment", "green"}, {"polee", 0.5}}),
                         doctest::Contains("unknown key"), ManifestError);
    CHECK_THROWS_AS(validate_manifest(json{{"domain", "disk"}}), ManifestError);
    CHECK_NOTHROW(validate_manifest(json{{"experiment", "green"}, {"domain", "interval"}}));

    // multi-experiment manifests reject stray top-level keys
    json list;
    list["experiments"] = json::array({json{{"experiment", "green"}, {"domain", "interval"}}});
    list["stray"] = 1;
    CHECK_THROWS_WITH_AS(run_manifest_json(list), doctest::Contains("top-level"), ManifestError);
}

TEST_CASE("reports are byte-identical for a fixed manifest and seed") {
    json manifest;
    manifest["experiments"] = json::array(
        {json{{"experiment", "green"}, {"domain", "interval"}, {"resolution", 64}},
         json{{"experiment", "cone-exponents"}, {"p", 3}, {"q", 3}, {"fit", 0}},
         json{{"experiment", "delta-estimate"}, {"domain", "tree"}, {"seed", 9}}});
    const auto first = run_manifest_json(manifest);
    const auto second = run_manifest_json(manifest);
    CHECK(csv_of(first) == csv_of(second));

    // rows merge in manifest order regardless of worker scheduling
    REQUIRE(first.size() == 3);
    CHECK(first[0].id == "green");
    CHECK(first[1].id == "cone-exponents");
    CHECK(first[2].id == "delta-estimate");
}

TEST_CASE("failing physics flags flow into the report and exit state") {
    const json manifest{{"experiment", "thm12-scan"}, {"p", 3}, {"q", 3}, {"lambda", 0.1}};
    const auto res = run_one(manifest);
    CHECK_FALSE(res.pass());
    bool mu_flag_present = false;
    for (const auto& [k, v] : res.flags)
        if (k == "mu_above_bound") {
            mu_flag_present = true;
            CHECK_FALSE(v);
        }
    CHECK(mu_flag_present);
}

TEST_CASE("runtime stays out of the canonical CSV") {
    const json manifest{{"experiment", "cone-exponents"}, {"fit", 0}};
    auto res = run_one(manifest);
    res.runtime_ms = 12345.0;
    const std::string csv = csv_of({res});
    CHECK(csv.find("12345") == std::string::npos);
    const json summary = summary_json({res});
    CHECK(summary.at("runtime_ms")[0].get<double>() == 12345.0);
}

TEST_CASE("plot data extraction") {
    const json manifest{{"experiment", "criticality"},
                        {"nodes", 300},
                        {"exhaustion_levels", 4},
                        {"inner_cutoff", 1e-12}};
    const auto res = run_one(manifest);
    REQUIRE(res.error.empty());
    const json summary = summary_json({res});

    const std::string cols = emit_plotdata(summary, "lambda_vs_m");
    std::istringstream is(cols);
    std::string header;
    std::getline(is, header);
    CHECK(header == "# lambda_vs_m");
    double x, y, prev_y = kInf;
    int rows = 0;
    while (is >> x >> y) {
        CHECK(y < prev_y);  // strictly decreasing eigenvalue column
        prev_y = y;
        ++rows;
    }
    CHECK(rows == 4);

    CHECK_THROWS_WITH_AS(emit_plotdata(summary, "spaghetti"), doctest::Contains("unknown plot"),
                         ManifestError);

    // empty report: header only
    const json none = summary_json({});
    CHECK(emit_plotdata(none, "osc_vs_i") == "# osc_vs_i\n");
}

TEST_CASE("oscillation plot columns are positive and non-increasing") {
    const json manifest{{"experiment", "oscillation"}, {"resolution", 64}, {"levels", 4}};
    const auto res = run_one(manifest);
    REQUIRE(res.error.empty());
    const json summary = summary_json({res});
    std::istringstream is(emit_plotdata(summary, "osc_vs_i"));
    std::string header;
    std::getline(is, header);
    double x, y, prev = kInf;
    while (is >> x >> y) {
        CHECK(y > 0);
        CHECK(y <= prev + 1e-14);
        prev = y;
    }
}

TEST_CASE("experiment errors are captured as report rows") {
    const json manifest{{"experiment", "hardy"}, {"model", "no-such-model"}};
    const auto res = run_one(manifest);
    CHECK_FALSE(res.error.empty());
    CHECK_FALSE(res.pass());
    const std::string csv = csv_of({res});
    CHECK(csv.find("error") != std::string::npos);
}
