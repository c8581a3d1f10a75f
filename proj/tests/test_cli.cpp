#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "mdim/cli.hpp"

using namespace mdim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / "mdim_cli_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "mdim");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path write_config(const fs::path& dir, const json& j) {
    fs::path p = dir / "config.json";
    write_json(p, j);
    return p;
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_text(e.path());
    return out;
}

json two_shift(json irregular) {
    return json{{"system", {{"alphabet", {{"kind", "discrete"}, {"symbols", 2}}}, {"truncation", 20}}},
                {"observable", {{"kind", "table"}, {"values", {0.0, 1.0}}}},
                {"seed", 7},
                {"irregular", irregular}};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("space run writes CSV and JSON artifacts") {
    fs::path d = scratch("space");
    json cfg{{"system", {{"alphabet", {{"kind", "interval_grid"}, {"points", 4097}}}}},
             {"space", {{"eps_grid", {0.125, 0.0625, 0.03125}}}}};
    fs::path c = write_config(d, cfg);
    REQUIRE(run({"space", "--config", c.string(), "--out", (d / "out").string()}) == 0);
    std::string csv = read_text(d / "out" / "space.csv");
    CHECK(csv.rfind("eps,abs_log_eps,count,", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.back() == '\n');
    json j = read_json(d / "out" / "space.json");
    CHECK(j["schema_version"] == kSchemaVersion);
}

TEST_CASE("invalid metric exits with a config error and a violation list") {
    fs::path d = scratch("badmetric");
    json cfg{{"system",
              {{"alphabet", {{"kind", "dense"}, {"labels", {"a", "b", "c"}}, {"matrix", {0, 1, 5, 1, 0, 1, 5, 1, 0}}}}}},
             {"space", {{"eps_grid", {0.5}}}}};
    fs::path c = write_config(d, cfg);
    CHECK(run({"space", "--config", c.string(), "--out", (d / "out").string()}) == 2);
    json j = read_json(d / "out" / "space.json");
    CHECK_FALSE(j["violations"].empty());
}

TEST_CASE("argument and config errors exit with 2") {
    fs::path d = scratch("args");
    CHECK(run({"space"}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({"space", "--config", (d / "missing.json").string()}) == 2);
    CHECK(run({"space", "--config", "x", "--mode", "fast"}) == 2);
    CHECK(run({"space", "--config", "x", "--workers", "0"}) == 2);
    std::ofstream(d / "broken.json") << "{ not json";
    CHECK(run({"space", "--config", (d / "broken.json").string(), "--out", (d / "o").string()}) == 2);
    fs::path c = write_config(d, json{{"space", {{"eps_grid", {0.5}}}}});
    CHECK(run({"space", "--config", c.string(), "--out", (d / "o").string()}) == 2);
}

TEST_CASE("mdim run on a finite alphabet") {
    fs::path d = scratch("mdim");
    json cfg{{"system", {{"alphabet", {{"kind", "discrete"}, {"symbols", 2}}}}},
             {"mdim", {{"eps_grid", {0.5, 0.25, 0.125}}, {"n_grid", {4, 5, 6, 7}}}}};
    fs::path c = write_config(d, cfg);
    REQUIRE(run({"mdim", "--config", c.string(), "--out", (d / "out").string()}) == 0);
    json j = read_json(d / "out" / "mdim.json");
    CHECK(std::fabs(j["mdim"]["estimate"].get<double>()) <= 0.05);
    CHECK(read_text(d / "out" / "mdim.csv").rfind("eps,abs_log_eps,n,depth,count,", 0) == 0);
}

TEST_CASE("irregular runs: empty set, infeasible caps and failed certificates") {
    fs::path d = scratch("irregular");
    json flat = two_shift({{"K", 2}});
    flat["observable"] = {{"kind", "constant"}, {"value", 0.3}};
    fs::create_directories(d / "a");
    fs::path c1 = write_config(d / "a", flat);
    REQUIRE(run({"irregular", "--config", c1.string(), "--out", (d / "a" / "out").string()}) == 0);
    CHECK(read_json(d / "a" / "out" / "irregular.json")["irregular_set"] == "empty");

    fs::create_directories(d / "b");
    fs::path c2 = write_config(d / "b", two_shift({{"K", 2}, {"max_t", 100}}));
    CHECK(run({"irregular", "--config", c2.string(), "--out", (d / "b" / "out").string()}) == 3);

    // the ball bound at desk scale fails, so the run ends with a certificate error after writing everything
    fs::create_directories(d / "c");
    fs::path c3 = write_config(d / "c", two_shift({{"K", 2}, {"ball_samples", 4}, {"ambient", {{"depth", 8}}}}));
    CHECK(run({"irregular", "--config", c3.string(), "--out", (d / "c" / "out").string()}) == 4);
    json j = read_json(d / "c" / "out" / "irregular.json");
    CHECK(j["verdict"] == "fail");
    CHECK(fs::exists(d / "c" / "out" / "levels" / "schedule.json"));
    CHECK(fs::exists(d / "c" / "out" / "levels" / "level_2_centers.txt"));
    CHECK(fs::exists(d / "c" / "out" / "levels" / "ball_bound.json"));
}

TEST_CASE("worker count never changes the artifacts") {
    fs::path d = scratch("workers");
    fs::path c = write_config(d, two_shift({{"K", 2}, {"ball_samples", 4}, {"ambient", {{"depth", 8}}}}));
    int a = run({"irregular", "--config", c.string(), "--out", (d / "w1").string(), "--workers", "1"});
    int b = run({"irregular", "--config", c.string(), "--out", (d / "w3").string(), "--workers", "3"});
    CHECK(a == b);
    auto t1 = tree(d / "w1"), t3 = tree(d / "w3");
    CHECK(t1.size() == t3.size());
    CHECK(t1 == t3);
    int s1 = run({"irregular", "--config", c.string(), "--out", (d / "s1").string(), "--mode", "sampled"});
    int s3 = run({"irregular", "--config", c.string(), "--out", (d / "s3").string(), "--mode", "sampled", "--workers", "3"});
    CHECK(s1 == 0);
    CHECK(s1 == s3);
    CHECK(tree(d / "s1") == tree(d / "s3"));
}

TEST_CASE("report merges runs and passes a single run through") {
    fs::path d = scratch("report");
    json base{{"system", {{"alphabet", {{"kind", "interval_grid"}, {"points", 1025}}}}},
              {"space", {{"eps_grid", {0.25, 0.125}}}}};
    fs::path c = write_config(d, base);
    REQUIRE(run({"space", "--config", c.string(), "--out", (d / "r1").string()}) == 0);
    base["space"]["eps_grid"] = {0.125, 0.0625, 0.03125};
    c = write_config(d, base);
    REQUIRE(run({"space", "--config", c.string(), "--out", (d / "r2").string()}) == 0);

    REQUIRE(run({"report", (d / "r1").string(), "--out", (d / "one").string()}) == 0);
    CHECK(read_text(d / "one" / "merged_space.csv") == read_text(d / "r1" / "space.csv"));
    REQUIRE(run({"report", (d / "r1").string(), (d / "r2").string(), "--out", (d / "two").string()}) == 0);
    std::string merged = read_text(d / "two" / "merged_space.csv");
    CHECK(std::count(merged.begin(), merged.end(), '\n') == 1 + 2 + 3);
    json j = read_json(d / "two" / "report.json");
    CHECK(j["schema_version"] == kSchemaVersion);

    fs::create_directories(d / "empty");
    CHECK(run({"report", (d / "empty").string(), "--out", (d / "e").string()}) == 2);
    CHECK(run({"report", (d / "nowhere").string(), "--out", (d / "e").string()}) == 2);
    CHECK(run({"report", "--out", (d / "e").string()}) == 2);
}

}  // TEST_SUITE
