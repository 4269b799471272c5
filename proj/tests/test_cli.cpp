#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "qanneal/cli.hpp"
#include "qanneal/error.hpp"
#include "qanneal/io.hpp"

using namespace qanneal;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "qanneal_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string h5_path() { return (fs::path(QANNEAL_DATA_DIR) / "h5.json").string(); }

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_text_file(p)); }

}  // namespace

TEST_CASE("convert") {
    auto r = run({"convert", "--from", "binary", "--to", "int", "--value", "0,0,1"});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "4\n");

    r = run({"convert", "--from", "spin", "--to", "braket", "--value", "1,1,-1"});
    CHECK(r.out == "|↓↑↑⟩\n");
    r = run({"convert", "--from", "spin", "--to", "braket", "--value", "1,1,-1", "--ascii"});
    CHECK(r.out == "|duu>\n");

    r = run({"convert", "--from", "int", "--to", "binary", "--value", "4", "--n", "3"});
    CHECK(r.out == "0,0,1\n");
    r = run({"convert", "--from", "int", "--to", "spin", "--value", "4", "--n", "3"});
    CHECK(r.out == "1,1,-1\n");

    r = run({"convert", "--from", "int", "--to", "binary", "--value", "8", "--n", "3"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.rfind("error[", 0) == 0);
}

TEST_CASE("usage errors") {
    auto r = run({"simulate", "--time", "1"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.rfind("error[usage]", 0) == 0);

    r = run({"simulate", "--model", "1=1", "--time", "-1"});
    CHECK(r.code == kExitUsage);
    r = run({"simulate", "--model", "1=1", "--time", "1", "--schedule", "nope"});
    CHECK(r.code == kExitUsage);
    r = run({"simulate", "--model", "1=1", "--time", "1", "--order", "9"});
    CHECK(r.code == kExitUsage);
    r = run({"simulate", "--model", "/nonexistent/m.json", "--time", "1"});
    CHECK(r.code == kExitFailure);
    CHECK(r.err.rfind("error[io]", 0) == 0);
}

TEST_CASE("inline models and time lists") {
    IsingModel expected;
    expected.add_coupling(1, 2, -1.0);
    expected.add_field(1, 0.5);
    CHECK(parse_inline_model("1,2=-1;1=0.5") == expected);
    CHECK(parse_time_list("0.5,2") == std::vector<double>{0.5, 2.0});
    const auto ls = parse_time_list("logspace:-1:2:4");
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == doctest::Approx(0.1));
    CHECK(ls[3] == doctest::Approx(100.0));
    CHECK_THROWS_AS(parse_time_list("0,1"), Error);
    CHECK_THROWS_AS(parse_inline_model("1,1=2"), Error);
}

TEST_CASE("zero annealing time keeps the uniform distribution") {
    const auto out = scratch("tau0.json");
    const auto r = run({"simulate", "--model", "1,2=1;2=0.3", "--time", "0", "--out", out.string(), "--no-timestamp"});
    REQUIRE(r.code == kExitOk);
    const auto doc = read_json(out);
    for (const auto& p : doc["probabilities"]) CHECK(p["probability"].get<double>() == doctest::Approx(0.25));
}

TEST_CASE("H5 at tau 100 suppresses the aligned ground states") {
    const auto out = scratch("h5.json");
    const auto r = run({"simulate", "--model", h5_path(), "--time", "100", "--out", out.string(), "--no-timestamp"});
    REQUIRE(r.code == kExitOk);
    const auto doc = read_json(out);
    std::vector<double> p;
    for (const auto& entry : doc["probabilities"]) p.push_back(entry["probability"].get<double>());
    REQUIRE(p.size() == 32);
    CHECK(std::abs(p[0] - p[31]) <= 1e-8);
    // the remaining four ground states share the largest probability
    const std::vector<std::size_t> others{3, 7, 24, 28};
    for (std::size_t v : others) CHECK(p[v] > p[0] + 0.1);
    CHECK(r.out.find("top5: |") != std::string::npos);

    // identical runs without a timestamp produce identical bytes
    const auto again = scratch("h5_again.json");
    run({"simulate", "--model", h5_path(), "--time", "100", "--out", again.string(), "--no-timestamp"});
    CHECK(read_text_file(out) == read_text_file(again));
}

TEST_CASE("sweep") {
    const auto out = scratch("sweep.csv");
    auto r = run({"sweep", "--model", h5_path(), "--times", "logspace:-1:1:4", "--out", out.string()});
    REQUIRE(r.code == kExitOk);
    const std::string csv = read_text_file(out);
    CHECK(csv.rfind("tau,state_index,braket,energy,probability,status\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 32);

    // a singleton sweep reproduces simulate
    const auto single = scratch("single.json");
    const auto swept = scratch("swept.json");
    run({"simulate", "--model", h5_path(), "--time", "3", "--out", single.string(), "--no-timestamp"});
    run({"sweep", "--model", h5_path(), "--times", "3", "--out", swept.string(), "--no-timestamp"});
    const auto a = read_json(single)["probabilities"];
    const auto b = read_json(swept)["records"][0]["probabilities"];
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i]["probability"] == b[i]["probability"]);
}

TEST_CASE("spectrum") {
    const auto out = scratch("spec.csv");
    auto r = run({"spectrum", "--model", h5_path(), "--grid", "2", "--out", out.string(), "--schedule", "linear"});
    REQUIRE(r.code == kExitOk);
    const std::string csv = read_text_file(out);
    CHECK(csv.rfind("s,level_index,eigenvalue\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 32);
    CHECK(csv.find("\n0,0,") != std::string::npos);
    CHECK(csv.find("\n1,0,") != std::string::npos);

    const auto table = read_schedule_csv(scratch("spec_schedule.csv"));
    REQUIRE(table.s.size() == 2);
    for (std::size_t i = 0; i < table.s.size(); ++i) CHECK(table.a[i] + table.b[i] == doctest::Approx(1.0));

    r = run({"spectrum", "--model", h5_path()});
    REQUIRE(r.code == kExitOk);
    REQUIRE(r.out.rfind("min_gap=", 0) == 0);
    CHECK(std::stod(r.out.substr(8)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.out.find("levels=0,6") != std::string::npos);
}

TEST_CASE("schedules") {
    auto r = run({"schedules"});
    CHECK(r.out == "linear\nquadratic\ncircular\ndw_quadratic\n");
    r = run({"schedules", "--tabulate", "circular", "--grid", "3"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("s,a,b\n", 0) == 0);
}
