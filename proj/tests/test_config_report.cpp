#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "stheat/config.hpp"
#include "stheat/report.hpp"

using namespace stheat;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

}  // namespace

TEST_SUITE("config_report") {
  TEST_CASE("defaults and parsed values") {
    const ExperimentConfig d = parse("");
    CHECK(d.name == "energy");
    CHECK(d.J == 16);
    CHECK(d.N == 128);
    const ExperimentConfig c = parse(
        "[experiment]\nname = infsup\n"
        "[grid]\nJ = 8\nN = 64\nT = 0.5\nsizes = 8x32, 16x64\n"
        "[noise]\nrho = 3\nbasis = cosine\n"
        "[operator]\nkappas = 0.5, 1, 2\n"
        "[load]\nu0 = 1, 0.5\n"
        "[mc]\npaths = 10\nseed = 42\n");
    CHECK(c.name == "infsup");
    CHECK(c.J == 8);
    CHECK(c.T == 0.5);
    REQUIRE(c.sizes.size() == 2);
    CHECK(c.sizes[1] == std::pair<std::size_t, std::size_t>{16, 64});
    CHECK(c.noise_basis == NoiseBasis::Cosine);
    CHECK(c.kappas == std::vector<double>{0.5, 1.0, 2.0});
    CHECK(c.seed == 42);
    const LoadSpec load = c.make_load();
    CHECK(load.u0.size() == 8);
    CHECK(load.u0[1] == 0.5);
    CHECK(c.make_q().gamma(1) == doctest::Approx(0.125));
  }

  TEST_CASE("malformed input is rejected") {
    CHECK_THROWS_AS(parse("[grid]\nK = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[nowhere]\nJ = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[grid]\nJ = -3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[grid]\nT = fast\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[grid]\nsizes = 8-32\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[multiplicative]\np = 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[operator]\nlaw = gamma\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[mc]\npaths = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), std::invalid_argument);
    try {
      parse("[grid]\nK = 3\n");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("[grid] K") != std::string::npos);
    }
  }

  TEST_CASE("canonical rendering round-trips") {
    const ExperimentConfig c = parse(
        "[experiment]\nname = multiplicative\n[grid]\nJ = 4\nN = 32\nT = 0.25\n"
        "n_levels = 32, 64\n[noise]\ngammas = 1, 0.1, 0.01, 0.001\n"
        "[multiplicative]\ng0 = 0.3\ntime_profile = bump\nbump_width = 0.05\n"
        "[output]\ndir = results\n");
    const std::string ini = to_ini(c);
    const ExperimentConfig back = parse(ini);
    CHECK(to_ini(back) == ini);
    CHECK(to_json(back) == to_json(c));
    CHECK(to_json(c).at("grid").at("J") == "4");
  }

  TEST_CASE("git blob hashes") {
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  }

  TEST_CASE("tables and report documents") {
    Table t{"demo", {"a", "b"}, {}};
    t.add({1.0, 0.5});
    CHECK_THROWS_AS(t.add({1.0}), std::logic_error);
    std::ostringstream csv;
    t.write_csv(csv);
    CHECK(csv.str() == "a,b\n1,0.5\n");

    Report r;
    r.experiment = "demo";
    r.results["x"] = 3;
    r.tables.push_back(t);
    r.check(true, "never");
    CHECK(r.passed());
    r.check(false, "broken");
    CHECK_FALSE(r.passed());

    const ExperimentConfig cfg = parse("");
    const auto doc = report_document(r, cfg);
    CHECK(doc.at("schema_version") == kSchemaVersion);
    CHECK(doc.at("experiment") == "demo");
    CHECK(doc.at("passed") == false);
    CHECK(doc.at("failures").size() == 1);
    CHECK(doc.at("input_hash") == git_blob_hash(to_ini(cfg)));
    CHECK(doc.at("results").at("x") == 3);

    const auto dir = std::filesystem::temp_directory_path() / "stheat_report_test";
    std::filesystem::remove_all(dir);
    const auto files = write_report(r, cfg, dir);
    REQUIRE(files.size() == 2);
    CHECK(files[0].filename() == "demo.json");
    CHECK(files[1].filename() == "demo_demo.csv");
    std::ifstream in(files[1]);
    std::string header;
    std::getline(in, header);
    CHECK(header == "a,b");
    std::filesystem::remove_all(dir);
  }
}
