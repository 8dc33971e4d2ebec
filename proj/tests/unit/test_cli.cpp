#include "doctest.h"

#include "cylflow/acceptance.hpp"
#include "cylflow/config.hpp"
#include "cylflow/error.hpp"
#include "cylflow/output.hpp"
#include "cylflow/scenarios.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace cylflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* small_spectrum = "scenario = spectrum\n"
                             "spectrum.max_degree = 2\n"
                             "spectrum.max_j = 1\n"
                             "grid.nodes = 256\n"
                             "grid.K = 10\n"
                             "time.span = 0.2\n";

} // namespace

TEST_SUITE("lab_cli") {

TEST_CASE("config parse errors name the line or field")
{
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse(""), doctest::Contains("missing field 'scenario'"), Error);
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse("scenario = spectrum\nbogus line\n"), doctest::Contains("2"), Error);
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse("scenario = spectrum\nscenario = flow\n"), doctest::Contains("repeated"),
                         Error);
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse("scenario = nosuch\n"), doctest::Contains("unknown scenario"), Error);
    try {
        ExperimentConfig::parse("scenario = spectrum\nx =\n");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("config-parse") != std::string::npos);
    }
    const auto c = ExperimentConfig::parse("# comment\nscenario = spectrum\ngrid.nodes = abc\n");
    CHECK_THROWS_WITH_AS(c.get_int("grid.nodes", 1), doctest::Contains("grid.nodes"), Error);
}

TEST_CASE("unknown fields are rejected before any work")
{
    const auto c = ExperimentConfig::parse(std::string(small_spectrum) + "spectrum.typo = 3\n");
    std::ostringstream log;
    const std::string dir = "cli_test_unknown";
    CHECK_THROWS_WITH_AS(run_scenario(c, dir, log), doctest::Contains("spectrum.typo"), Error);
    CHECK_FALSE(fs::exists(dir + "/eigenvalues.csv"));
    fs::remove_all(dir);
    std::ostringstream out, err;
    CHECK(run_scenario_cli(c, dir, out, err) == 1);
    CHECK(err.str().find("config-parse") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("check-only validates without writing")
{
    const auto c = ExperimentConfig::parse(small_spectrum);
    std::ostringstream log;
    const auto r = run_scenario(c, "cli_test_check", log, true);
    CHECK(r.files.empty());
    CHECK(r.summary == "spectrum: config ok");
    CHECK_FALSE(fs::exists("cli_test_check"));
    const auto bad = ExperimentConfig::parse(std::string(small_spectrum) + "grid.nodes2 = 3\n");
    CHECK_THROWS_WITH_AS(run_scenario(bad, "cli_test_check", log, true), doctest::Contains("grid.nodes2"), Error);
}

TEST_CASE("hash ignores line order and tracks values")
{
    const auto a = ExperimentConfig::parse("scenario = spectrum\ngrid.nodes = 256\ngrid.K = 10\n");
    const auto b = ExperimentConfig::parse("grid.K = 10\nscenario = spectrum\ngrid.nodes = 256\n");
    const auto c = ExperimentConfig::parse("scenario = spectrum\ngrid.nodes = 257\ngrid.K = 10\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.hash_hex().size() == 16);
    auto d = a;
    d.set_seed(7);
    CHECK(d.seed() == 7);
    CHECK(d.hash() != a.hash());

    const OutputWriter w("cli_test_header", a.hash_hex(), 7, "spectrum");
    CHECK(w.header() == "# config_hash=" + a.hash_hex() + " seed=7 scenario=spectrum");
    fs::remove_all("cli_test_header");
    CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("criterion selection")
{
    std::vector<std::string> unknown;
    CHECK(select_criteria({}, unknown).size() == 14);
    auto sel = select_criteria({"rotational"}, unknown);
    CHECK(sel == std::vector<std::string>{"solitons", "aag", "marriage_ring", "arrival_time"});
    sel = select_criteria({"3", "normal-form", "nonsense"}, unknown);
    CHECK(sel == std::vector<std::string>{"solitons", "normal_form"});
    CHECK(unknown == std::vector<std::string>{"nonsense"});
    std::ostringstream out;
    CHECK(run_acceptance({"hermite", "nonsense"}, out) == 0);
    CHECK(out.str().find("PASS  1 hermite") != std::string::npos);
    CHECK(out.str().find("SKIP    nonsense skipped-unknown") != std::string::npos);
}

TEST_CASE("runs are byte-identical")
{
    const auto c = ExperimentConfig::parse(small_spectrum);
    std::ostringstream log;
    const auto r1 = run_scenario(c, "cli_test_run1", log);
    const auto r2 = run_scenario(c, "cli_test_run2", log);
    REQUIRE(r1.files.size() == r2.files.size());
    CHECK(r1.exit_code == 0);
    for (std::size_t i = 0; i < r1.files.size(); ++i) {
        CHECK(fs::path(r1.files[i]).filename() == fs::path(r2.files[i]).filename());
        CHECK(slurp(r1.files[i]) == slurp(r2.files[i]));
    }
    CHECK(slurp("cli_test_run1/eigenvalues.csv").rfind("# config_hash=" + c.hash_hex() + " seed=1", 0) == 0);
    fs::remove_all("cli_test_run1");
    fs::remove_all("cli_test_run2");
}

} // TEST_SUITE
