#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "hess2/json_io.hpp"

using namespace hess2;
using Catch::Approx;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("hess2_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("margin report serialization carries the schema") {
    const auto rep = check_lemma_CQ(SymTensor::diag({2, 2, -0.75}), SymTensor::identity(3));
    const json j = to_json(rep);
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("name") == "lemma_CQ");
    CHECK(j.at("margin").get<double>() == Approx(3.025));
    CHECK(j.at("hypotheses").at("W_in_gamma2") == true);
    CHECK(j.at("vacuous") == false);
    CHECK(j.at("parts").size() == 1);
    CHECK(j.at("witness").contains("W_diag"));
}

TEST_CASE("sample report serialization") {
    SampleConfig cfg;
    cfg.count = 1000;
    const auto rep = sample_verify("lemma21", cfg);
    const json j = to_json(rep);
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("violations") == 0);
    CHECK(j.at("count") == 1000);
    CHECK(j.at("seed") == 42);
    CHECK(j.contains("min_margin"));
    CHECK(j.at("witness").contains("parts"));
}

TEST_CASE("frontier csv rows match the grid") {
    SampleConfig cfg;
    cfg.count = 2000;
    const auto table = epsilon_frontier(cfg, {0.0, 0.02, 0.04, 0.049});
    const std::string csv = frontier_csv(table);
    std::size_t rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows == 5);  // header + 4
    CHECK(csv.rfind("eps,min_margin,min_rel_margin,violations\n", 0) == 0);
}

TEST_CASE("field round-trip is exact") {
    TempDir tmp;
    const GridDomain dom(3, -1.5, 1.5, 7);
    const auto f = ScalarField::from_function(dom, [](const Point& p) {
        return std::sin(3.0 * p[0]) + 0.25 * p[1] - p[2] * p[2] / 7.0;
    });
    const std::string base = (tmp.path / "field").string();
    write_field(base, f);
    const auto g = read_field(base);
    REQUIRE(g.domain() == dom);
    for (std::size_t i = 0; i < f.values().size(); ++i)
        CHECK(f.values()[i] == g.values()[i]);  // %.17g round-trips doubles
}

TEST_CASE("field csv is byte-stable across rewrites") {
    TempDir tmp;
    const GridDomain dom(2, -1, 1, 9);
    const auto f = ScalarField::from_function(
        dom, [](const Point& p) { return p[0] * 0.123456789012345 + p[1]; });
    const std::string a = (tmp.path / "a").string();
    const std::string b = (tmp.path / "b").string();
    write_field(a, f);
    write_field(b, f);
    CHECK(read_text_file(a + ".csv") == read_text_file(b + ".csv"));
}

TEST_CASE("solve report serialization") {
    const GridDomain dom(3, -1, 1, 9);
    const auto rep = newton_solve(dom, [](const Point&) { return 0.0; });
    const json j = to_json(rep);
    CHECK(j.at("gamma2_certified") == true);
    CHECK(j.at("residual_history").size() == rep.residual_history.size());
    CHECK(j.at("final_residual").get<double>() <= 1e-10);
}

TEST_CASE("probe report serialization") {
    const auto w = warren_validate(100, 7);
    const json jw = to_json(w);
    CHECK(jw.at("kind") == "warren");
    CHECK(jw.at("fits_violated") == jw.at("fits_tested"));

    const auto ph = phase_identity_check(100, 7);
    const json jp = to_json(ph);
    CHECK(jp.at("kind") == "phase");
    CHECK(jp.at("phase_violations") == 0);

    RescaleSpec spec{quadratic_candidate(), {1.0, 2.0}, 0.0};
    const auto rs = rescale_family(spec);
    const json jr = to_json(rs);
    CHECK(jr.at("rows").size() == 2);
    const std::string csv = rescale_csv(rs);
    CHECK(csv.rfind("R,sup_hess,osc,pog_quantity,nodes_in_mask\n", 0) == 0);
}
