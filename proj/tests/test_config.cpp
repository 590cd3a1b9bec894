#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rslab/config.hpp"
#include "rslab/errors.hpp"

using namespace rslab;
using namespace rslab::config;

TEST_CASE("empty document yields the full default config") {
    ScenarioConfig c = parse_config("");
    CHECK(c.n == 3);
    CHECK(c.tau == cplx(0.0, 1.0));
    CHECK(c.gamma == cplx(0.21, 0.13));
    CHECK(c.hbar == 0.1);
    CHECK(c.checks == all_check_names());
    CHECK(c.suite_n == std::vector<int>{2, 3, 4});
    CHECK(c.spectral_points.size() == 3);
    CHECK(c.seeds.size() == 5);
}

TEST_CASE("validation errors carry the reason") {
    CHECK_THROWS_WITH_AS(parse_config("n = 9"),
                         doctest::Contains("[2,8]"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("tau = 1-0.5i"),
                         doctest::Contains("modulus"), ValidationError);
    CHECK_THROWS_AS(parse_config("checks = sklyanin_analytic, not_a_check"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config("tolerances = prop3_factorization:-1"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config("frobnicate = 1"), ParseError);
    CHECK_THROWS_AS(parse_config("n"), ParseError);
}

TEST_CASE("complex literal syntax") {
    CHECK(parse_complex("0.21+0.13i") == cplx(0.21, 0.13));
    CHECK(parse_complex(" 0.21 + 0.13 i ") == cplx(0.21, 0.13));
    CHECK(parse_complex("-0.5-0.25i") == cplx(-0.5, -0.25));
    CHECK(parse_complex("2i") == cplx(0.0, 2.0));
    CHECK(parse_complex("i") == cplx(0.0, 1.0));
    CHECK(parse_complex("-i") == cplx(0.0, -1.0));
    CHECK(parse_complex("0.5") == cplx(0.5, 0.0));
    CHECK(parse_complex("1e-3+2.5e-4i") == cplx(1e-3, 2.5e-4));
    CHECK_THROWS_AS(parse_complex("abc"), ParseError);
    // round trip through the formatter
    cplx z{0.123456789012345, -9.87e-7};
    CHECK(parse_complex(format_complex(z)) == z);
}

TEST_CASE("config round-trip") {
    ScenarioConfig a = default_config();
    a.n = 4;
    a.gamma = cplx(0.3, -0.05);
    a.seeds = {42, 7};
    a.tolerances["qybe"] = 1e-9;
    a.s12_variant = S12Mode::c;
    ScenarioConfig b = parse_config(emit_config(a));
    CHECK(b.n == a.n);
    CHECK(b.gamma == a.gamma);
    CHECK(b.seeds == a.seeds);
    CHECK(b.tolerances == a.tolerances);
    CHECK(b.s12_variant == a.s12_variant);
    CHECK(b.spectral_points == a.spectral_points);
    CHECK(emit_config(b) == emit_config(a));
}

TEST_CASE("key=value parsing details") {
    ScenarioConfig c = parse_config(
        "# comment line\n"
        "n = 4\n"
        "spectral_points = 0.1+0.02i , -0.2-0.01i ; 0.3+0.05i,-0.15-0.03i\n"
        "seeds = 9,8,7\n"
        "series.max_terms = 512\n"
        "series.tail_tol = 1e-13\n"
        "s12_variant = b\n");
    CHECK(c.n == 4);
    REQUIRE(c.spectral_points.size() == 2);
    CHECK(c.spectral_points[0].first == cplx(0.1, 0.02));
    CHECK(c.spectral_points[1].second == cplx(-0.15, -0.03));
    CHECK(c.seeds == std::vector<std::uint64_t>{9, 8, 7});
    CHECK(c.series.max_terms == 512);
    CHECK(c.series.tail_tol == 1e-13);
    CHECK(c.s12_variant == S12Mode::b);
}

TEST_CASE("report emission formats") {
    std::vector<verify::ResidualReport> reports;
    reports.push_back(verify::make_report("alpha", 1.2e-11, 1.0, 1e-9, "00ff", "fine"));
    reports.push_back(verify::make_report("beta", 3.0e-3, 1.0, 1e-6, "11aa", "bad, comma"));
    CHECK(reports[0].passed);
    CHECK_FALSE(reports[1].passed);

    std::string js = emit_report(reports, Format::json);
    CHECK(js.find("\"check_name\": \"alpha\"") != std::string::npos);
    CHECK(js.find("\"passed\": false") != std::string::npos);

    std::string csv = emit_report(reports, Format::csv);
    int rows = 0;
    for (char ch : csv) rows += ch == '\n';
    CHECK(rows == 3); // header + one row per report
    CHECK(csv.find("1.20000e-11") != std::string::npos);
    CHECK(csv.find("bad; comma") != std::string::npos); // csv-safe notes

    std::string human = emit_report(reports, Format::human);
    CHECK(human.find("[ ok ] alpha") != std::string::npos);
    CHECK(human.find("[FAIL] beta") != std::string::npos);
    CHECK(human.find("1/2 checks passed") != std::string::npos);

    // identical bytes on repeated emission
    CHECK(emit_report(reports, Format::json) == js);
    CHECK(emit_report(reports, Format::csv) == csv);
}

TEST_CASE("pass logic follows the reference-norm contract") {
    // relative criterion when the reference is healthy
    auto r1 = verify::make_report("x", 5e-10, 1.0, 1e-9, "d");
    CHECK(r1.passed);
    CHECK(r1.rel_residual == 5e-10);
    // absolute criterion when the reference norm collapses
    auto r2 = verify::make_report("x", 5e-10, 1e-12, 1e-9, "d");
    CHECK(r2.passed);
    auto r3 = verify::make_report("x", 5e-8, 1e-12, 1e-9, "d");
    CHECK_FALSE(r3.passed);
}
