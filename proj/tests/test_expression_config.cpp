#include "doctest.h"

#include "ensheat/config.hpp"
#include "ensheat/ensemble.hpp"
#include "ensheat/errors.hpp"
#include "ensheat/expression.hpp"
#include "ensheat/verification.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

using namespace ensheat;

namespace {

double eval(const char* text, double x = 0.0, double y = 0.0, double t = 0.0)
{
    return Expression::parse(text)(x, y, t);
}

std::size_t error_column(const char* text)
{
    try {
        (void)Expression::parse(text);
    } catch (const ExpressionError& e) {
        return e.column();
    }
    return 0;
}

std::size_t format_line(const std::string& text)
{
    try {
        (void)parse_config(text);
    } catch (const FormatError& e) {
        return e.line();
    }
    return 0;
}

std::string validation_message(const std::string& text)
{
    try {
        (void)parse_config(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

const std::string kBase = R"(mesh:
  structured: 4
boundary:
  - {label: left, kind: dirichlet, value: "1"}
  - {label: bottom, kind: dirichlet, value: "1"}
  - {label: top, kind: neumann, value: "1"}
  - {label: right, kind: neumann, value: "1"}
conductivity:
  kind: heaviside_quadratic
  a: 100
  t_c: 2
  base: 50
  kappa_min: 50
  kappa_max: 150
ensemble:
  initial: ["1.0", "1.25", "1.5"]
time:
  dt: 0.00025
  t_star: 0.01
)";

std::string replace(std::string s, const std::string& from, const std::string& to)
{
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

} // namespace

TEST_CASE("expression arithmetic")
{
    CHECK(eval("1 + 2 * 3") == 7.0);
    CHECK(eval("(1 + 2) * 3") == 9.0);
    CHECK(eval("2 ^ 3 ^ 2") == 512.0);
    CHECK(eval("-2 ^ 2") == -4.0);
    CHECK(eval("8 / 4 / 2") == 1.0);
    CHECK(eval("1e-3 * 2") == 2e-3);
    CHECK(eval("pi") == std::numbers::pi);
    CHECK(eval("x * y + t", 2, 3, 4) == 10.0);
    CHECK(eval("sqr(x - 0.5)", 0.25) == 0.0625);
    CHECK(eval("min(x, y) + max(x, y)", 1, 5) == 6.0);
    CHECK(eval("exp(log(3))") == doctest::Approx(3.0));
    CHECK(eval("sin(pi / 2) + cos(0) + tan(0) + tanh(0) + sqrt(16) + abs(-2)") == doctest::Approx(8.0));
    CHECK(eval("heaviside(x)", 0.0) == 0.0);
    CHECK(eval("heaviside(x)", 1e-9) == 1.0);
    CHECK(Expression::parse("3 * 2").is_constant());
    CHECK(!Expression::parse("3 * x").is_constant());
    CHECK(Expression::parse(" x+1 ").text() == " x+1 ");
}

TEST_CASE("gate selects a closed time window")
{
    const auto g = Expression::parse("gate(0, 0.0005)");
    CHECK(g(0, 0, 0.0) == 1.0);
    CHECK(g(0, 0, 0.0005) == 1.0);
    CHECK(g(0, 0, 0.00051) == 0.0);
    CHECK(g(0, 0, -0.1) == 0.0);
}

TEST_CASE("expression errors carry a column")
{
    CHECK(error_column("1 +") == 4);
    CHECK(error_column("foo(1)") == 1);
    CHECK(error_column("2 * z") == 5);
    CHECK(error_column("(1 + 2") == 7);
    CHECK(error_column("1 2") == 3);
    CHECK(error_column("min(1)") > 0);
    CHECK(error_column("") > 0);
    CHECK_THROWS_AS(Expression::parse("1 +"), std::invalid_argument);
}

TEST_CASE("expression source reproduces the built-in pulse")
{
    const auto f = Expression::parse("4000*exp(-8*(sqr(x-0.5)+sqr(y-0.5)))*gate(0,0.0005)");
    for (double x : {0.0, 0.2, 0.5, 0.71})
        for (double y : {0.0, 0.33, 0.5, 1.0})
            for (double t : {0.0, 0.00025, 0.0005, 0.00075})
                CHECK(f(x, y, t) == printing::source(x, y, t));
}

TEST_CASE("config parses the printing layout")
{
    const auto cfg = parse_config(kBase);
    const auto& s = cfg.scenario;
    CHECK(s.members == 3);
    CHECK(s.num_steps() == 40);
    CHECK(s.boundary.size() == 4);
    CHECK(s.boundary[0].label == "left");
    CHECK(s.boundary[2].condition.kind == BcKind::neumann);
    CHECK(s.conductivity.front().eval(1.25) == doctest::Approx(106.25));
    CHECK(s.initial(1, 0.3, 0.3, 0.0) == 1.25);
    CHECK(!s.source);
    CHECK(cfg.norms_file == "norms.csv");
    CHECK(!cfg.output_dir);
}

TEST_CASE("shipped scenario files load")
{
    const std::filesystem::path dir = ENSHEAT_SCENARIO_DIR;
    const auto printing = load_config(dir / "printing.yaml");
    CHECK(printing.scenario.members == 3);
    CHECK(printing.scenario.snapshot_every == 8);
    CHECK(printing.norms_file == "printing_norms.csv");
    const auto steady = load_config(dir / "steady.yaml");
    CHECK(steady.scenario.scheme() == SchemeKind::mixed);
    CHECK(steady.scenario.conductivity.front().eval(150.0) == doctest::Approx(150.0 / 9000).epsilon(1e-12));
}

TEST_CASE("scaled ensemble from one initial expression")
{
    auto text = replace(kBase, R"(initial: ["1.0", "1.25", "1.5"])",
                        "initial: \"2\"\n  members: 2\n  exponent: 1\n  bases: [0.5, 1.0]");
    const auto s = parse_config(text).scenario;
    CHECK(s.members == 2);
    CHECK(s.initial(0, 0, 0, 0) == doctest::Approx(2.1));
    CHECK(s.initial(1, 0, 0, 0) == doctest::Approx(2.2));
    const auto same = parse_config(replace(kBase, R"(initial: ["1.0", "1.25", "1.5"])",
                                           "initial: \"2\"\n  members: 3"))
                          .scenario;
    CHECK(same.initial(2, 0, 0, 0) == 2.0);
}

TEST_CASE("config errors point at the offending line")
{
    CHECK(format_line(replace(kBase, "structured: 4", "structured: [4")) > 0);
    CHECK(format_line(replace(kBase, "  t_c: 2\n", "  t_c: 2\n  colour: red\n")) == 12);
    CHECK(format_line(replace(kBase, "kind: neumann, value: \"1\"}\n  - {label: right",
                              "kind: sideways, value: \"1\"}\n  - {label: right")) == 6);
    CHECK(format_line(replace(kBase, "value: \"1\"}\n  - {label: bottom", "value: \"1 +\"}\n  - {label: bottom")) == 4);
    CHECK(format_line(replace(kBase, "dt: 0.00025", "dt: fast")) == 18);
    CHECK(format_line("- just\n- a list\n") == 1);
    CHECK(format_line(replace(kBase, "time:\n  dt: 0.00025\n  t_star: 0.01\n", "")) > 0);

    const auto divide = validation_message(replace(kBase, "dt: 0.00025", "dt: 0.0003"));
    CHECK(divide.find("dt must divide t_star") != std::string::npos);
    CHECK(divide.rfind("line 18:", 0) == 0);

    const auto label = validation_message(replace(kBase, "label: top", "label: front"));
    CHECK(label.find("front") != std::string::npos);
    CHECK(label.rfind("line 6:", 0) == 0);

    const auto missing = validation_message(replace(kBase, "  - {label: right, kind: neumann, value: \"1\"}\n", ""));
    CHECK(missing.find("right") != std::string::npos);

    const auto mixed = validation_message(
        replace(kBase, "{label: right, kind: neumann, value: \"1\"}", "{label: right, kind: robin, alpha: 0.5}"));
    CHECK(mixed.find("robin") != std::string::npos);

    CHECK_THROWS_WITH_AS(load_config("/nonexistent/scenario.yaml"), doctest::Contains("no such file"),
                         ValidationError);
}

TEST_CASE("config mesh from file")
{
    const auto dir = std::filesystem::temp_directory_path() / "ensheat_config_mesh";
    std::filesystem::create_directories(dir);
    {
        std::ofstream mesh(dir / "square.mesh");
        mesh << export_mesh(build_structured_mesh(3));
    }
    {
        std::ofstream cfg(dir / "case.yaml");
        cfg << replace(kBase, "structured: 4", "file: square.mesh");
    }
    const auto cfg = load_config(dir / "case.yaml");
    CHECK(cfg.scenario.mesh->num_vertices() == 16);
    std::filesystem::remove_all(dir);
}
