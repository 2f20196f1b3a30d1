#include "ldgbc/driver.hpp"
#include "ldgbc/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ldgbc;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in);
}

std::string config_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("driver") {
  TEST_CASE("config parsing") {
    const RunConfig c = parse(
        "[problem]\nexample = 2\nepsilon = 1e-4\nupper = 0.3\n"
        "[discretization]\nmode = variational\nelements = 32, 128, 512\nreference_elements = 8192\n"
        "pdas_max_iterations = 20\n"
        "[output]\ndirectory = ex2\ntitle = Example 2\nvtk = yes\nmarkdown = off\n");
    CHECK(c.example == ExampleId::Two);
    CHECK(c.epsilon == 1e-4);
    CHECK(c.upper == 0.3);
    CHECK_FALSE(c.lower.has_value());
    CHECK(c.mode.kind == ControlDiscretization::Variational);
    CHECK(c.levels == std::vector<int>{2, 3, 4});
    CHECK(c.reference_level == 6);
    CHECK(c.pdas_max_iterations == 20);
    CHECK(c.output_dir == "ex2");
    CHECK(c.title == "Example 2");
    CHECK(c.emit_vtk);
    CHECK_FALSE(c.emit_markdown);
    CHECK(c.emit_csv);

    const ProblemData d = run_problem(c);
    CHECK(d.lower == 0.0);
    CHECK(d.upper == 0.3);

    const RunConfig e3 = parse("[problem]\nexample = 3\n[discretization]\nelements = 12, 48\nreference_elements = 768\n");
    CHECK(e3.levels == std::vector<int>{1, 2});
    CHECK(e3.reference_level == 4);
    CHECK(root_mesh(e3).num_elements() == 3);
    CHECK(elements_at_level(e3, 6) == 12288);

    const RunConfig defaults = parse("");
    CHECK(defaults.example == ExampleId::One);
    CHECK(elements_at_level(defaults, 2) == 32);
    CHECK(elements_at_level(defaults, 6) == 8192);
  }

  TEST_CASE("custom problems") {
    const RunConfig c = parse(
        "[problem]\nexample = custom\ndomain = slanted\nangle = 2.0\nbeta = 1, 0.5\nalpha = 3\nsource = 1\n"
        "desired = -2\nlower = -1\n[discretization]\nlevels = 0, 1\nreference_level = 3\n");
    CHECK(c.custom.domain == CustomProblem::Domain::Slanted);
    CHECK(c.custom.beta == Eigen::Vector2d(1.0, 0.5));
    const ProblemData d = run_problem(c);
    const Point x(0.1, 0.2);
    CHECK(d.reaction(x) == 3.0);
    CHECK(d.source(x) == 1.0);
    CHECK(d.desired(x) == -2.0);
    CHECK(d.lower == -1.0);
    CHECK(root_mesh(c).num_elements() == 3);
  }

  TEST_CASE("config errors") {
    CHECK(config_error("[problem]\nexample = 4\n").find("example") != std::string::npos);
    CHECK(config_error("[problem]\nepsilon = abc\n") == "epsilon: 'abc' is not a number");
    CHECK(config_error("[problem]\nepsilon = -1\n") == "epsilon must be positive");
    CHECK(config_error("[problem]\ncolour = red\n") == "unknown key 'colour' in [problem]");
    CHECK(config_error("[solver]\ntol = 1\n") == "unknown section [solver]");
    CHECK(config_error("[discretization]\nlevels = 3, 2\n") == "the mesh sequence must be strictly increasing");
    CHECK(config_error("[discretization]\nelements = 33\n").find("not a refinement") != std::string::npos);
    CHECK(config_error("[discretization]\nlevels = 2\nelements = 32\n") == "give either levels or elements, not both");
    CHECK(config_error("[problem]\nexample = 2\n") == "a reference level is required for this example");
    CHECK(config_error("[problem]\nexample = 2\n[discretization]\nlevels = 2, 3\nreference_level = 3\n")
              .find("must exceed") != std::string::npos);
    CHECK(config_error("[problem]\nupper = 1\n").find("bounds cannot be set") != std::string::npos);
    CHECK(config_error("[problem]\nexample = 2\nlower = 1\nupper = 0\n[discretization]\nreference_level = 7\n") ==
          "lower bound exceeds upper bound");
    CHECK(config_error("[problem]\nalpha = 2\n") == "alpha is only accepted with example = custom");
    CHECK(config_error("[discretization]\nmode = exact\n").find("mode") != std::string::npos);
    CHECK(config_error("[output]\nvtk = maybe\n") == "vtk: 'maybe' is not a boolean");
    CHECK(config_error("[problem]\nc12_direction = 0, 0\n") == "c12_direction must be nonzero");
    CHECK(config_error("[problem\n").find("config line") != std::string::npos);
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.ini"), ConfigError);
  }

  TEST_CASE("example 1 small run") {
    RunConfig c;
    c.levels = {2, 3};
    const RunResult r = run_example(c);
    REQUIRE(r.report.rows.size() == 2u);
    CHECK(r.report.rows[0].elements == 32);
    CHECK(r.report.rows[1].elements == 128);
    CHECK(r.report.rows[0].err_y > 1.64e-2 / 2.0);
    CHECK(r.report.rows[0].err_y < 1.64e-2 * 2.0);
    CHECK(r.report.rows[1].err_y < r.report.rows[0].err_y);
    CHECK_FALSE(r.reference.has_value());
    for (const auto& l : r.levels) CHECK(l.solution.iterations == 1);
  }

  TEST_CASE("outputs are deterministic") {
    RunConfig c = parse("[problem]\nexample = 2\n[discretization]\nlevels = 1, 2\nreference_level = 3\n"
                        "[output]\nvtk = true\nmatrices = true\n");
    const auto root = std::filesystem::temp_directory_path() / "ldgbc_driver_tests";
    std::filesystem::remove_all(root);
    const auto a = write_run_outputs(c, run_example(c), root / "a");
    const auto b = write_run_outputs(c, run_example(c), root / "b");
    REQUIRE(a.size() == b.size());
    CHECK(a.size() == 2u + 2u * 3u + 2u * 7u);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].filename() == b[i].filename());
      CHECK(slurp(a[i]) == slurp(b[i]));
    }
    CHECK(std::filesystem::exists(root / "a" / "fields" / "e32_u.vtk"));
    CHECK(std::filesystem::exists(root / "a" / "matrices" / "e8_M_Gamma.mtx"));
  }

  TEST_CASE("example 2 with small epsilon stays admissible") {
    const RunConfig c = parse("[problem]\nexample = 2\nepsilon = 1e-4\n[discretization]\nlevels = 1, 2\nreference_level = 4\n");
    const RunResult r = run_example(c);
    for (const auto& l : r.levels) {
      CHECK(l.solution.converged);
      CHECK(l.solution.u.coeffs.minCoeff() >= 0.0);
      CHECK(l.solution.u.coeffs.maxCoeff() <= 0.2);
    }
    CHECK(r.reference->mesh->num_elements() == 512);
  }

  TEST_CASE("example 3 errors decrease") {
    const RunConfig c = parse("[problem]\nexample = 3\n[discretization]\nlevels = 1, 2, 3\nreference_level = 5\n");
    const RunResult r = run_example(c);
    for (auto col : {ErrorReport::Y, ErrorReport::U, ErrorReport::Z, ErrorReport::PN}) {
      const auto v = r.report.column(col);
      CHECK(v[1] < v[0]);
      CHECK(v[2] < v[1]);
    }
  }

  TEST_CASE("non-convergence names the level") {
    RunConfig c = parse("[problem]\nexample = 2\n[discretization]\nlevels = 1\nreference_level = 2\npdas_max_iterations = 1\n");
    std::string message;
    try {
      run_example(c);
    } catch (const NonConvergence& e) {
      message = e.what();
    }
    CHECK(message.rfind("32 elements:", 0) == 0);
  }
}
