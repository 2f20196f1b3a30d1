// ldgbc: convergence studies for LDG Dirichlet boundary control.
//
//   ldgbc run <config.ini>       solve every level, write tables and fields
//   ldgbc check [--seed N]       small-mesh invariant suite
//   ldgbc dump-mesh ...          write a mesh of an example's hierarchy
//
// Relative output paths resolve against $LDGBC_OUTPUT_ROOT when it is set.

#include "ldgbc/checks.hpp"
#include "ldgbc/driver.hpp"
#include "ldgbc/errors.hpp"
#include "ldgbc/io.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitRuntime = 4;

std::filesystem::path resolve_output(const std::filesystem::path& p) {
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv("LDGBC_OUTPUT_ROOT"); root && *root) return std::filesystem::path(root) / p;
  return p;
}

int run(const std::string& config_path, bool quiet) {
  const ldgbc::RunConfig config = ldgbc::load_run_config(config_path);
  const auto dir = resolve_output(config.output_dir);
  ldgbc::ProgressLog log;
  if (!quiet) log = [](const std::string& line) { std::cerr << line << '\n'; };
  const ldgbc::RunResult result = ldgbc::run_example(config, log);
  for (const auto& path : ldgbc::write_run_outputs(config, result, dir)) std::cout << path.string() << '\n';
  if (!quiet) ldgbc::write_table_markdown(result.report, std::cerr);
  return kExitOk;
}

int check(std::uint64_t seed) {
  int failed = 0;
  ldgbc::run_property_checks(seed, [&](const ldgbc::CheckResult& r) {
    std::cout << fmt::format("{} {}: {:.3e} (tolerance {:.1e})\n", r.passed ? "PASS" : "FAIL", r.name, r.value,
                             r.tolerance);
    if (!r.passed) ++failed;
  });
  std::cout << (failed ? fmt::format("{} check(s) failed\n", failed) : "all checks passed\n");
  return failed ? kExitCheckFailed : kExitOk;
}

int dump_mesh(const std::string& example, int level, const std::string& format, const std::string& out_path) {
  ldgbc::RunConfig config;
  if (example == "1") config.example = ldgbc::ExampleId::One;
  else if (example == "2") config.example = ldgbc::ExampleId::Two;
  else if (example == "3") config.example = ldgbc::ExampleId::Three;
  else throw ldgbc::ConfigError(fmt::format("unknown example '{}'", example));
  if (level < 0 || level > 10) throw ldgbc::ConfigError("level must lie in [0, 10]");

  ldgbc::Mesh mesh = ldgbc::root_mesh(config);
  for (int l = 0; l < level; ++l) mesh = ldgbc::refine_uniform(mesh);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    const auto path = resolve_output(out_path);
    file.open(path);
    if (!file) throw ldgbc::IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out = &file;
  }
  if (format == "vtk") {
    // element index as point data
    ldgbc::DiscreteField index(ldgbc::build_dof_map(mesh, ldgbc::SpaceKind::Scalar));
    for (int e = 0; e < mesh.num_elements(); ++e) index.coeffs.segment(3 * e, 3).setConstant(e);
    ldgbc::write_vtk_field(mesh, index, "element", *out);
  } else {
    ldgbc::write_mesh(mesh, *out);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LDG discretization of L2 Dirichlet boundary control for convection-diffusion"};
  app.require_subcommand(1);

  std::string config_path;
  bool quiet = false;
  auto* run_cmd = app.add_subcommand("run", "Run a convergence study described by an INI config");
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->add_flag("-q,--quiet", quiet, "Suppress progress output");

  std::uint64_t seed = 20240607;
  auto* check_cmd = app.add_subcommand("check", "Run the invariant and property suite on small meshes");
  check_cmd->add_option("--seed", seed, "RNG seed");

  std::string example = "1", format = "mesh", out_path;
  int level = 2;
  auto* dump_cmd = app.add_subcommand("dump-mesh", "Write a mesh of an example's refinement hierarchy");
  dump_cmd->add_option("--example", example, "1, 2 or 3")->capture_default_str();
  dump_cmd->add_option("--level", level, "Refinements of the root mesh")->capture_default_str();
  dump_cmd->add_option("--format", format, "mesh or vtk")->check(CLI::IsMember({"mesh", "vtk"}))->capture_default_str();
  dump_cmd->add_option("-o,--output", out_path, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return run(config_path, quiet);
    if (*check_cmd) return check(seed);
    if (*dump_cmd) return dump_mesh(example, level, format, out_path);
  } catch (const ldgbc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ldgbc::NonConvergence& e) {
    std::cerr << "PDAS did not converge: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
