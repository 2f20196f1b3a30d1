#pragma once

#include "ldgbc/analysis.hpp"
#include "ldgbc/control.hpp"
#include "ldgbc/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ldgbc {

enum class ExampleId { One = 1, Two = 2, Three = 3, Custom = 0 };

/// Constant-coefficient problem for `example = custom`.
struct CustomProblem {
  enum class Domain { UnitSquare, Slanted };
  Domain domain = Domain::UnitSquare;
  double angle = kExample3Angle;  // Slanted only
  Eigen::Vector2d beta{1.0, 1.0};
  double alpha = 1.0;
  double source = 0.0;
  double desired = 0.0;
};

struct RunConfig {
  ExampleId example = ExampleId::One;
  CustomProblem custom;
  double epsilon = 1.0;
  double omega = 1.0;
  ControlMode mode = ControlMode::full();
  /// Overrides of the example's bounds; +-infinity removes a bound.
  std::optional<double> lower, upper;
  /// Refinement levels of the example's root mesh (see root_mesh).
  std::vector<int> levels{2, 3, 4, 5, 6};
  /// Level of the reference solution (Examples 2, 3 and custom).
  std::optional<int> reference_level;
  std::filesystem::path output_dir = "out";
  std::string title;
  bool emit_csv = true;
  bool emit_markdown = true;
  bool emit_vtk = false;
  bool emit_matrices = false;
  int pdas_max_iterations = 50;
  std::optional<Eigen::Vector2d> c12_direction;
  std::uint64_t seed = 20240607;

  bool uses_reference() const { return example != ExampleId::One; }
  /// Throws ConfigError.
  void validate() const;
};

/// Coarsest mesh of the example: the unit square cut into two triangles, or
/// the three-triangle split of the slanted quadrilateral.
Mesh root_mesh(const RunConfig& config);
/// Element count of the root mesh refined `level` times.
int elements_at_level(const RunConfig& config, int level);

/// Problem data with the config's overrides applied.
ProblemData run_problem(const RunConfig& config);

/// INI text with [problem], [discretization] and [output] sections.
/// Throws ConfigError on unknown keys and malformed values.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);

struct LevelResult {
  std::shared_ptr<const Mesh> mesh;
  std::unique_ptr<Discretization> disc;
  DiscreteSolution solution;
  double seconds = 0.0;
};

struct RunResult {
  ErrorReport report;
  std::vector<LevelResult> levels;
  std::optional<LevelResult> reference;
};

using ProgressLog = std::function<void(const std::string&)>;

/// Solves every level (and the reference, when used) and fills the error
/// table. PDAS failure rethrows NonConvergence naming the level.
RunResult run_example(const RunConfig& config, const ProgressLog& log = {});

/// Writes the enabled artifacts into `dir` and returns their paths.
std::vector<std::filesystem::path> write_run_outputs(const RunConfig& config, const RunResult& result,
                                                     const std::filesystem::path& dir);

}  // namespace ldgbc
