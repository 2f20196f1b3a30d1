#pragma once

#include "ldgbc/analysis.hpp"
#include "ldgbc/control.hpp"
#include "ldgbc/geometry.hpp"
#include "ldgbc/spaces.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ldgbc {

/// Error cells: scientific notation with 3 significant digits ("1.64e-02").
std::string format_error(double value);
/// Rate cells: two decimals ("1.00").
std::string format_rate(double value);

enum class TableFormat { Csv, Markdown };

void write_table_csv(const ErrorReport& report, std::ostream& out);
void write_table_markdown(const ErrorReport& report, std::ostream& out);
/// Throws InvalidArgument for an empty report and IoError when the file
/// cannot be written.
void emit_table(const ErrorReport& report, TableFormat format, const std::filesystem::path& path);

/// Legacy ASCII VTK unstructured grid of a discontinuous P1 scalar field:
/// every element carries its own three points.
void write_vtk_field(const Mesh& mesh, const DiscreteField& field, const std::string& name, std::ostream& out);

/// Legacy ASCII VTK polydata with one two-point line per boundary edge
/// (sampled at `samples` points per edge, so kinks of a clamped control show).
void write_vtk_boundary(const Mesh& mesh, const BoundaryFunction& u, const std::string& name, std::ostream& out,
                        int samples = 2);

/// Contents of a legacy ASCII VTK file written by the functions above.
struct VtkData {
  std::vector<Point> points;
  std::vector<std::vector<int>> cells;  // CELLS or LINES connectivity
  std::vector<int> cell_types;          // empty for polydata
  std::map<std::string, std::vector<double>> point_data;
};

/// Throws IoError on malformed input.
VtkData read_vtk(std::istream& in);
VtkData read_vtk(const std::filesystem::path& path);

/// Writes <stem>_y.vtk, <stem>_z.vtk and <stem>_u.vtk into `dir` and returns
/// their paths.
std::vector<std::filesystem::path> emit_fields(const DiscreteSolution& sol, const Mesh& mesh,
                                               const std::filesystem::path& dir, const std::string& stem = "solution");

}  // namespace ldgbc
