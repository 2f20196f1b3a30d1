#include "ldgbc/io.hpp"

#include "ldgbc/errors.hpp"

#include <fmt/core.h>

#include <array>
#include <fstream>
#include <istream>
#include <ostream>

namespace ldgbc {

namespace {

constexpr std::array kColumns{ErrorReport::Y, ErrorReport::U, ErrorReport::Z, ErrorReport::PN};

// Round-trip precision for field values.
std::string exact(double v) { return fmt::format("{:.17g}", v); }

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace

std::string format_error(double value) { return fmt::format("{:.2e}", value); }

std::string format_rate(double value) { return fmt::format("{:.2f}", value); }

void write_table_csv(const ErrorReport& report, std::ostream& out) {
  out << "elements,h,err_y_L2,rate_y,err_u_Gamma,rate_u,err_z_Gamma,rate_z,err_pn_Gamma,rate_pn\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const ErrorRow& row = report.rows[i];
    out << row.elements << ',' << format_error(row.h);
    for (auto c : kColumns) {
      out << ',' << format_error(ErrorReport::value(row, c)) << ',';
      if (auto r = report.rate(i, c)) out << format_rate(*r);
    }
    out << '\n';
  }
}

void write_table_markdown(const ErrorReport& report, std::ostream& out) {
  if (!report.title.empty()) out << "**" << report.title << "**\n\n";
  out << "| # elements | ‖y−y_h‖_{0,Ω} | rate | ‖u−u_h‖_{0,Γ} | rate | ‖z−z_h‖_{0,Γ} | rate "
         "| ‖(p−p_h)·n‖_{0,Γ} | rate |\n";
  out << "|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const ErrorRow& row = report.rows[i];
    out << "| " << row.elements;
    for (auto c : kColumns) {
      auto r = report.rate(i, c);
      out << " | " << format_error(ErrorReport::value(row, c)) << " | " << (r ? format_rate(*r) : "-");
    }
    out << " |\n";
  }
}

void emit_table(const ErrorReport& report, TableFormat format, const std::filesystem::path& path) {
  if (report.rows.empty()) throw InvalidArgument("emit_table: empty report");
  auto out = open_for_writing(path);
  if (format == TableFormat::Csv)
    write_table_csv(report, out);
  else
    write_table_markdown(report, out);
  check_written(out, path);
}

void write_vtk_field(const Mesh& mesh, const DiscreteField& field, const std::string& name, std::ostream& out) {
  if (field.map.kind != SpaceKind::Scalar || field.map.entities != mesh.num_elements())
    throw InvalidArgument("write_vtk_field: expects a scalar P1 field on this mesh");
  const int ne = mesh.num_elements();
  out << "# vtk DataFile Version 3.0\n" << name << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 3 * ne << " double\n";
  for (int e = 0; e < ne; ++e)
    for (int v : mesh.triangle(e)) {
      const Point& x = mesh.vertex(v);
      out << exact(x.x()) << ' ' << exact(x.y()) << " 0\n";
    }
  out << "CELLS " << ne << ' ' << 4 * ne << '\n';
  for (int e = 0; e < ne; ++e) out << "3 " << 3 * e << ' ' << 3 * e + 1 << ' ' << 3 * e + 2 << '\n';
  out << "CELL_TYPES " << ne << '\n';
  for (int e = 0; e < ne; ++e) out << "5\n";
  out << "POINT_DATA " << 3 * ne << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index i = 0; i < field.coeffs.size(); ++i) out << exact(field.coeffs[i]) << '\n';
}

void write_vtk_boundary(const Mesh& mesh, const BoundaryFunction& u, const std::string& name, std::ostream& out,
                        int samples) {
  if (samples < 2) throw InvalidArgument("write_vtk_boundary: need at least 2 samples per edge");
  const int nb = mesh.num_boundary_edges();
  const int np = nb * samples;
  out << "# vtk DataFile Version 3.0\n" << name << "\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << np << " double\n";
  for (int j = 0; j < nb; ++j)
    for (int k = 0; k < samples; ++k) {
      Point x = mesh.edge_point(mesh.boundary_edges()[j], double(k) / (samples - 1));
      out << exact(x.x()) << ' ' << exact(x.y()) << " 0\n";
    }
  out << "LINES " << nb << ' ' << nb * (samples + 1) << '\n';
  for (int j = 0; j < nb; ++j) {
    out << samples;
    for (int k = 0; k < samples; ++k) out << ' ' << j * samples + k;
    out << '\n';
  }
  out << "POINT_DATA " << np << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < nb; ++j)
    for (int k = 0; k < samples; ++k) out << exact(u(j, double(k) / (samples - 1))) << '\n';
}

namespace {

template <class T>
T read_value(std::istream& in, const char* what) {
  T v;
  if (!(in >> v)) throw IoError(fmt::format("vtk: expected {}", what));
  return v;
}

void read_connectivity(std::istream& in, int count, std::vector<std::vector<int>>& cells) {
  read_value<long>(in, "connectivity size");
  cells.resize(count);
  for (auto& cell : cells) {
    int n = read_value<int>(in, "cell size");
    cell.resize(n);
    for (int& idx : cell) idx = read_value<int>(in, "point index");
  }
}

}  // namespace

VtkData read_vtk(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0) throw IoError("vtk: missing header");
  std::getline(in, line);  // title
  if (!std::getline(in, line) || line.rfind("ASCII", 0) != 0) throw IoError("vtk: only ASCII files are supported");

  VtkData data;
  std::size_t data_points = 0;
  std::string token;
  while (in >> token) {
    if (token == "DATASET") {
      read_value<std::string>(in, "dataset type");
    } else if (token == "POINTS") {
      auto n = read_value<std::size_t>(in, "point count");
      read_value<std::string>(in, "point type");
      data.points.resize(n);
      for (auto& p : data.points) {
        p.x() = read_value<double>(in, "x");
        p.y() = read_value<double>(in, "y");
        read_value<double>(in, "z");
      }
    } else if (token == "CELLS" || token == "LINES") {
      read_connectivity(in, read_value<int>(in, "cell count"), data.cells);
    } else if (token == "CELL_TYPES") {
      data.cell_types.resize(read_value<std::size_t>(in, "cell type count"));
      for (int& t : data.cell_types) t = read_value<int>(in, "cell type");
    } else if (token == "POINT_DATA") {
      data_points = read_value<std::size_t>(in, "point data count");
    } else if (token == "SCALARS") {
      auto name = read_value<std::string>(in, "array name");
      read_value<std::string>(in, "array type");
      std::getline(in, line);  // optional component count
      if (!(in >> token) || token != "LOOKUP_TABLE") throw IoError("vtk: expected LOOKUP_TABLE");
      read_value<std::string>(in, "table name");
      std::vector<double> values(data_points);
      for (double& v : values) v = read_value<double>(in, "scalar value");
      data.point_data[name] = std::move(values);
    } else {
      throw IoError(fmt::format("vtk: unsupported section '{}'", token));
    }
  }
  return data;
}

VtkData read_vtk(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  return read_vtk(in);
}

std::vector<std::filesystem::path> emit_fields(const DiscreteSolution& sol, const Mesh& mesh,
                                               const std::filesystem::path& dir, const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  std::vector<std::filesystem::path> paths{dir / (stem + "_y.vtk"), dir / (stem + "_z.vtk"),
                                           dir / (stem + "_u.vtk")};
  {
    auto out = open_for_writing(paths[0]);
    write_vtk_field(mesh, sol.y, "y_h", out);
    check_written(out, paths[0]);
  }
  {
    auto out = open_for_writing(paths[1]);
    write_vtk_field(mesh, sol.z, "z_h", out);
    check_written(out, paths[1]);
  }
  {
    auto out = open_for_writing(paths[2]);
    // A clamped variational control can kink inside an edge.
    int samples = sol.kind == ControlDiscretization::Full ? 2 : 9;
    write_vtk_boundary(mesh, [&](int j, double t) { return sol.control(j, t); }, "u_h", out, samples);
    check_written(out, paths[2]);
  }
  return paths;
}

}  // namespace ldgbc
