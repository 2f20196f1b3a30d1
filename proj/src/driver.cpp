#include "ldgbc/driver.hpp"

#include "ldgbc/errors.hpp"
#include "ldgbc/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace ldgbc {

namespace pt = boost::property_tree;

void RunConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(omega > 0.0)) throw ConfigError("omega must be positive");
  if (levels.empty()) throw ConfigError("the mesh sequence is empty");
  if (levels.front() < 0) throw ConfigError("mesh levels must be nonnegative");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) throw ConfigError("the mesh sequence must be strictly increasing");
  if (uses_reference()) {
    if (!reference_level) throw ConfigError("a reference level is required for this example");
    if (*reference_level <= levels.back())
      throw ConfigError(fmt::format("reference level {} must exceed the deepest study level {}", *reference_level,
                                    levels.back()));
  }
  if (example == ExampleId::One && (lower || upper))
    throw ConfigError("example 1 has a closed-form unconstrained solution; bounds cannot be set");
  double lo = lower.value_or(-kInfinity), hi = upper.value_or(kInfinity);
  if (lower && upper && lo > hi) throw ConfigError("lower bound exceeds upper bound");
  if (pdas_max_iterations < 1) throw ConfigError("pdas_max_iterations must be at least 1");
  if (c12_direction && c12_direction->norm() == 0.0) throw ConfigError("c12_direction must be nonzero");
}

namespace {

bool slanted(const RunConfig& config) {
  return config.example == ExampleId::Three ||
         (config.example == ExampleId::Custom && config.custom.domain == CustomProblem::Domain::Slanted);
}

}  // namespace

Mesh root_mesh(const RunConfig& config) {
  if (slanted(config)) {
    DomainSpec domain =
        slanted_quadrilateral_domain(config.example == ExampleId::Three ? kExample3Angle : config.custom.angle);
    domain.split = DomainSpec::CoarseSplit::LongestEdgeMidpoint;
    return build_polygon_mesh(domain, 0);
  }
  return build_unit_square_mesh(1);
}

int elements_at_level(const RunConfig& config, int level) {
  return (slanted(config) ? 3 : 2) << (2 * level);
}

ProblemData run_problem(const RunConfig& config) {
  ProblemData data;
  switch (config.example) {
    case ExampleId::One:
      data = manufactured_example1(config.epsilon, config.omega).problem();
      break;
    case ExampleId::Two:
      data = example2_problem(config.epsilon);
      break;
    case ExampleId::Three:
      data = example3_problem(config.epsilon);
      break;
    case ExampleId::Custom: {
      const CustomProblem c = config.custom;
      data.epsilon = config.epsilon;
      data.beta = [b = c.beta](const Point&) { return b; };
      data.reaction = [a = c.alpha](const Point&) { return a; };
      data.source = [f = c.source](const Point&) { return f; };
      data.desired = [g = c.desired](const Point&) { return g; };
      break;
    }
  }
  data.omega = config.omega;
  if (config.lower) data.lower = *config.lower;
  if (config.upper) data.upper = *config.upper;
  if (config.c12_direction) data.c12_direction = *config.c12_direction;
  return data;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || std::isnan(v))
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
  return v;
}

long parse_integer(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw ConfigError(fmt::format("{}: '{}' is not an integer", key, text));
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, text));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

std::vector<long> parse_integer_list(const std::string& key, const std::string& text) {
  std::vector<long> out;
  for (const auto& s : split_list(text)) out.push_back(parse_integer(key, s));
  return out;
}

Eigen::Vector2d parse_vector(const std::string& key, const std::string& text) {
  auto items = split_list(text);
  if (items.size() != 2) throw ConfigError(fmt::format("{}: expected two comma-separated numbers", key));
  return {parse_double(key, items[0]), parse_double(key, items[1])};
}

// Inverse of elements_at_level.
int level_of(const RunConfig& config, const std::string& key, long elements) {
  for (int level = 0; level < 14; ++level)
    if (elements_at_level(config, level) == elements) return level;
  throw ConfigError(fmt::format("{}: {} elements is not a refinement of the {}-element root mesh", key, elements,
                                elements_at_level(config, 0)));
}

const std::set<std::string> kProblemKeys{"example", "epsilon", "omega",  "lower", "upper",   "c12_direction",
                                         "domain",  "angle",   "beta",   "alpha", "source",  "desired"};
const std::set<std::string> kDiscretizationKeys{"mode",            "levels",          "elements",
                                                "reference_level", "reference_elements", "pdas_max_iterations",
                                                "pdas_penalty",    "seed"};
const std::set<std::string> kOutputKeys{"directory", "title", "csv", "markdown", "vtk", "matrices"};

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }

  const std::map<std::string, const std::set<std::string>*> sections{
      {"problem", &kProblemKeys}, {"discretization", &kDiscretizationKeys}, {"output", &kOutputKeys}};
  for (const auto& [name, section] : tree) {
    auto it = sections.find(name);
    if (it == sections.end()) throw ConfigError(fmt::format("unknown section [{}]", name));
    if (!section.data().empty()) throw ConfigError(fmt::format("key '{}' outside of a section", name));
    for (const auto& [key, value] : section)
      if (!it->second->count(key)) throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, name));
  }

  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '/'))) return *v;
    return std::nullopt;
  };

  RunConfig c;
  if (auto v = get("problem/example")) {
    std::string s = trim(*v);
    if (s == "1") c.example = ExampleId::One;
    else if (s == "2") c.example = ExampleId::Two;
    else if (s == "3") c.example = ExampleId::Three;
    else if (s == "custom") c.example = ExampleId::Custom;
    else throw ConfigError(fmt::format("example: '{}' is not one of 1, 2, 3, custom", s));
  }
  if (auto v = get("problem/epsilon")) c.epsilon = parse_double("epsilon", *v);
  if (auto v = get("problem/omega")) c.omega = parse_double("omega", *v);
  if (auto v = get("problem/lower")) c.lower = parse_double("lower", *v);
  if (auto v = get("problem/upper")) c.upper = parse_double("upper", *v);
  if (auto v = get("problem/c12_direction")) c.c12_direction = parse_vector("c12_direction", *v);

  const bool custom = c.example == ExampleId::Custom;
  for (const char* key : {"domain", "angle", "beta", "alpha", "source", "desired"})
    if (!custom && get(std::string("problem/") + key))
      throw ConfigError(fmt::format("{} is only accepted with example = custom", key));
  if (auto v = get("problem/domain")) {
    std::string s = trim(*v);
    if (s == "unit_square") c.custom.domain = CustomProblem::Domain::UnitSquare;
    else if (s == "slanted") c.custom.domain = CustomProblem::Domain::Slanted;
    else throw ConfigError(fmt::format("domain: '{}' is not one of unit_square, slanted", s));
  }
  if (auto v = get("problem/angle")) c.custom.angle = parse_double("angle", *v);
  if (auto v = get("problem/beta")) c.custom.beta = parse_vector("beta", *v);
  if (auto v = get("problem/alpha")) c.custom.alpha = parse_double("alpha", *v);
  if (auto v = get("problem/source")) c.custom.source = parse_double("source", *v);
  if (auto v = get("problem/desired")) c.custom.desired = parse_double("desired", *v);

  if (auto v = get("discretization/mode")) {
    std::string s = trim(*v);
    if (s == "full") c.mode.kind = ControlDiscretization::Full;
    else if (s == "variational") c.mode.kind = ControlDiscretization::Variational;
    else throw ConfigError(fmt::format("mode: '{}' is not one of full, variational", s));
  }
  if (auto v = get("discretization/pdas_penalty")) c.mode.penalty = parse_double("pdas_penalty", *v);

  auto levels = get("discretization/levels");
  auto elements = get("discretization/elements");
  if (levels && elements) throw ConfigError("give either levels or elements, not both");
  if (levels) {
    c.levels.clear();
    for (long l : parse_integer_list("levels", *levels)) c.levels.push_back(static_cast<int>(l));
  }
  if (elements) {
    c.levels.clear();
    for (long n : parse_integer_list("elements", *elements)) c.levels.push_back(level_of(c, "elements", n));
  }
  auto ref_level = get("discretization/reference_level");
  auto ref_elements = get("discretization/reference_elements");
  if (ref_level && ref_elements) throw ConfigError("give either reference_level or reference_elements, not both");
  if (ref_level) c.reference_level = static_cast<int>(parse_integer("reference_level", *ref_level));
  if (ref_elements)
    c.reference_level = level_of(c, "reference_elements", parse_integer("reference_elements", *ref_elements));
  if (auto v = get("discretization/pdas_max_iterations"))
    c.pdas_max_iterations = static_cast<int>(parse_integer("pdas_max_iterations", *v));
  if (auto v = get("discretization/seed")) c.seed = static_cast<std::uint64_t>(parse_integer("seed", *v));

  if (auto v = get("output/directory")) c.output_dir = trim(*v);
  if (auto v = get("output/title")) c.title = trim(*v);
  if (auto v = get("output/csv")) c.emit_csv = parse_bool("csv", *v);
  if (auto v = get("output/markdown")) c.emit_markdown = parse_bool("markdown", *v);
  if (auto v = get("output/vtk")) c.emit_vtk = parse_bool("vtk", *v);
  if (auto v = get("output/matrices")) c.emit_matrices = parse_bool("matrices", *v);

  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  return parse_run_config(in);
}

namespace {

LevelResult solve_level(const RunConfig& config, const ProblemData& data, std::shared_ptr<const Mesh> mesh) {
  auto start = std::chrono::steady_clock::now();
  LevelResult r;
  r.mesh = mesh;
  r.disc = std::make_unique<Discretization>(discretize(mesh, data, config.mode.space()));
  PdasOptions options;
  options.max_iterations = config.pdas_max_iterations;
  try {
    r.solution = pdas_solve(*r.disc, config.mode, options);
  } catch (const NonConvergence& e) {
    throw NonConvergence(fmt::format("{} elements: {}", mesh->num_elements(), e.what()));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

RunResult run_example(const RunConfig& config, const ProgressLog& log) {
  config.validate();
  const ProblemData data = run_problem(config);
  const int deepest = config.uses_reference() ? *config.reference_level : config.levels.back();

  std::vector<std::shared_ptr<const Mesh>> meshes;
  meshes.push_back(std::make_shared<const Mesh>(root_mesh(config)));
  for (int level = 1; level <= deepest; ++level) meshes.push_back(std::make_shared<const Mesh>(refine_uniform(*meshes.back())));

  RunResult result;
  result.report.title = config.title;
  if (config.uses_reference()) {
    result.reference = solve_level(config, data, meshes[deepest]);
    if (log)
      log(fmt::format("reference: {} elements, {} PDAS iterations, {:.1f} s", meshes[deepest]->num_elements(),
                      result.reference->solution.iterations, result.reference->seconds));
  }

  std::optional<ManufacturedCase> exact;
  if (config.example == ExampleId::One) exact = manufactured_example1(config.epsilon, config.omega);

  for (int level : config.levels) {
    LevelResult r = solve_level(config, data, meshes[level]);
    ErrorRow row = exact ? exact_errors(*r.mesh, r.solution, *exact)
                         : reference_compare(*r.mesh, r.solution, *result.reference->mesh, result.reference->solution);
    result.report.rows.push_back(row);
    if (log)
      log(fmt::format("{} elements: {} PDAS iterations, {:.1f} s, err_y {} err_u {}", row.elements,
                      r.solution.iterations, r.seconds, format_error(row.err_y), format_error(row.err_u)));
    result.levels.push_back(std::move(r));
  }
  return result;
}

std::vector<std::filesystem::path> write_run_outputs(const RunConfig& config, const RunResult& result,
                                                     const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  std::vector<std::filesystem::path> written;
  if (config.emit_csv) {
    emit_table(result.report, TableFormat::Csv, dir / "errors.csv");
    written.push_back(dir / "errors.csv");
  }
  if (config.emit_markdown) {
    emit_table(result.report, TableFormat::Markdown, dir / "errors.md");
    written.push_back(dir / "errors.md");
  }
  for (const LevelResult& r : result.levels) {
    const std::string stem = fmt::format("e{}", r.mesh->num_elements());
    if (config.emit_vtk) {
      auto paths = emit_fields(r.solution, *r.mesh, dir / "fields", stem);
      written.insert(written.end(), paths.begin(), paths.end());
    }
    if (config.emit_matrices) {
      const BlockOperator& ops = r.disc->ops;
      const std::pair<const char*, const SparseMatrix*> blocks[] = {
          {"A", &ops.a}, {"B", &ops.b}, {"C", &ops.c}, {"M1", &ops.m1}, {"M2", &ops.m2}, {"M_Omega", &ops.mass_omega},
          {"M_Gamma", &ops.mass_gamma}};
      std::filesystem::create_directories(dir / "matrices", ec);
      for (const auto& [name, m] : blocks) {
        auto path = dir / "matrices" / fmt::format("{}_{}.mtx", stem, name);
        write_matrix_market(*m, path);
        written.push_back(path);
      }
    }
  }
  return written;
}

}  // namespace ldgbc
