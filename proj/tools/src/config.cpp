#include "app/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "shellpath/error.hpp"
#include "shellpath/subdivision.hpp"

namespace shellpath::app {

namespace {

std::string position(const std::string& source, const YAML::Mark& m) {
  if (m.is_null()) return source + ": ";
  return source + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1) + ": ";
}

class Section {
public:
  Section(const std::string& source, const YAML::Node& node, std::string path)
      : source_(source), node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) fail(node_, "'" + path_ + "' must be a mapping");
  }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    throw ConfigError(position(source_, n.Mark()) + msg);
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  YAML::Node required(const std::string& key) {
    used_.insert(key);
    const YAML::Node n = node_[key];
    if (!n) fail(node_, "missing key '" + qualified(key) + "'");
    return n;
  }

  YAML::Node optional(const std::string& key) {
    used_.insert(key);
    return node_[key];
  }

  template <class T>
  T get(const std::string& key) {
    return convert<T>(required(key), key);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    const YAML::Node n = optional(key);
    return n ? convert<T>(n, key) : fallback;
  }

  double positive(const std::string& key) { return check_positive(get<double>(key), key); }
  double positive(const std::string& key, double fallback) { return check_positive(get<double>(key, fallback), key); }

  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    const YAML::Node n = optional(key);
    if (!n) return fallback;
    if (!n.IsSequence() || n.size() != 3) fail(n, "'" + qualified(key) + "' must be a list of three numbers");
    return {convert<double>(n[0], key), convert<double>(n[1], key), convert<double>(n[2], key)};
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!used_.count(key)) fail(kv.first, "unknown key '" + qualified(key) + "'");
    }
  }

  const std::string& source() const { return source_; }

private:
  template <class T>
  T convert(const YAML::Node& n, const std::string& key) const {
    try {
      return n.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(n, "'" + qualified(key) + "' has the wrong type");
    }
  }

  double check_positive(double v, const std::string& key) const {
    if (!(v > 0.0)) fail(node_[key] ? node_[key] : node_, "'" + qualified(key) + "' must be positive");
    return v;
  }

  const std::string& source_;
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

std::array<bool, 3> components(Section& s, const YAML::Node& n) {
  std::array<bool, 3> c{false, false, false};
  if (!n.IsSequence() || n.size() == 0) s.fail(n, "'fix' must be a nonempty list of x, y, z");
  for (const auto& e : n) {
    const std::string a = e.as<std::string>();
    if (a == "x") c[0] = true;
    else if (a == "y") c[1] = true;
    else if (a == "z") c[2] = true;
    else s.fail(e, "'fix' entries must be x, y or z, got '" + a + "'");
  }
  return c;
}

ConstraintRule constraint(const std::string& source, const YAML::Node& n, int index) {
  Section s(source, n, "geometry.constraints[" + std::to_string(index) + "]");
  const std::string sel = s.get<std::string>("select");
  ConstraintRule r;
  if (sel == "boundary") {
    r.selector = ConstraintRule::Selector::Boundary;
  } else if (sel == "all") {
    r.selector = ConstraintRule::Selector::All;
  } else if (sel == "plane") {
    r.selector = ConstraintRule::Selector::Plane;
    const YAML::Node axis = s.required("axis");
    const std::string a = axis.as<std::string>();
    if (a != "x" && a != "y" && a != "z") s.fail(axis, "'axis' must be x, y or z");
    r.axis = a[0] - 'x';
    r.offset = s.get<double>("offset", 0.0);
  } else if (sel == "point") {
    r.selector = ConstraintRule::Selector::Point;
    if (!s.has("at")) s.fail(n, "missing key '" + s.qualified("at") + "'");
    r.point = s.vec3("at", Vec3::Zero());
  } else {
    s.fail(s.required("select"), "'select' must be boundary, plane, point or all, got '" + sel + "'");
  }
  r.components = components(s, s.required("fix"));
  r.tolerance = s.positive("tolerance", r.tolerance);
  s.finish();
  return r;
}

void read_geometry(const std::string& source, const YAML::Node& node, Benchmark& b) {
  Section s(source, node, "geometry");
  const bool bench = s.has("benchmark"), mesh = s.has("mesh");
  if (bench == mesh) s.fail(node, "geometry needs exactly one of 'benchmark' or 'mesh'");
  const int refine = s.get<int>("refine", 0);
  if (refine < 0 || refine > 4) s.fail(s.optional("refine"), "'geometry.refine' must be in [0, 4]");
  if (bench) {
    const YAML::Node n = s.required("benchmark");
    try {
      b = make_benchmark(n.as<std::string>(), BenchmarkOptions{refine, 0, -1.0});
    } catch (const ConfigError& e) {
      s.fail(n, e.what());
    }
  } else {
    const YAML::Node n = s.required("mesh");
    std::filesystem::path p = n.as<std::string>();
    if (p.is_relative()) p = std::filesystem::path(source).parent_path() / p;
    try {
      const ControlMesh m = load_control_mesh(p.string());
      b.mesh = refine ? catmull_clark_subdivide(m, refine) : m;
    } catch (const Error& e) {
      s.fail(n, e.what());
    }
    b.name = p.stem().string();
    const YAML::Node list = s.required("constraints");
    if (!list.IsSequence()) s.fail(list, "'geometry.constraints' must be a list");
    for (std::size_t i = 0; i < list.size(); ++i) b.constraints.push_back(constraint(source, list[i], static_cast<int>(i)));
    b.apex = s.vec3("apex", Vec3::Zero());
    b.volume_factor = s.positive("volume_factor", 1.0);
  }
  s.finish();
}

void read_material(const std::string& source, const YAML::Node& node, Benchmark& b) {
  Section s(source, node, "material");
  const YAML::Node model = s.required("model");
  const std::string m = model.as<std::string>();
  if (m == "mooney_rivlin") {
    b.shell.material = MaterialParams::mooney_rivlin(s.positive("c1"), s.get<double>("c2"));
  } else if (m == "neo_hookean") {
    b.shell.material = MaterialParams::neo_hookean(s.positive("c1"));
  } else if (m == "st_venant_kirchhoff") {
    b.shell.material = MaterialParams::st_venant_kirchhoff(s.positive("young"), s.get<double>("poisson"));
  } else {
    s.fail(model, "'material.model' must be mooney_rivlin, neo_hookean or st_venant_kirchhoff, got '" + m + "'");
  }
  try {
    b.shell.material.validate();
  } catch (const Error& e) {
    s.fail(node, e.what());
  }
  b.shell.thickness = s.positive("thickness");
  s.finish();
}

void read_load(const std::string& source, const YAML::Node& node, Benchmark& b) {
  Section s(source, node, "load");
  ContinuationSettings& cs = b.continuation;
  b.reference_pressure = s.positive("reference_pressure");
  cs.dkappa0 = s.positive("dkappa0");
  cs.kappa_target = s.positive("kappa_target");
  b.volume_ratio_target = s.has("volume_ratio") ? s.positive("volume_ratio") : 0.0;
  s.finish();
}

void read_solver(const std::string& source, const YAML::Node& node, ContinuationSettings& cs) {
  Section s(source, node, "solver");
  cs.solver.tol_rel = s.positive("tol_rel", cs.solver.tol_rel);
  cs.solver.max_iter = static_cast<int>(s.positive("max_iter", cs.solver.max_iter));
  cs.solver.line_search = s.get<int>("line_search", cs.solver.line_search);
  cs.solver.psi = s.get<double>("psi", cs.solver.psi);
  if (cs.solver.psi < 0.0 || cs.solver.line_search < 0) s.fail(node, "'solver.psi' and 'solver.line_search' must not be negative");
  cs.ds_min_factor = s.positive("ds_min_factor", cs.ds_min_factor);
  cs.ds_max_factor = s.positive("ds_max_factor", cs.ds_max_factor);
  if (cs.ds_min_factor > cs.ds_max_factor) s.fail(node, "'solver.ds_min_factor' exceeds 'solver.ds_max_factor'");
  cs.max_steps = static_cast<int>(s.positive("max_steps", cs.max_steps));
  cs.target_iters = static_cast<int>(s.positive("target_iters", cs.target_iters));
  s.finish();
}

void read_stability(const std::string& source, const YAML::Node& node, Benchmark& b) {
  ContinuationSettings& cs = b.continuation;
  Section s(source, node, "stability");
  b.rigid_metric = s.get<bool>("rigid_metric", b.rigid_metric);
  cs.check_stability = s.get<bool>("enabled", cs.check_stability);
  cs.stability.modes = static_cast<int>(s.positive("modes", cs.stability.modes));
  cs.stability.zero_tol = s.positive("zero_tol", cs.stability.zero_tol);
  cs.beta = s.positive("beta", cs.beta);
  cs.branching = s.get<bool>("branching", cs.branching);
  if (cs.branching && !cs.check_stability) s.fail(node, "'stability.branching' needs 'stability.enabled'");
  s.finish();
}

void read_output(const std::string& source, const YAML::Node& node, OutputSettings& out) {
  Section s(source, node, "output");
  out.directory = s.get<std::string>("directory", out.directory);
  out.snapshot_every = s.get<int>("snapshot_every", out.snapshot_every);
  if (out.snapshot_every < 0) s.fail(s.optional("snapshot_every"), "'output.snapshot_every' must not be negative");
  out.resolution = static_cast<int>(s.positive("resolution", out.resolution));
  s.finish();
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& source) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(position(source, e.mark) + e.msg);
  }
  if (!doc || doc.IsNull()) throw ConfigError(source + ": empty configuration");
  RunConfig cfg;
  try {
    Section root(source, doc, "");
    read_geometry(source, root.required("geometry"), cfg.problem);
    read_material(source, root.required("material"), cfg.problem);
    read_load(source, root.required("load"), cfg.problem);
    if (const YAML::Node n = root.optional("solver")) read_solver(source, n, cfg.problem.continuation);
    if (const YAML::Node n = root.optional("stability")) read_stability(source, n, cfg.problem);
    if (const YAML::Node n = root.optional("output")) read_output(source, n, cfg.output);
    root.finish();
  } catch (const YAML::Exception& e) {
    throw ConfigError(position(source, e.mark) + e.msg);
  }
  Benchmark& b = cfg.problem;
  b.continuation.thickness = b.shell.thickness;
  b.continuation.reference_load = b.reference_pressure;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), path);
}

nlohmann::json describe(const Benchmark& b, const OutputSettings& out) {
  const ContinuationSettings& cs = b.continuation;
  const MaterialParams& m = b.shell.material;
  nlohmann::json constraints = nlohmann::json::array();
  for (const ConstraintRule& r : b.constraints) constraints.push_back(r.describe());
  nlohmann::json material{{"model", m.describe()}, {"thickness", b.shell.thickness}};
  if (m.kind == MaterialKind::MooneyRivlin) {
    material["c1"] = m.c1;
    material["c2"] = m.c2;
  } else {
    material["young"] = m.young;
    material["poisson"] = m.poisson;
  }
  return {
      {"geometry",
       {{"name", b.name},
        {"vertices", b.mesh.num_vertices()},
        {"faces", b.mesh.num_faces()},
        {"constraints", constraints},
        {"apex", {b.apex.x(), b.apex.y(), b.apex.z()}},
        {"volume_factor", b.volume_factor}}},
      {"material", material},
      {"load",
       {{"reference_pressure", b.reference_pressure},
        {"dkappa0", cs.dkappa0},
        {"kappa_target", cs.kappa_target},
        {"volume_ratio", b.volume_ratio_target}}},
      {"solver",
       {{"tol_rel", cs.solver.tol_rel},
        {"max_iter", cs.solver.max_iter},
        {"line_search", cs.solver.line_search},
        {"psi", cs.solver.psi},
        {"ds_min_factor", cs.ds_min_factor},
        {"ds_max_factor", cs.ds_max_factor},
        {"max_steps", cs.max_steps},
        {"target_iters", cs.target_iters}}},
      {"stability",
       {{"enabled", cs.check_stability},
        {"modes", cs.stability.modes},
        {"zero_tol", cs.stability.zero_tol},
        {"beta", cs.beta},
        {"branching", cs.branching},
        {"rigid_metric", b.rigid_metric}}},
      {"output",
       {{"directory", out.directory}, {"snapshot_every", out.snapshot_every}, {"resolution", out.resolution}}},
  };
}

}  // namespace shellpath::app
