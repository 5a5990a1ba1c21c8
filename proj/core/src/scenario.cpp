#include "sivo/scenario.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <variant>

#include <nlohmann/json.hpp>

#include "sivo/error.hpp"
#include "sivo/format.hpp"

namespace sivo {
namespace {

struct Value {
  std::variant<double, std::string, bool, std::vector<Value>> data;
};

struct Entry {
  Value value;
  std::size_t line = 0;
};

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ConfigError("scenario line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_bare_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '-';
}

class Parser {
 public:
  Parser(std::string_view s, std::size_t line) : s_(s), line_(line) {}

  Value value() {
    skip_ws();
    if (pos_ >= s_.size()) fail(line_, "missing value");
    const char c = s_[pos_];
    if (c == '"') return Value{string()};
    if (c == '[') return Value{array()};
    std::size_t end = pos_;
    while (end < s_.size() && s_[end] != ',' && s_[end] != ']' && s_[end] != ' ' &&
           s_[end] != '\t' && s_[end] != '#') {
      ++end;
    }
    const std::string_view tok = s_.substr(pos_, end - pos_);
    pos_ = end;
    if (tok == "true") return Value{true};
    if (tok == "false") return Value{false};
    std::string cleaned;
    for (char ch : tok) {
      if (ch != '_') cleaned += ch;
    }
    double d = 0.0;
    if (!parse_number(cleaned, d)) fail(line_, "cannot parse value '" + std::string(tok) + "'");
    return Value{d};
  }

  std::string string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\' && pos_ < s_.size()) {
        const char e = s_[pos_++];
        c = e == 'n' ? '\n' : e == 't' ? '\t' : e;
      }
      out += c;
    }
    if (pos_ >= s_.size()) fail(line_, "unterminated string");
    ++pos_;
    return out;
  }

  std::vector<Value> array() {
    ++pos_;  // '['
    std::vector<Value> out;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return out;
    }
    for (;;) {
      out.push_back(value());
      skip_ws();
      if (pos_ >= s_.size()) fail(line_, "unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      if (s_[pos_] != ',') fail(line_, "expected ',' in array");
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {  // trailing comma
        ++pos_;
        return out;
      }
    }
  }

  void expect_end() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail(line_, "unexpected trailing text");
  }

  std::string key() {
    skip_ws();
    std::string out;
    for (;;) {
      if (pos_ < s_.size() && s_[pos_] == '"') {
        out += string();
      } else {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && is_bare_key_char(s_[pos_])) ++pos_;
        if (pos_ == start) fail(line_, "expected a key");
        out += s_.substr(start, pos_ - start);
      }
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '.') {
        out += '.';
        ++pos_;
        skip_ws();
        continue;
      }
      return out;
    }
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::map<std::string, Entry> parse_document(std::string_view text) {
  std::map<std::string, Entry> doc;
  std::string table;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    Parser p(line, line_no);
    if (p.consume('[')) {
      table = p.key();
      if (!p.consume(']')) fail(line_no, "expected ']'");
      p.expect_end();
      continue;
    }
    const std::string key = p.key();
    if (!p.consume('=')) fail(line_no, "expected '='");
    Value v = p.value();
    p.expect_end();
    const std::string full = table.empty() ? key : table + "." + key;
    if (!doc.emplace(full, Entry{std::move(v), line_no}).second) {
      fail(line_no, "duplicate key '" + full + "'");
    }
  }
  return doc;
}

// Typed accessors that consume entries; leftovers are unknown keys.
class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> doc) : doc_(std::move(doc)) {}

  template <typename F>
  void with(const std::string& key, F&& apply) {
    auto it = doc_.find(key);
    if (it == doc_.end()) return;
    const Entry e = std::move(it->second);
    doc_.erase(it);
    try {
      apply(e.value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      fail(e.line, "'" + key + "': " + ex.what());
    }
  }

  void number(const std::string& key, double& out) {
    with(key, [&](const Value& v) { out = as_number(v, key); });
  }
  void integer(const std::string& key, auto& out) {
    with(key, [&](const Value& v) {
      const double d = as_number(v, key);
      if (d < 0 || std::floor(d) != d) throw ConfigError("'" + key + "' must be a non-negative integer");
      out = static_cast<std::remove_reference_t<decltype(out)>>(d);
    });
  }
  void boolean(const std::string& key, bool& out) {
    with(key, [&](const Value& v) {
      if (const bool* b = std::get_if<bool>(&v.data)) {
        out = *b;
      } else {
        throw ConfigError("'" + key + "' must be true or false");
      }
    });
  }
  void string(const std::string& key, const std::function<void(const std::string&)>& out) {
    with(key, [&](const Value& v) {
      if (const std::string* s = std::get_if<std::string>(&v.data)) {
        out(*s);
      } else {
        throw ConfigError("'" + key + "' must be a string");
      }
    });
  }
  std::vector<double> numbers_of(const Value& v, const std::string& key) {
    const auto* arr = std::get_if<std::vector<Value>>(&v.data);
    if (!arr) throw ConfigError("'" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : *arr) out.push_back(as_number(x, key));
    return out;
  }
  void vector3(const std::string& key, Vector3d& out) {
    with(key, [&](const Value& v) {
      const auto xs = numbers_of(v, key);
      if (xs.size() != 3) throw ConfigError("'" + key + "' must have 3 entries");
      out = Vector3d(xs[0], xs[1], xs[2]);
    });
  }

  /// Keys under `prefix.` still unread, with the prefix removed.
  std::vector<std::pair<std::string, Entry>> take_table(const std::string& prefix) {
    std::vector<std::pair<std::string, Entry>> out;
    for (auto it = doc_.begin(); it != doc_.end();) {
      if (it->first.rfind(prefix + ".", 0) == 0) {
        out.emplace_back(it->first.substr(prefix.size() + 1), std::move(it->second));
        it = doc_.erase(it);
      } else {
        ++it;
      }
    }
    return out;
  }

  void ensure_consumed() const {
    if (!doc_.empty()) {
      const auto& [key, e] = *doc_.begin();
      fail(e.line, "unknown key '" + key + "'");
    }
  }

  static double as_number(const Value& v, const std::string& key) {
    if (const double* d = std::get_if<double>(&v.data)) return *d;
    throw ConfigError("'" + key + "' must be a number");
  }

 private:
  std::map<std::string, Entry> doc_;
};

Matrix3d diagonal3(const std::vector<double>& xs, const std::string& key) {
  if (xs.size() == 1) return Matrix3d::Identity() * xs[0];
  if (xs.size() == 3) return Vector3d(xs[0], xs[1], xs[2]).asDiagonal();
  throw ConfigError("'" + key + "' needs 1 or 3 diagonal entries");
}

Matrix6d pose_diagonal(double sigma_trans, double sigma_rot) {
  Vector6d d;
  d << Vector3d::Constant(sigma_trans * sigma_trans), Vector3d::Constant(sigma_rot * sigma_rot);
  return d.asDiagonal();
}

}  // namespace

void Scenario::validate() const {
  world.validate(selection.taxonomy);
  trajectory.validate();
  rig.validate();
  observation.validate();
  dropout.validate();
  selection.validate();
  check_spd(estimator.initial_covariance);
  if (strategies.empty()) throw ConfigError("no strategies configured");
}

Scenario default_scenario() {
  Scenario s;
  s.name = "loop";
  s.seed = 7;

  s.rig.fx = 718.856;
  s.rig.fy = 718.856;
  s.rig.cx = 607.1928;
  s.rig.cy = 185.2157;
  s.rig.baseline = 0.537;
  s.rig.width = 1241;
  s.rig.height = 376;

  s.trajectory.shape = TrajectoryShape::Loop;
  s.trajectory.length = 200.0;
  s.trajectory.frames = 500;

  s.world.landmark_count = 3000;
  s.world.bounds_min = Vector3d(-45.0, -10.0, -15.0);
  s.world.bounds_max = Vector3d(110.0, 3.0, 80.0);
  s.world.dynamic_fraction = 0.3;
  s.world.seed = s.seed;

  s.observation.max_depth = 80.0;
  // Conservative model noise; the simulated pixel noise stays at 1 px.
  s.observation.model_noise = 4.0 * Matrix3d::Identity();

  s.dropout.samples = 6;
  s.dropout.kappa_static = 112.0;
  s.dropout.kappa_dynamic = 112.0;

  s.selection.strategy = Strategy::KaessBatch;
  s.selection.threshold_bits = 2.0;
  s.selection.mc_samples = 6;

  s.estimator.initial_covariance = pose_diagonal(1e-3, 1e-4);
  s.estimator.process_noise = pose_diagonal(0.05, 0.002);
  return s;
}

Strategy parse_strategy(std::string_view name) {
  if (name == "all") return Strategy::AllFeatures;
  if (name == "mi") return Strategy::MiOnly;
  if (name == "sivo-batch" || name == "sivo") return Strategy::KaessBatch;
  if (name == "sivo-greedy") return Strategy::DavisonGreedy;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

TrajectoryShape parse_shape(std::string_view name) {
  if (name == "straight" || name == "straight_line") return TrajectoryShape::StraightLine;
  if (name == "loop") return TrajectoryShape::Loop;
  if (name == "figure8") return TrajectoryShape::Figure8;
  throw ConfigError("unknown trajectory shape '" + std::string(name) + "'");
}

std::string_view to_string(TrajectoryShape shape) {
  switch (shape) {
    case TrajectoryShape::StraightLine: return "straight";
    case TrajectoryShape::Loop: return "loop";
    case TrajectoryShape::Figure8: return "figure8";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view text) {
  Scenario s = default_scenario();
  Reader r(parse_document(text));

  r.string("name", [&](const std::string& v) { s.name = v; });
  bool world_seed_set = false;
  r.integer("seed", s.seed);
  r.with("strategies", [&](const Value& v) {
    const auto* arr = std::get_if<std::vector<Value>>(&v.data);
    if (!arr || arr->empty()) throw ConfigError("'strategies' must be a non-empty array");
    s.strategies.clear();
    for (const auto& x : *arr) {
      const auto* name = std::get_if<std::string>(&x.data);
      if (!name) throw ConfigError("'strategies' entries must be strings");
      s.strategies.push_back(parse_strategy(*name));
    }
  });

  r.integer("world.landmarks", s.world.landmark_count);
  r.vector3("world.bounds_min", s.world.bounds_min);
  r.vector3("world.bounds_max", s.world.bounds_max);
  r.with("world.seed", [&](const Value& v) {
    s.world.seed = static_cast<std::uint64_t>(Reader::as_number(v, "world.seed"));
    world_seed_set = true;
  });
  r.with("world.dynamic_fraction", [&](const Value& v) {
    s.world.dynamic_fraction = Reader::as_number(v, "world.dynamic_fraction");
  });
  const auto weights = r.take_table("world.class_weights");
  if (!weights.empty()) {
    const Taxonomy& tax = s.selection.taxonomy;
    s.world.class_weights.assign(tax.size(), 0.0);
    double sum = 0.0;
    for (const auto& [name, e] : weights) {
      try {
        const double w = Reader::as_number(e.value, name);
        if (w < 0.0) throw ConfigError("negative class weight");
        s.world.class_weights[static_cast<std::size_t>(tax.id_of(name))] = w;
        sum += w;
      } catch (const std::exception& ex) {
        fail(e.line, ex.what());
      }
    }
    if (!(sum > 0.0)) throw ConfigError("class weights sum to zero");
    for (double& w : s.world.class_weights) w /= sum;
  }

  r.string("trajectory.shape", [&](const std::string& v) { s.trajectory.shape = parse_shape(v); });
  r.number("trajectory.length", s.trajectory.length);
  r.integer("trajectory.frames", s.trajectory.frames);
  r.number("trajectory.speed_variation", s.trajectory.speed_variation);
  r.number("trajectory.height", s.trajectory.height);

  r.number("camera.fx", s.rig.fx);
  r.number("camera.fy", s.rig.fy);
  r.number("camera.cx", s.rig.cx);
  r.number("camera.cy", s.rig.cy);
  r.number("camera.baseline", s.rig.baseline);
  r.integer("camera.width", s.rig.width);
  r.integer("camera.height", s.rig.height);
  r.number("camera.depth_min", s.rig.depth_min);
  r.number("camera.disparity_min", s.rig.disparity_min);

  r.with("observation.pixel_noise", [&](const Value& v) {
    s.observation.pixel_noise = diagonal3(r.numbers_of(v, "observation.pixel_noise"),
                                          "observation.pixel_noise");
  });
  r.with("observation.model_noise", [&](const Value& v) {
    s.observation.model_noise = diagonal3(r.numbers_of(v, "observation.model_noise"),
                                          "observation.model_noise");
  });
  r.number("observation.max_depth", s.observation.max_depth);

  r.boolean("dropout.enabled", s.dropout.enabled);
  r.number("dropout.kappa_static", s.dropout.kappa_static);
  r.number("dropout.kappa_dynamic", s.dropout.kappa_dynamic);
  r.number("dropout.mislabel_rate", s.dropout.mislabel_rate);

  r.string("selection.strategy",
           [&](const std::string& v) { s.selection.strategy = parse_strategy(v); });
  r.number("selection.threshold_bits", s.selection.threshold_bits);
  r.integer("selection.mc_samples", s.selection.mc_samples);
  r.with("selection.max_selected", [&](const Value& v) {
    const double d = Reader::as_number(v, "selection.max_selected");
    if (d < 0 || std::floor(d) != d) throw ConfigError("max_selected must be a count");
    s.selection.max_selected = static_cast<std::size_t>(d);
  });

  double init_t = std::sqrt(s.estimator.initial_covariance(0, 0));
  double init_r = std::sqrt(s.estimator.initial_covariance(3, 3));
  double proc_t = std::sqrt(s.estimator.process_noise(0, 0));
  double proc_r = std::sqrt(s.estimator.process_noise(3, 3));
  r.number("estimator.initial_sigma_trans", init_t);
  r.number("estimator.initial_sigma_rot", init_r);
  r.number("estimator.process_sigma_trans", proc_t);
  r.number("estimator.process_sigma_rot", proc_r);
  s.estimator.initial_covariance = pose_diagonal(init_t, init_r);
  s.estimator.process_noise = pose_diagonal(proc_t, proc_r);
  r.boolean("estimator.perturb_motion", s.estimator.perturb_motion);
  r.integer("estimator.max_iterations", s.estimator.options.max_iterations);

  r.ensure_consumed();
  if (!world_seed_set) s.world.seed = s.seed;
  s.dropout.samples = s.selection.mc_samples;
  s.validate();
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  using nlohmann::json;
  const auto vec3 = [](const Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); };
  const auto diag3 = [](const Matrix3d& m) { return json::array({m(0, 0), m(1, 1), m(2, 2)}); };
  json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  json strategies = json::array();
  for (auto st : s.strategies) strategies.push_back(std::string(to_string(st)));
  j["strategies"] = strategies;
  j["world"] = {{"landmarks", s.world.landmark_count},
                {"bounds_min", vec3(s.world.bounds_min)},
                {"bounds_max", vec3(s.world.bounds_max)},
                {"seed", s.world.seed},
                {"dynamic_fraction", s.world.dynamic_fraction ? json(*s.world.dynamic_fraction)
                                                              : json(nullptr)},
                {"class_weights", s.world.class_weights}};
  j["trajectory"] = {{"shape", std::string(to_string(s.trajectory.shape))},
                     {"length", s.trajectory.length},
                     {"frames", s.trajectory.frames},
                     {"speed_variation", s.trajectory.speed_variation},
                     {"height", s.trajectory.height}};
  j["camera"] = {{"fx", s.rig.fx},         {"fy", s.rig.fy},
                 {"cx", s.rig.cx},         {"cy", s.rig.cy},
                 {"baseline", s.rig.baseline}, {"width", s.rig.width},
                 {"height", s.rig.height}, {"depth_min", s.rig.depth_min},
                 {"disparity_min", s.rig.disparity_min}};
  j["observation"] = {{"pixel_noise", diag3(s.observation.pixel_noise)},
                      {"model_noise", diag3(s.observation.model_noise)},
                      {"max_depth", s.observation.max_depth}};
  j["dropout"] = {{"enabled", s.dropout.enabled},
                  {"samples", s.dropout.samples},
                  {"kappa_static", s.dropout.kappa_static},
                  {"kappa_dynamic", s.dropout.kappa_dynamic},
                  {"mislabel_rate", s.dropout.mislabel_rate}};
  j["selection"] = {{"strategy", std::string(to_string(s.selection.strategy))},
                    {"threshold_bits", s.selection.threshold_bits},
                    {"mc_samples", s.selection.mc_samples},
                    {"max_selected", s.selection.max_selected ? json(*s.selection.max_selected)
                                                              : json(nullptr)}};
  j["estimator"] = {
      {"initial_sigma_trans", std::sqrt(s.estimator.initial_covariance(0, 0))},
      {"initial_sigma_rot", std::sqrt(s.estimator.initial_covariance(3, 3))},
      {"process_sigma_trans", std::sqrt(s.estimator.process_noise(0, 0))},
      {"process_sigma_rot", std::sqrt(s.estimator.process_noise(3, 3))},
      {"perturb_motion", s.estimator.perturb_motion},
      {"max_iterations", s.estimator.options.max_iterations}};
  return j.dump(2);
}

}  // namespace sivo
