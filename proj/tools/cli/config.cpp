#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fkcim/errors.hpp"

namespace fkcim::cli {

using nlohmann::json;

namespace {

// Reads members of one JSON object and rejects anything it was not asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw InvalidParameter(where_ + " must be a JSON object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    out = convert<T>(*it, key);
  }

  template <class T>
  void read(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return;
    out = convert<T>(*it, key);
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw InvalidParameter("unknown key '" + it.key() + "' in " + where_);
    }
  }

 private:
  template <class T>
  T convert(const json& v, const char* key) const {
    const std::string name = where_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw InvalidParameter(name + " must be a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) throw InvalidParameter(name + " must be an integer");
      return v.get<int>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw InvalidParameter(name + " must be a number");
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw InvalidParameter(name + " must be a string");
      return v.get<std::string>();
    } else {
      static_assert(std::is_same_v<T, std::vector<double>>);
      if (!v.is_array()) throw InvalidParameter(name + " must be an array of numbers");
      std::vector<double> out;
      for (const json& x : v) {
        if (!x.is_number()) throw InvalidParameter(name + " must be an array of numbers");
        out.push_back(x.get<double>());
      }
      return out;
    }
  }

  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

HistoryTerm parse_history(const std::string& s) {
  if (s == "convolution_trapezoid") return HistoryTerm::convolution_trapezoid;
  if (s == "gamma_at_one") return HistoryTerm::gamma_at_one;
  throw InvalidParameter("debug.tm_history must be convolution_trapezoid or gamma_at_one");
}

TimeSpacing parse_spacing(const std::string& s) {
  if (s == "linear") return TimeSpacing::linear;
  if (s == "log") return TimeSpacing::log;
  throw InvalidParameter("times.spacing must be linear or log");
}

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

}  // namespace

std::string to_string(ContourKind kind) { return kind == ContourKind::parabolic ? "parabolic" : "hyperbolic"; }

std::string to_string(D2Formula formula) {
  switch (formula) {
    case D2Formula::remark: return "remark";
    case D2Formula::appendix: return "appendix";
    case D2Formula::max: return "max";
  }
  return "max";
}

std::string to_string(HistoryTerm term) {
  return term == HistoryTerm::gamma_at_one ? "gamma_at_one" : "convolution_trapezoid";
}

ContourKind parse_contour(const std::string& s) {
  if (s == "parabolic") return ContourKind::parabolic;
  if (s == "hyperbolic") return ContourKind::hyperbolic;
  throw InvalidParameter("contour must be parabolic or hyperbolic");
}

D2Formula parse_d2_formula(const std::string& s) {
  if (s == "remark") return D2Formula::remark;
  if (s == "appendix") return D2Formula::appendix;
  if (s == "max") return D2Formula::max;
  throw InvalidParameter("d2_formula must be remark, appendix or max");
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw InvalidParameter("format must be csv or json");
}

RunConfig config_from_json(const json& doc) {
  RunConfig c;
  ObjectReader top(doc, "config");
  FkParams& p = c.params;
  top.read("p", p.p);
  top.read("b", p.b);
  top.read("alpha1", p.alpha1);
  top.read("alpha2", p.alpha2);
  top.read("Binv1", p.Binv1);
  top.read("Binv2", p.Binv2);
  top.read("U1", p.U1);
  top.read("U2", p.U2);
  top.read("rho", p.rho);
  top.read("G10", p.G10);
  top.read("G20", p.G20);

  std::string contour = to_string(c.contour);
  top.read("contour", contour);
  c.contour = parse_contour(contour);
  top.read("a", c.a);
  top.read("delta", c.delta);
  top.read("N", c.N);
  top.read("t0", c.t0);
  top.read("t1", c.t1);
  top.read("output", c.output);
  std::string format = c.format == OutputFormat::json ? "json" : "csv";
  top.read("format", format);
  c.format = parse_format(format);
  top.read("record_timing", c.record_timing);

  if (const json* t = top.child("times")) {
    ObjectReader r(*t, "times");
    r.read("count", c.times.count);
    std::string spacing = c.times.spacing == TimeSpacing::log ? "log" : "linear";
    r.read("spacing", spacing);
    c.times.spacing = parse_spacing(spacing);
    r.finish();
  }
  if (const json* d = top.child("debug")) {
    ObjectReader r(*d, "debug");
    r.read("literal_full_weight_k0", c.debug.literal_full_weight_k0);
    std::string d2 = to_string(c.debug.d2_formula);
    r.read("d2_formula", d2);
    c.debug.d2_formula = parse_d2_formula(d2);
    std::string history = to_string(c.debug.tm_history);
    r.read("tm_history", history);
    c.debug.tm_history = parse_history(history);
    r.finish();
  }
  if (const json* ref = top.child("reference")) {
    ObjectReader r(*ref, "reference");
    r.read("M", c.reference.M);
    r.finish();
  }
  if (const json* cv = top.child("converge")) {
    ObjectReader r(*cv, "converge");
    r.read("n_min", c.converge.n_min);
    r.read("n_max", c.converge.n_max);
    r.finish();
  }
  if (const json* b = top.child("bench")) {
    ObjectReader r(*b, "bench");
    r.read("targets", c.bench.targets);
    r.read("n_max", c.bench.n_max);
    r.read("m_max", c.bench.m_max);
    r.read("repeats", c.bench.repeats);
    r.finish();
  }
  if (const json* o = top.child("occupation")) {
    ObjectReader r(*o, "occupation");
    r.read("state", c.occupation.state);
    r.read("eps1", c.occupation.eps1);
    r.read("eps2", c.occupation.eps2);
    r.read("alpha", c.occupation.alpha);
    r.read("Lambda", c.occupation.Lambda);
    r.read("t_min", c.occupation.t_min);
    r.read("t_max", c.occupation.t_max);
    r.read("count", c.occupation.count);
    r.finish();
  }
  top.finish();
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidParameter("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const RunConfig& c) {
  const FkParams& p = c.params;
  json occ = {
      {"state", c.occupation.state},
      {"eps1", c.occupation.eps1 ? json(*c.occupation.eps1) : json(nullptr)},
      {"eps2", c.occupation.eps2 ? json(*c.occupation.eps2) : json(nullptr)},
      {"alpha", c.occupation.alpha},
      {"Lambda", c.occupation.Lambda},
      {"t_min", c.occupation.t_min},
      {"t_max", c.occupation.t_max},
      {"count", c.occupation.count},
  };
  return json{
      {"p", p.p},
      {"b", p.b},
      {"alpha1", p.alpha1},
      {"alpha2", p.alpha2},
      {"Binv1", p.Binv1},
      {"Binv2", p.Binv2},
      {"U1", p.U1},
      {"U2", p.U2},
      {"rho", p.rho},
      {"G10", p.G10},
      {"G20", p.G20},
      {"contour", to_string(c.contour)},
      {"a", c.a},
      {"delta", c.delta},
      {"N", c.N},
      {"t0", c.t0},
      {"t1", c.t1},
      {"times", {{"count", c.times.count}, {"spacing", c.times.spacing == TimeSpacing::log ? "log" : "linear"}}},
      {"output", c.output},
      {"format", c.format == OutputFormat::json ? "json" : "csv"},
      {"debug",
       {{"literal_full_weight_k0", c.debug.literal_full_weight_k0},
        {"d2_formula", to_string(c.debug.d2_formula)},
        {"tm_history", to_string(c.debug.tm_history)}}},
      {"reference", {{"M", c.reference.M}}},
      {"converge", {{"n_min", c.converge.n_min}, {"n_max", c.converge.n_max}}},
      {"bench",
       {{"targets", c.bench.targets},
        {"n_max", c.bench.n_max},
        {"m_max", c.bench.m_max},
        {"repeats", c.bench.repeats}}},
      {"occupation", occ},
      {"record_timing", c.record_timing},
  };
}

void validate_config(const RunConfig& c) {
  validate(c.params);
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidParameter(what);
  };
  require(c.a > 0.25 && c.a < 1.0, "a must lie in (1/4, 1)");
  require(c.delta > 0.0 && c.delta < std::acos(0.0), "delta must lie in (0, pi/2)");
  require(c.N >= 2, "N must be at least 2");
  require(c.t0 > 0.0 && std::isfinite(c.t0), "t0 must be positive");
  require(c.t1 >= c.t0 && std::isfinite(c.t1), "t1 must be >= t0");
  require(c.times.count >= 1, "times.count must be at least 1");
  require(c.reference.M >= 1, "reference.M must be at least 1");
  require(is_power_of_two(c.reference.M), "reference.M must be a power of two");
  require(c.converge.n_min >= 2 && c.converge.n_max <= 512 && c.converge.n_min <= c.converge.n_max,
          "converge range must satisfy 2 <= n_min <= n_max <= 512");
  require(!c.bench.targets.empty(), "bench.targets must not be empty");
  for (std::size_t i = 0; i < c.bench.targets.size(); ++i) {
    require(c.bench.targets[i] > 0.0 && c.bench.targets[i] <= 0.1, "bench targets must lie in (0, 0.1]");
    require(i == 0 || c.bench.targets[i] < c.bench.targets[i - 1], "bench targets must be descending");
  }
  require(c.bench.n_max >= 2 && c.bench.n_max <= 512, "bench.n_max must lie in [2, 512]");
  require(c.bench.m_max >= 2, "bench.m_max must be at least 2");
  require(c.bench.repeats >= 1, "bench.repeats must be at least 1");
  const OccupationSpec& o = c.occupation;
  require(o.state == 1 || o.state == 2, "occupation.state must be 1 or 2");
  require(!o.eps1 || *o.eps1 >= 0.0, "occupation.eps1 must be non-negative");
  require(!o.eps2 || *o.eps2 >= 0.0, "occupation.eps2 must be non-negative");
  require(o.alpha > 0.0 && o.alpha < 1.0, "occupation.alpha must lie in (0, 1)");
  require(o.Lambda > 1.0, "occupation.Lambda must exceed 1");
  require(o.t_min > 0.0 && o.t_max >= o.t_min, "occupation times must satisfy 0 < t_min <= t_max");
  require(o.count >= 1, "occupation.count must be at least 1");
}

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.a = c.a;
  o.delta = c.delta;
  o.d2_formula = c.debug.d2_formula;
  o.literal_full_weight_k0 = c.debug.literal_full_weight_k0;
  return o;
}

std::vector<double> output_times(const RunConfig& c) {
  const int n = c.times.count;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) return {c.t1};
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    if (c.times.spacing == TimeSpacing::linear) {
      out.push_back(c.t0 + s * (c.t1 - c.t0));
    } else {
      out.push_back(c.t0 * std::pow(c.t1 / c.t0, s));
    }
  }
  out.back() = c.t1;
  return out;
}

}  // namespace fkcim::cli
