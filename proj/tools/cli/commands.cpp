#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "fkcim/errors.hpp"
#include "fkcim/time_marching.hpp"

namespace fkcim::cli {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::int64_t elapsed_ns(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

template <class F>
std::int64_t median_ns(int repeats, F&& fn) {
  std::vector<std::int64_t> ns;
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    fn();
    ns.push_back(elapsed_ns(start));
  }
  std::sort(ns.begin(), ns.end());
  return ns[ns.size() / 2];
}

std::vector<double> linear_grid(double t0, double t1, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? t1 : t0 + (t1 - t0) * i / (n - 1));
  return out;
}

// Grid indices of the reference step closest to each time, kept inside [t0, t1].
std::vector<int> snap_to_grid(const TmGrid& grid, const std::vector<double>& times, double t0, double t1) {
  std::vector<int> idx;
  for (double t : times) {
    long n = std::lround(t / grid.h);
    if (n * grid.h < t0 * (1.0 - 1e-14)) ++n;
    if (n * grid.h > t1 * (1.0 + 1e-14)) --n;
    idx.push_back(static_cast<int>(std::clamp<long>(n, 0, grid.M)));
  }
  return idx;
}

struct CimErrors {
  double G1 = 0.0;
  double G2 = 0.0;
  double max() const { return std::max(G1, G2); }
};

CimErrors max_errors(const std::vector<SolutionSample>& a, const std::vector<SolutionSample>& b) {
  CimErrors e;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e.G1 = std::max(e.G1, std::abs(a[i].G1 - b[i].G1));
    e.G2 = std::max(e.G2, std::abs(a[i].G2 - b[i].G2));
  }
  return e;
}

std::vector<SolutionSample> cim_at(const Model& model, ContourKind kind, int N, const RunConfig& c,
                                   const std::vector<double>& times, Contour* contour_out = nullptr) {
  const SolveOptions opts = solve_options(c);
  const Contour contour = window_contour(model, kind, N, c.t0, c.t1, opts);
  if (contour_out) *contour_out = contour;
  return evaluate(prepare(model, contour, opts.literal_full_weight_k0), times);
}

double theory_rate(const RunConfig& c, ContourKind kind) {
  const double Lambda = c.t1 / c.t0;
  if (kind == ContourKind::parabolic) return parabolic_decay_rate(c.a, Lambda);
  return hyperbolic_Q(hyperbolic_optimal_alpha(c.delta, Lambda), c.delta, Lambda);
}

std::string method_name(ContourKind kind) { return kind == ContourKind::parabolic ? "CIM-PC" : "CIM-HC"; }

}  // namespace

SolveResult compute_solve(const RunConfig& c) {
  const std::vector<double> times = output_times(c);
  WindowSolution w = solve_window(c.params, c.contour, c.N, c.t0, c.t1, times, solve_options(c));
  return {std::move(w.samples), std::move(w.warnings)};
}

std::vector<SolutionSample> compute_reference(const RunConfig& c) {
  return tm_solve(c.params, make_grid(c.t1, c.reference.M), {c.debug.tm_history});
}

ConvergeResult compute_converge(const RunConfig& c) {
  const TmOptions tm_opts{c.debug.tm_history};
  const TmReference ref(c.params, c.t1, c.reference.M, tm_opts);
  const std::vector<int> idx = snap_to_grid(ref.grid(), linear_grid(c.t0, c.t1, kErrorGridSize), c.t0, c.t1);
  std::vector<double> times;
  std::vector<SolutionSample> expected;
  for (int n : idx) {
    times.push_back(ref.samples()[static_cast<std::size_t>(n)].t);
    expected.push_back(ref.samples()[static_cast<std::size_t>(n)]);
  }

  ConvergeResult out;
  if (c.reference.M >= 2) {
    const std::vector<SolutionSample> half = tm_solve(c.params, make_grid(c.t1, c.reference.M / 2), tm_opts);
    for (std::size_t k = 0; k < half.size(); ++k) {
      const SolutionSample& fine = ref.samples()[2 * k];
      if (fine.t < c.t0 * (1.0 - 1e-14)) continue;
      out.reference_error = std::max(
          {out.reference_error, std::abs(fine.G1 - half[k].G1), std::abs(fine.G2 - half[k].G2)});
    }
  }
  out.theory_rate = theory_rate(c, c.contour);

  const Model model(c.params);
  std::vector<ErrorPoint> points;
  for (int N = c.converge.n_min; N <= c.converge.n_max; ++N) {
    const auto start = Clock::now();
    Contour contour;
    const std::vector<SolutionSample> got = cim_at(model, c.contour, N, c, times, &contour);
    const std::int64_t ns = elapsed_ns(start);
    const CimErrors e = max_errors(got, expected);
    out.rows.push_back({N, e.G1, e.G2, c.record_timing ? ns : 0});
    const double floor = std::max(roundoff_floor(contour, c.t1), 2.0 * out.reference_error);
    points.push_back({N, e.max(), floor});
  }
  try {
    out.fit = error_decay_fit(points);
  } catch (const InsufficientData& e) {
    out.fit_note = e.what();
  }
  return out;
}

std::vector<BenchRow> compute_bench(const RunConfig& c) {
  const Model model(c.params);
  const int repeats = c.record_timing ? c.bench.repeats : 0;

  // CIM scans are measured against the time-marching reference.
  const TmReference ref(c.params, c.t1, c.reference.M, {c.debug.tm_history});
  const std::vector<int> idx = snap_to_grid(ref.grid(), linear_grid(c.t0, c.t1, kErrorGridSize), c.t0, c.t1);
  std::vector<double> times;
  std::vector<SolutionSample> expected;
  for (int n : idx) {
    times.push_back(ref.samples()[static_cast<std::size_t>(n)].t);
    expected.push_back(ref.samples()[static_cast<std::size_t>(n)]);
  }
  std::map<std::pair<int, int>, double> cim_error;
  auto cim_err = [&](ContourKind kind, int N) {
    const auto key = std::make_pair(static_cast<int>(kind), N);
    auto it = cim_error.find(key);
    if (it != cim_error.end()) return it->second;
    const double e = max_errors(cim_at(model, kind, N, c, times), expected).max();
    cim_error.emplace(key, e);
    return e;
  };

  // The time-marching scan is measured against a converged contour solution
  // on its own grid points.
  const Contour fine = window_contour(model, ContourKind::hyperbolic, 64, c.t0, c.t1, solve_options(c));
  const PreparedIntegrand fine_prepared = prepare(model, fine);
  std::map<int, double> tm_error;
  auto tm_err = [&](int M) {
    auto it = tm_error.find(M);
    if (it != tm_error.end()) return it->second;
    const std::vector<SolutionSample> tm = tm_solve(c.params, make_grid(c.t1, M), {c.debug.tm_history});
    double e = 0.0;
    for (const SolutionSample& s : tm) {
      if (s.t < c.t0 * (1.0 - 1e-14)) continue;
      const SolutionSample r = evaluate(fine_prepared, s.t);
      e = std::max({e, std::abs(s.G1 - r.G1), std::abs(s.G2 - r.G2)});
    }
    tm_error.emplace(M, e);
    return e;
  };

  std::vector<BenchRow> rows;
  for (double target : c.bench.targets) {
    for (ContourKind kind : {ContourKind::parabolic, ContourKind::hyperbolic}) {
      BenchRow row{target, method_name(kind), std::nullopt, c.bench.n_max, 0};
      for (int N = 2; N <= c.bench.n_max; ++N) {
        if (cim_err(kind, N) <= target) {
          row.size = N;
          break;
        }
      }
      if (row.size && repeats > 0) {
        row.wall_time_ns = median_ns(repeats, [&] { (void)cim_at(model, kind, *row.size, c, times); });
      }
      rows.push_back(row);
    }
    BenchRow row{target, "TMs", std::nullopt, c.bench.m_max, 0};
    for (int M = 2; M <= c.bench.m_max; M *= 2) {
      if (tm_err(M) <= target) {
        row.size = M;
        break;
      }
      if (M > c.bench.m_max / 2) break;
    }
    if (row.size && repeats > 0) {
      row.wall_time_ns = median_ns(repeats, [&] {
        (void)tm_solve(c.params, make_grid(c.t1, *row.size), {c.debug.tm_history});
      });
    }
    rows.push_back(row);
  }
  return rows;
}

OccupationResult compute_occupation(const RunConfig& c) {
  const OccupationSpec& o = c.occupation;
  OccupationConfig oc;
  oc.state = o.state;
  oc.alpha = o.alpha;
  if (o.eps1 && o.eps2) {
    oc.eps1 = *o.eps1;
    oc.eps2 = *o.eps2;
  } else {
    const DerivedCoeffs dc = derive_coeffs(c.params);
    if (dc.C1 + dc.C2 != 0.0) {
      oc.eps1 = asymptotic_occupation_fraction(c.params, 1);
      oc.eps2 = asymptotic_occupation_fraction(c.params, 2);
    } else {
      // No switching: each state keeps its initial mass.
      oc.eps1 = c.params.G10;
      oc.eps2 = c.params.G20;
    }
    if (o.eps1) oc.eps1 = *o.eps1;
    if (o.eps2) oc.eps2 = *o.eps2;
  }
  for (int i = 0; i < o.count; ++i) {
    const double s = o.count == 1 ? 1.0 : static_cast<double>(i) / (o.count - 1);
    oc.times.push_back(o.t_min * std::pow(o.t_max / o.t_min, s));
  }
  oc.times.back() = o.t_max;

  OccupationResult out;
  out.fraction = theory_fraction(oc);
  out.samples = occupation_average(oc, c.params, c.N, o.Lambda, c.contour, solve_options(c));
  try {
    out.fit = asymptote_fit(out.samples);
  } catch (const InsufficientData& e) {
    out.fit_note = e.what();
  }
  return out;
}

namespace {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> csv_rows;
  json json_rows = json::array();
  std::vector<std::string> footer;  // CSV comment lines
  json summary = json::object();
};

json sample_json(const SolutionSample& s) { return {{"t", s.t}, {"G1", s.G1}, {"G2", s.G2}}; }

void add_samples(Table& t, const std::vector<SolutionSample>& samples) {
  t.columns = {"t", "G1", "G2"};
  for (const SolutionSample& s : samples) {
    t.csv_rows.push_back({num(s.t), num(s.G1), num(s.G2)});
    t.json_rows.push_back(sample_json(s));
  }
}

Table build_table(const std::string& command, const RunConfig& c, std::vector<std::string>* warnings) {
  Table t;
  if (command == "solve") {
    SolveResult r = compute_solve(c);
    if (warnings) warnings->insert(warnings->end(), r.warnings.begin(), r.warnings.end());
    add_samples(t, r.samples);
  } else if (command == "reference") {
    add_samples(t, compute_reference(c));
  } else if (command == "converge") {
    const ConvergeResult r = compute_converge(c);
    t.columns = {"N", "error_G1", "error_G2", "wall_time_ns"};
    for (const ConvergenceRow& row : r.rows) {
      t.csv_rows.push_back({std::to_string(row.N), num(row.error_G1), num(row.error_G2),
                            std::to_string(row.wall_time_ns)});
      t.json_rows.push_back({{"N", row.N},
                             {"error_G1", row.error_G1},
                             {"error_G2", row.error_G2},
                             {"wall_time_ns", row.wall_time_ns}});
    }
    t.summary["reference_error"] = r.reference_error;
    t.summary["theory_rate"] = r.theory_rate;
    if (r.fit) {
      t.footer.push_back("# decay_rate=" + num(r.fit->rate) + " points=" + std::to_string(r.fit->used) +
                         " theory_rate=" + num(r.theory_rate) + " reference_error=" + num(r.reference_error));
      t.summary["decay_rate"] = r.fit->rate;
      t.summary["decay_points"] = r.fit->used;
    } else {
      t.footer.push_back("# decay_rate=NA (" + r.fit_note + ")");
      t.summary["decay_rate"] = nullptr;
      t.summary["decay_note"] = r.fit_note;
    }
  } else if (command == "bench") {
    t.columns = {"target", "method", "size", "wall_time_ns"};
    for (const BenchRow& row : compute_bench(c)) {
      const std::string size = row.size ? std::to_string(*row.size) : ">" + std::to_string(row.bound);
      t.csv_rows.push_back({num(row.target), row.method, size, std::to_string(row.wall_time_ns)});
      t.json_rows.push_back({{"target", row.target},
                             {"method", row.method},
                             {"size", size},
                             {"wall_time_ns", row.wall_time_ns}});
    }
  } else if (command == "occupation") {
    const OccupationResult r = compute_occupation(c);
    t.columns = {"t", "A_mean", "theory"};
    for (const OccupationSample& s : r.samples) {
      const double theory = r.fraction * s.t;
      t.csv_rows.push_back({num(s.t), num(s.A_mean), num(theory)});
      t.json_rows.push_back({{"t", s.t}, {"A_mean", s.A_mean}, {"theory", theory}});
    }
    t.summary["theory_fraction"] = r.fraction;
    if (r.fit) {
      t.footer.push_back("# slope=" + num(r.fit->slope) + " coefficient=" + num(r.fit->coefficient));
      t.summary["slope"] = r.fit->slope;
      t.summary["coefficient"] = r.fit->coefficient;
    } else {
      t.footer.push_back("# slope=NA coefficient=NA (" + r.fit_note + ")");
      t.summary["slope"] = nullptr;
      t.summary["coefficient"] = nullptr;
      t.summary["fit_note"] = r.fit_note;
    }
  } else {
    throw InvalidParameter("unknown command '" + command + "'");
  }
  return t;
}

}  // namespace

std::string render(const std::string& command, const RunConfig& c, std::vector<std::string>* warnings) {
  const Table t = build_table(command, c, warnings);
  const json cfg = config_to_json(c);
  if (c.format == OutputFormat::json) {
    json meta = {{"artifact", "fk-cim"}, {"version", kVersion}, {"command", command}, {"config", cfg}};
    for (auto it = t.summary.begin(); it != t.summary.end(); ++it) meta[it.key()] = it.value();
    const json doc = {{"metadata", meta}, {"rows", t.json_rows}};
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "# fk-cim " << kVersion << " command=" << command << " config=" << cfg.dump() << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.csv_rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  for (const std::string& line : t.footer) os << line << "\n";
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contour-integral solver for the two-state Feynman-Kac system", "fk-cim"};
  std::string command;
  std::string config_path;
  std::optional<std::string> contour, output, format, d2_formula;
  std::optional<int> n_nodes;
  std::optional<double> t0, t1;
  bool full_weight = false;
  app.add_option("command", command, "solve | reference | converge | bench | occupation")
      ->required()
      ->check(CLI::IsMember({"solve", "reference", "converge", "bench", "occupation"}));
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--contour", contour, "parabolic | hyperbolic");
  app.add_option("--n-nodes", n_nodes, "number of quadrature nodes N");
  app.add_option("--t0", t0, "window start");
  app.add_option("--t1", t1, "window end");
  app.add_option("--output", output, "output file (default: standard output)");
  app.add_option("--format", format, "csv | json");
  app.add_flag("--debug-full-weight-k0", full_weight, "give the phi=0 node full trapezoid weight");
  app.add_option("--d2-formula", d2_formula, "remark | appendix | max");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (contour) cfg.contour = parse_contour(*contour);
    if (n_nodes) cfg.N = *n_nodes;
    if (t0) cfg.t0 = *t0;
    if (t1) cfg.t1 = *t1;
    if (output) cfg.output = *output;
    if (format) cfg.format = parse_format(*format);
    if (full_weight) cfg.debug.literal_full_weight_k0 = true;
    if (d2_formula) cfg.debug.d2_formula = parse_d2_formula(*d2_formula);
    validate_config(cfg);

    std::vector<std::string> warnings;
    const std::string text = render(command, cfg, &warnings);
    for (const std::string& w : warnings) err << "warning: " << w << "\n";
    if (cfg.output.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.output, std::ios::binary | std::ios::trunc);
      if (!file) throw Error("cannot open output file '" + cfg.output + "'");
      file << text;
      if (!file) throw Error("failed to write output file '" + cfg.output + "'");
    }
    return kExitOk;
  } catch (const InvalidParameter& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContourInvalid& e) {
    err << "contour error: " << e.what() << "\n";
    return kExitContour;
  } catch (const InfeasibleGeometry& e) {
    err << "contour error: " << e.what() << "\n";
    return kExitContour;
  } catch (const PoleError& e) {
    err << "contour error: " << e.what() << "\n";
    return kExitContour;
  } catch (const SingularStep& e) {
    err << "time-marching error: " << e.what() << "\n";
    return kExitSingular;
  } catch (const OverflowError& e) {
    err << "overflow: " << e.what() << "\n";
    return kExitOverflow;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitOther;
  }
}

}  // namespace fkcim::cli
