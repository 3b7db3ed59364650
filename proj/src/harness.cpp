#include "twophase/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace twophase {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::pde: return "pde";
    case Mode::ode: return "ode";
    case Mode::converge: return "converge";
    case Mode::stationary: return "stationary";
  }
  return "unknown";
}

namespace {

Mat paper_kappa() {
  Mat k(3, 3);
  k << 0.0, 0.2, 1.0,
       0.2, 0.0, 0.1,
       1.0, 0.1, 0.0;
  return k;
}

Scenario paper_base(std::string name, Vec beta, double dt) {
  Scenario s;
  s.name = std::move(name);
  s.cells = 100;
  s.X0 = 0.51;
  s.dt = dt;
  s.t_end = 5.0;
  s.kappa_s = paper_kappa();
  s.kappa_g = paper_kappa();
  s.mu_star_s = Vec::Zero(3);
  s.mu_star_g = beta.array().log();
  s.snapshot_times = {0.0, 0.25, 1.0, 5.0};
  return s;
}

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"trivial", "equilibrium", "non_equilibrium", "equilibrium_nonmonotone", "converge",
          "well_balanced", "ode_equilibrium"};
}

Scenario preset(std::string_view name) {
  if (name == "trivial") return paper_base("trivial", vec3(1.0, 1.0, 1.0), 8e-4);
  if (name == "equilibrium") return paper_base("equilibrium", vec3(1.0 / 6.0, 4.0, 4.0), 6e-4);
  if (name == "non_equilibrium") {
    // sum m0 / beta = 1/2 < 1: no two-phase state, the solid invades the domain.
    Scenario s = paper_base("non_equilibrium", vec3(2.0, 2.0, 2.0), 6e-4);
    s.derived = true;
    return s;
  }
  if (name == "equilibrium_nonmonotone") {
    // Found by a scan over beta: the two-phase condition holds and sum F changes
    // sign during the run, so the interface first advances and then recedes.
    Scenario s = paper_base("equilibrium_nonmonotone", vec3(0.25, 0.25, 8.0), 6e-4);
    s.derived = true;
    return s;
  }
  if (name == "converge") {
    Scenario s = paper_base("converge", vec3(1.0 / 6.0, 4.0, 4.0), 1e-4);
    s.mode = Mode::converge;
    s.t_end = 0.25;
    s.snapshot_times.clear();
    return s;
  }
  if (name == "well_balanced") {
    Scenario s = paper_base("well_balanced", vec3(1.0 / 6.0, 4.0, 4.0), 6e-4);
    s.profile = "stationary";
    s.t_end = 0.06;
    s.snapshot_times = {0.0, 0.06};
    return s;
  }
  if (name == "ode_equilibrium") {
    Scenario s = paper_base("ode_equilibrium", vec3(1.0 / 6.0, 4.0, 4.0), 6e-4);
    s.mode = Mode::ode;
    s.snapshot_times.clear();
    return s;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

ModelParams Scenario::params() const {
  try {
    return ModelParams(kappa_s, kappa_g, mu_star_s, mu_star_g);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid model parameters: ") + e.what());
  }
}

void Scenario::validate() const {
  auto fail = [&](const std::string& msg) { throw ConfigError("scenario '" + name + "': " + msg); };
  if (mu_star_s.size() == 0 || mu_star_g.size() == 0) fail("reference potentials (or beta_star) missing");
  const ModelParams p = params();
  if (cells < 4) fail("cells must be at least 4");
  if (!(t_end > 0.0)) fail("t_end must be positive");
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(X0 > 0.0 && X0 < 1.0)) fail("interface must lie in (0,1)");
  if (!(stepper.cfl_safety > 0.0 && stepper.cfl_safety < 1.0)) fail("cfl_safety must lie in (0,1)");
  if (!(stepper.newton_tol > 0.0) || stepper.newton_max_iter < 1 || stepper.max_halvings < 0)
    fail("invalid Newton settings");
  if (mode == Mode::pde || mode == Mode::converge) {
    const int k = nearest_interface_index(X0, cells);
    if (k < 2 || k > cells - 1) fail("interface must be at least one cell away from the boundary");
  }
  if (profile == "paper_cosine" || profile == "stationary") {
    if (p.n() != 3) fail("profile '" + profile + "' needs three species");
  } else if (profile == "uniform") {
    if (uniform.size() != p.n() || !is_admissible(uniform)) fail("uniform composition must be admissible");
  } else if (profile == "table") {
    if (table.size() < 2) fail("table needs at least two rows");
    for (std::size_t r = 0; r < table.size(); ++r) {
      if (table[r].c.size() != p.n() || !is_admissible(table[r].c)) fail("table rows must be admissible");
      if (r > 0 && !(table[r].x > table[r - 1].x)) fail("table positions must increase");
    }
    if (table.front().x > 0.0 || table.back().x < 1.0) fail("table must cover [0,1]");
  } else {
    fail("unknown profile '" + profile + "'");
  }
  for (double t : snapshot_times)
    if (!(t >= 0.0 && t <= t_end)) fail("snapshot times must lie in [0, t_end]");
  if (mode == Mode::converge) {
    if (levels.empty()) fail("converge needs at least one level");
    for (int l : levels)
      if (l < 4 || reference_cells % l != 0 || l >= reference_cells)
        fail("each level must divide the reference cell count");
  }
  if (mode == Mode::ode && !(ode_dt > 0.0)) fail("ode dt must be positive");
}

// Config parsing ------------------------------------------------------------

namespace {

struct Entry {
  std::string section, key, value;
  int line;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, std::string_view seps) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find_first_of(seps, start);
    const auto end = pos == std::string_view::npos ? s.size() : pos;
    std::string tok = trim(s.substr(start, end - start));
    if (!tok.empty()) out.push_back(std::move(tok));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const Entry& e, const std::string& msg) const {
    std::ostringstream os;
    os << source_ << ":" << e.line << ": [" << e.section << "] " << e.key << ": " << msg;
    throw ConfigError(os.str());
  }

  double number(const Entry& e, const std::string& tok) const {
    // Accepts plain decimals and simple fractions such as 1/6.
    const auto slash = tok.find('/');
    if (slash != std::string::npos)
      return number(e, tok.substr(0, slash)) / number(e, tok.substr(slash + 1));
    double v = 0.0;
    const char* first = tok.data();
    const char* last = first + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail(e, "not a number: '" + tok + "'");
    return v;
  }

  double number(const Entry& e) const { return number(e, e.value); }

  int integer(const Entry& e) const {
    const double v = number(e);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(e, "expected an integer");
    return static_cast<int>(v);
  }

  bool boolean(const Entry& e) const {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    fail(e, "expected true or false");
  }

  std::vector<double> list(const Entry& e) const {
    std::vector<double> out;
    for (const auto& tok : split(e.value, " \t,")) out.push_back(number(e, tok));
    return out;
  }

  Vec vector(const Entry& e) const {
    const auto v = list(e);
    if (v.empty()) fail(e, "empty vector");
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  Mat matrix(const Entry& e) const {
    const auto rows = split(e.value, ";");
    if (rows.empty()) fail(e, "empty matrix");
    Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto cols = split(rows[r], " \t,");
      if (cols.size() != rows.size()) fail(e, "matrix must be square (rows separated by ';')");
      for (std::size_t c = 0; c < cols.size(); ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(e, cols[c]);
    }
    return m;
  }

 private:
  std::string source_;
};

}  // namespace

Scenario parse_config_text(std::string_view text, std::string_view source) {
  Parser parser{std::string(source)};
  std::vector<Entry> entries;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": expected key = value");
    entries.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no});
  }

  Scenario s = preset("trivial");
  s.name = "custom";
  s.snapshot_times.clear();
  for (const Entry& e : entries)
    if (e.section == "scenario" && e.key == "preset") {
      try {
        s = preset(e.value);
      } catch (const ConfigError& err) {
        parser.fail(e, err.what());
      }
    }

  bool have_beta = false, have_mu = false;
  for (const Entry& e : entries) {
    const std::string key = e.section + "." + e.key;
    if (key == "scenario.preset") continue;
    if (key == "scenario.name") s.name = e.value;
    else if (key == "scenario.mode") {
      if (e.value == "pde") s.mode = Mode::pde;
      else if (e.value == "ode") s.mode = Mode::ode;
      else if (e.value == "converge") s.mode = Mode::converge;
      else if (e.value == "stationary") s.mode = Mode::stationary;
      else parser.fail(e, "mode must be pde, ode, converge or stationary");
    }
    else if (key == "scenario.derived") s.derived = parser.boolean(e);
    else if (key == "mesh.cells") s.cells = parser.integer(e);
    else if (key == "mesh.interface") s.X0 = parser.number(e);
    else if (key == "time.dt") s.dt = parser.number(e);
    else if (key == "time.t_end") s.t_end = parser.number(e);
    else if (key == "time.cfl_safety") s.stepper.cfl_safety = parser.number(e);
    else if (key == "time.growth_streak") s.stepper.growth_streak = parser.integer(e);
    else if (key == "time.snapshots") s.snapshot_times = parser.list(e);
    else if (key == "newton.tol") s.stepper.newton_tol = parser.number(e);
    else if (key == "newton.max_iter") s.stepper.newton_max_iter = parser.integer(e);
    else if (key == "newton.max_halvings") s.stepper.max_halvings = parser.integer(e);
    else if (key == "model.kappa") s.kappa_s = s.kappa_g = parser.matrix(e);
    else if (key == "model.kappa_s") s.kappa_s = parser.matrix(e);
    else if (key == "model.kappa_g") s.kappa_g = parser.matrix(e);
    else if (key == "model.beta_star") {
      const Vec beta = parser.vector(e);
      if ((beta.array() <= 0.0).any()) parser.fail(e, "beta_star must be positive");
      s.mu_star_s = Vec::Zero(beta.size());
      s.mu_star_g = beta.array().log();
      have_beta = true;
    }
    else if (key == "model.mu_star_s") { s.mu_star_s = parser.vector(e); have_mu = true; }
    else if (key == "model.mu_star_g") { s.mu_star_g = parser.vector(e); have_mu = true; }
    else if (key == "initial.profile") s.profile = e.value;
    else if (key == "initial.composition") s.uniform = parser.vector(e);
    else if (key == "initial.table") {
      s.table.clear();
      for (const auto& row : split(e.value, ";")) {
        Entry sub = e;
        sub.value = row;
        const Vec v = parser.vector(sub);
        if (v.size() < 3) parser.fail(e, "table rows are 'x c_1 ... c_n'");
        s.table.push_back({v[0], v.tail(v.size() - 1)});
      }
    }
    else if (key == "converge.levels") {
      s.levels.clear();
      for (double v : parser.list(e)) {
        if (v != std::floor(v) || v < 1) parser.fail(e, "levels are positive cell counts");
        s.levels.push_back(static_cast<int>(v));
      }
    }
    else if (key == "converge.reference") s.reference_cells = parser.integer(e);
    else if (key == "ode.dt") s.ode_dt = parser.number(e);
    else if (key == "output.dir") s.output_dir = e.value;
    else parser.fail(e, "unknown key");
  }
  if (have_beta && have_mu) throw ConfigError(std::string(source) + ": give either beta_star or mu_star_s/mu_star_g, not both");
  if (s.mu_star_s.size() != s.mu_star_g.size())
    throw ConfigError(std::string(source) + ": mu_star_s and mu_star_g have different lengths");
  s.validate();
  return s;
}

Scenario parse_config(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("'" + path + "' is not a readable file");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

Scenario load_scenario(const std::string& path_or_preset) {
  if (std::filesystem::is_regular_file(path_or_preset)) return parse_config(path_or_preset);
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), path_or_preset) != names.end()) {
    Scenario s = preset(path_or_preset);
    s.validate();
    return s;
  }
  throw ConfigError("'" + path_or_preset + "' is neither a readable file nor a preset name");
}

// Initial data --------------------------------------------------------------

std::function<Composition(double)> builtin_initial_profile(std::string_view name) {
  if (name == "paper_cosine") {
    return [](double x) {
      const double c = std::cos(std::numbers::pi * x);
      return vec3(0.25 * (1.0 + c), 0.25 * (1.0 + c), 0.5 * (1.0 - c));
    };
  }
  throw ConfigError("unknown builtin profile '" + std::string(name) + "'");
}

namespace {

std::function<Composition(double)> scenario_profile(const Scenario& s) {
  if (s.profile == "uniform") return [c = s.uniform](double) { return c; };
  if (s.profile == "table") {
    return [table = s.table](double x) {
      auto it = std::upper_bound(table.begin(), table.end(), x, [](double v, const TableRow& r) { return v < r.x; });
      if (it == table.begin()) return table.front().c;
      if (it == table.end()) return table.back().c;
      const TableRow& b = *it;
      const TableRow& a = *std::prev(it);
      const double w = (x - a.x) / (b.x - a.x);
      return Composition((1.0 - w) * a.c + w * b.c);
    };
  }
  return builtin_initial_profile(s.profile == "stationary" ? "paper_cosine" : s.profile);
}

}  // namespace

SimState initial_state(const Scenario& s, const ModelParams& params) {
  MovingMesh mesh(s.cells, s.X0);
  CellField c = discretize_initial(scenario_profile(s), mesh);
  if (s.profile != "stationary") return {std::move(c), std::move(mesh), 0.0};

  const Vec m0 = initial_mass(c, mesh);
  const StationaryState st = solve_stationary(m0, params.beta_star());
  if (st.kind != StationaryKind::two_phase)
    throw ConfigError("profile 'stationary' needs parameters with a two-phase stationary state");
  MovingMesh bar(s.cells, st.X_bar);
  if (bar.interface_index() < 2 || bar.interface_index() > s.cells - 1)
    throw ConfigError("stationary interface too close to the boundary for this mesh");
  CellField cb(static_cast<std::size_t>(s.cells));
  for (int k = 0; k < s.cells; ++k)
    cb[static_cast<std::size_t>(k)] = bar.phase_of(k) == Phase::solid ? st.c_bar_s : st.c_bar_g;
  return {std::move(cb), std::move(bar), 0.0};
}

// Runs ----------------------------------------------------------------------

int RunResult::exit_code() const {
  if (failed) return 3;
  if (aborted) return 4;
  return 0;
}

namespace {

std::string snapshot_name(double t) { return "snapshot_t" + format_number(t) + ".csv"; }

}  // namespace

RunResult simulate(const Scenario& s, const RunOptions& options) {
  s.validate();
  const ModelParams params = s.params();
  SimState init = initial_state(s, params);

  RunResult res{init, initial_mass(init.c, init.mesh), pure_solid_state(Vec::Zero(params.n())), {}, {}, 0, 0, false, false, {}};
  const bool have_reference = (res.m0.array() > 0.0).all();
  if (have_reference) res.stationary = solve_stationary(res.m0, params.beta_star());
  const StationaryState* reference = have_reference ? &res.stationary : nullptr;

  StepperConfig cfg = s.stepper;
  cfg.dt_init = s.dt;
  TimeStepper stepper(params, cfg, init);

  const std::filesystem::path dir(s.output_dir);
  std::optional<TimeSeriesWriter> series;
  if (options.write_files) {
    std::filesystem::create_directories(dir);
    series.emplace((dir / "timeseries.csv").string(), params.n());
  }
  std::vector<double> snaps = s.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
  std::size_t next_snap = 0;
  const double t_eps = 1e-12 * std::max(1.0, s.t_end);
  auto flush_snapshots = [&](const SimState& st) {
    while (next_snap < snaps.size() && snaps[next_snap] <= st.t + t_eps) {
      if (options.write_files) write_snapshot((dir / snapshot_name(snaps[next_snap])).string(), st.c, st.mesh);
      ++next_snap;
    }
  };

  DiagnosticsRecord rec0 = make_record(init, params, reference);
  res.records.push_back(rec0);
  if (series) series->write(rec0);
  flush_snapshots(init);

  while (stepper.state().t < s.t_end - t_eps) {
    double t_stop = s.t_end;
    if (next_snap < snaps.size()) t_stop = std::min(t_stop, snaps[next_snap]);
    const SimState old = stepper.state();
    std::optional<StepResult> step;
    try {
      step = stepper.step(t_stop);
    } catch (const SolverError& e) {
      res.failed = true;
      res.failure = e.what();
      if (options.write_files) {
        const auto dump = (dir / "failure_state.csv").string();
        write_snapshot(dump, old.c, old.mesh);
        res.failure += " (state dumped to " + dump + ")";
      }
      if (options.log) *options.log << "solver failure: " << res.failure << '\n';
      break;
    }
    const DissipationReport report = dissipation_report(old, *step, params);
    auto breaches = check_step_invariants(old, *step, res.m0, report);

    DiagnosticsRecord rec = make_record(step->state, params, reference);
    rec.diss_bulk = report.bulk;
    rec.diss_interface = report.interface_linear;
    rec.diss_phi_star = report.strong_phi;
    rec.newton_iters = step->newton_iterations;
    rec.dt = step->dt;
    res.records.push_back(rec);
    if (series) series->write(rec);
    ++res.steps;
    if (step->halvings == 0) ++res.clean_steps;
    if (options.on_step) options.on_step(old, *step, report);
    flush_snapshots(step->state);

    if (!breaches.empty()) {
      if (options.log)
        for (const auto& b : breaches) *options.log << "invariant breach: " << b << '\n';
      res.breaches.insert(res.breaches.end(), breaches.begin(), breaches.end());
      if (options.strict) {
        res.aborted = true;
        break;
      }
    }
  }
  res.final_state = stepper.state();
  return res;
}

double fit_order(const std::vector<double>& dx, const std::vector<double>& err) {
  if (dx.size() != err.size() || dx.size() < 2) throw DomainError("order fit needs at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(dx.size());
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const double x = std::log(dx[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::vector<RunSample> sampled_run(const Scenario& base, int cells) {
  Scenario s = base;
  s.mode = Mode::pde;
  s.cells = cells;
  s.snapshot_times.clear();
  std::vector<RunSample> samples;
  RunOptions opt;
  opt.write_files = false;
  opt.on_step = [&](const SimState&, const StepResult& step, const DissipationReport&) {
    samples.push_back({step.state.t, step.dt, step.state.mesh.interface_position(),
                       PiecewiseConstant(step.state.c, step.state.mesh)});
  };
  const RunResult r = simulate(s, opt);
  if (r.failed) throw SolverError("convergence level N = " + std::to_string(cells) + ": " + r.failure);
  return samples;
}

}  // namespace

ConvergenceResult convergence_study(const Scenario& s, std::ostream* log) {
  s.validate();
  ConvergenceResult out;
  out.reference_cells = s.reference_cells;
  if (log) *log << "reference run, N = " << s.reference_cells << '\n';
  const std::vector<RunSample> reference = sampled_run(s, s.reference_cells);

  std::vector<std::future<ConvergenceLevel>> jobs;
  for (int cells : s.levels) {
    jobs.push_back(std::async(std::launch::async, [&s, &reference, cells] {
      const auto coarse = sampled_run(s, cells);
      return ConvergenceLevel{cells, 1.0 / cells, l1_errors(coarse, cells, reference, s.reference_cells)};
    }));
  }
  std::vector<double> dx, ec, eX;
  for (auto& job : jobs) {
    out.levels.push_back(job.get());
    const auto& l = out.levels.back();
    if (log) *log << "N = " << l.cells << ": error_c = " << l.errors.error_c << ", error_X = " << l.errors.error_X << '\n';
    dx.push_back(l.dx);
    ec.push_back(l.errors.error_c);
    eX.push_back(l.errors.error_X);
  }
  if (out.levels.size() >= 2) {
    out.order_c = fit_order(dx, ec);
    if (std::all_of(eX.begin(), eX.end(), [](double e) { return e > 0.0; })) out.order_X = fit_order(dx, eX);
  }
  return out;
}

Trajectory run_ode(const Scenario& s) {
  s.validate();
  const ModelParams params = s.params();
  const MovingMesh mesh(s.cells, s.X0);
  const CellField c = discretize_initial(scenario_profile(s), mesh);
  Vec m_s = Vec::Zero(params.n());
  for (int k = 0; k < mesh.interface_index(); ++k) m_s += mesh.width(k) * c[static_cast<std::size_t>(k)];
  return integrate(MassState(m_s, initial_mass(c, mesh)), s.t_end, s.ode_dt, params);
}

int run_scenario(const Scenario& s, const RunOptions& options, std::ostream& out) {
  const ModelParams params = s.params();
  const std::filesystem::path dir(s.output_dir);
  switch (s.mode) {
    case Mode::stationary: {
      const SimState init = initial_state(s, params);
      const Vec m0 = initial_mass(init.c, init.mesh);
      const StationaryState st = solve_stationary(m0, params.beta_star());
      out << "masses: " << m0.transpose() << '\n';
      out << "sum m0*beta = " << m0.dot(params.beta_star())
          << ", sum m0/beta = " << m0.dot(params.beta_star().cwiseInverse()) << '\n';
      out << "kind: " << to_string(st.kind) << '\n';
      if (st.kind == StationaryKind::two_phase) {
        out << "X_bar = " << format_number(st.X_bar) << '\n';
        out << "c_bar_s = " << st.c_bar_s.transpose() << '\n';
        out << "c_bar_g = " << st.c_bar_g.transpose() << '\n';
      } else if (st.kind == StationaryKind::indistinguishable_family) {
        out << "every X in (0,1) is stationary with c_s = c_g = m0\n";
      } else {
        out << "no two-phase stationary state; pure states (m0, 0, 1) and (0, m0, 0)\n";
      }
      return 0;
    }
    case Mode::pde: {
      RunOptions opt = options;
      if (!opt.log) opt.log = &out;
      const RunResult r = simulate(s, opt);
      out << s.name << ": " << r.steps << " steps (" << r.clean_steps << " without halving), t = "
          << format_number(r.final_state.t) << ", X = " << format_number(r.final_state.mesh.interface_position())
          << ", breaches = " << r.breaches.size() << '\n';
      if (options.write_files) out << "output written to " << dir.string() << '\n';
      return r.exit_code();
    }
    case Mode::converge: {
      ConvergenceResult c;
      try {
        c = convergence_study(s, &out);
      } catch (const SolverError& e) {
        out << "solver failure: " << e.what() << '\n';
        return 3;
      }
      out << "order (concentrations) = " << format_number(c.order_c) << '\n';
      out << "order (interface) = " << format_number(c.order_X) << '\n';
      if (options.write_files) {
        std::filesystem::create_directories(dir);
        std::ofstream csv(dir / "convergence.csv");
        csv << "cells,dx,error_c,error_X\n";
        for (const auto& l : c.levels)
          csv << l.cells << ',' << format_number(l.dx) << ',' << format_number(l.errors.error_c) << ','
              << format_number(l.errors.error_X) << '\n';
        std::ofstream order(dir / "order.csv");
        order << "quantity,order\nconcentration," << format_number(c.order_c) << "\ninterface,"
              << format_number(c.order_X) << '\n';
      }
      return 0;
    }
    case Mode::ode: {
      const Trajectory traj = run_ode(s);
      if (options.write_files) {
        std::filesystem::create_directories(dir);
        std::ofstream csv(dir / "ode.csv");
        csv << "t,X,H";
        for (int i = 1; i <= params.n(); ++i) csv << ",m_" << i;
        csv << '\n';
        for (std::size_t k = 0; k < traj.t.size(); ++k) {
          csv << format_number(traj.t[k]) << ',' << format_number(traj.states[k].X) << ','
              << format_number(traj.energy[k]);
          for (double m : traj.states[k].m_s) csv << ',' << format_number(m);
          csv << '\n';
        }
      }
      out << s.name << ": " << traj.t.size() - 1 << " ODE steps, final X = "
          << format_number(traj.states.back().X);
      if (traj.exited) out << ", phase vanished at t = " << format_number(traj.exit_time);
      out << '\n';
      return 0;
    }
  }
  return 0;
}

}  // namespace twophase
