#include "twophase/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace twophase {

double discrete_free_energy(const CellField& c, const std::vector<double>& widths, int interface_index,
                            const ModelParams& params) {
  if (c.size() != widths.size()) throw GeometryError("field and mesh sizes differ");
  double h = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Phase phase = static_cast<int>(k) < interface_index ? Phase::solid : Phase::gas;
    h += widths[k] * free_energy_density(c[k], phase, params);
  }
  return h;
}

double discrete_free_energy(const CellField& c, const MovingMesh& mesh, const ModelParams& params) {
  return discrete_free_energy(c, mesh.widths(), mesh.interface_index(), params);
}

double relative_free_energy(const CellField& c, const MovingMesh& mesh, const Composition& c_bar_s,
                            const Composition& c_bar_g) {
  double total = 0.0;
  for (int k = 0; k < mesh.cells(); ++k) {
    const Composition& ck = c[static_cast<std::size_t>(k)];
    const Composition& ref = mesh.phase_of(k) == Phase::solid ? c_bar_s : c_bar_g;
    double cell = 0.0;
    for (Eigen::Index i = 0; i < ck.size(); ++i) {
      if (ck[i] < 0.0) throw DomainError("relative free energy of a negative concentration");
      if (ck[i] > 0.0) {
        if (!(ref[i] > 0.0)) return std::numeric_limits<double>::infinity();
        // c log(c/r) - c + r = r (x log x - x + 1), x = c/r; log1p keeps it exact near x = 1
        const double x = ck[i] / ref[i];
        cell += ref[i] * (x * std::log1p(x - 1.0) - (x - 1.0));
      } else {
        cell += ref[i];
      }
    }
    total += mesh.width(k) * cell;
  }
  return total;
}

DissipationReport dissipation_report(const SimState& old, const StepResult& step, const ModelParams& params) {
  DissipationReport rep;
  rep.H_old = discrete_free_energy(old.c, old.mesh, params);
  rep.H_new = discrete_free_energy(step.state.c, step.state.mesh, params);

  const CellField& c = step.c_star;
  const MovingMesh& mesh = old.mesh;
  const int interface_edge = mesh.two_phase() ? mesh.interface_index() - 1 : -1;
  double bulk = 0.0;
  for (int e = 0; e + 1 < mesh.cells(); ++e) {
    if (e == interface_edge) continue;
    const auto l = static_cast<std::size_t>(e);
    const Phase phase = mesh.phase_of(e);
    const Vec u = EdgeState(c[l], c[l + 1]).edge_conc;
    const Vec z = c[l + 1].array().log().matrix() - c[l].array().log().matrix();
    bulk += z.dot(mobility(u, phase, params) * z);
  }
  rep.bulk = step.dt / mesh.dx() * bulk;

  if (interface_edge >= 0) {
    const Composition& cs = c[static_cast<std::size_t>(interface_edge)];
    const Composition& cg = c[static_cast<std::size_t>(interface_edge + 1)];
    const Vec jump = chemical_potential(cg, Phase::gas, params) - chemical_potential(cs, Phase::solid, params);
    const Vec flux = butler_volmer_flux(cs, cg, params);
    double linear = 0.0, strong = 0.0, weak = 0.0;
    for (Eigen::Index i = 0; i < flux.size(); ++i) {
      const double g = std::sqrt(cs[i] * cg[i]);
      linear += flux[i] * jump[i];
      strong += g * (dissipation_potential(jump[i]) + dual_dissipation_potential(flux[i] / g));
      weak += dual_dissipation_potential(flux[i]);
    }
    rep.interface_linear = step.dt * linear;
    rep.strong_phi = step.dt * strong;
    rep.weak_phi = step.dt * weak;
    const double scale = std::max(std::abs(rep.interface_linear), std::abs(rep.strong_phi));
    rep.fenchel_young_ok = std::abs(rep.interface_linear - rep.strong_phi) <= 1e-10 * scale + 1e-300;
    rep.weak_bound_ok = rep.weak_phi <= rep.strong_phi * (1.0 + 1e-12) + 1e-300;
  }
  return rep;
}

DiagnosticsRecord make_record(const SimState& state, const ModelParams& params,
                              const StationaryState* reference) {
  DiagnosticsRecord r;
  r.t = state.t;
  r.X = state.mesh.interface_position();
  r.K_int = state.mesh.interface_index();
  r.H = discrete_free_energy(state.c, state.mesh, params);
  r.masses = total_mass(state.c, state.mesh.widths());
  if (reference) {
    if (reference->kind == StationaryKind::two_phase ||
        reference->kind == StationaryKind::indistinguishable_family)
      r.H_rel = relative_free_energy(state.c, state.mesh, reference->c_bar_s, reference->c_bar_g);
    if (reference->kind == StationaryKind::two_phase) r.dX_rel = std::abs(r.X - reference->X_bar);
  }
  return r;
}

std::vector<std::string> check_step_invariants(const SimState& old, const StepResult& step,
                                               const Vec& m0, const DissipationReport& report,
                                               const InvariantTolerances& tol) {
  std::vector<std::string> breaches;
  auto note = [&](const std::string& what) {
    std::ostringstream os;
    os << "t = " << step.state.t << ": " << what;
    breaches.push_back(os.str());
  };

  const CellField& c = step.state.c;
  double worst_sum = 0.0, min_c = std::numeric_limits<double>::infinity();
  for (const auto& ck : c) {
    worst_sum = std::max(worst_sum, std::abs(ck.sum() - 1.0));
    min_c = std::min(min_c, ck.minCoeff());
  }
  if (worst_sum > tol.volume_filling) note("volume filling violated by " + format_number(worst_sum));
  if (!(min_c > 0.0)) note("nonpositive concentration " + format_number(min_c));

  const Vec m = total_mass(c, step.state.mesh.widths());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double drift = std::abs(m[i] - m0[i]) / std::abs(m0[i]);
    if (drift > tol.mass_drift) note("mass drift of species " + std::to_string(i + 1) + ": " + format_number(drift));
  }

  const double moved = std::abs(step.X_new - old.mesh.interface_position());
  if (moved > 0.5 * old.mesh.dx()) note("interface moved by " + format_number(moved));

  if (report.H_new > report.H_old + tol.energy_slack)
    note("free energy increased by " + format_number(report.H_new - report.H_old));
  if (report.slack() < -tol.dissipation_slack)
    note("dissipation inequality violated by " + format_number(-report.slack()));
  if (report.interface_linear < -tol.interface_sign)
    note("negative interface dissipation " + format_number(report.interface_linear));
  return breaches;
}

double l1_distance(const CellField& c, const MovingMesh& mesh, const PiecewiseConstant& reference) {
  double total = 0.0;
  for (int k = 0; k < mesh.cells(); ++k) {
    const Vec diff = c[static_cast<std::size_t>(k)] - reference.mean(mesh.cell_left(k), mesh.cell_right(k));
    total += mesh.width(k) * diff.lpNorm<1>();
  }
  return total;
}

L1Errors l1_errors(const std::vector<RunSample>& coarse, int coarse_cells,
                   const std::vector<RunSample>& reference, int reference_cells) {
  if (coarse_cells <= 0 || reference_cells % coarse_cells != 0)
    throw DomainError("reference grid must refine the coarse grid by an integer factor");
  if (reference.empty()) throw DomainError("empty reference run");
  L1Errors err;
  for (const RunSample& s : coarse) {
    auto it = std::lower_bound(reference.begin(), reference.end(), s.t,
                               [](const RunSample& r, double t) { return r.t < t; });
    if (it == reference.end() || (it != reference.begin() && s.t - std::prev(it)->t < it->t - s.t)) --it;
    const auto& edges = s.field.edges();
    double cell_sum = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const double a = edges[k], b = edges[k + 1];
      const Vec diff = s.field.values()[k] - it->field.mean(a, b);
      cell_sum += (b - a) * diff.lpNorm<1>();
    }
    err.error_c += s.dt * cell_sum;
    err.error_X += s.dt * std::abs(s.X - it->X);
  }
  return err;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

TimeSeriesWriter::TimeSeriesWriter(const std::string& path, int species) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path);
  out_ << "t,X,K_int,H,H_rel,dX_rel";
  for (int i = 1; i <= species; ++i) out_ << ",m_" << i;
  out_ << ",diss_bulk,diss_interface,newton_iters,dt\n";
}

void TimeSeriesWriter::write(const DiagnosticsRecord& r) {
  out_ << format_number(r.t) << ',' << format_number(r.X) << ',' << r.K_int << ',' << format_number(r.H)
       << ',' << format_number(r.H_rel) << ',' << format_number(r.dX_rel);
  for (Eigen::Index i = 0; i < r.masses.size(); ++i) out_ << ',' << format_number(r.masses[i]);
  out_ << ',' << format_number(r.diss_bulk) << ',' << format_number(r.diss_interface) << ','
       << r.newton_iters << ',' << format_number(r.dt) << '\n';
}

void write_snapshot(const std::string& path, const CellField& c, const MovingMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "x_left,x_right";
  for (Eigen::Index i = 1; i <= c.front().size(); ++i) out << ",c_" << i;
  out << '\n';
  for (int k = 0; k < mesh.cells(); ++k) {
    out << format_number(mesh.cell_left(k)) << ',' << format_number(mesh.cell_right(k));
    for (double v : c[static_cast<std::size_t>(k)]) out << ',' << format_number(v);
    out << '\n';
  }
}

}  // namespace twophase
