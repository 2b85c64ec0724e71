#include "wentzell/evolution.hpp"

#include "wentzell/errors.hpp"
#include "wentzell/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wentzell {

namespace {

constexpr int kRefinementSweeps = 4;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void require_size(const AssembledSystem& system, std::span<const double> v, const char* what) {
  if (v.size() != system.size()) {
    std::ostringstream msg;
    msg << what << " has " << v.size() << " entries, system has " << system.size();
    throw std::invalid_argument(msg.str());
  }
}

std::vector<double> solve_spd(const SymBandMatrix& a, std::span<const double> b, const char* what) {
  BandCholesky chol;
  if (!chol.factor(a)) {
    std::ostringstream msg;
    msg << what << ": factorization failed at row " << chol.failed_row();
    throw NotCoercive(msg.str());
  }
  return chol.solve(b);
}

/// Full-numbering vector  sum_q w_q f(x_q) phi_i^{(d)}(x_q).
std::vector<double> load_vector(const DofMap& map, const QuadratureRule& rule, int d,
                                const std::function<double(double)>& f) {
  const Mesh& mesh = map.mesh();
  std::vector<double> out(map.total_dofs(), 0.0);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const ElementRule& r = rule.elements[e];
    const auto ids = map.element_dofs(e);
    for (std::size_t q = 0; q < r.points.size(); ++q) {
      const double x = r.points[q];
      double w = r.weights[q];
      if (r.divisor_power != 0) w /= std::pow(x - rule.x0, r.divisor_power);
      const auto phi = hermite_shape(mesh.left(e), mesh.right(e), x, d);
      const double fx = f(x);
      for (int k = 0; k < 4; ++k) out[ids[k]] += w * fx * phi[k];
    }
  }
  for (std::size_t c : map.constrained()) out[c] = 0.0;
  return out;
}

std::vector<double> midpoint(std::span<const double> a, std::span<const double> b) {
  std::vector<double> m(a.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
  return m;
}

SingularConvention convention_of(const AssembledSystem& system) {
  const std::size_t v = DofMap::value_dof(system.map.mesh().x0_index());
  return system.map.is_constrained(v) ? SingularConvention::ConstrainedFactor : SingularConvention::Plain;
}

struct BoundaryWeights {
  double mass0, mass1, energy0, energy1;
};

BoundaryWeights boundary_weights(const AssembledSystem& s) {
  const auto& p = s.params;
  if (s.form == OperatorForm::Divergence) {
    const double a0 = s.coeff(0.0), a1 = s.coeff(1.0);
    return {a0 / p.beta0, a1 / p.beta1, -p.gamma0 * a0 / p.beta0, -p.gamma1 * a1 / p.beta1};
  }
  return {1.0 / p.beta0, 1.0 / p.beta1, -p.gamma0 / p.beta0, -p.gamma1 / p.beta1};
}

void add_boundary(const AssembledSystem& s, std::vector<double>& full, double w0, double w1,
                  double p0, double p1) {
  const std::size_t first = DofMap::value_dof(0);
  const std::size_t last = DofMap::value_dof(s.map.mesh().node_count() - 1);
  full[first] += w0 * p0;
  full[last] += w1 * p1;
}

Polynomial polynomial_from(const std::vector<double>& coefficients) {
  if (coefficients.empty()) return Polynomial::constant(0.0);
  return Polynomial(coefficients);
}

} // namespace

ResolventResult resolvent_solve(const AssembledSystem& system, double lambda, std::span<const double> f) {
  require_size(system, f, "right-hand side");
  const double floor = std::max({0.0, system.params.gamma0, system.params.gamma1});
  if (!(lambda > floor)) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " must exceed " << floor;
    throw NotCoercive(msg.str());
  }
  const SymBandMatrix a = system.mass.combined(lambda, system.energy, 1.0);
  BandCholesky chol;
  if (!chol.factor(a)) {
    std::ostringstream msg;
    msg << "resolvent: factorization failed at row " << chol.failed_row();
    throw NotCoercive(msg.str());
  }
  const std::vector<long double> mf = system.mass.multiply_extended(f);
  // Residual Mf - (lambda M + K) u in extended precision against the unrounded operator.
  const auto residual = [&](std::span<const double> u) {
    const auto mu = system.mass.multiply_extended(u);
    const auto ku = system.energy.multiply_extended(u);
    std::vector<double> r(u.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<double>(mf[i] - lambda * mu[i] - ku[i]);
    return r;
  };
  std::vector<double> rhs(mf.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = static_cast<double>(mf[i]);

  ResolventResult out;
  out.solution = chol.solve(rhs);
  std::vector<double> r = residual(out.solution);
  double rn = norm2(r);
  for (int sweep = 0; sweep < kRefinementSweeps; ++sweep) {
    const std::vector<double> correction = chol.solve(r);
    std::vector<double> trial = out.solution;
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += correction[i];
    std::vector<double> rt = residual(trial);
    const double rtn = norm2(rt);
    if (!(rtn < rn)) break;
    out.solution = std::move(trial);
    r = std::move(rt);
    rn = rtn;
  }
  const double scale = norm2(rhs);
  out.relative_residual = scale > 0.0 ? rn / scale : rn;
  return out;
}

std::string to_string(Scheme s) { return s == Scheme::ImplicitEuler ? "implicit_euler" : "crank_nicolson"; }

EvolutionState make_state(const AssembledSystem& system, double t, std::vector<double> dofs) {
  require_size(system, dofs, "state");
  EvolutionState s;
  s.t = t;
  s.norm_sq = system.mass.quadratic_form(dofs);
  s.energy = system.energy.quadratic_form(dofs);
  s.dofs = std::move(dofs);
  return s;
}

TimeStepper::TimeStepper(const AssembledSystem& system, Scheme scheme) : system_(&system), scheme_(scheme) {}

void TimeStepper::prepare(double dt) {
  if (dt == factored_dt_) return;
  const double theta = scheme_ == Scheme::ImplicitEuler ? 1.0 : 0.5;
  const SymBandMatrix a = system_->mass.combined(1.0, system_->energy, theta * dt);
  if (!chol_.factor(a)) {
    factored_dt_ = -1.0;
    std::ostringstream msg;
    msg << "time-step matrix not positive definite (row " << chol_.failed_row() << ", dt = " << dt << ")";
    throw NotCoercive(msg.str());
  }
  factored_dt_ = dt;
}

EvolutionState TimeStepper::advance(const EvolutionState& state, double dt, std::span<const double> h_now,
                                    std::span<const double> h_next) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  const AssembledSystem& sys = *system_;
  require_size(sys, state.dofs, "state");
  if (!h_now.empty()) require_size(sys, h_now, "forcing");
  if (!h_next.empty()) require_size(sys, h_next, "forcing");
  prepare(dt);

  const std::size_t n = sys.size();
  const double theta = scheme_ == Scheme::ImplicitEuler ? 1.0 : 0.5;
  std::vector<double> g(n, 0.0); // M-side combination of state and forcing
  for (std::size_t i = 0; i < n; ++i) {
    const double hs = scheme_ == Scheme::ImplicitEuler
                          ? (h_next.empty() ? 0.0 : h_next[i])
                          : 0.5 * ((h_now.empty() ? 0.0 : h_now[i]) + (h_next.empty() ? 0.0 : h_next[i]));
    g[i] = state.dofs[i] + dt * hs;
  }
  std::vector<long double> rhs = sys.mass.multiply_extended(g);
  if (scheme_ == Scheme::CrankNicolson) {
    const std::vector<long double> ku = sys.energy.multiply_extended(state.dofs);
    for (std::size_t i = 0; i < n; ++i) rhs[i] -= 0.5L * dt * ku[i];
  }
  // Refine against the unrounded operator so that near-steady states do not drift.
  const auto residual = [&](std::span<const double> u) {
    const auto mu = sys.mass.multiply_extended(u);
    const auto ku = sys.energy.multiply_extended(u);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = static_cast<double>(rhs[i] - mu[i] - theta * dt * ku[i]);
    return r;
  };
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<double>(rhs[i]);
  std::vector<double> u = chol_.solve(b);
  std::vector<double> r = residual(u);
  double rn = norm2(r);
  for (int sweep = 0; sweep < kRefinementSweeps && rn > 0.0; ++sweep) {
    const std::vector<double> correction = chol_.solve(r);
    std::vector<double> trial = u;
    for (std::size_t i = 0; i < n; ++i) trial[i] += correction[i];
    std::vector<double> rt = residual(trial);
    const double rtn = norm2(rt);
    if (!(rtn < rn)) break;
    u = std::move(trial);
    r = std::move(rt);
    rn = rtn;
  }
  return make_state(sys, state.t + dt, std::move(u));
}

EvolutionState step(const EvolutionState& state, const AssembledSystem& system, double dt,
                    std::span<const double> h_now, std::span<const double> h_next, Scheme scheme) {
  TimeStepper stepper(system, scheme);
  return stepper.advance(state, dt, h_now, h_next);
}

double TimeFactor::operator()(double t) const {
  switch (kind) {
  case Kind::Constant: return 1.0;
  case Kind::Exponential: return std::exp(-rate * t);
  case Kind::Sine: return std::sin(rate * t);
  }
  return 1.0;
}

std::vector<double> Forcing::at(double t) const {
  if (is_zero()) return {};
  const double g = factor(t);
  std::vector<double> out(spatial.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = g * spatial[i];
  return out;
}

void ProblemConfig::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("T must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (dt > T) throw std::invalid_argument("dt must be <= T");
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  if (grading && !(*grading >= 1.0)) throw std::invalid_argument("grading must be >= 1");
  params.validate();
}

double default_grading(const DegenerateCoefficient& coeff, std::size_t n) {
  if (classify(coeff) != DegeneracyClass::Strong) return 1.0;
  const double side = std::max(std::round(n * coeff.x0()), std::round(n * (1.0 - coeff.x0())));
  if (side <= 1.0) return 2.0;
  return std::min(2.0, std::pow(kMaxGradedRatio, 1.0 / (side - 1.0)));
}

Polynomial default_manufactured_profile() {
  // x^3 (1-x)^3 = x^3 - 3x^4 + 3x^5 - x^6
  return Polynomial({0.0, 0.0, 0.0, 1.0, -3.0, 3.0, -1.0});
}

std::vector<double> inner_product_load(const AssembledSystem& system, const Polynomial& p) {
  const DofMap& map = system.map;
  const auto f = [&](double x) { return p(x); };
  std::vector<double> full;
  if (system.form == OperatorForm::Divergence) {
    full = load_vector(map, weighted_rule(map, system.coeff, WeightKind::Unit), 0, f);
  } else {
    const SingularConvention conv = convention_of(system);
    if (conv == SingularConvention::ConstrainedFactor) {
      const double x0 = map.mesh().x0();
      if (std::abs(p(x0)) > 1e-14 * std::max(1.0, std::abs(p(0.0)) + std::abs(p(1.0))))
        throw DivergentIntegral("function does not vanish at the degeneracy point; not in the weighted space");
    }
    full = load_vector(map, weighted_rule(map, system.coeff, WeightKind::CoeffReciprocalA, conv), 0, f);
  }
  const BoundaryWeights bw = boundary_weights(system);
  add_boundary(system, full, bw.mass0, bw.mass1, p(0.0), p(1.0));
  for (std::size_t c : map.constrained()) full[c] = 0.0;
  return map.restrict(full);
}

std::vector<double> manufactured_load(const AssembledSystem& system, const Polynomial& profile) {
  const DofMap& map = system.map;
  const Polynomial p2 = profile.derivative(2);
  const auto f2 = [&](double x) { return p2(x); };
  const WeightKind wk = system.form == OperatorForm::Divergence ? WeightKind::CoeffA : WeightKind::Unit;
  std::vector<double> full = load_vector(map, weighted_rule(map, system.coeff, wk), 2, f2);
  const BoundaryWeights bw = boundary_weights(system);
  add_boundary(system, full, bw.energy0, bw.energy1, profile(0.0), profile(1.0));
  for (std::size_t c : map.constrained()) full[c] = 0.0;
  std::vector<double> out = map.restrict(full);
  const std::vector<double> mass_part = inner_product_load(system, profile);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= mass_part[i];
  return out;
}

std::vector<double> initial_dofs(const AssembledSystem& system, const InitialSpec& spec) {
  using Kind = InitialSpec::Kind;
  if (spec.kind == Kind::Dofs) {
    require_size(system, spec.dofs, "initial dofs");
    return spec.dofs;
  }
  if (spec.kind == Kind::Random) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(system.size());
    for (double& v : out) v = normal(rng);
    return out;
  }
  Polynomial p = Polynomial::constant(spec.value);
  if (spec.kind == Kind::Polynomial) p = polynomial_from(spec.coefficients);
  if (spec.kind == Kind::Manufactured)
    p = spec.coefficients.empty() ? default_manufactured_profile() : polynomial_from(spec.coefficients);
  if (spec.project) return solve_spd(system.mass, inner_product_load(system, p), "projection");
  return system.restrict(interpolate(system.map, p));
}

Forcing build_forcing(const AssembledSystem& system, const ForcingSpec& spec) {
  Forcing out;
  out.factor = spec.factor;
  switch (spec.kind) {
  case ForcingSpec::Kind::None: break;
  case ForcingSpec::Kind::Polynomial:
    out.spatial = system.restrict(interpolate(system.map, polynomial_from(spec.coefficients)));
    break;
  case ForcingSpec::Kind::Manufactured: {
    const Polynomial p = spec.coefficients.empty() ? default_manufactured_profile() : polynomial_from(spec.coefficients);
    out.spatial = solve_spd(system.mass, manufactured_load(system, p), "manufactured forcing");
    out.factor = TimeFactor{TimeFactor::Kind::Exponential, 1.0};
    break;
  }
  }
  return out;
}

bool Trajectory::norms_nonincreasing(double rel_tol) const {
  for (std::size_t k = 0; k + 1 < states.size(); ++k)
    if (std::sqrt(states[k + 1].norm_sq) > std::sqrt(states[k].norm_sq) * (1.0 + rel_tol)) return false;
  return true;
}

bool Trajectory::contraction_ok() const { return forced ? energies_nonnegative : norms_nonincreasing(); }

double Trajectory::energy_bound_lhs() const { return sup_norm_sq + 2.0 * energy_form_integral; }

double Trajectory::energy_bound_rhs() const {
  if (states.empty()) return 0.0;
  const double T = states.back().t - states.front().t;
  return std::exp(T) * (states.front().norm_sq + forcing_integral);
}

bool Trajectory::energy_bound_holds(double rel_tol) const {
  return energy_bound_lhs() <= energy_bound_rhs() * (1.0 + rel_tol);
}

double Trajectory::max_relative_slack() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < slack.size(); ++k) {
    const double dt = states[k + 1].t - states[k].t;
    const double scale = states[k].norm_sq + states[k + 1].norm_sq + dt * forcing_norm_sq[k];
    worst = std::max(worst, scale > 0.0 ? slack[k] / scale : slack[k]);
  }
  return worst;
}

Trajectory run(const AssembledSystem& system, std::vector<double> u0, const Forcing& forcing, double T,
               double dt, Scheme scheme) {
  if (!(T > 0.0) || !(dt > 0.0) || dt > T) throw std::invalid_argument("need T > 0 and 0 < dt <= T");
  Trajectory traj;
  traj.scheme = scheme;
  traj.forced = !forcing.is_zero();
  const double kscale = system.energy.max_abs();
  const auto energy_ok = [&](const EvolutionState& s) {
    return s.energy >= -1e-10 * kscale * dot(s.dofs, s.dofs);
  };

  traj.states.push_back(make_state(system, 0.0, std::move(u0)));
  traj.sup_norm_sq = traj.states.back().norm_sq;
  traj.energies_nonnegative = energy_ok(traj.states.back());

  TimeStepper stepper(system, scheme);
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  std::vector<double> h_now = forcing.at(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const EvolutionState& cur = traj.states.back();
    const double t_next = (k + 1 == steps) ? T : static_cast<double>(k + 1) * dt;
    const double h = t_next - cur.t;
    const std::vector<double> h_next = forcing.at(t_next);
    EvolutionState next;
    try {
      next = stepper.advance(cur, h, h_now, h_next);
    } catch (const std::exception& ex) {
      traj.failure = ex.what();
      return traj;
    }
    // Implicit Euler: energy identity at u^{k+1} with h^{k+1}.
    // Crank-Nicolson: at the midpoint (u^k + u^{k+1})/2 with (h^k + h^{k+1})/2.
    double hnorm = 0.0, energy = next.energy, seminorm = 0.0, slack = 0.0;
    if (scheme == Scheme::ImplicitEuler) {
      hnorm = h_next.empty() ? 0.0 : system.mass.quadratic_form(h_next);
      seminorm = system.seminorm.quadratic_form(next.dofs);
      slack = next.norm_sq - cur.norm_sq + 2.0 * h * energy - h * next.norm_sq - h * hnorm;
      traj.energy_integral += h * (next.norm_sq + seminorm);
    } else {
      const std::vector<double> mid = midpoint(cur.dofs, next.dofs);
      if (!h_next.empty()) hnorm = system.mass.quadratic_form(midpoint(h_now, h_next));
      energy = system.energy.quadratic_form(mid);
      seminorm = system.seminorm.quadratic_form(mid);
      slack = next.norm_sq - cur.norm_sq + 2.0 * h * energy - 0.5 * h * (cur.norm_sq + next.norm_sq) - h * hnorm;
      traj.energy_integral += h * (system.mass.quadratic_form(mid) + seminorm);
    }
    traj.slack.push_back(slack);
    traj.forcing_norm_sq.push_back(hnorm);
    traj.energy_form_integral += h * energy;
    traj.forcing_integral += h * hnorm;
    traj.sup_norm_sq = std::max(traj.sup_norm_sq, next.norm_sq);
    traj.energies_nonnegative = traj.energies_nonnegative && energy_ok(next);
    traj.states.push_back(std::move(next));
    h_now = h_next;
  }
  traj.completed = true;
  return traj;
}

DofMap config_dofmap(const ProblemConfig& config) {
  const double g = config.grading ? *config.grading : default_grading(config.coeff, config.n);
  return hermite_basis(build_mesh(config.n, config.coeff.x0(), g));
}

RunResult run(const ProblemConfig& config) {
  config.validate();
  AssembledSystem system =
      assemble(config.form, config_dofmap(config), config.coeff, config.params, AssemblyOptions{config.threads});
  std::vector<double> u0 = initial_dofs(system, config.initial);
  const Forcing forcing = build_forcing(system, config.forcing);
  Trajectory traj = run(system, std::move(u0), forcing, config.T, config.dt, config.scheme);
  return RunResult{std::move(system), std::move(traj)};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "step,t,norm_mu_sq,energy_form,slack\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const EvolutionState& s = trajectory.states[k];
    const double sl = k == 0 ? 0.0 : trajectory.slack[k - 1];
    os << k << ',' << s.t << ',' << s.norm_sq << ',' << s.energy << ',' << sl << '\n';
  }
}

} // namespace wentzell
