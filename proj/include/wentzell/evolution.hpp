#pragma once

#include "wentzell/band_matrix.hpp"
#include "wentzell/forms.hpp"
#include "wentzell/polynomial.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wentzell {

struct ResolventResult {
  std::vector<double> solution; ///< reduced numbering
  double relative_residual = 0.0;
};

/// Solves (lambda M + K) u = M f by banded Cholesky.  lambda must exceed
/// max(0, gamma0, gamma1); otherwise, or when the factorization breaks
/// down, throws NotCoercive.
ResolventResult resolvent_solve(const AssembledSystem& system, double lambda, std::span<const double> f);

enum class Scheme { ImplicitEuler, CrankNicolson };

std::string to_string(Scheme s);

struct EvolutionState {
  double t = 0.0;
  std::vector<double> dofs; ///< reduced numbering
  double norm_sq = 0.0;     ///< u^T M u
  double energy = 0.0;      ///< u^T K u
};

EvolutionState make_state(const AssembledSystem& system, double t, std::vector<double> dofs);

/// One-step integrator for M u' + K u = M h with a cached factorization,
/// refactorized only when dt changes.
class TimeStepper {
public:
  TimeStepper(const AssembledSystem& system, Scheme scheme);

  /// h_now and h_next are forcing dof vectors at t and t + dt (may be empty for h = 0).
  EvolutionState advance(const EvolutionState& state, double dt, std::span<const double> h_now,
                         std::span<const double> h_next);

  Scheme scheme() const noexcept { return scheme_; }

private:
  void prepare(double dt);

  const AssembledSystem* system_;
  Scheme scheme_;
  double factored_dt_ = -1.0;
  BandCholesky chol_;
};

EvolutionState step(const EvolutionState& state, const AssembledSystem& system, double dt,
                    std::span<const double> h_now, std::span<const double> h_next, Scheme scheme);

/// Scalar time profile g(t) of a separable forcing g(t) p(x).
struct TimeFactor {
  enum class Kind { Constant, Exponential, Sine } kind = Kind::Constant;
  double rate = 1.0;
  double operator()(double t) const;
};

/// Forcing g(t) * spatial, spatial in reduced numbering; empty spatial means h = 0.
struct Forcing {
  std::vector<double> spatial;
  TimeFactor factor;

  bool is_zero() const noexcept { return spatial.empty(); }
  std::vector<double> at(double t) const;
};

struct InitialSpec {
  enum class Kind { Constant, Polynomial, Manufactured, Random, Dofs } kind = Kind::Constant;
  double value = 1.0;
  std::vector<double> coefficients; ///< monomial coefficients in x
  std::uint64_t seed = 0;
  std::vector<double> dofs; ///< reduced numbering, Kind::Dofs
  bool project = false;     ///< M-orthogonal projection instead of interpolation
};

struct ForcingSpec {
  enum class Kind { None, Polynomial, Manufactured } kind = Kind::None;
  std::vector<double> coefficients;
  TimeFactor factor;
};

struct ProblemConfig {
  OperatorForm form = OperatorForm::Divergence;
  DegenerateCoefficient coeff = power_profile(0.5, 0.5);
  WentzellParams params;
  std::size_t n = 32;
  std::optional<double> grading; ///< default_grading(coeff, n) when unset
  double T = 1.0;
  double dt = 0.01;
  Scheme scheme = Scheme::ImplicitEuler;
  InitialSpec initial;
  ForcingSpec forcing;
  unsigned threads = 1;

  /// Throws std::invalid_argument when T, dt or n are out of range.
  void validate() const;
};

/// 1 unless the coefficient is strongly degenerate; then 2, reduced so that
/// the largest-to-smallest element ratio on each side stays <= kMaxGradedRatio.
double default_grading(const DegenerateCoefficient& coeff, std::size_t n);

inline constexpr double kMaxGradedRatio = 1e3;

/// x^3 (1-x)^3: satisfies u''(0) = u''(1) = 0.
Polynomial default_manufactured_profile();

/// Weak forcing functional phi -> -<P,phi>_mu + E(P,phi) of the exact
/// solution e^{-t} P at t = 0 (reduced numbering).
std::vector<double> manufactured_load(const AssembledSystem& system, const Polynomial& profile);

/// <p, phi_i>_mu for the system's inner product (reduced numbering).
std::vector<double> inner_product_load(const AssembledSystem& system, const Polynomial& p);

std::vector<double> initial_dofs(const AssembledSystem& system, const InitialSpec& spec);
Forcing build_forcing(const AssembledSystem& system, const ForcingSpec& spec);

/// Per-step quantities use u^{k+1}, h^{k+1} for implicit Euler and the
/// midpoints u^{k+1/2} = (u^k + u^{k+1})/2, h^{k+1/2} for Crank-Nicolson.
struct Trajectory {
  std::vector<EvolutionState> states;
  /// slack[k] for the step from states[k] to states[k+1] (M norms):
  /// IE: |u+|^2 - |u|^2 + 2 dt E(u+) - dt |u+|^2 - dt |h+|^2
  /// CN: |u+|^2 - |u|^2 + 2 dt E(u*) - dt (|u|^2 + |u+|^2)/2 - dt |h*|^2
  std::vector<double> slack;
  std::vector<double> forcing_norm_sq; ///< |h^{k+1}|_M^2 (IE) or |h^{k+1/2}|_M^2 (CN) per step
  double sup_norm_sq = 0.0;
  double energy_form_integral = 0.0; ///< sum dt E(u^{k+1}) or sum dt E(u^{k+1/2})
  double energy_integral = 0.0;      ///< same evaluation point: sum dt (|u|_M^2 + seminorm)
  double forcing_integral = 0.0;     ///< sum of dt * forcing_norm_sq
  Scheme scheme = Scheme::ImplicitEuler;
  bool completed = false;
  std::string failure;

  /// |u^{k+1}|_M <= |u^k|_M (1 + rel_tol) for all steps.
  bool norms_nonincreasing(double rel_tol = 1e-12) const;
  bool forced = false;
  /// E(u^k) >= -1e-10 * max|K| * |u^k|_2^2 at every recorded state.
  bool energies_nonnegative = true;
  /// Unforced: norms_nonincreasing(); forced: energies_nonnegative.
  bool contraction_ok() const;
  /// sup |u|^2 + sum 2 dt E <= e^T (|u0|^2 + sum dt |h|^2) (1 + rel_tol).
  bool energy_bound_holds(double rel_tol = 1e-8) const;
  double energy_bound_lhs() const;
  double energy_bound_rhs() const;
  /// max_k slack[k] / scale_k, scale_k = |u^k|^2 + |u^{k+1}|^2 + dt |h^{k+1}|^2.
  double max_relative_slack() const;
};

Trajectory run(const AssembledSystem& system, std::vector<double> u0, const Forcing& forcing, double T,
               double dt, Scheme scheme);

struct RunResult {
  AssembledSystem system;
  Trajectory trajectory;
};

RunResult run(const ProblemConfig& config);

/// Mesh from config with x0 taken from the coefficient.
DofMap config_dofmap(const ProblemConfig& config);

/// CSV: header "step,t,norm_mu_sq,energy_form,slack", 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

} // namespace wentzell
