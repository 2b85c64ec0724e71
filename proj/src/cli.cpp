#include "wentzell/cli.hpp"

#include "wentzell/errors.hpp"
#include "wentzell/oracle.hpp"
#include "wentzell/verify.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace wentzell {

using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
  case Command::Run: return "run";
  case Command::Verify: return "verify";
  case Command::Spectrum: return "spectrum";
  case Command::Resolvent: return "resolvent";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::Run, Command::Verify, Command::Spectrum, Command::Resolvent})
    if (to_string(c) == name) return c;
  throw std::invalid_argument("unknown subcommand '" + std::string(name) + "'");
}

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

/// Object view that records which keys were read and rejects the rest.
class Section {
public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path(key), "must be finite");
    return d;
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(path(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    if (!has(key)) return {};
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
      if (!x.is_number()) throw ConfigError(path(key), "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError(path(key), "unknown key");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class E>
E pick(const std::string& path, const std::string& value, std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(path, "unknown value '" + value + "' (expected one of " + names + ")");
}

DegenerateCoefficient parse_coefficient(Section s) {
  const std::string profile = s.string("profile", "power");
  const double x0 = s.number("x0", 0.5);
  if (!(x0 > 0.0 && x0 < 1.0)) throw ConfigError(s.path("x0"), "must lie strictly inside (0,1)");
  const double scale = s.number("scale", 1.0);
  if (!(scale > 0.0)) throw ConfigError(s.path("scale"), "must be > 0");
  DegenerateCoefficient c = power_profile(x0, 0.5);
  if (profile == "power") {
    if (s.has("value")) throw ConfigError(s.path("value"), "only valid for the constant profile");
    const double K = s.number("K", 0.5);
    if (!(K > 0.0)) throw ConfigError(s.path("K"), "must be > 0");
    if (K >= 2.0) throw ConfigError(s.path("K"), "strongly degenerate coefficients need K in [1,2)");
    c = power_profile(x0, K, scale);
  } else if (profile == "constant") {
    if (s.has("K")) throw ConfigError(s.path("K"), "only valid for the power profile");
    const double value = s.number("value", 1.0) * scale;
    if (!(value > 0.0)) throw ConfigError(s.path("value"), "must be > 0");
    c = constant_profile(value, x0);
  } else {
    throw ConfigError(s.path("profile"), "unknown value '" + profile + "' (expected one of power, constant)");
  }
  s.finish();
  return c;
}

WentzellParams parse_wentzell(Section s) {
  WentzellParams p;
  p.beta0 = s.number("beta0", p.beta0);
  p.beta1 = s.number("beta1", p.beta1);
  p.gamma0 = s.number("gamma0", p.gamma0);
  p.gamma1 = s.number("gamma1", p.gamma1);
  if (!(p.beta0 > 0.0)) throw ConfigError(s.path("beta0"), "beta0 must be > 0");
  if (!(p.beta1 > 0.0)) throw ConfigError(s.path("beta1"), "beta1 must be > 0");
  if (!(p.gamma0 <= 0.0)) throw ConfigError(s.path("gamma0"), "gamma0 must be <= 0");
  if (!(p.gamma1 <= 0.0)) throw ConfigError(s.path("gamma1"), "gamma1 must be <= 0");
  s.finish();
  return p;
}

TimeFactor parse_time_factor(Section s) {
  TimeFactor f;
  f.kind = pick<TimeFactor::Kind>(s.path("kind"), s.string("kind", "constant"),
                                  {{"constant", TimeFactor::Kind::Constant},
                                   {"exponential", TimeFactor::Kind::Exponential},
                                   {"sine", TimeFactor::Kind::Sine}});
  f.rate = s.number("rate", 1.0);
  s.finish();
  return f;
}

/// Shared by initial data and the resolvent right-hand side.
InitialSpec parse_data(Section s, std::optional<std::uint64_t>& seed, bool allow_manufactured) {
  InitialSpec spec;
  const std::string kind = s.string("kind", "constant");
  if (kind == "manufactured" && !allow_manufactured) throw ConfigError(s.path("kind"), "manufactured is not available here");
  spec.kind = pick<InitialSpec::Kind>(s.path("kind"), kind,
                                      {{"constant", InitialSpec::Kind::Constant},
                                       {"polynomial", InitialSpec::Kind::Polynomial},
                                       {"manufactured", InitialSpec::Kind::Manufactured},
                                       {"random", InitialSpec::Kind::Random},
                                       {"dofs", InitialSpec::Kind::Dofs}});
  spec.value = s.number("value", spec.value);
  spec.coefficients = s.numbers("coefficients");
  spec.dofs = s.numbers("dofs");
  spec.project = s.boolean("project", false);
  if (s.has("seed")) seed = s.unsigned_integer("seed", 0);
  if (spec.kind == InitialSpec::Kind::Polynomial && spec.coefficients.empty())
    throw ConfigError(s.path("coefficients"), "required for kind polynomial");
  if (spec.kind == InitialSpec::Kind::Dofs && spec.dofs.empty())
    throw ConfigError(s.path("dofs"), "required for kind dofs");
  s.finish();
  return spec;
}

ForcingSpec parse_forcing(Section s) {
  ForcingSpec f;
  f.kind = pick<ForcingSpec::Kind>(s.path("kind"), s.string("kind", "none"),
                                   {{"none", ForcingSpec::Kind::None},
                                    {"polynomial", ForcingSpec::Kind::Polynomial},
                                    {"manufactured", ForcingSpec::Kind::Manufactured}});
  f.coefficients = s.numbers("coefficients");
  if (s.has("time_factor")) f.factor = parse_time_factor(Section(s.raw("time_factor"), s.path("time_factor")));
  if (f.kind == ForcingSpec::Kind::Polynomial && f.coefficients.empty())
    throw ConfigError(s.path("coefficients"), "required for kind polynomial");
  s.finish();
  return f;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  return os;
}

json describe_problem(const ProblemConfig& p, const DofMap& map) {
  return {{"operator", to_string(p.form)},
          {"class", to_string(classify(p.coeff))},
          {"x0", p.coeff.x0()},
          {"K", p.coeff.exponent()},
          {"scale", p.coeff.scale()},
          {"n", p.n},
          {"grading", map.mesh().grading()}};
}

ProblemConfig resolved_problem(const CliConfig& c) {
  ProblemConfig p = c.problem;
  p.threads = c.threads;
  p.initial.seed = c.initial_seed.value_or(c.seed);
  return p;
}

AssembledSystem assemble_problem(const ProblemConfig& p) {
  return assemble(p.form, config_dofmap(p), p.coeff, p.params, AssemblyOptions{p.threads});
}

int run_command(const CliConfig& c) {
  const ProblemConfig p = resolved_problem(c);
  const RunResult r = run(p);
  const Trajectory& tr = r.trajectory;
  {
    std::ofstream os = open_csv(c.out_dir / "trajectory.csv");
    write_trajectory_csv(os, tr);
  }
  const double initial = tr.states.empty() ? 0.0 : tr.states.front().norm_sq;
  const double final = tr.states.empty() ? 0.0 : tr.states.back().norm_sq;
  const bool contraction = tr.completed && tr.contraction_ok();
  const bool bound = tr.completed && tr.energy_bound_holds();
  json summary = {{"operator", to_string(p.form)},
                  {"class", to_string(classify(p.coeff))},
                  {"n", p.n},
                  {"dt", p.dt},
                  {"T", p.T},
                  {"scheme", to_string(p.scheme)},
                  {"grading", r.system.map.mesh().grading()},
                  {"steps", tr.states.empty() ? 0 : tr.states.size() - 1},
                  {"initial_norm_mu_sq", initial},
                  {"final_norm_mu_sq", final},
                  {"sup_norm_mu_sq", tr.sup_norm_sq},
                  {"energy_integral", tr.energy_integral},
                  {"energy_bound_lhs", tr.energy_bound_lhs()},
                  {"energy_bound_rhs", tr.energy_bound_rhs()},
                  {"max_relative_slack", tr.max_relative_slack()},
                  {"forced", tr.forced},
                  {"completed", tr.completed},
                  {"contraction_ok", contraction},
                  {"energy_bound_ok", bound}};
  if (!tr.completed) summary["failure"] = tr.failure;
  const bool passed = tr.completed && contraction && bound;
  summary["passed"] = passed;
  write_json(c.out_dir / "summary.json", summary);
  return passed ? 0 : 1;
}

int verify_command(const CliConfig& c) {
  VerifyOptions opt;
  opt.seed = c.seed;
  opt.threads = c.threads;
  opt.n = c.verify_n;
  const VerificationReport rep = run_verification(c.suites, opt);
  json j = rep.to_json();
  j["suites"] = c.suites;
  j["seed"] = c.seed;
  write_json(c.out_dir / "verification.json", j);
  return rep.passed() ? 0 : 1;
}

int spectrum_command(const CliConfig& c) {
  const ProblemConfig p = resolved_problem(c);
  const AssembledSystem sys = assemble_problem(p);
  const SpectralDecomposition d = dense_decompose(sys);
  const auto count = static_cast<Eigen::Index>(
      c.spectrum_count == 0 ? d.size() : std::min<Eigen::Index>(d.size(), static_cast<Eigen::Index>(c.spectrum_count)));
  {
    std::ofstream os = open_csv(c.out_dir / "spectrum.csv");
    os << "index,eigenvalue,raw_eigenvalue\n";
    for (Eigen::Index k = 0; k < count; ++k) os << k << ',' << d.eigenvalues(k) << ',' << d.raw_eigenvalues(k) << '\n';
  }
  {
    std::ofstream os = open_csv(c.out_dir / "mass.csv");
    sys.mass.write_triplets(os);
  }
  {
    std::ofstream os = open_csv(c.out_dir / "energy.csv");
    sys.energy.write_triplets(os);
  }
  const bool psd = d.min_raw() >= -1e-10 * d.scale;
  json j = describe_problem(p, sys.map);
  j["dofs"] = sys.size();
  j["reported"] = count;
  j["min_eigenvalue"] = d.min_raw();
  j["max_eigenvalue"] = d.scale;
  j["kernel_dimension"] = d.kernel_dimension();
  j["psd_ok"] = psd;
  j["passed"] = psd;
  write_json(c.out_dir / "spectrum.json", j);
  return psd ? 0 : 1;
}

int resolvent_command(const CliConfig& c) {
  const ProblemConfig p = resolved_problem(c);
  const AssembledSystem sys = assemble_problem(p);
  InitialSpec fspec = c.resolvent.f;
  fspec.seed = c.f_seed.value_or(c.seed);
  const std::vector<double> f = initial_dofs(sys, fspec);
  const ResolventResult r = resolvent_solve(sys, c.resolvent.lambda, f);
  const std::vector<double> full = sys.expand(r.solution);
  {
    std::ofstream os = open_csv(c.out_dir / "resolvent.csv");
    os << "dof,node,kind,x,value\n";
    const auto& nodes = sys.map.mesh().nodes();
    for (std::size_t i = 0; i < full.size(); ++i)
      os << i << ',' << i / 2 << ',' << (i % 2 == 0 ? "value" : "slope") << ',' << nodes[i / 2] << ',' << full[i]
         << '\n';
  }
  constexpr double tol = 1e-10;
  const bool passed = r.relative_residual <= tol;
  json j = describe_problem(p, sys.map);
  j["lambda"] = c.resolvent.lambda;
  j["dofs"] = sys.size();
  j["relative_residual"] = r.relative_residual;
  j["tolerance"] = tol;
  j["passed"] = passed;
  write_json(c.out_dir / "resolvent.json", j);
  return passed ? 0 : 1;
}

} // namespace

CliConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  Section s(root, "");
  CliConfig c;
  ProblemConfig& p = c.problem;

  p.form = pick<OperatorForm>("operator", s.string("operator", "divergence"),
                              {{"divergence", OperatorForm::Divergence}, {"nondivergence", OperatorForm::NonDivergence}});
  if (s.has("coefficient")) p.coeff = parse_coefficient(Section(s.raw("coefficient"), "coefficient"));
  if (s.has("wentzell")) p.params = parse_wentzell(Section(s.raw("wentzell"), "wentzell"));

  if (s.has("mesh")) {
    Section m(s.raw("mesh"), "mesh");
    p.n = m.unsigned_integer("n", p.n);
    if (p.n < 2) throw ConfigError("mesh.n", "must be >= 2");
    if (m.has("grading")) {
      p.grading = m.number("grading", 1.0);
      if (!(*p.grading >= 1.0)) throw ConfigError("mesh.grading", "must be >= 1");
    }
    m.finish();
  }

  p.T = 1.0;
  std::optional<double> dt;
  if (s.has("time")) {
    Section t(s.raw("time"), "time");
    p.T = t.number("T", p.T);
    if (!(p.T > 0.0)) throw ConfigError("time.T", "must be > 0");
    if (t.has("dt")) dt = t.number("dt", 0.0);
    p.scheme = pick<Scheme>("time.scheme", t.string("scheme", "implicit_euler"),
                            {{"implicit_euler", Scheme::ImplicitEuler}, {"crank_nicolson", Scheme::CrankNicolson}});
    t.finish();
  }
  p.dt = dt.value_or(p.T / 100.0);
  if (!(p.dt > 0.0) || p.dt > p.T) throw ConfigError("time.dt", "must satisfy 0 < dt <= T");

  if (s.has("initial")) p.initial = parse_data(Section(s.raw("initial"), "initial"), c.initial_seed, true);
  if (s.has("forcing")) p.forcing = parse_forcing(Section(s.raw("forcing"), "forcing"));

  if (s.has("spectrum")) {
    Section sp(s.raw("spectrum"), "spectrum");
    c.spectrum_count = sp.unsigned_integer("count", 0);
    sp.finish();
  }
  if (s.has("resolvent")) {
    Section r(s.raw("resolvent"), "resolvent");
    c.resolvent.lambda = r.number("lambda", c.resolvent.lambda);
    if (r.has("f")) c.resolvent.f = parse_data(Section(r.raw("f"), "resolvent.f"), c.f_seed, false);
    r.finish();
  }
  if (s.has("verify")) {
    Section v(s.raw("verify"), "verify");
    if (v.has("suite")) {
      const json& suite = v.raw("suite");
      std::vector<std::string> names;
      if (suite.is_string()) {
        names.push_back(suite.get<std::string>());
      } else if (suite.is_array()) {
        for (const json& x : suite) {
          if (!x.is_string()) throw ConfigError("verify.suite", "expected a string or an array of strings");
          names.push_back(x.get<std::string>());
        }
      } else {
        throw ConfigError("verify.suite", "expected a string or an array of strings");
      }
      for (const std::string& name : names) {
        const auto& known = verification_suites();
        if (name != "all" && std::find(known.begin(), known.end(), name) == known.end())
          throw ConfigError("verify.suite", "unknown suite '" + name + "'");
      }
      if (names.empty()) throw ConfigError("verify.suite", "must name at least one suite");
      c.suites = names;
    }
    c.verify_n = v.unsigned_integer("n", c.verify_n);
    if (c.verify_n < 2) throw ConfigError("verify.n", "must be >= 2");
    v.finish();
  }

  if (s.has("out")) c.out_dir = s.string("out", "out");
  c.seed = s.unsigned_integer("seed", 0);
  const std::uint64_t threads = s.unsigned_integer("threads", 1);
  if (threads < 1 || threads > 256) throw ConfigError("threads", "must be in [1,256]");
  c.threads = static_cast<unsigned>(threads);
  s.finish();

  // Structural requirements the evolution operators place on the coefficient.
  try {
    p.validate();
    const AssembledSystem probe = assemble(p.form, hermite_basis(build_mesh(2, p.coeff.x0(), 1.0)), p.coeff, p.params);
    (void)probe;
  } catch (const HypothesisViolation& e) {
    throw ConfigError("coefficient.K", e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("<root>", e.what());
  }
  return c;
}

int dispatch(Command command, const CliConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  try {
    if (ec) throw std::runtime_error("cannot create output directory " + config.out_dir.string());
    switch (command) {
    case Command::Run: return run_command(config);
    case Command::Verify: return verify_command(config);
    case Command::Spectrum: return spectrum_command(config);
    case Command::Resolvent: return resolvent_command(config);
    }
    throw std::logic_error("unhandled subcommand");
  } catch (const std::exception& e) {
    json err = {{"command", to_string(command)}, {"error", e.what()}, {"passed", false}};
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) err["key"] = ce->key();
    try {
      write_json(config.out_dir / "error.json", err);
    } catch (const std::exception&) {
    }
    return 2;
  }
}

} // namespace wentzell
