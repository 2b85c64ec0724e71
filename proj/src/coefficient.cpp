#include "wentzell/coefficient.hpp"

#include "wentzell/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wentzell {

std::string to_string(DegeneracyClass c) {
  switch (c) {
  case DegeneracyClass::Weak: return "weak";
  case DegeneracyClass::Strong: return "strong";
  case DegeneracyClass::Nondegenerate: return "nondegenerate";
  }
  return "unknown";
}

DegenerateCoefficient::DegenerateCoefficient(Profile profile, double x0, double exponent,
                                             double scale, std::function<double(double)> custom)
    : profile_(profile), x0_(x0), exponent_(exponent), scale_(scale), custom_(std::move(custom)) {
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw std::invalid_argument("x0 must lie in [0,1]");
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  if (!(exponent >= 0.0)) throw std::invalid_argument("exponent K must be >= 0");
  if (profile == Profile::Custom && !custom_) throw std::invalid_argument("custom profile needs a callable");
}

double DegenerateCoefficient::operator()(double x) const {
  switch (profile_) {
  case Profile::PowerLaw:
    if (exponent_ == 0.0) return scale_;
    return scale_ * std::pow(std::abs(x - x0_), exponent_);
  case Profile::NondegenerateConstant: return scale_;
  case Profile::Custom: return custom_(x);
  }
  return 0.0;
}

DegenerateCoefficient power_profile(double x0, double K, double scale) {
  if (!(K >= 0.0)) throw std::invalid_argument("power_profile: K must be >= 0");
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw std::invalid_argument("power_profile: x0 must lie in [0,1]");
  return DegenerateCoefficient(Profile::PowerLaw, x0, K, scale);
}

DegenerateCoefficient constant_profile(double value, double x0) {
  return DegenerateCoefficient(Profile::NondegenerateConstant, x0, 0.0, value);
}

DegenerateCoefficient custom_profile(std::function<double(double)> a, double x0) {
  return DegenerateCoefficient(Profile::Custom, x0, 0.0, 1.0, std::move(a));
}

namespace {

// 10-point Gauss-Legendre on [-1,1].
constexpr std::array<double, 5> kGl10Nodes = {0.1488743389816312, 0.4333953941292472,
                                              0.6794095682990244, 0.8650633666889845,
                                              0.9739065285171717};
constexpr std::array<double, 5> kGl10Weights = {0.2955242247147529, 0.2692667193099963,
                                                0.2190863625159820, 0.1494513099346491,
                                                0.0666713443086881};

double gauss10(const std::function<double(double)>& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double acc = 0.0;
  for (std::size_t i = 0; i < kGl10Nodes.size(); ++i)
    acc += kGl10Weights[i] * (f(mid - half * kGl10Nodes[i]) + f(mid + half * kGl10Nodes[i]));
  return acc * half;
}

// Integral of 1/a over the dyadic shell {2^-(k+1) <= |x - x0| <= 2^-k} inside [0,1].
double reciprocal_shell(const DegenerateCoefficient& a, int k) {
  const double outer = std::ldexp(1.0, -k), inner = std::ldexp(1.0, -(k + 1));
  const auto inv = [&a](double x) { return 1.0 / a(x); };
  double acc = 0.0;
  const double x0 = a.x0();
  if (x0 + inner < 1.0) acc += gauss10(inv, x0 + inner, std::min(1.0, x0 + outer));
  if (x0 - inner > 0.0) acc += gauss10(inv, std::max(0.0, x0 - outer), x0 - inner);
  return acc;
}

DegeneracyClass classify_numerically(const DegenerateCoefficient& a) {
  constexpr int kMaxLevel = 40;
  constexpr double kBlowup = 1e8;
  constexpr double kCauchy = 1e-6;
  if (a(a.x0()) > 0.0) return DegeneracyClass::Nondegenerate;
  double total = 0.0, prev_inc = 0.0, ratio = 1.0;
  for (int k = 0; k < kMaxLevel; ++k) {
    const double inc = reciprocal_shell(a, k);
    total += inc;
    if (!std::isfinite(total) || total > kBlowup) return DegeneracyClass::Strong;
    if (k > 2 && inc <= kCauchy * total) return DegeneracyClass::Weak;
    if (prev_inc > 0.0) ratio = inc / prev_inc;
    prev_inc = inc;
  }
  // Increments shrinking geometrically: the tail is summable.
  if (ratio < 1.0 - 1e-3) return DegeneracyClass::Weak;
  return DegeneracyClass::Strong;
}

} // namespace

DegeneracyClass classify(const DegenerateCoefficient& coeff) {
  switch (coeff.profile()) {
  case Profile::NondegenerateConstant: return DegeneracyClass::Nondegenerate;
  case Profile::PowerLaw:
    if (coeff.exponent() == 0.0) return DegeneracyClass::Nondegenerate;
    return coeff.exponent() < 1.0 ? DegeneracyClass::Weak : DegeneracyClass::Strong;
  case Profile::Custom: return classify_numerically(coeff);
  }
  return DegeneracyClass::Nondegenerate;
}

HypothesisReport check_hypothesis(const DegenerateCoefficient& coeff, double K) {
  if (!(K >= 1.0 && K < 2.0)) {
    std::ostringstream os;
    os << "K = " << K << " is outside [1,2)";
    return {false, os.str()};
  }
  const double x0 = coeff.x0();
  const bool has_left = x0 > 0.0, has_right = x0 < 1.0;
  if (coeff.profile() != Profile::Custom) {
    // ratio = |x-x0|^(K - Ka) / scale: monotone in the required sense iff K >= Ka.
    if (K >= coeff.exponent()) return {true, {}};
    std::ostringstream os;
    os << "ratio |x-x0|^K/a has negative exponent " << (K - coeff.exponent()) << ": ";
    if (has_left) os << "increasing on the left of x0";
    else os << "decreasing on the right of x0";
    return {false, os.str()};
  }
  constexpr int kSamples = 2000;
  const auto ratio = [&](double x) { return std::pow(std::abs(x - x0), K) / coeff(x); };
  constexpr double kSlack = 1e-12;
  if (has_left) {
    double prev = ratio(0.0);
    for (int i = 1; i < kSamples; ++i) {
      const double x = x0 * i / kSamples;
      const double r = ratio(x);
      if (r > prev * (1.0 + kSlack)) return {false, "ratio increases on the left of x0"};
      prev = r;
    }
  }
  if (has_right) {
    double prev = ratio(x0 + (1.0 - x0) / kSamples);
    for (int i = 2; i <= kSamples; ++i) {
      const double x = x0 + (1.0 - x0) * i / kSamples;
      const double r = ratio(x);
      if (r < prev * (1.0 - kSlack)) return {false, "ratio decreases on the right of x0"};
      prev = r;
    }
  }
  return {true, {}};
}

double signed_power_integral(int j, double p, double lo, double hi) {
  if (lo > hi) return -signed_power_integral(j, p, hi, lo);
  if (lo == hi) return 0.0;
  if (lo < 0.0 && hi > 0.0)
    throw std::invalid_argument("signed_power_integral: interval straddles 0");
  const double e = static_cast<double>(j) + p; // integrand |t|^e up to sign
  // Map to s = |t| in [s_lo, s_hi]; on the negative side t^j = (-1)^j s^j.
  double s_lo = lo, s_hi = hi, sign = 1.0;
  if (hi <= 0.0) {
    s_lo = -hi;
    s_hi = -lo;
    sign = (j % 2 == 0) ? 1.0 : -1.0;
  }
  if (s_lo == 0.0 && e <= -1.0) {
    std::ostringstream os;
    os << "integral of |t|^" << e << " diverges at 0";
    throw DivergentIntegral(os.str());
  }
  if (std::abs(e + 1.0) < 1e-14) return sign * (std::log(s_hi) - std::log(s_lo));
  const double q = e + 1.0;
  const double upper = std::pow(s_hi, q);
  const double lower = s_lo == 0.0 ? 0.0 : std::pow(s_lo, q);
  return sign * (upper - lower) / q;
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

} // namespace

double singular_moment(const DegenerateCoefficient& coeff, double lo, double hi, int m, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("singular_moment: sign must be +1 or -1");
  if (m < 0) throw std::invalid_argument("singular_moment: m must be >= 0");
  if (!coeff.has_closed_form())
    throw std::invalid_argument("singular_moment: closed form unavailable for custom profiles");
  const double x0 = coeff.x0();
  const double p = coeff.profile() == Profile::PowerLaw ? sign * coeff.exponent() : 0.0;
  const double factor = sign > 0 ? coeff.scale() : 1.0 / coeff.scale();
  // x^m = sum_j C(m,j) x0^(m-j) t^j with t = x - x0.
  double acc = 0.0;
  const double tl = lo - x0, th = hi - x0;
  for (int j = 0; j <= m; ++j) {
    const double c = binomial(m, j) * std::pow(x0, m - j);
    if (c == 0.0) continue;
    double part = 0.0;
    if (tl < 0.0 && th > 0.0)
      part = signed_power_integral(j, p, tl, 0.0) + signed_power_integral(j, p, 0.0, th);
    else
      part = signed_power_integral(j, p, tl, th);
    acc += c * part;
  }
  return factor * acc;
}

} // namespace wentzell
