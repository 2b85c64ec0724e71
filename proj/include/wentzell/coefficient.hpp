#pragma once

#include <functional>
#include <string>

namespace wentzell {

enum class Profile {
  PowerLaw,             ///< a(x) = scale * |x - x0|^K
  NondegenerateConstant,///< a(x) = scale
  Custom,               ///< user callable, classified numerically
};

enum class DegeneracyClass { Weak, Strong, Nondegenerate };

std::string to_string(DegeneracyClass c);

/// Weight a(x) on [0,1], vanishing (at most) at x0.  Immutable.
class DegenerateCoefficient {
public:
  DegenerateCoefficient(Profile profile, double x0, double exponent, double scale,
                        std::function<double(double)> custom = {});

  Profile profile() const noexcept { return profile_; }
  double x0() const noexcept { return x0_; }
  /// Power-law exponent K (0 for the constant profile).
  double exponent() const noexcept { return exponent_; }
  double scale() const noexcept { return scale_; }

  double operator()(double x) const;
  /// True when closed-form moments are available (PowerLaw, constant).
  bool has_closed_form() const noexcept { return profile_ != Profile::Custom; }

private:
  Profile profile_;
  double x0_;
  double exponent_;
  double scale_;
  std::function<double(double)> custom_;
};

/// a(x) = scale*|x - x0|^K.  Throws std::invalid_argument for K < 0 or x0 outside [0,1].
DegenerateCoefficient power_profile(double x0, double K, double scale = 1.0);
/// a(x) = value > 0.  x0 is kept only as a mesh anchor.
DegenerateCoefficient constant_profile(double value = 1.0, double x0 = 0.5);
/// Arbitrary continuous weight with a(x0) = 0; integrability of 1/a is probed numerically.
DegenerateCoefficient custom_profile(std::function<double(double)> a, double x0);

DegeneracyClass classify(const DegenerateCoefficient& coeff);

struct HypothesisReport {
  bool holds = false;
  std::string reason; ///< empty when `holds`
  explicit operator bool() const noexcept { return holds; }
};

/// Checks K in [1,2) and that |x-x0|^K / a(x) is non-increasing left of x0
/// and non-decreasing right of x0 (only the existing side when x0 is 0 or 1).
HypothesisReport check_hypothesis(const DegenerateCoefficient& coeff, double K);

/// Closed form of the integral of t^j |t|^p over [lo, hi], where lo <= hi
/// lie on the same side of 0 (0 itself allowed as an endpoint).
/// Throws DivergentIntegral when 0 is an endpoint and j + p <= -1.
double signed_power_integral(int j, double p, double lo, double hi);

/// Integral of x^m a(x)^sign over [lo, hi], sign = +1 or -1, by binomial
/// expansion about x0 and closed-form antiderivatives.
double singular_moment(const DegenerateCoefficient& coeff, double lo, double hi, int m, int sign);

} // namespace wentzell
