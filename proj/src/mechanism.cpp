#include "neckflex/mechanism.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "neckflex/errors.hpp"
#include "neckflex/quadrature.hpp"

namespace neckflex {

namespace {

constexpr double kPi = std::numbers::pi;

void check_angle(double theta) {
  if (!(theta >= 0.0) || !(theta < kPi / 2))
    throw std::domain_error("bend angle must lie in [0, pi/2)");
}

// After gamma = theta - u^2 the integrand is 2u / sqrt(sin theta - sin(theta - u^2)),
// finite everywhere on [0, sqrt(theta)]. The sine difference is evaluated as
// 2 cos(theta - u^2/2) sin(u^2/2), which loses nothing to cancellation.
double substituted_integrand(double theta, double u) {
  const double u2 = u * u;
  const double diff = 2.0 * std::cos(theta - 0.5 * u2) * std::sin(0.5 * u2);
  return 2.0 * u / std::sqrt(diff);
}

// Root of end_shortening(theta) = travel on [0, kMaxBendAngle], by bisection.
// Assumes travel is within range; end shortening is strictly increasing.
double shortening_root(const BarArraySpec& spec, double travel) {
  double lo = 0.0, hi = kMaxBendAngle;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (end_shortening(spec, mid) < travel ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void BarArraySpec::validate() const {
  if (!(bar_diameter > 0)) throw std::invalid_argument("bar_diameter must be positive");
  if (!(free_length > 0)) throw std::invalid_argument("free_length must be positive");
  if (!(youngs_modulus > 0)) throw std::invalid_argument("youngs_modulus must be positive");
  if (bar_count < 1) throw std::invalid_argument("bar_count must be at least 1");
  if (coupled_count < 0 || coupled_count > bar_count)
    throw std::invalid_argument("coupled_count must lie in [0, bar_count]");
  if (!(triad_separation >= 0)) throw std::invalid_argument("triad_separation must be >= 0");
  if (std::isnan(gap) || gap < -free_length)
    throw std::invalid_argument("gap must be a number >= -free_length or +infinity");
}

bool StiffnessMode::triad_coupled() const { return std::isfinite(gap_); }

double gamma_integral(double theta, double rel_tol) {
  check_angle(theta);
  if (theta == 0.0) return 0.0;
  auto f = [theta](double u) { return substituted_integrand(theta, u); };
  return integrate_smooth(f, 0.0, std::sqrt(theta), rel_tol);
}

double single_bar_inertia(double diameter) {
  if (!(diameter > 0)) throw std::invalid_argument("diameter must be positive");
  const double d2 = diameter * diameter;
  return kPi * d2 * d2 / 64.0;
}

double equivalent_inertia(const BarArraySpec& spec, const StiffnessMode& mode) {
  spec.validate();
  const double single = single_bar_inertia(spec.bar_diameter);
  if (!mode.triad_coupled()) return spec.bar_count * single;
  if (spec.coupled_count != 3)
    throw std::invalid_argument("the coupled-section model requires exactly 3 coupled bars");
  const double section = kPi * spec.bar_diameter * spec.bar_diameter / 4.0;
  const double triad =
      spec.triad_separation * spec.triad_separation * section * (2.0 / 3.0) + 3.0 * single;
  return (spec.bar_count - spec.coupled_count) * single + triad;
}

double base_moment(const BarArraySpec& spec, double theta, const StiffnessMode& mode) {
  check_angle(theta);
  if (theta == 0.0) return 0.0;
  const double ei = spec.youngs_modulus * equivalent_inertia(spec, mode);
  return gamma_integral(theta) * ei * std::sqrt(std::sin(theta)) / spec.free_length;
}

double end_shortening(const BarArraySpec& spec, double theta) {
  check_angle(theta);
  if (theta == 0.0) return 0.0;
  return spec.free_length * (1.0 - 2.0 * std::sqrt(std::sin(theta)) / gamma_integral(theta));
}

std::optional<double> transition_angle(const BarArraySpec& spec) {
  spec.validate();
  if (std::isinf(spec.gap)) return std::nullopt;
  if (spec.gap <= 0.0) return 0.0;
  if (spec.gap > end_shortening(spec, kMaxBendAngle)) return std::nullopt;
  return shortening_root(spec, spec.gap);
}

double preload_offset(const BarArraySpec& spec) {
  spec.validate();
  if (!(spec.gap < 0))
    throw std::invalid_argument("preload_offset requires a negative gap");
  const double travel = -spec.gap;
  if (travel > end_shortening(spec, kMaxBendAngle))
    throw NumericError("preload exceeds the end shortening achievable within the angle range");
  return base_moment(spec, shortening_root(spec, travel), StiffnessMode::loaded());
}

MomentCurve moment_curve(const BarArraySpec& spec, const std::vector<double>& thetas) {
  spec.validate();
  for (double t : thetas)
    if (!(t >= 0.0) || t > kMaxBendAngle + 1e-12)
      throw std::domain_error("curve angles must lie in [0, 85 deg]");

  MomentCurve curve;
  curve.samples.reserve(thetas.size());
  const auto pre = StiffnessMode::base();
  const auto post = StiffnessMode::loaded();

  if (std::isinf(spec.gap)) {
    for (double t : thetas)
      curve.samples.push_back({t, base_moment(spec, t, pre), Branch::pre});
    return curve;
  }

  if (spec.gap < 0) {
    curve.transition = 0.0;
    curve.preload_moment = preload_offset(spec);
    for (double t : thetas)
      curve.samples.push_back({t, base_moment(spec, t, post) + curve.preload_moment, Branch::post});
    return curve;
  }

  curve.transition = transition_angle(spec);
  if (!curve.transition) {  // gap never closes within range: pure base behaviour
    for (double t : thetas)
      curve.samples.push_back({t, base_moment(spec, t, pre), Branch::pre});
    return curve;
  }

  const double star = *curve.transition;
  const double m_pre_star = base_moment(spec, star, pre);
  const double m_post_star = base_moment(spec, star, post);
  for (double t : thetas) {
    if (t < star)
      curve.samples.push_back({t, base_moment(spec, t, pre), Branch::pre});
    else
      curve.samples.push_back(
          {t, m_pre_star + base_moment(spec, t, post) - m_post_star, Branch::post});
  }
  return curve;
}

}  // namespace neckflex
