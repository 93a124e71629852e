#pragma once

#include <limits>
#include <optional>
#include <vector>

namespace neckflex {

// Largest bending angle the bar model is evaluated at, in radians (85 deg).
// The tip-angle integral itself is defined on [0, pi/2).
inline constexpr double kMaxBendAngle = 85.0 * 3.14159265358979323846 / 180.0;

// Geometry and material of the compliant bar array.
// gap is the stiffness-control clearance under the central bar's lower plate:
//   +infinity  free plate (base stiffness)
//   0          plate seated (loaded stiffness)
//   > 0        plate engages after the bend closes the clearance
//   < 0        plate pre-pressed by |gap| (preloaded)
struct BarArraySpec {
  double bar_diameter = 1.5e-3;   // m
  double free_length = 80e-3;     // m
  double youngs_modulus = 130e9;  // Pa
  int bar_count = 7;
  int coupled_count = 3;
  double triad_separation = 4.5e-3;  // m, centroid distance of the coupled bars
  double gap = std::numeric_limits<double>::infinity();  // m

  void validate() const;  // throws std::invalid_argument
};

// Which stiffness regime an equivalent inertia is asked for. A finite gap
// engages the coupled triad once closed; the gap value itself only moves
// the transition angle, not the post-transition inertia.
class StiffnessMode {
 public:
  static StiffnessMode base() { return StiffnessMode(std::numeric_limits<double>::infinity()); }
  static StiffnessMode loaded() { return StiffnessMode(0.0); }
  static StiffnessMode gap_controlled(double gap_m) { return StiffnessMode(gap_m); }

  double gap() const { return gap_; }
  bool triad_coupled() const;  // false only for gap = +infinity

 private:
  explicit StiffnessMode(double g) : gap_(g) {}
  double gap_;
};

// Tip-angle integral of the cantilever large-deflection model:
//   Gamma(theta) = integral_0^theta dg / sqrt(sin theta - sin g)
// Defined on [0, pi/2); Gamma(0) = 0, Gamma -> 2 sqrt(theta) for small theta.
double gamma_integral(double theta, double rel_tol = 1e-9);

// Second moment of area of one round bar, pi d^4 / 64.
double single_bar_inertia(double diameter);

// Equivalent second moment of the array in the given regime.
// Base: all bars bend independently. Coupled: the three triad bars act as a
// composite section (parallel-axis term over the triad separation) and the
// remaining bars stay independent. Requires coupled_count == 3 for coupling.
double equivalent_inertia(const BarArraySpec& spec, const StiffnessMode& mode);

// Base bending moment of the array at tip angle theta:
//   M_B = Gamma(theta) * E * I_eq * sqrt(sin theta) / L
double base_moment(const BarArraySpec& spec, double theta, const StiffnessMode& mode);

// Axial end shortening of the bar at tip angle theta:
//   Delta = L * (1 - 2 sqrt(sin theta) / Gamma(theta))
// Strictly increasing in theta; Delta(0) = 0.
double end_shortening(const BarArraySpec& spec, double theta);

// Bend angle at which the plate travel closes the gap, i.e. the root of
// Delta(theta) = gap on [0, kMaxBendAngle], located to 1e-9 rad.
// nullopt when the gap is infinite (never closes) or larger than the travel
// achievable within the angle range. gap <= 0 transitions at zero.
std::optional<double> transition_angle(const BarArraySpec& spec);

// Constant moment offset of a preloaded array (gap < 0): the loaded-regime
// moment at the angle whose end shortening equals |gap|.
double preload_offset(const BarArraySpec& spec);

enum class Branch { pre, post };

struct MomentSample {
  double theta = 0;   // rad
  double moment = 0;  // N*m
  Branch branch = Branch::pre;
};

// Piecewise moment-angle curve of the gap-controlled array. Below the
// transition the array bends with the base inertia; above it the moment
// continues from the transition point with the coupled inertia:
//   M(theta) = M_pre(theta)                                   theta < theta*
//   M(theta) = M_pre(theta*) + M_post(theta) - M_post(theta*) otherwise
// A preloaded array (gap < 0) is the coupled curve plus the preload offset.
struct MomentCurve {
  std::vector<MomentSample> samples;
  std::optional<double> transition;  // rad
  double preload_moment = 0;         // N*m, nonzero only when gap < 0
};

MomentCurve moment_curve(const BarArraySpec& spec, const std::vector<double>& thetas);

}  // namespace neckflex
