#include "neckflex/biomech.hpp"

#include <cmath>
#include <stdexcept>

namespace neckflex {

namespace {

// y-component of P x F in the sagittal plane (x forward, z up, y to the left);
// positive is a flexion moment.
double plane_moment(const Vec2& p, double fx, double fz) { return p.z * fx - p.x * fz; }

}  // namespace

void HeadStatics::validate() const {
  if (!(head_weight > 0)) throw std::invalid_argument("head_weight must be positive");
  if (!std::isfinite(com_lever.x) || !std::isfinite(com_lever.z) ||
      !std::isfinite(base_lever.x) || !std::isfinite(base_lever.z))
    throw std::invalid_argument("levers must be finite");
  if (!std::isfinite(inclination)) throw std::invalid_argument("inclination must be finite");
}

FrameForces head_frame_forces(const HeadStatics& s) {
  s.validate();
  return {s.head_weight * std::sin(s.inclination), s.head_weight * std::cos(s.inclination)};
}

double gravity_moment(const HeadStatics& s) {
  s.validate();
  // CoM rotates with the head about C7; gravity acts along -z.
  const double px = s.com_lever.x * std::cos(s.inclination) + s.com_lever.z * std::sin(s.inclination);
  return s.head_weight * px;
}

double base_force_moment(const HeadStatics& s) {
  s.validate();
  // The trunk supports the actuator base against the bending component of the
  // head weight, transmitted normal to the guide axis. Guide-normal direction
  // in trunk coordinates is (cos theta, -sin theta).
  const double fb = s.head_weight * std::sin(s.inclination);
  const double fx = -fb * std::cos(s.inclination);
  const double fz = fb * std::sin(s.inclination);
  return plane_moment(s.base_lever, fx, fz);
}

StaticsResult muscle_moment(const HeadStatics& s, double device_base_moment) {
  StaticsResult r;
  r.gravity = gravity_moment(s);
  r.base_force_torque = base_force_moment(s);
  r.base_moment = device_base_moment;
  r.assistive = device_base_moment - r.base_force_torque;
  r.muscle = r.gravity - r.assistive;
  return r;
}

double ideal_base_moment(const HeadStatics& s) {
  // Zero muscle moment: the device covers gravity plus the base-force torque.
  return gravity_moment(s) + base_force_moment(s);
}

AssistProfile assist_fraction(const MomentCurve& curve, const std::vector<HeadStatics>& sweep) {
  if (curve.samples.size() != sweep.size())
    throw std::invalid_argument("curve and statics sweep must have the same length");
  AssistProfile profile;
  profile.samples.reserve(sweep.size());
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (std::abs(curve.samples[i].theta - sweep[i].inclination) > 1e-9)
      throw std::invalid_argument("curve and statics sweep angles must match");
    AssistSample out;
    out.theta = curve.samples[i].theta;
    const double ideal = ideal_base_moment(sweep[i]);
    if (!(ideal > 0)) {
      out.excluded = true;
      ++profile.excluded_count;
    } else {
      out.fraction = curve.samples[i].moment / ideal;
      if (out.fraction > profile.peak) {
        profile.peak = out.fraction;
        profile.peak_theta = out.theta;
      }
    }
    profile.samples.push_back(out);
  }
  return profile;
}

}  // namespace neckflex
