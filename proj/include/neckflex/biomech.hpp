#pragma once

#include <vector>

#include "neckflex/mechanism.hpp"

namespace neckflex {

// Sagittal-plane vector: x forward (horizontal), z up.
struct Vec2 {
  double x = 0;
  double z = 0;
};

// Quasi-static description of the head and the mounted device at one posture.
// Moments are taken about C7. com_lever rotates rigidly with the head about
// C7; base_lever is fixed to the trunk. inclination is forward flexion,
// positive tipping the head toward +x.
struct HeadStatics {
  double head_weight = 50.0;       // N
  Vec2 com_lever{0.02, 0.15};      // m, head centre of mass at neutral
  Vec2 base_lever{-0.05, -0.03};   // m, actuator base mount
  double inclination = 0.0;        // rad

  void validate() const;  // throws std::invalid_argument
};

// Head-frame components of the head weight: bending (normal to the guide,
// reacted by the bars) and sliding (along the guide).
struct FrameForces {
  double bending = 0;  // N, F_H sin(theta)
  double sliding = 0;  // N, F_H cos(theta)
};
FrameForces head_frame_forces(const HeadStatics& s);

// Moment of the head weight about C7, flexion positive.
double gravity_moment(const HeadStatics& s);

// Moment about C7 of the force the trunk applies to the actuator base,
// flexion positive. The bending force is transmitted normal to the guide.
double base_force_moment(const HeadStatics& s);

// Moment bookkeeping of one posture, extension positive for the assistive
// quantities. muscle = gravity - assistive and assistive = base_moment -
// base_force_moment hold exactly among the stored values.
struct StaticsResult {
  double gravity = 0;           // N*m
  double base_force_torque = 0; // N*m
  double base_moment = 0;       // N*m, device input
  double assistive = 0;         // N*m
  double muscle = 0;            // N*m
};
StaticsResult muscle_moment(const HeadStatics& s, double device_base_moment);

// Device base moment that zeroes the muscle moment at this posture.
double ideal_base_moment(const HeadStatics& s);

// Pointwise ratio of a device moment curve to the ideal base moment over a
// posture sweep. Samples where the ideal moment is not positive are excluded
// and flagged. Grids must match sample for sample.
struct AssistSample {
  double theta = 0;
  double fraction = 0;
  bool excluded = false;
};
struct AssistProfile {
  std::vector<AssistSample> samples;
  double peak = 0;
  double peak_theta = 0;
  int excluded_count = 0;
};
AssistProfile assist_fraction(const MomentCurve& curve, const std::vector<HeadStatics>& sweep);

}  // namespace neckflex
