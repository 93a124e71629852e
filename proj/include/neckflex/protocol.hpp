#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "neckflex/signal.hpp"

namespace neckflex {

enum class Plane { sagittal, transverse, coronal };

std::string to_string(Plane plane);
Plane plane_from_string(const std::string& s);

// One commanded head posture: a rotation plane and a signed target angle.
struct PostureTarget {
  Plane plane = Plane::sagittal;
  double angle_deg = 0;

  bool operator==(const PostureTarget&) const = default;
};

// Map key for per-posture tables; targets carry whole-degree angles.
struct PostureKey {
  Plane plane = Plane::sagittal;
  int angle_deg = 0;

  auto operator<=>(const PostureKey&) const = default;
};

PostureKey key_of(const PostureTarget& target);

// The twelve session postures: sagittal +/-15 and +/-40, transverse +/-15
// and +/-30, coronal +/-15 and +/-40 degrees.
std::vector<PostureTarget> standard_postures();

// Phase timing used when laying out a plan. Defaults follow the session
// script; tests compress them.
struct PlanTiming {
  double neutral = 3.0;   // s, dwell before each approach
  double approach = 2.0;  // s
  double hold = 10.0;     // s
  double recovery = 2.0;  // s

  void validate() const;
};

struct PlannedCycle {
  PostureTarget target;
  double t_start = 0;           // s, neutral dwell begins
  double t_approach_start = 0;  // s, motion toward the target begins
  double t_hold_start = 0;      // s
  double t_hold_end = 0;        // s
  double t_end = 0;             // s, recovery complete
};

struct TrialPlan {
  std::vector<PlannedCycle> cycles;
  std::uint64_t seed = 0;

  double duration() const { return cycles.empty() ? 0.0 : cycles.back().t_end; }
};

// Shuffled session order: each standard posture twice, 24 cycles total.
// The same seed always yields the same order.
TrialPlan generate_sequence(std::uint64_t seed, const PlanTiming& timing = {});

TrialPlan read_plan_csv(const std::filesystem::path& path);
void write_plan_csv(const std::filesystem::path& path, const TrialPlan& plan);

// Recorded muscle channels, in column order.
const std::vector<std::string>& muscle_names();

// Target envelope amplitudes for synthesis: per muscle and posture, with a
// common resting baseline elsewhere.
struct ActivationProfile {
  double baseline = 0.05;
  std::map<std::pair<std::string, PostureKey>, double> holds;

  void set(const std::string& muscle, Plane plane, int angle_deg, double amplitude);
  double amplitude(const std::string& muscle, const PostureKey& key) const;
};

ActivationProfile read_profile_csv(const std::filesystem::path& path);
void write_profile_csv(const std::filesystem::path& path, const ActivationProfile& profile);

struct SynthParams {
  double kin_rate = 100.0;    // Hz
  double emg_rate = 2000.0;   // Hz
  double ramp = 0.1;          // s, amplitude transition width
  double kin_noise_deg = 0;   // optional white noise on the angle channels

  void validate() const;
};

// Ground truth for one synthesized cycle.
struct CycleTruth {
  PostureTarget target;
  double t_approach_start = 0;
  double t_hold_start = 0;
  double t_hold_end = 0;
  double t_recovery_end = 0;
  std::map<std::string, double> hold_amplitude;
};

struct SynthTrial {
  SignalTrace kinematics;  // channels roll, pitch, yaw in radians
  SignalTrace emg;         // one channel per muscle, volts
  std::vector<CycleTruth> cycles;
};

// Deterministic synthetic session. Kinematics follow minimum-jerk ramps
// between neutral and each target; EMG is a self-normalized band-limited
// carrier scaled by the activation profile.
SynthTrial synth_trial(const TrialPlan& plan, const ActivationProfile& profile,
                       std::uint64_t noise_seed, const SynthParams& params = {});

}  // namespace neckflex
