#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "neckflex/mechanism.hpp"

namespace neckflex {

enum class BranchDir { load, unload };

std::string to_string(BranchDir dir);
BranchDir branch_from_string(const std::string& s);

// One bench sample: pull force applied through the handle at a known
// height above the clamp, with the measured bend angle.
struct BendSample {
  double time = 0;          // s
  double force = 0;         // N
  double displacement = 0;  // m, horizontal handle travel
  double angle = 0;         // rad
  BranchDir branch = BranchDir::load;
};

struct BendTestTrace {
  std::vector<BendSample> samples;

  void validate() const;
};

BendTestTrace read_bend_csv(const std::filesystem::path& path);
void write_bend_csv(const std::filesystem::path& path, const BendTestTrace& trace);

struct MomentPoint {
  double angle = 0;   // rad
  double moment = 0;  // N*m about the clamp
};

// Converts bench force readings to clamp moments. The handle rides a
// rigid arm of length load_height, so the lever is the arm's projection
// sqrt(h^2 - u^2) at handle travel u.
std::vector<MomentPoint> compute_base_moment(const BendTestTrace& trace,
                                             double load_height);

struct TransitionDetection {
  std::optional<double> angle;  // rad; empty when one line explains the data
  double sse_single = 0;
  double sse_two = 0;
};

// Continuous two-segment linear fit in angle with an exact breakpoint
// search over the sample angles. The break is kept only when it removes
// at least 5% of the single-line squared error and steepens the curve.
TransitionDetection detect_transition(std::vector<MomentPoint> points);

struct FitResult {
  double stiffness_pre = 0;           // N*m^2, flexural rigidity before the break
  double stiffness_post = 0;          // N*m^2, after the break (equal when none)
  std::optional<double> transition;   // rad
  double friction = 0;                // N*m, half the loading/unloading gap
  double residual_rms = 0;            // N*m, against the fitted model
};

// Full bench reduction: moments per branch, friction from the hysteresis
// gap, then rigidity per regime through the cantilever moment law.
FitResult fit_parameters(const BendTestTrace& trace, double load_height,
                         double free_length);

struct BenchNoise {
  double force_rel = 0;     // multiplicative 1-sigma on force readings
  std::uint64_t seed = 0;
};

// Synthetic loading/unloading sweep for a bar array, for tests and demos.
BendTestTrace synthesize_bend_trace(const BarArraySpec& spec,
                                    const std::vector<double>& angles,
                                    double load_height, double friction,
                                    const BenchNoise& noise = {});

}  // namespace neckflex
