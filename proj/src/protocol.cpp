#include "neckflex/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "neckflex/csv.hpp"
#include "neckflex/errors.hpp"
#include "neckflex/rng.hpp"

namespace neckflex {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Quintic minimum-jerk blend, s(0)=0, s(1)=1, zero end velocities and
// accelerations.
double min_jerk(double tau) {
  if (tau <= 0) return 0;
  if (tau >= 1) return 1;
  return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
}

const std::string& channel_for(Plane plane) {
  static const std::string roll = "roll", pitch = "pitch", yaw = "yaw";
  switch (plane) {
    case Plane::sagittal: return pitch;
    case Plane::transverse: return yaw;
    case Plane::coronal: return roll;
  }
  throw std::invalid_argument("bad plane");
}

}  // namespace

std::string to_string(Plane plane) {
  switch (plane) {
    case Plane::sagittal: return "sagittal";
    case Plane::transverse: return "transverse";
    case Plane::coronal: return "coronal";
  }
  throw std::invalid_argument("bad plane");
}

Plane plane_from_string(const std::string& s) {
  if (s == "sagittal") return Plane::sagittal;
  if (s == "transverse") return Plane::transverse;
  if (s == "coronal") return Plane::coronal;
  throw ParseError("unknown plane '" + s + "'");
}

PostureKey key_of(const PostureTarget& target) {
  return {target.plane, static_cast<int>(std::llround(target.angle_deg))};
}

std::vector<PostureTarget> standard_postures() {
  std::vector<PostureTarget> out;
  for (double a : {15.0, -15.0, 40.0, -40.0}) out.push_back({Plane::sagittal, a});
  for (double a : {15.0, -15.0, 30.0, -30.0}) out.push_back({Plane::transverse, a});
  for (double a : {15.0, -15.0, 40.0, -40.0}) out.push_back({Plane::coronal, a});
  return out;
}

void PlanTiming::validate() const {
  for (double v : {neutral, approach, hold, recovery}) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw std::invalid_argument("plan phase durations must be positive");
    }
  }
}

TrialPlan generate_sequence(std::uint64_t seed, const PlanTiming& timing) {
  timing.validate();
  auto targets = standard_postures();
  auto repeats = targets;
  targets.insert(targets.end(), repeats.begin(), repeats.end());

  Rng rng(mix_seed(seed, "sequence"));
  shuffle(targets, rng);

  TrialPlan plan;
  plan.seed = seed;
  double t = 0;
  for (const auto& target : targets) {
    PlannedCycle c;
    c.target = target;
    c.t_start = t;
    c.t_approach_start = t + timing.neutral;
    c.t_hold_start = c.t_approach_start + timing.approach;
    c.t_hold_end = c.t_hold_start + timing.hold;
    c.t_end = c.t_hold_end + timing.recovery;
    t = c.t_end;
    plan.cycles.push_back(c);
  }
  return plan;
}

TrialPlan read_plan_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto ci = table.column("cycle");
  const auto pi = table.column("plane");
  const auto ai = table.column("angle_deg");
  const auto si = table.column("t_start_s");
  const auto mi = table.column("t_approach_s");
  const auto hi = table.column("t_hold_start_s");
  const auto ei = table.column("t_hold_end_s");
  const auto fi = table.column("t_end_s");

  TrialPlan plan;
  double prev_end = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = r + 2;
    if (parse_long(row[ci], line) != static_cast<long>(r)) {
      throw ParseError("cycle indices must run 0,1,...", line);
    }
    PlannedCycle c;
    c.target.plane = plane_from_string(row[pi]);
    c.target.angle_deg = parse_double(row[ai], line);
    c.t_start = parse_double(row[si], line);
    c.t_approach_start = parse_double(row[mi], line);
    c.t_hold_start = parse_double(row[hi], line);
    c.t_hold_end = parse_double(row[ei], line);
    c.t_end = parse_double(row[fi], line);
    const bool ordered = c.t_start < c.t_approach_start &&
                         c.t_approach_start < c.t_hold_start &&
                         c.t_hold_start < c.t_hold_end && c.t_hold_end < c.t_end;
    if (!ordered || c.t_start < prev_end) {
      throw ParseError("cycle phases must be ordered and non-overlapping", line);
    }
    prev_end = c.t_end;
    plan.cycles.push_back(c);
  }
  return plan;
}

void write_plan_csv(const std::filesystem::path& path, const TrialPlan& plan) {
  CsvTable table;
  table.header = {"cycle",        "plane",        "angle_deg", "t_start_s",
                  "t_approach_s", "t_hold_start_s", "t_hold_end_s", "t_end_s"};
  for (std::size_t i = 0; i < plan.cycles.size(); ++i) {
    const auto& c = plan.cycles[i];
    table.rows.push_back({std::to_string(i), to_string(c.target.plane),
                          format_double(c.target.angle_deg),
                          format_double(c.t_start),
                          format_double(c.t_approach_start),
                          format_double(c.t_hold_start),
                          format_double(c.t_hold_end), format_double(c.t_end)});
  }
  write_csv(path, table);
}

const std::vector<std::string>& muscle_names() {
  static const std::vector<std::string> names = {"scm_l", "scm_r", "spl_l",
                                                 "spl_r"};
  return names;
}

void ActivationProfile::set(const std::string& muscle, Plane plane,
                            int angle_deg, double amplitude) {
  holds[{muscle, PostureKey{plane, angle_deg}}] = amplitude;
}

double ActivationProfile::amplitude(const std::string& muscle,
                                    const PostureKey& key) const {
  const auto it = holds.find({muscle, key});
  return it == holds.end() ? baseline : it->second;
}

ActivationProfile read_profile_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto mi = table.column("muscle");
  const auto pi = table.column("plane");
  const auto ai = table.column("angle_deg");
  const auto vi = table.column("amplitude");

  ActivationProfile profile;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = r + 2;
    const double amp = parse_double(row[vi], line);
    if (!(amp >= 0) || !std::isfinite(amp)) {
      throw ParseError("amplitude must be finite and non-negative", line);
    }
    if (row[mi] == "baseline") {
      profile.baseline = amp;
      continue;
    }
    profile.set(row[mi], plane_from_string(row[pi]),
                static_cast<int>(parse_long(row[ai], line)), amp);
  }
  return profile;
}

void write_profile_csv(const std::filesystem::path& path,
                       const ActivationProfile& profile) {
  CsvTable table;
  table.header = {"muscle", "plane", "angle_deg", "amplitude"};
  table.rows.push_back({"baseline", "none", "0", format_double(profile.baseline)});
  for (const auto& [key, amp] : profile.holds) {
    table.rows.push_back({key.first, to_string(key.second.plane),
                          std::to_string(key.second.angle_deg),
                          format_double(amp)});
  }
  write_csv(path, table);
}

void SynthParams::validate() const {
  if (!(kin_rate > 0) || !(emg_rate > 800)) {
    throw std::invalid_argument("synthesis rates out of range");
  }
  if (!(ramp > 0) || kin_noise_deg < 0) {
    throw std::invalid_argument("bad synthesis parameters");
  }
}

namespace {

// Raised-cosine-edged boxcar: 1 on [lo, hi], falling to 0 over `ramp`
// outside each edge.
double soft_box(double t, double lo, double hi, double ramp) {
  if (t <= lo - ramp || t >= hi + ramp) return 0;
  if (t >= lo && t <= hi) return 1;
  const double d = t < lo ? (lo - t) : (t - hi);
  return 0.5 * (1.0 + std::cos(std::numbers::pi * d / ramp));
}

}  // namespace

SynthTrial synth_trial(const TrialPlan& plan, const ActivationProfile& profile,
                       std::uint64_t noise_seed, const SynthParams& params) {
  params.validate();
  if (plan.cycles.empty()) throw std::invalid_argument("empty plan");

  const double duration = plan.duration();
  SynthTrial trial;

  // Kinematics: per-plane minimum-jerk excursions, zero elsewhere.
  const auto n_kin =
      static_cast<std::size_t>(std::llround(duration * params.kin_rate)) + 1;
  trial.kinematics.sample_rate = params.kin_rate;
  trial.kinematics.names = {"roll", "pitch", "yaw"};
  trial.kinematics.channels.assign(3, std::vector<double>(n_kin, 0.0));

  const auto channel_index = [&](Plane plane) -> std::size_t {
    const auto& want = channel_for(plane);
    for (std::size_t i = 0; i < trial.kinematics.names.size(); ++i) {
      if (trial.kinematics.names[i] == want) return i;
    }
    throw std::logic_error("missing kinematic channel");
  };

  for (const auto& cycle : plan.cycles) {
    auto& chan = trial.kinematics.channels[channel_index(cycle.target.plane)];
    const double target = cycle.target.angle_deg * kDeg;
    const auto first =
        static_cast<std::size_t>(std::ceil(cycle.t_approach_start * params.kin_rate));
    const auto last = std::min<std::size_t>(
        n_kin - 1,
        static_cast<std::size_t>(std::floor(cycle.t_end * params.kin_rate)));
    for (std::size_t i = first; i <= last; ++i) {
      const double t = static_cast<double>(i) / params.kin_rate;
      double v;
      if (t < cycle.t_hold_start) {
        v = target * min_jerk((t - cycle.t_approach_start) /
                              (cycle.t_hold_start - cycle.t_approach_start));
      } else if (t <= cycle.t_hold_end) {
        v = target;
      } else {
        v = target * (1.0 - min_jerk((t - cycle.t_hold_end) /
                                     (cycle.t_end - cycle.t_hold_end)));
      }
      chan[i] = v;
    }
  }
  if (params.kin_noise_deg > 0) {
    Rng rng(mix_seed(noise_seed, "kin"));
    const double sd = params.kin_noise_deg * kDeg;
    for (auto& chan : trial.kinematics.channels) {
      for (auto& v : chan) v += sd * rng.normal();
    }
  }

  // EMG: a self-normalized band-limited carrier keeps the rectified
  // moving-average envelope pinned to the amplitude profile.
  const auto n_emg =
      static_cast<std::size_t>(std::llround(duration * params.emg_rate)) + 1;
  trial.emg.sample_rate = params.emg_rate;
  trial.emg.names = muscle_names();

  const auto sos = butterworth_bandpass(4, 15.0, 400.0, params.emg_rate);
  auto norm_width =
      static_cast<std::size_t>(std::llround(0.25 * params.emg_rate));
  if (norm_width % 2 == 0) ++norm_width;

  const auto pad = static_cast<std::size_t>(
      std::llround(6.0 * params.emg_rate / 15.0));

  for (const auto& muscle : muscle_names()) {
    Rng rng(mix_seed(noise_seed, "emg:" + muscle));
    std::vector<double> carrier(n_emg);
    for (auto& v : carrier) v = 2.0 * rng.uniform() - 1.0;
    carrier = filter_forward(sos, carrier);

    // Calibrate against the carrier as the envelope chain will see it: the
    // zero-phase refilter squares the band edges and shaves a further
    // 10-15% off the rectified mean, so normalizing on the forward-filtered
    // carrier alone leaves every programmed level short by that factor.
    const auto seen = filter_bidirectional(sos, carrier, pad);
    std::vector<double> mag(n_emg);
    for (std::size_t i = 0; i < n_emg; ++i) mag[i] = std::abs(seen[i]);
    const auto local = moving_average(mag, norm_width);
    double mean_local = 0;
    for (double v : local) mean_local += v;
    mean_local /= static_cast<double>(n_emg);
    const double floor_env = 1e-3 * mean_local;
    for (std::size_t i = 0; i < n_emg; ++i) {
      carrier[i] /= std::max(local[i], floor_env);
    }

    // Amplitude stays at the hold level for the whole movement so any
    // segment inside it averages to the programmed value; holds quieter
    // than baseline are clamped at baseline.
    std::vector<double> amp(n_emg, profile.baseline);
    for (const auto& cycle : plan.cycles) {
      const double level = profile.amplitude(muscle, key_of(cycle.target));
      if (level <= profile.baseline) continue;
      const double lo = cycle.t_approach_start;
      const double hi = cycle.t_end;
      const auto first = static_cast<std::size_t>(
          std::max(0.0, std::ceil((lo - params.ramp) * params.emg_rate)));
      const auto last = std::min<std::size_t>(
          n_emg - 1, static_cast<std::size_t>(
                         std::floor((hi + params.ramp) * params.emg_rate)));
      for (std::size_t i = first; i <= last; ++i) {
        const double t = static_cast<double>(i) / params.emg_rate;
        const double v = profile.baseline +
                         (level - profile.baseline) *
                             soft_box(t, lo, hi, params.ramp);
        amp[i] = std::max(amp[i], v);
      }
    }
    for (std::size_t i = 0; i < n_emg; ++i) carrier[i] *= amp[i];
    trial.emg.channels.push_back(std::move(carrier));
  }

  for (const auto& cycle : plan.cycles) {
    CycleTruth truth;
    truth.target = cycle.target;
    truth.t_approach_start = cycle.t_approach_start;
    truth.t_hold_start = cycle.t_hold_start;
    truth.t_hold_end = cycle.t_hold_end;
    truth.t_recovery_end = cycle.t_end;
    for (const auto& muscle : muscle_names()) {
      truth.hold_amplitude[muscle] =
          std::max(profile.baseline,
                   profile.amplitude(muscle, key_of(cycle.target)));
    }
    trial.cycles.push_back(std::move(truth));
  }
  return trial;
}

}  // namespace neckflex
