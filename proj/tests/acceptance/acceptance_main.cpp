// Acceptance gate. Each numbered check prints exactly one PASS/FAIL line
// with its pinned tolerance and measured value; the exit code is the number
// of failed checks. Reference routes live in ../oracles.hpp and in local
// helpers here, never in the library under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "neckflex/biomech.hpp"
#include "neckflex/emg.hpp"
#include "neckflex/fitlab.hpp"
#include "neckflex/mechanism.hpp"
#include "neckflex/protocol.hpp"
#include "neckflex/rng.hpp"
#include "neckflex/signal.hpp"
#include "neckflex/stats.hpp"

using namespace neckflex;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool ok = false;
  std::string detail;
};

int g_failed = 0;

template <typename Fn>
void criterion(int idx, const char* name, Fn&& fn) {
  Outcome out;
  const auto t0 = Clock::now();
  try {
    out = fn();
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail = std::string("exception: ") + e.what();
  }
  std::printf("%s  %2d  %-28s  %s  [%.2f s]\n", out.ok ? "PASS" : "FAIL", idx,
              name, out.detail.c_str(), elapsed_s(t0));
  std::fflush(stdout);
  if (!out.ok) ++g_failed;
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// --- local oracle: naive sign enumeration for the signed-rank test ---------

double enumerated_p(const std::vector<double>& diffs_in) {
  std::vector<double> diffs = diffs_in;
  std::erase(diffs, 0.0);
  const std::size_t n = diffs.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(diffs[a]) < std::fabs(diffs[b]);
  });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && std::fabs(diffs[idx[j]]) == std::fabs(diffs[idx[i]])) ++j;
    for (std::size_t k = i; k < j; ++k)
      rank[idx[k]] = static_cast<double>(i + 1 + j) / 2.0;
    i = j;
  }
  double w_obs = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (diffs[k] > 0) w_obs += rank[k];
  std::uint64_t le = 0, ge = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double w = 0;
    for (std::size_t b = 0; b < n; ++b)
      if ((mask >> b) & 1) w += rank[b];
    if (w <= w_obs) ++le;
    if (w >= w_obs) ++ge;
  }
  return std::min(
      1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total));
}

// --- criterion bodies -------------------------------------------------------

Outcome linear_limit() {
  BarArraySpec spec;
  double worst = 0;
  for (const auto& mode : {StiffnessMode::base(), StiffnessMode::loaded()}) {
    const double ei = spec.youngs_modulus * equivalent_inertia(spec, mode);
    for (double theta : {1e-4, 3e-4, 1e-3, 3e-3, 7e-3, 1e-2}) {
      const double linear = 2.0 * ei * theta / spec.free_length;
      const double rel = std::fabs(base_moment(spec, theta, mode) - linear) / linear;
      worst = std::max(worst, rel);
    }
  }
  return {worst <= 0.01,
          fmt("small-angle moment vs 2EI*theta/L: max rel %.2e (tol 1e-2)", worst)};
}

Outcome quadrature_oracle() {
  double worst = 0;
  for (int deg = 5; deg <= 80; deg += 5) {
    const double theta = deg * kDeg;
    const double ref = oracle::gamma_bruteforce(theta);
    worst = std::max(worst, std::fabs(gamma_integral(theta) - ref) / ref);
  }
  return {worst <= 1e-8,
          fmt("tip integral vs brute-force quadrature: max rel %.2e (tol 1e-8)",
              worst)};
}

Outcome elastica_oracle() {
  BarArraySpec spec;
  double worst = 0;
  for (int i = 1; i <= 32; ++i) {
    const double theta = i * 2.5 * kDeg;
    const double lib = end_shortening(spec, theta);
    const auto tip = oracle::elastica_ode_tip(theta, spec.free_length);
    worst = std::max(worst, std::fabs(lib - (spec.free_length - tip.x)));
  }
  bool monotone = true;
  double prev = 0;
  for (int i = 1; i <= 170; ++i) {
    const double d = end_shortening(spec, i * 0.5 * kDeg);
    monotone = monotone && d > prev;
    prev = d;
  }
  const double tol = 1e-6 * spec.free_length;
  return {worst <= tol && monotone,
          fmt("shortening vs arc-length ODE: max abs %.2e m (tol 8e-8), ", worst) +
              (monotone ? "monotone" : "NOT monotone")};
}

Outcome transition_properties() {
  BarArraySpec spec;
  // transition angle grows with the clearance
  double prev = 0;
  bool increasing = true;
  for (double mm : {0.1, 0.3, 0.6, 1.0, 1.4, 1.7, 2.0}) {
    spec.gap = mm * 1e-3;
    const auto t = transition_angle(spec);
    if (!t) return {false, fmt("no transition for gap %.1f mm", mm)};
    increasing = increasing && *t > prev;
    prev = *t;
  }

  // continuity at the break
  double worst_jump = 0;
  for (double mm : {0.3, 1.0, 1.7}) {
    spec.gap = mm * 1e-3;
    const double t = *transition_angle(spec);
    const auto curve = moment_curve(spec, {t - 1e-12, t + 1e-12});
    worst_jump = std::max(
        worst_jump, std::fabs(curve.samples[1].moment - curve.samples[0].moment));
  }

  // limit curves coincide with the pure regimes; zero-gap ratio is the
  // inertia ratio at every angle
  std::vector<double> grid;
  for (int i = 1; i <= 30; ++i) grid.push_back(i * (kMaxBendAngle / 30.0));
  spec.gap = std::numeric_limits<double>::infinity();
  const auto free_curve = moment_curve(spec, grid);
  spec.gap = 0.0;
  const auto seated = moment_curve(spec, grid);
  const double iratio =
      equivalent_inertia(spec, StiffnessMode::loaded()) /
      equivalent_inertia(spec, StiffnessMode::base());
  double worst_limit = 0, worst_ratio = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double mb = base_moment(spec, grid[i], StiffnessMode::base());
    const double ml = base_moment(spec, grid[i], StiffnessMode::loaded());
    worst_limit = std::max(worst_limit,
                           std::fabs(free_curve.samples[i].moment - mb) / mb);
    worst_limit = std::max(worst_limit,
                           std::fabs(seated.samples[i].moment - ml) / ml);
    worst_ratio = std::max(
        worst_ratio,
        std::fabs(seated.samples[i].moment / free_curve.samples[i].moment - iratio) /
            iratio);
  }

  const bool ok = increasing && worst_jump < 1e-9 && worst_limit <= 1e-12 &&
                  worst_ratio <= 1e-9;
  return {ok, fmt("theta* increasing, jump %.1e N*m (tol 1e-9), "
                  "limit curves %.1e, ratio err %.1e",
                  worst_jump, worst_limit, worst_ratio)};
}

Outcome assist_band() {
  BarArraySpec spec;  // documented defaults: d 1.5 mm, L 80 mm, 7/3 bars,
                      // E 130 GPa, triad separation 4.5 mm
  spec.gap = -1.7e-3;
  std::vector<double> grid;
  std::vector<HeadStatics> sweep;
  for (int i = 0; i <= 120; ++i) {
    grid.push_back(i * 0.5 * kDeg);
    HeadStatics s;
    s.inclination = grid.back();
    sweep.push_back(s);
  }
  const auto profile = assist_fraction(moment_curve(spec, grid), sweep);
  const bool ok = profile.peak >= 0.40 && profile.peak <= 0.70;
  return {ok, fmt("preloaded -1.7 mm peak assist fraction %.3f at %.1f deg "
                  "(band [0.40, 0.70])",
                  profile.peak, profile.peak_theta / kDeg)};
}

Outcome statics_identities() {
  Rng rng(1601u);
  double worst_pyth = 0, worst_mm = 0, worst_oracle = 0;
  for (int i = 0; i < 1000; ++i) {
    HeadStatics s;
    s.head_weight = 20.0 + 60.0 * rng.uniform();
    s.com_lever = {-0.05 + 0.10 * rng.uniform(), 0.05 + 0.20 * rng.uniform()};
    s.base_lever = {-0.10 + 0.12 * rng.uniform(), -0.10 + 0.15 * rng.uniform()};
    s.inclination = (rng.uniform() * 120.0 - 60.0) * kDeg;

    const auto f = head_frame_forces(s);
    const double w2 = s.head_weight * s.head_weight;
    worst_pyth = std::max(
        worst_pyth, std::fabs(f.bending * f.bending + f.sliding * f.sliding - w2) / w2);

    const auto balanced = muscle_moment(s, ideal_base_moment(s));
    worst_mm = std::max(worst_mm, std::fabs(balanced.muscle) /
                                      std::max(1.0, std::fabs(balanced.gravity)));

    const double bm = rng.uniform() * 15.0 - 5.0;
    oracle::StaticsScenario sc{s.head_weight, s.com_lever.x, s.com_lever.z,
                               s.base_lever.x, s.base_lever.z, s.inclination,
                               0.02 + 0.3 * rng.uniform()};
    worst_oracle = std::max(
        worst_oracle,
        std::fabs(muscle_moment(s, bm).muscle -
                  oracle::equilibrium_muscle_moment(sc, bm)));
  }
  const bool ok = worst_pyth <= 1e-9 && worst_mm <= 1e-9 && worst_oracle <= 1e-9;
  return {ok, fmt("1000 geometries: force split %.1e, balanced residual %.1e, "
                  "equilibrium oracle %.1e (tol 1e-9)",
                  worst_pyth, worst_mm, worst_oracle)};
}

Outcome fit_roundtrip() {
  BarArraySpec spec;
  spec.gap = 1.0e-3;
  const double height = 0.12, friction = 0.05;
  const double ei_pre =
      spec.youngs_modulus * equivalent_inertia(spec, StiffnessMode::base());
  const double ei_post =
      spec.youngs_modulus * equivalent_inertia(spec, StiffnessMode::loaded());
  const double t_true = *transition_angle(spec);

  std::vector<double> angles;
  for (int i = 1; i <= 120; ++i) angles.push_back(i * 0.006);
  angles.push_back(t_true);
  std::sort(angles.begin(), angles.end());

  const auto clean = fit_parameters(synthesize_bend_trace(spec, angles, height, friction),
                                    height, spec.free_length);
  const double e_pre = std::fabs(clean.stiffness_pre - ei_pre) / ei_pre;
  const double e_post = std::fabs(clean.stiffness_post - ei_post) / ei_post;
  const double e_fric = std::fabs(clean.friction - friction) / friction;
  const double e_trans =
      clean.transition ? std::fabs(*clean.transition - t_true) / t_true : 1.0;
  const double clean_worst = std::max({e_pre, e_post, e_fric, e_trans});

  double noisy_worst_deg = 0;
  int located = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto noisy = fit_parameters(
        synthesize_bend_trace(spec, angles, height, friction, {0.02, seed}),
        height, spec.free_length);
    if (noisy.transition) {
      ++located;
      noisy_worst_deg = std::max(
          noisy_worst_deg, std::fabs(*noisy.transition - t_true) / kDeg);
    }
  }
  const bool ok = clean_worst <= 1e-3 && located == 50 && noisy_worst_deg <= 2.0;
  return {ok, fmt("noise-free worst rel %.2e (tol 1e-3); 2%% noise x50: "
                  "%.0f located, worst break err %.2f deg (tol 2)",
                  clean_worst, static_cast<double>(located), noisy_worst_deg)};
}

Outcome emg_pipeline() {
  EnvelopeParams params;
  const auto probe = [&](double freq) {
    const std::size_t n = static_cast<std::size_t>(10.0 * params.sample_rate);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
      x[i] = std::sin(2.0 * std::numbers::pi * freq * i / params.sample_rate);
    const auto env = envelope(x, params);
    double sum = 0;
    std::size_t count = 0;
    const auto lo = static_cast<std::size_t>(params.sample_rate);
    for (std::size_t i = lo; i + lo < n; ++i) {
      sum += env[i];
      ++count;
    }
    return sum / static_cast<double>(count);
  };
  const double mean50 = probe(50.0);
  const double mean5 = probe(5.0);
  const double ref = 2.0 / std::numbers::pi;
  const double rel50 = std::fabs(mean50 - ref) / ref;
  const double atten_db = 20.0 * std::log10(mean50 / mean5);

  // end to end: the loaded splenius drive drops to 0.6 of base
  PlanTiming timing;
  timing.neutral = 1.0;
  timing.approach = 1.0;
  timing.hold = 3.5;
  timing.recovery = 1.0;
  TrialPlan plan;
  double t = 0;
  for (const auto& target : std::vector<PostureTarget>{
           {Plane::sagittal, 15}, {Plane::transverse, 15}}) {
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
  ActivationProfile base_profile;
  base_profile.set("spl_l", Plane::sagittal, 15, 0.8);
  base_profile.set("spl_l", Plane::transverse, 15, 0.7);
  ActivationProfile loaded_profile = base_profile;
  loaded_profile.set("spl_l", Plane::sagittal, 15, 0.8 * 0.6);

  SynthParams sp;
  sp.emg_rate = 1000.0;
  EnvelopeParams ep;
  ep.sample_rate = sp.emg_rate;
  const auto key = std::make_pair(std::string("spl_l"), PostureKey{Plane::sagittal, 15});
  double means[2] = {0, 0};
  int which = 0;
  for (const auto* profile : {&base_profile, &loaded_profile}) {
    const auto trial = synth_trial(plan, *profile, 4242u, sp);
    const auto env = preprocess(trial.emg, ep);
    const auto seg = segment(trial.kinematics, plan);
    means[which++] = holding_means(env, seg).means.at(key);
  }
  const double ratio = means[1] / means[0];

  const bool ok = rel50 <= 0.05 && atten_db > 20.0 && std::fabs(ratio - 0.6) <= 0.05;
  return {ok, fmt("50 Hz envelope err %.2f%% (tol 5%%), 5 Hz down %.1f dB "
                  "(need >20), loaded/base ratio %.3f (0.60 +/- 0.05)",
                  100.0 * rel50, atten_db, ratio)};
}

Outcome wilcoxon_exactness() {
  Rng rng(909u);
  double worst = 0;
  int checked = 0;
  for (int data = 0; data < 200; ++data) {
    const int n = 1 + static_cast<int>(rng.below(12));
    std::vector<double> base(n, 0.0), loaded(n);
    bool any = false;
    do {
      any = false;
      for (int i = 0; i < n; ++i) {
        loaded[i] = 0.5 * (static_cast<double>(rng.below(7)) - 3.0);
        any = any || loaded[i] != 0.0;
      }
    } while (!any);
    const auto r = wilcoxon_signed_rank(base, loaded);
    std::vector<double> diffs = loaded;
    worst = std::max(worst, std::fabs(r.p_value - enumerated_p(diffs)));
    ++checked;
  }

  std::vector<double> b8(8), l8(8);
  for (int i = 0; i < 8; ++i) {
    b8[i] = 1.0 + i;
    l8[i] = b8[i] - 0.25 - 0.01 * i;
  }
  const auto neg = wilcoxon_signed_rank(b8, l8);
  const bool exact8 = neg.p_value == 0.0078125;

  const bool ok = checked == 200 && worst <= 1e-12 && exact8;
  return {ok, fmt("200 datasets vs enumeration: max |dp| %.1e (tol 1e-12); "
                  "all-negative n=8 p %.7f (need 0.0078125)",
                  worst, neg.p_value)};
}

Outcome study_replica() {
  PlanTiming timing;
  timing.neutral = 1.0;
  timing.approach = 1.0;
  timing.hold = 3.5;
  timing.recovery = 1.0;
  const std::vector<PostureTarget> targets = {{Plane::sagittal, 15},
                                              {Plane::transverse, 15},
                                              {Plane::sagittal, -15},
                                              {Plane::transverse, -15},
                                              {Plane::sagittal, 40}};
  TrialPlan plan;
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

  ActivationProfile base_profile;
  for (const auto& m : {"scm_l", "scm_r"}) {
    base_profile.set(m, Plane::sagittal, 15, 0.5);
    base_profile.set(m, Plane::transverse, 15, 0.7);
    base_profile.set(m, Plane::transverse, -15, 0.7);
  }
  for (const auto& m : {"spl_l", "spl_r"}) {
    base_profile.set(m, Plane::sagittal, 15, 0.8);
    base_profile.set(m, Plane::sagittal, 40, 0.9);
    base_profile.set(m, Plane::transverse, 15, 0.6);
    base_profile.set(m, Plane::transverse, -15, 0.6);
  }
  // imposed effect: splenius drops under load during sagittal flexion only
  ActivationProfile loaded_profile = base_profile;
  for (const auto& m : {"spl_l", "spl_r"}) {
    loaded_profile.set(m, Plane::sagittal, 15, 0.8 * 0.6);
    loaded_profile.set(m, Plane::sagittal, 40, 0.9 * 0.6);
  }

  SynthParams sp;
  sp.emg_rate = 1000.0;
  EnvelopeParams ep;
  ep.sample_rate = sp.emg_rate;

  int good_runs = 0;
  for (int run = 1; run <= 100; ++run) {
    std::vector<SessionRecord> records;
    for (int p = 0; p < 8; ++p) {
      // both conditions share one carrier seed, so the null cells differ
      // by exactly nothing
      const auto seed = static_cast<std::uint64_t>(run * 100 + p);
      for (const auto* profile : {&base_profile, &loaded_profile}) {
        const bool is_base = profile == &base_profile;
        const auto trial = synth_trial(plan, *profile, seed, sp);
        const auto env = preprocess(trial.emg, ep);
        const auto seg = segment(trial.kinematics, plan);
        records.push_back(make_session_record("p" + std::to_string(p),
                                              is_base ? "base" : "loaded", env,
                                              seg));
      }
    }
    const auto cells = compare_conditions(normalize(records));
    bool pattern = cells.size() == 20;
    for (const auto& cell : cells) {
      const bool spl = cell.muscle.rfind("spl", 0) == 0;
      const bool flexion = cell.posture.plane == Plane::sagittal &&
                           (cell.posture.angle_deg == 15 || cell.posture.angle_deg == 40);
      pattern = pattern && cell.significant == (spl && flexion);
    }
    good_runs += pattern ? 1 : 0;
  }
  const bool ok = good_runs >= 95;
  return {ok, fmt("flexion/rotation significance pattern in %.0f/100 runs "
                  "(need >= 95)",
                  static_cast<double>(good_runs))};
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  std::printf("acceptance gate\n");

  criterion(1, "linear limit", linear_limit);
  criterion(2, "quadrature oracle", quadrature_oracle);
  criterion(3, "elastica oracle", elastica_oracle);
  criterion(4, "transition properties", transition_properties);
  criterion(5, "assist fraction band", assist_band);
  criterion(6, "statics identities", statics_identities);
  criterion(7, "fit round-trip", fit_roundtrip);
  criterion(8, "emg pipeline", emg_pipeline);
  criterion(9, "wilcoxon exactness", wilcoxon_exactness);
  criterion(10, "study replica", study_replica);

  const double total = elapsed_s(t0);
  std::printf("%d of 10 failed, %.1f s total (budget 60 s)\n", g_failed, total);
  if (total >= 60.0) {
    std::printf("FAIL      runtime budget exceeded\n");
    ++g_failed;
  }
  return g_failed;
}
