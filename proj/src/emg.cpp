#include "neckflex/emg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "neckflex/csv.hpp"
#include "neckflex/errors.hpp"

namespace neckflex {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

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

void SegmentationParams::validate() const {
  if (!(hold_band_deg > 0) || !(neutral_band_deg > 0)) {
    throw std::invalid_argument("angle bands must be positive");
  }
  if (!(hold_min > 0) || !(hold_max >= hold_min)) {
    throw std::invalid_argument("hold duration bounds out of order");
  }
  if (!(max_unmatched >= 0 && max_unmatched < 1)) {
    throw std::invalid_argument("max_unmatched must be in [0, 1)");
  }
}

PhaseSegmentation segment(const SignalTrace& kinematics, const TrialPlan& plan,
                          const SegmentationParams& params) {
  params.validate();
  kinematics.validate();
  if (plan.cycles.empty()) throw std::invalid_argument("empty plan");

  const double rate = kinematics.sample_rate;
  const auto n = kinematics.size();
  const double hold_band = params.hold_band_deg * kDeg;
  const double neutral_band = params.neutral_band_deg * kDeg;
  const auto min_run = static_cast<std::size_t>(std::ceil(params.hold_min * rate));

  PhaseSegmentation out;
  for (std::size_t ci = 0; ci < plan.cycles.size(); ++ci) {
    const auto& cycle = plan.cycles[ci];
    const auto& chan = kinematics.channel(channel_for(cycle.target.plane));
    const double target = cycle.target.angle_deg * kDeg;

    // The search span runs from the planned cycle start until the next
    // cycle's motion begins, so a lagging recovery still lands here.
    const double span_end_t = ci + 1 < plan.cycles.size()
                                  ? plan.cycles[ci + 1].t_approach_start
                                  : static_cast<double>(n - 1) / rate;
    const auto lo = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::max(0.0, std::ceil(cycle.t_start * rate))));
    const auto hi = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::max(0.0, std::floor(span_end_t * rate))) + 1);

    CycleSegment seg;
    seg.target = cycle.target;

    // Longest run of samples inside the target band.
    std::size_t best_begin = 0, best_len = 0;
    std::size_t run_begin = 0, run_len = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      if (std::abs(chan[i] - target) < hold_band) {
        if (run_len == 0) run_begin = i;
        ++run_len;
        if (run_len > best_len) {
          best_len = run_len;
          best_begin = run_begin;
        }
      } else {
        run_len = 0;
      }
    }

    if (best_len < min_run || best_len == 0) {
      ++out.unmatched;
      out.cycles.push_back(seg);
      continue;
    }
    seg.matched = true;

    const std::size_t run_end = best_begin + best_len;  // one past the run
    const auto max_samples =
        static_cast<std::size_t>(std::floor(params.hold_max * rate));
    const std::size_t hold_end = std::min(run_end, best_begin + max_samples);
    seg.hold = {static_cast<double>(best_begin) / rate,
                static_cast<double>(hold_end) / rate};

    // Approach starts at the departure from the neutral band.
    std::size_t depart = lo;
    for (std::size_t i = best_begin; i > lo;) {
      --i;
      if (std::abs(chan[i]) < neutral_band) {
        depart = i + 1;
        break;
      }
    }
    seg.approach = {static_cast<double>(depart) / rate, seg.hold.begin};

    // Recovery runs from the uncapped dwell end to neutral re-entry.
    std::size_t reenter = hi > 0 ? hi - 1 : 0;
    for (std::size_t i = run_end; i < hi; ++i) {
      if (std::abs(chan[i]) < neutral_band) {
        reenter = i;
        break;
      }
    }
    seg.recovery = {static_cast<double>(run_end) / rate,
                    static_cast<double>(reenter) / rate};

    out.cycles.push_back(seg);
  }

  const double frac = static_cast<double>(out.unmatched) /
                      static_cast<double>(plan.cycles.size());
  if (frac > params.max_unmatched) {
    throw NumericError("segmentation failed: " + std::to_string(out.unmatched) +
                       " of " + std::to_string(plan.cycles.size()) +
                       " cycles unmatched");
  }
  return out;
}

namespace {

// Mean of one channel over a time window; nullopt when no samples land
// inside it.
std::optional<double> window_mean(const std::vector<double>& chan, double rate,
                                  const PhaseWindow& w) {
  const auto n = chan.size();
  const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil(w.begin * rate)));
  auto last = static_cast<std::size_t>(std::max(0.0, std::floor(w.end * rate)));
  last = std::min<std::size_t>(last, n > 0 ? n - 1 : 0);
  if (n == 0 || first > last) return std::nullopt;
  double sum = 0;
  for (std::size_t i = first; i <= last; ++i) sum += chan[i];
  return sum / static_cast<double>(last - first + 1);
}

}  // namespace

HoldingMeans holding_means(const SignalTrace& env,
                           const PhaseSegmentation& segmentation) {
  env.validate();
  std::map<std::pair<std::string, PostureKey>, double> sums;
  std::map<std::pair<std::string, PostureKey>, int> counts;
  for (const auto& seg : segmentation.cycles) {
    if (!seg.matched) continue;
    const auto key_posture = key_of(seg.target);
    for (std::size_t m = 0; m < env.names.size(); ++m) {
      const auto mean = window_mean(env.channels[m], env.sample_rate, seg.hold);
      if (!mean) continue;
      const auto key = std::make_pair(env.names[m], key_posture);
      sums[key] += *mean;
      counts[key] += 1;
    }
  }
  HoldingMeans out;
  for (const auto& [key, sum] : sums) {
    out.means[key] = sum / counts[key];
    out.cycle_counts[key] = counts[key];
  }
  return out;
}

SessionRecord make_session_record(const std::string& participant,
                                  const std::string& condition,
                                  const SignalTrace& env,
                                  const PhaseSegmentation& segmentation) {
  SessionRecord rec;
  rec.participant = participant;
  rec.condition = condition;
  rec.means = holding_means(env, segmentation);

  for (const auto& seg : segmentation.cycles) {
    if (!seg.matched || seg.target.plane != Plane::transverse) continue;
    const PhaseWindow span{seg.approach.begin, seg.recovery.end};
    const auto first = static_cast<std::size_t>(
        std::max(0.0, std::ceil(span.begin * env.sample_rate)));
    auto last = static_cast<std::size_t>(
        std::max(0.0, std::floor(span.end * env.sample_rate)));
    last = std::min<std::size_t>(last, env.size() > 0 ? env.size() - 1 : 0);
    for (std::size_t m = 0; m < env.names.size(); ++m) {
      double& peak = rec.transverse_peak[env.names[m]];
      for (std::size_t i = first; i <= last && i < env.size(); ++i) {
        peak = std::max(peak, env.channels[m][i]);
      }
    }
  }
  return rec;
}

ActivityTable normalize(const std::vector<SessionRecord>& sessions) {
  // Per-participant, per-muscle reference over all that participant's
  // sessions.
  std::map<std::pair<std::string, std::string>, double> reference;
  for (const auto& s : sessions) {
    for (const auto& [muscle, peak] : s.transverse_peak) {
      double& r = reference[{s.participant, muscle}];
      r = std::max(r, peak);
    }
  }

  ActivityTable table;
  for (const auto& s : sessions) {
    for (const auto& [key, mean] : s.means.means) {
      const auto& muscle = key.first;
      const auto it = reference.find({s.participant, muscle});
      if (it == reference.end() || !(it->second > 0)) {
        throw NumericError("no positive normalization reference for " +
                           s.participant + "/" + muscle);
      }
      ActivityRow row;
      row.participant = s.participant;
      row.condition = s.condition;
      row.muscle = muscle;
      row.posture = key.second;
      row.activity = mean / it->second;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

ActivityTable read_activity_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto pi = table.column("participant");
  const auto ci = table.column("condition");
  const auto mi = table.column("muscle");
  const auto li = table.column("plane");
  const auto ai = table.column("angle_deg");
  const auto vi = table.column("activity");

  ActivityTable out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = r + 2;
    ActivityRow a;
    a.participant = row[pi];
    a.condition = row[ci];
    if (a.condition != "base" && a.condition != "loaded") {
      throw ParseError("condition must be 'base' or 'loaded'", line);
    }
    a.muscle = row[mi];
    a.posture.plane = plane_from_string(row[li]);
    a.posture.angle_deg = static_cast<int>(parse_long(row[ai], line));
    a.activity = parse_double(row[vi], line);
    if (!std::isfinite(a.activity) || a.activity < 0) {
      throw ParseError("activity must be finite and non-negative", line);
    }
    out.rows.push_back(std::move(a));
  }
  return out;
}

void write_activity_csv(const std::filesystem::path& path,
                        const ActivityTable& table) {
  CsvTable csv;
  csv.header = {"participant", "condition", "muscle",
                "plane",       "angle_deg", "activity"};
  for (const auto& row : table.rows) {
    csv.rows.push_back({row.participant, row.condition, row.muscle,
                        to_string(row.posture.plane),
                        std::to_string(row.posture.angle_deg),
                        format_double(row.activity)});
  }
  write_csv(path, csv);
}

}  // namespace neckflex
