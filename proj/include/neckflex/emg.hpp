#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "neckflex/protocol.hpp"
#include "neckflex/signal.hpp"

namespace neckflex {

// Phase detection thresholds, in the units the session script uses.
struct SegmentationParams {
  double hold_band_deg = 5.0;      // |angle - target| below this counts as holding
  double neutral_band_deg = 3.0;   // |angle| below this counts as neutral
  double hold_min = 3.0;           // s, shortest accepted hold
  double hold_max = 10.0;          // s, holding samples beyond this are dropped
  double max_unmatched = 0.2;      // fraction of cycles allowed to go unmatched

  void validate() const;
};

// Phase window in seconds from the start of the recording.
struct PhaseWindow {
  double begin = 0;
  double end = 0;

  double length() const { return end - begin; }
};

struct CycleSegment {
  PostureTarget target;
  bool matched = false;
  PhaseWindow approach;  // departure from neutral until the hold stabilizes
  PhaseWindow hold;      // sustained dwell inside the target band, capped
  PhaseWindow recovery;  // hold end until re-entry into the neutral band
};

struct PhaseSegmentation {
  std::vector<CycleSegment> cycles;  // one per planned cycle, plan order
  std::size_t unmatched = 0;
};

// Aligns recorded kinematics with the plan. Throws NumericError when more
// than max_unmatched of the planned cycles cannot be located.
PhaseSegmentation segment(const SignalTrace& kinematics, const TrialPlan& plan,
                          const SegmentationParams& params = {});

// Mean processed envelope inside each matched hold, averaged over the
// repetitions of a posture.
struct HoldingMeans {
  // (muscle, posture) -> mean of per-cycle hold means
  std::map<std::pair<std::string, PostureKey>, double> means;
  std::map<std::pair<std::string, PostureKey>, int> cycle_counts;
};

HoldingMeans holding_means(const SignalTrace& env,
                           const PhaseSegmentation& segmentation);

// One processed session, ready for cross-session normalization.
struct SessionRecord {
  std::string participant;
  std::string condition;  // "base" or "loaded"
  HoldingMeans means;
  // Per-muscle envelope maxima inside this session's matched transverse
  // cycles; the normalization reference is their max across sessions.
  std::map<std::string, double> transverse_peak;
};

SessionRecord make_session_record(const std::string& participant,
                                  const std::string& condition,
                                  const SignalTrace& env,
                                  const PhaseSegmentation& segmentation);

struct ActivityRow {
  std::string participant;
  std::string condition;
  std::string muscle;
  PostureKey posture;
  double activity = 0;  // holding mean over the participant's own reference
};

struct ActivityTable {
  std::vector<ActivityRow> rows;
};

// Scales every holding mean by the participant's per-muscle reference
// (the largest transverse-cycle envelope across that participant's
// sessions). Throws NumericError when a needed reference is not positive.
ActivityTable normalize(const std::vector<SessionRecord>& sessions);

ActivityTable read_activity_csv(const std::filesystem::path& path);
void write_activity_csv(const std::filesystem::path& path, const ActivityTable& table);

}  // namespace neckflex
