#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "neckflex/emg.hpp"
#include "neckflex/protocol.hpp"

namespace neckflex {

enum class PMethod { exact, normal_approx };

struct WilcoxonResult {
  double w_plus = 0;     // rank sum of positive differences
  double p_value = 1;    // two-sided
  int n_effective = 0;   // pairs left after dropping zero differences
  PMethod method = PMethod::exact;
};

// Paired two-sided Wilcoxon signed-rank test on loaded - base. Zero
// differences are dropped; ties share mid-ranks. Exact rank-sum
// distribution up to 25 effective pairs, normal approximation with tie
// and continuity corrections above that. Throws NumericError when every
// difference is zero.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& base,
                                    const std::vector<double>& loaded);

struct CellResult {
  std::string muscle;
  PostureKey posture;
  int n_pairs = 0;
  double mean_base = 0, sd_base = 0;
  double mean_loaded = 0, sd_loaded = 0;
  std::optional<WilcoxonResult> test;  // empty when the test is undefined
  bool significant = false;            // p < alpha
  std::string note;                    // why a cell went untested
};

struct CompareOptions {
  double alpha = 0.05;
  // The deep-flexion sagittal posture is analyzed separately by default.
  bool include_back_flexion = false;

  void validate() const;
};

// Base-versus-loaded comparison per (muscle, posture) cell. Cells where a
// participant is missing one condition are flagged and left untested, as
// are cells whose differences are all zero.
std::vector<CellResult> compare_conditions(const ActivityTable& table,
                                           const CompareOptions& options = {});

void write_comparison_csv(const std::filesystem::path& path,
                          const std::vector<CellResult>& cells);

}  // namespace neckflex
