#include "neckflex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>

#include "neckflex/csv.hpp"
#include "neckflex/errors.hpp"

namespace neckflex {

namespace {

// Largest pair count handled by the exact rank-sum distribution; the
// sign-assignment count 2^n still fits comfortably in 64-bit tallies.
constexpr int kExactLimit = 25;

struct RankedDiffs {
  // Doubled mid-ranks are integers even through ties.
  std::vector<int> doubled_ranks;
  std::vector<bool> positive;
  std::vector<int> tie_sizes;
};

RankedDiffs rank_differences(std::vector<double> diffs) {
  std::vector<std::size_t> order(diffs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(diffs[a]) < std::abs(diffs[b]);
  });

  RankedDiffs out;
  out.doubled_ranks.resize(diffs.size());
  out.positive.resize(diffs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) {
      ++j;
    }
    // Positions i..j (0-based) share mid-rank ((i+1)+(j+1))/2.
    const int doubled = static_cast<int>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) {
      out.doubled_ranks[order[k]] = doubled;
      out.positive[order[k]] = diffs[order[k]] > 0;
    }
    out.tie_sizes.push_back(static_cast<int>(j - i + 1));
    i = j + 1;
  }
  return out;
}

double exact_two_sided_p(const RankedDiffs& ranked, int doubled_w) {
  const int n = static_cast<int>(ranked.doubled_ranks.size());
  int total = 0;
  for (int r : ranked.doubled_ranks) total += r;

  // counts[s]: sign assignments whose doubled positive-rank sum is s.
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(total) + 1, 0);
  counts[0] = 1;
  for (int r : ranked.doubled_ranks) {
    for (int s = total; s >= r; --s) counts[s] += counts[s - r];
  }

  std::uint64_t lo = 0, hi = 0;
  for (int s = 0; s <= total; ++s) {
    if (s <= doubled_w) lo += counts[s];
    if (s >= doubled_w) hi += counts[s];
  }
  const double denom = std::ldexp(1.0, n);  // 2^n assignments
  const double tail = static_cast<double>(std::min(lo, hi)) / denom;
  return std::min(1.0, 2.0 * tail);
}

double normal_two_sided_p(const RankedDiffs& ranked, double w_plus) {
  const double n = static_cast<double>(ranked.doubled_ranks.size());
  const double mu = n * (n + 1.0) / 4.0;
  double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  for (int t : ranked.tie_sizes) {
    var -= (static_cast<double>(t) * t * t - t) / 48.0;
  }
  const double z = std::max(0.0, std::abs(w_plus - mu) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::numbers::sqrt2));
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& base,
                                    const std::vector<double>& loaded) {
  if (base.size() != loaded.size()) {
    throw std::invalid_argument("paired samples must have equal length");
  }
  std::vector<double> diffs;
  diffs.reserve(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double d = loaded[i] - base[i];
    if (!std::isfinite(d)) throw std::invalid_argument("non-finite difference");
    if (d != 0) diffs.push_back(d);
  }
  if (diffs.empty()) {
    throw NumericError("signed-rank test undefined: all differences are zero");
  }

  const auto ranked = rank_differences(std::move(diffs));
  int doubled_w = 0;
  for (std::size_t i = 0; i < ranked.doubled_ranks.size(); ++i) {
    if (ranked.positive[i]) doubled_w += ranked.doubled_ranks[i];
  }

  WilcoxonResult res;
  res.n_effective = static_cast<int>(ranked.doubled_ranks.size());
  res.w_plus = doubled_w / 2.0;
  if (res.n_effective <= kExactLimit) {
    res.method = PMethod::exact;
    res.p_value = exact_two_sided_p(ranked, doubled_w);
  } else {
    res.method = PMethod::normal_approx;
    res.p_value = normal_two_sided_p(ranked, res.w_plus);
  }
  return res;
}

void CompareOptions::validate() const {
  if (!(alpha > 0 && alpha < 1)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
}

std::vector<CellResult> compare_conditions(const ActivityTable& table,
                                           const CompareOptions& options) {
  options.validate();

  using CellKey = std::pair<std::string, PostureKey>;
  struct Pair {
    std::optional<double> base, loaded;
  };
  std::map<CellKey, std::map<std::string, Pair>> cells;

  for (const auto& row : table.rows) {
    if (!options.include_back_flexion && row.posture.plane == Plane::sagittal &&
        row.posture.angle_deg == -40) {
      continue;
    }
    auto& pair = cells[{row.muscle, row.posture}][row.participant];
    auto& slot = row.condition == "base" ? pair.base : pair.loaded;
    if (slot) {
      throw ParseError("duplicate activity row for " + row.participant + "/" +
                       row.muscle);
    }
    slot = row.activity;
  }

  std::vector<CellResult> out;
  for (const auto& [key, participants] : cells) {
    CellResult cell;
    cell.muscle = key.first;
    cell.posture = key.second;

    std::vector<double> base, loaded;
    std::vector<std::string> incomplete;
    for (const auto& [participant, pair] : participants) {
      if (pair.base && pair.loaded) {
        base.push_back(*pair.base);
        // A rank test promotes any nonzero difference to full-weight sign
        // evidence, so arithmetic dust from the envelope pipeline (1e-14
        // relative) must be tied off here, not left to the test. 1e-9 sits
        // far above rounding and far below any real effect or session
        // noise. Relative to the pair scale, so rescaling activities does
        // not change what counts as a tie.
        const double scale = std::max(std::fabs(*pair.base), std::fabs(*pair.loaded));
        const bool dust = std::fabs(*pair.loaded - *pair.base) <= 1e-9 * scale;
        loaded.push_back(dust ? *pair.base : *pair.loaded);
      } else {
        incomplete.push_back(participant);
      }
    }

    auto describe = [](const std::vector<double>& v, double& mean, double& sd) {
      mean = 0;
      sd = std::numeric_limits<double>::quiet_NaN();
      if (v.empty()) {
        mean = std::numeric_limits<double>::quiet_NaN();
        return;
      }
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      if (v.size() < 2) return;
      double ss = 0;
      for (double x : v) ss += (x - mean) * (x - mean);
      sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    };
    describe(base, cell.mean_base, cell.sd_base);
    describe(loaded, cell.mean_loaded, cell.sd_loaded);
    cell.n_pairs = static_cast<int>(base.size());

    if (!incomplete.empty()) {
      std::string who;
      for (const auto& p : incomplete) {
        if (!who.empty()) who += "; ";
        who += p;
      }
      cell.note = "skipped: incomplete participants: " + who;
      out.push_back(std::move(cell));
      continue;
    }

    bool all_zero = true;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (loaded[i] != base[i]) {
        all_zero = false;
        break;
      }
    }
    if (all_zero) {
      cell.note = "not significant by construction: all differences zero";
      out.push_back(std::move(cell));
      continue;
    }

    cell.test = wilcoxon_signed_rank(base, loaded);
    cell.significant = cell.test->p_value < options.alpha;
    out.push_back(std::move(cell));
  }
  return out;
}

void write_comparison_csv(const std::filesystem::path& path,
                          const std::vector<CellResult>& cells) {
  CsvTable csv;
  csv.header = {"muscle",      "plane",    "angle_deg", "n_pairs",
                "mean_base",   "sd_base",  "mean_loaded", "sd_loaded",
                "w_plus",      "p_value",  "n_effective", "method",
                "significant", "note"};
  for (const auto& c : cells) {
    std::vector<std::string> row;
    row.push_back(c.muscle);
    row.push_back(to_string(c.posture.plane));
    row.push_back(std::to_string(c.posture.angle_deg));
    row.push_back(std::to_string(c.n_pairs));
    row.push_back(format_double(c.mean_base));
    row.push_back(format_double(c.sd_base));
    row.push_back(format_double(c.mean_loaded));
    row.push_back(format_double(c.sd_loaded));
    if (c.test) {
      row.push_back(format_double(c.test->w_plus));
      row.push_back(format_double(c.test->p_value));
      row.push_back(std::to_string(c.test->n_effective));
      row.push_back(c.test->method == PMethod::exact ? "exact" : "normal");
    } else {
      row.insert(row.end(), {"", "", "", ""});
    }
    row.push_back(c.significant ? "1" : "0");
    row.push_back(c.note);
    csv.rows.push_back(std::move(row));
  }
  write_csv(path, csv);
}

}  // namespace neckflex
