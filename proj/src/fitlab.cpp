#include "neckflex/fitlab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "neckflex/csv.hpp"
#include "neckflex/errors.hpp"
#include "neckflex/rng.hpp"

namespace neckflex {

namespace {

// Gaussian elimination with partial pivoting on a tiny system; returns
// false when the matrix is numerically singular.
template <std::size_t N>
bool solve_linear(std::array<std::array<double, N>, N> a,
                  std::array<double, N>& b) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < N; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-12) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < N; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < N; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t col = N; col-- > 0;) {
    for (std::size_t c = col + 1; c < N; ++c) b[col] -= a[col][c] * b[c];
    b[col] /= a[col][col];
  }
  return true;
}

double line_sse(const std::vector<MomentPoint>& pts, double a, double b) {
  double sse = 0;
  for (const auto& p : pts) {
    const double r = p.moment - (a + b * p.angle);
    sse += r * r;
  }
  return sse;
}

}  // namespace

std::string to_string(BranchDir dir) {
  return dir == BranchDir::load ? "load" : "unload";
}

BranchDir branch_from_string(const std::string& s) {
  if (s == "load") return BranchDir::load;
  if (s == "unload") return BranchDir::unload;
  throw ParseError("unknown branch '" + s + "'");
}

void BendTestTrace::validate() const {
  double prev_time = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    if (!std::isfinite(s.time) || !std::isfinite(s.force) ||
        !std::isfinite(s.displacement) || !std::isfinite(s.angle)) {
      throw std::invalid_argument("non-finite bench sample");
    }
    if (s.time <= prev_time) {
      throw std::invalid_argument("bench time stamps must increase");
    }
    prev_time = s.time;
    if (s.force < 0) throw std::invalid_argument("negative pull force");
    if (s.displacement < 0) throw std::invalid_argument("negative handle travel");
    if (s.angle < 0 || s.angle > kMaxBendAngle) {
      throw std::invalid_argument("bend angle out of range");
    }
  }
}

BendTestTrace read_bend_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto ti = table.column("time_s");
  const auto fi = table.column("force_n");
  const auto di = table.column("displacement_m");
  const auto ai = table.column("angle_rad");
  const auto bi = table.column("branch");

  BendTestTrace trace;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = r + 2;
    BendSample s;
    s.time = parse_double(row[ti], line);
    s.force = parse_double(row[fi], line);
    s.displacement = parse_double(row[di], line);
    s.angle = parse_double(row[ai], line);
    s.branch = branch_from_string(row[bi]);
    trace.samples.push_back(s);
  }
  try {
    trace.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid bench trace: ") + e.what());
  }
  return trace;
}

void write_bend_csv(const std::filesystem::path& path, const BendTestTrace& trace) {
  CsvTable table;
  table.header = {"time_s", "force_n", "displacement_m", "angle_rad", "branch"};
  for (const auto& s : trace.samples) {
    table.rows.push_back({format_double(s.time), format_double(s.force),
                          format_double(s.displacement), format_double(s.angle),
                          to_string(s.branch)});
  }
  write_csv(path, table);
}

std::vector<MomentPoint> compute_base_moment(const BendTestTrace& trace,
                                             double load_height) {
  if (!(load_height > 0) || !std::isfinite(load_height)) {
    throw std::invalid_argument("load height must be positive");
  }
  trace.validate();
  std::vector<MomentPoint> out;
  out.reserve(trace.samples.size());
  for (const auto& s : trace.samples) {
    if (s.displacement >= load_height) {
      throw NumericError("handle travel exceeds the loading arm");
    }
    const double lever = std::sqrt(load_height * load_height -
                                   s.displacement * s.displacement);
    out.push_back({s.angle, s.force * lever});
  }
  return out;
}

TransitionDetection detect_transition(std::vector<MomentPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const MomentPoint& a, const MomentPoint& b) {
              return a.angle < b.angle;
            });
  const std::size_t n = points.size();

  TransitionDetection det;

  double sm2 = 0;
  for (const auto& p : points) sm2 += p.moment * p.moment;

  // Single line, for the baseline error.
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : points) {
      sx += p.angle;
      sy += p.moment;
      sxx += p.angle * p.angle;
      sxy += p.angle * p.moment;
    }
    std::array<std::array<double, 2>, 2> a{{{static_cast<double>(n), sx},
                                            {sx, sxx}}};
    std::array<double, 2> b{sy, sxy};
    if (n < 2 || !solve_linear(a, b)) {
      det.sse_single = det.sse_two = 0;
      return det;
    }
    det.sse_single = line_sse(points, b[0], b[1]);
  }
  det.sse_two = det.sse_single;
  if (n < 8) return det;  // too few samples to justify a break
  // A line that already explains the data to rounding leaves nothing real
  // for a break to pick up; without this floor the 5% rule would compare
  // two rounding residuals and hallucinate a breakpoint.
  if (det.sse_single <= 1e-20 * sm2) return det;

  double best_sse = det.sse_single;
  std::optional<double> best_angle;
  bool best_steepens = false;
  // Break candidates sit on sample angles with at least three points on
  // each side. Basis: 1, angle, (angle - c)+ keeps the fit continuous.
  for (std::size_t k = 2; k + 3 < n; ++k) {
    const double c = points[k].angle;
    if (points[k + 1].angle <= c) continue;
    double s1 = static_cast<double>(n), sx = 0, sh = 0;
    double sxx = 0, sxh = 0, shh = 0, sy = 0, sxy = 0, shy = 0;
    for (const auto& p : points) {
      const double h = std::max(0.0, p.angle - c);
      sx += p.angle;
      sh += h;
      sxx += p.angle * p.angle;
      sxh += p.angle * h;
      shh += h * h;
      sy += p.moment;
      sxy += p.angle * p.moment;
      shy += h * p.moment;
    }
    std::array<std::array<double, 3>, 3> a{{{s1, sx, sh},
                                            {sx, sxx, sxh},
                                            {sh, sxh, shh}}};
    std::array<double, 3> b{sy, sxy, shy};
    if (!solve_linear(a, b)) continue;
    double sse = 0;
    for (const auto& p : points) {
      const double h = std::max(0.0, p.angle - c);
      const double r = p.moment - (b[0] + b[1] * p.angle + b[2] * h);
      sse += r * r;
    }
    if (sse < best_sse) {
      best_sse = sse;
      best_angle = c;
      best_steepens = b[2] > 0;
    }
  }

  det.sse_two = best_sse;
  const double scale = det.sse_single;
  if (best_angle && best_steepens && scale > 0 &&
      (scale - best_sse) / scale >= 0.05) {
    det.angle = best_angle;
  }
  return det;
}

namespace {

// Moment law shape factor: moment = rigidity * shape(theta).
double shape_factor(double theta, double free_length,
                    std::map<double, double>& cache) {
  auto it = cache.find(theta);
  if (it != cache.end()) return it->second;
  const double g =
      theta <= 0 ? 0.0
                 : gamma_integral(theta) * std::sqrt(std::sin(theta)) / free_length;
  cache.emplace(theta, g);
  return g;
}

}  // namespace

FitResult fit_parameters(const BendTestTrace& trace, double load_height,
                         double free_length) {
  if (!(free_length > 0) || !std::isfinite(free_length)) {
    throw std::invalid_argument("free length must be positive");
  }
  const auto moments = compute_base_moment(trace, load_height);

  std::vector<MomentPoint> loading, unloading;
  std::vector<bool> taut(moments.size(), true);
  for (std::size_t i = 0; i < moments.size(); ++i) {
    // Zero force means the pull line went slack: the handle reads nothing
    // about the device there, and on the unloading branch it would fake a
    // moment of +friction where the true backbone sits below it.
    if (!(trace.samples[i].force > 0)) {
      taut[i] = false;
      continue;
    }
    (trace.samples[i].branch == BranchDir::load ? loading : unloading)
        .push_back(moments[i]);
  }
  if (loading.empty()) throw NumericError("no loading-branch samples");

  auto by_angle = [](const MomentPoint& a, const MomentPoint& b) {
    return a.angle < b.angle;
  };
  std::sort(loading.begin(), loading.end(), by_angle);
  std::sort(unloading.begin(), unloading.end(), by_angle);

  // Signed half-gap between the branches; |half| is the friction moment.
  double half = 0;
  if (!unloading.empty()) {
    double gap_sum = 0;
    std::size_t gap_n = 0;
    for (const auto& p : loading) {
      if (p.angle < unloading.front().angle || p.angle > unloading.back().angle) {
        continue;
      }
      auto hi = std::lower_bound(unloading.begin(), unloading.end(), p, by_angle);
      double interp;
      if (hi == unloading.begin()) {
        interp = hi->moment;
      } else {
        auto lo = hi - 1;
        if (hi == unloading.end()) {
          interp = lo->moment;
        } else if (hi->angle == lo->angle) {
          interp = 0.5 * (lo->moment + hi->moment);
        } else {
          const double t = (p.angle - lo->angle) / (hi->angle - lo->angle);
          interp = lo->moment + t * (hi->moment - lo->moment);
        }
      }
      gap_sum += p.moment - interp;
      ++gap_n;
    }
    if (gap_n > 0) half = gap_sum / static_cast<double>(gap_n) / 2.0;
  }

  // Friction-free backbone from both branches, sorted by angle.
  std::vector<MomentPoint> backbone;
  backbone.reserve(moments.size());
  for (const auto& p : loading) backbone.push_back({p.angle, p.moment - half});
  for (const auto& p : unloading) backbone.push_back({p.angle, p.moment + half});
  std::sort(backbone.begin(), backbone.end(), by_angle);

  std::map<double, double> cache;
  auto g = [&](double theta) { return shape_factor(theta, free_length, cache); };

  FitResult fit;
  fit.friction = std::abs(half);

  // Single-rigidity fit, the null model for the break search.
  double sgg = 0, sgm = 0;
  for (const auto& p : backbone) {
    const double gi = g(p.angle);
    sgg += gi * gi;
    sgm += gi * p.moment;
  }
  if (!(sgg > 0)) throw NumericError("degenerate fit: no bend excursion");
  const double c_single = sgm / sgg;
  double sse_single = 0;
  for (const auto& p : backbone) {
    const double r = p.moment - c_single * g(p.angle);
    sse_single += r * r;
  }
  fit.stiffness_pre = fit.stiffness_post = c_single;

  double sm2 = 0;
  for (const auto& p : backbone) sm2 += p.moment * p.moment;

  // Breakpoint search against the moment law, each regime fitted on its own:
  // moment = EI * shape through the origin below the candidate, moment =
  // a + EI * shape above it. The free intercept soaks up the continuity
  // offset of the true engagement angle, so the rigidities come out right
  // even though candidates sit on sample angles and the true break almost
  // never does. Near-equal errors break toward the larger candidate, which
  // is the last sample the lower regime still explains. Acceptance rules as
  // in detect_transition: at least 8 samples, three points per side, 5%
  // error reduction over the single rigidity, and a stiffening break. The
  // floor keeps a rounding-level single-regime fit from promoting noise.
  double post_intercept = 0;
  if (backbone.size() >= 8 && sse_single > 1e-20 * sm2) {
    double best_sse = std::numeric_limits<double>::infinity();
    std::optional<double> best_angle;
    double best_pre = 0, best_post = 0, best_intercept = 0;
    const double tie = 1e-12 * sm2;
    for (std::size_t k = 2; k + 3 < backbone.size(); ++k) {
      const double c = backbone[k].angle;
      if (backbone[k + 1].angle <= c) continue;
      double pgg = 0, pgm = 0;
      double np = 0, sg = 0, sgg = 0, sm = 0, sgm = 0;
      for (const auto& p : backbone) {
        const double gi = g(p.angle);
        if (p.angle <= c) {
          pgg += gi * gi;
          pgm += gi * p.moment;
        } else {
          np += 1.0;
          sg += gi;
          sgg += gi * gi;
          sm += p.moment;
          sgm += gi * p.moment;
        }
      }
      const double det = np * sgg - sg * sg;
      if (!(pgg > 0) || !(std::abs(det) > 1e-12 * np * sgg)) continue;
      const double ei_pre = pgm / pgg;
      const double ei_post = (np * sgm - sg * sm) / det;
      const double a_post = (sm - ei_post * sg) / np;
      if (ei_post <= ei_pre) continue;  // softening break is fit noise
      double sse = 0;
      for (const auto& p : backbone) {
        const double gi = g(p.angle);
        const double m = p.angle <= c ? ei_pre * gi : a_post + ei_post * gi;
        const double r = p.moment - m;
        sse += r * r;
      }
      if (sse < best_sse - tie || (best_angle && sse < best_sse + tie && c > *best_angle)) {
        best_sse = std::min(best_sse, sse);
        best_angle = c;
        best_pre = ei_pre;
        best_post = ei_post;
        best_intercept = a_post;
      }
    }
    if (best_angle && (sse_single - best_sse) / sse_single >= 0.05) {
      fit.transition = best_angle;
      fit.stiffness_pre = best_pre;
      fit.stiffness_post = best_post;
      post_intercept = best_intercept;
    }
  }

  // Residuals against the branch-resolved model.
  const auto predict = [&](double theta) {
    if (fit.transition && theta > *fit.transition) {
      return post_intercept + fit.stiffness_post * g(theta);
    }
    return fit.stiffness_pre * g(theta);
  };
  double ss = 0;
  std::size_t n_taut = 0;
  for (std::size_t i = 0; i < moments.size(); ++i) {
    if (!taut[i]) continue;
    const double offs = trace.samples[i].branch == BranchDir::load ? half : -half;
    const double r = moments[i].moment - (predict(moments[i].angle) + offs);
    ss += r * r;
    ++n_taut;
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(n_taut));
  return fit;
}

BendTestTrace synthesize_bend_trace(const BarArraySpec& spec,
                                    const std::vector<double>& angles,
                                    double load_height, double friction,
                                    const BenchNoise& noise) {
  if (!(load_height > 0)) throw std::invalid_argument("load height must be positive");
  if (friction < 0) throw std::invalid_argument("friction must be non-negative");
  std::vector<double> sorted = angles;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty()) throw std::invalid_argument("no sweep angles");
  if (sorted.front() < 0 || sorted.back() > kMaxBendAngle) {
    throw std::invalid_argument("sweep angle out of range");
  }

  const auto curve = moment_curve(spec, sorted);
  Rng rng(mix_seed(noise.seed, "bench"));

  BendTestTrace trace;
  double t = 0;
  auto push = [&](double theta, double moment, BranchDir dir) {
    const double lever = load_height * std::cos(theta);
    double force = (moment + (dir == BranchDir::load ? friction : -friction)) / lever;
    if (noise.force_rel > 0) force *= 1.0 + noise.force_rel * rng.normal();
    BendSample s;
    s.time = t;
    t += 1.0;
    s.force = std::max(0.0, force);
    s.displacement = load_height * std::sin(theta);
    s.angle = theta;
    s.branch = dir;
    trace.samples.push_back(s);
  };

  for (std::size_t i = 0; i < sorted.size(); ++i) {
    push(sorted[i], curve.samples[i].moment, BranchDir::load);
  }
  for (std::size_t i = sorted.size(); i-- > 0;) {
    push(sorted[i], curve.samples[i].moment, BranchDir::unload);
  }
  return trace;
}

}  // namespace neckflex
