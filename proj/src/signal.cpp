#include "neckflex/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "neckflex/csv.hpp"
#include "neckflex/errors.hpp"

namespace neckflex {

namespace {

using cplx = std::complex<double>;

// Bilinear transform with the standard tan() frequency prewarp.
double prewarp(double freq, double sample_rate) {
  return 2.0 * sample_rate * std::tan(std::numbers::pi * freq / sample_rate);
}

cplx bilinear(cplx s, double sample_rate) {
  const double k = 2.0 * sample_rate;
  return (k + s) / (k - s);
}

// Groups the digital poles into conjugate pairs (real poles pair among
// themselves) and emits one denominator per pair.
std::vector<Biquad> pair_poles(std::vector<cplx> poles) {
  constexpr double kImagTol = 1e-10;
  std::vector<cplx> complex_poles;
  std::vector<double> real_poles;
  for (const auto& p : poles) {
    if (std::abs(p.imag()) > kImagTol) {
      if (p.imag() > 0) complex_poles.push_back(p);
    } else {
      real_poles.push_back(p.real());
    }
  }
  std::sort(real_poles.begin(), real_poles.end());

  std::vector<Biquad> sections;
  for (const auto& p : complex_poles) {
    Biquad s;
    s.a1 = -2.0 * p.real();
    s.a2 = std::norm(p);
    sections.push_back(s);
  }
  for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) {
    Biquad s;
    s.a1 = -(real_poles[i] + real_poles[i + 1]);
    s.a2 = real_poles[i] * real_poles[i + 1];
    sections.push_back(s);
  }
  return sections;
}

}  // namespace

const std::vector<double>& SignalTrace::channel(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return channels[i];
  }
  throw std::invalid_argument("unknown channel '" + name + "'");
}

void SignalTrace::validate() const {
  if (!(sample_rate > 0) || !std::isfinite(sample_rate)) {
    throw std::invalid_argument("sample rate must be positive");
  }
  if (names.size() != channels.size()) {
    throw std::invalid_argument("channel name count mismatch");
  }
  for (const auto& c : channels) {
    if (c.size() != size()) throw std::invalid_argument("channel length mismatch");
  }
}

void EnvelopeParams::validate() const {
  if (!(sample_rate > 800.0)) {
    throw std::invalid_argument(
        "sample rate must exceed 800 Hz for the 15-400 Hz band");
  }
  if (filter_order < 2 || filter_order % 2 != 0) {
    throw std::invalid_argument("band-pass order must be even and >= 2");
  }
  if (!(band_low > 0) || !(band_high > band_low) ||
      !(band_high < sample_rate / 2)) {
    throw std::invalid_argument("band edges must satisfy 0 < low < high < rate/2");
  }
  if (!(window > 0)) throw std::invalid_argument("window must be positive");
}

std::vector<Biquad> butterworth_bandpass(int order, double low, double high,
                                         double sample_rate) {
  if (order < 2 || order % 2 != 0) {
    throw std::invalid_argument("band-pass order must be even and >= 2");
  }
  if (!(low > 0 && high > low && high < sample_rate / 2)) {
    throw std::invalid_argument("band edges must satisfy 0 < low < high < rate/2");
  }
  const int n = order / 2;  // low-pass prototype order
  const double w1 = prewarp(low, sample_rate);
  const double w2 = prewarp(high, sample_rate);
  const double w0 = std::sqrt(w1 * w2);
  const double bw = w2 - w1;

  std::vector<cplx> digital_poles;
  digital_poles.reserve(2 * static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double ang = std::numbers::pi * (2.0 * k + n + 1.0) / (2.0 * n);
    const cplx proto = std::polar(1.0, ang);
    // Low-pass to band-pass: every prototype pole splits in two.
    const cplx pb = proto * bw;
    const cplx root = std::sqrt(pb * pb - 4.0 * w0 * w0);
    digital_poles.push_back(bilinear((pb + root) / 2.0, sample_rate));
    digital_poles.push_back(bilinear((pb - root) / 2.0, sample_rate));
  }

  auto sections = pair_poles(std::move(digital_poles));
  // Zeros land at z = +1 and z = -1 in equal numbers; one (1, 0, -1)
  // numerator per section accounts for all of them.
  for (auto& s : sections) {
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
  }
  const double center = std::sqrt(low * high);
  const double raw_gain = cascade_gain(sections, center, sample_rate);
  if (!(raw_gain > 0) || !std::isfinite(raw_gain)) {
    throw NumericError("band-pass design produced a degenerate response");
  }
  const double g =
      std::pow(1.0 / raw_gain, 1.0 / static_cast<double>(sections.size()));
  for (auto& s : sections) {
    s.b0 *= g;
    s.b2 *= g;
  }
  return sections;
}

double cascade_gain(const std::vector<Biquad>& sos, double freq,
                    double sample_rate) {
  const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * freq / sample_rate);
  const cplx zi = 1.0 / z;
  cplx h = 1.0;
  for (const auto& s : sos) {
    h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) /
         (1.0 + s.a1 * zi + s.a2 * zi * zi);
  }
  return std::abs(h);
}

std::vector<double> filter_forward(const std::vector<Biquad>& sos,
                                   const std::vector<double>& x) {
  std::vector<double> y = x;
  for (const auto& s : sos) {
    double z1 = 0, z2 = 0;
    for (auto& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> filter_bidirectional(const std::vector<Biquad>& sos,
                                         const std::vector<double>& x,
                                         std::size_t pad) {
  const std::size_t n = x.size();
  if (n < 2) return x;
  pad = std::min(pad, n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  // Odd reflection about each end keeps the extension continuous and
  // slope-matched, so the startup transient decays inside the pad.
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  ext = filter_forward(sos, ext);
  std::reverse(ext.begin(), ext.end());
  ext = filter_forward(sos, ext);
  std::reverse(ext.begin(), ext.end());

  return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                             ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

std::vector<double> moving_average(const std::vector<double>& x,
                                   std::size_t width) {
  if (width == 0) throw std::invalid_argument("window width must be positive");
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  const std::size_t half = (width - 1) / 2;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    y[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return y;
}

std::vector<double> envelope(const std::vector<double>& x,
                             const EnvelopeParams& params) {
  params.validate();
  if (x.empty()) return {};

  std::vector<double> y = x;
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  for (auto& v : y) v -= mean;

  const auto sos = butterworth_bandpass(params.filter_order, params.band_low,
                                        params.band_high, params.sample_rate);
  // Six time constants of the slowest pole keep the edge transient below
  // 1e-11 of full scale.
  const auto pad = static_cast<std::size_t>(
      std::llround(6.0 * params.sample_rate / params.band_low));
  y = filter_bidirectional(sos, y, pad);

  for (auto& v : y) v = std::abs(v);

  auto width = static_cast<std::size_t>(
      std::llround(params.window * params.sample_rate));
  if (width % 2 == 0) ++width;  // symmetric center sample
  if (width < 1) width = 1;
  return moving_average(y, width);
}

SignalTrace read_trace_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  if (table.header.empty() || table.header.front() != "time_s") {
    throw ParseError("first column must be time_s in " + path.string());
  }
  if (table.header.size() < 2) {
    throw ParseError("no data channels in " + path.string());
  }
  if (table.rows.size() < 2) {
    throw ParseError("need at least two samples in " + path.string());
  }

  SignalTrace trace;
  trace.names.assign(table.header.begin() + 1, table.header.end());
  trace.channels.assign(trace.names.size(),
                        std::vector<double>(table.rows.size()));
  std::vector<double> time(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t line = r + 2;
    time[r] = parse_double(table.rows[r][0], line);
    for (std::size_t c = 0; c < trace.names.size(); ++c) {
      const double v = parse_double(table.rows[r][c + 1], line);
      if (!std::isfinite(v)) throw ParseError("non-finite sample", line);
      trace.channels[c][r] = v;
    }
  }

  const double dt = (time.back() - time.front()) /
                    static_cast<double>(time.size() - 1);
  if (!(dt > 0)) throw ParseError("time column must increase in " + path.string());
  for (std::size_t r = 1; r < time.size(); ++r) {
    const double step = time[r] - time[r - 1];
    if (std::abs(step - dt) > 1e-6 * dt + 1e-12) {
      throw ParseError("time column must be uniformly sampled", r + 2);
    }
  }
  trace.sample_rate = 1.0 / dt;
  return trace;
}

void write_trace_csv(const std::filesystem::path& path, const SignalTrace& trace) {
  trace.validate();
  CsvTable table;
  table.header.push_back("time_s");
  for (const auto& n : trace.names) table.header.push_back(n);
  table.rows.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::vector<std::string> row;
    row.reserve(trace.names.size() + 1);
    row.push_back(format_double(static_cast<double>(i) / trace.sample_rate));
    for (const auto& c : trace.channels) row.push_back(format_double(c[i]));
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

SignalTrace preprocess(const SignalTrace& raw, const EnvelopeParams& params) {
  raw.validate();
  if (raw.sample_rate != params.sample_rate) {
    EnvelopeParams adjusted = params;
    adjusted.sample_rate = raw.sample_rate;
    return preprocess(raw, adjusted);
  }
  SignalTrace out;
  out.sample_rate = raw.sample_rate;
  out.names = raw.names;
  out.channels.reserve(raw.channels.size());
  for (const auto& c : raw.channels) out.channels.push_back(envelope(c, params));
  return out;
}

}  // namespace neckflex
