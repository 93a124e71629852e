#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace neckflex {

// Multi-channel uniformly sampled trace. Channel vectors share one length.
struct SignalTrace {
  double sample_rate = 0;  // Hz
  std::vector<std::string> names;
  std::vector<std::vector<double>> channels;

  std::size_t size() const { return channels.empty() ? 0 : channels.front().size(); }
  double duration() const { return sample_rate > 0 ? size() / sample_rate : 0; }
  const std::vector<double>& channel(const std::string& name) const;
  void validate() const;
};

// Surface EMG envelope extraction settings. The stop edge sits well under
// the Nyquist limit only when the recording rate clears twice the upper
// band edge, hence the 800 Hz floor for the 15-400 Hz default band.
struct EnvelopeParams {
  double sample_rate = 2000.0;  // Hz
  int filter_order = 4;         // overall band-pass order, even
  double band_low = 15.0;       // Hz
  double band_high = 400.0;     // Hz
  double window = 0.25;         // s, moving-average width

  void validate() const;
};

// One second-order section, direct form II transposed, unit a0.
struct Biquad {
  double b0 = 0, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;
};

// Butterworth band-pass as cascaded biquads. `order` counts the overall
// band-pass order and must be even; order 4 gives a 2nd-order prototype.
std::vector<Biquad> butterworth_bandpass(int order, double low, double high,
                                         double sample_rate);

// Magnitude response of the cascade at one frequency.
double cascade_gain(const std::vector<Biquad>& sos, double freq, double sample_rate);

// Single-direction causal filtering, zero initial state.
std::vector<double> filter_forward(const std::vector<Biquad>& sos,
                                   const std::vector<double>& x);

// Forward-backward filtering with odd-reflection padding; zero phase.
std::vector<double> filter_bidirectional(const std::vector<Biquad>& sos,
                                         const std::vector<double>& x,
                                         std::size_t pad);

// Centered moving average, truncated at the edges (divides by the number
// of samples actually inside the window).
std::vector<double> moving_average(const std::vector<double>& x, std::size_t width);

// Full envelope chain for one channel: mean removal, zero-phase band-pass,
// rectification, moving average.
std::vector<double> envelope(const std::vector<double>& x, const EnvelopeParams& params);

// envelope() applied to every channel; names and rate carry over.
SignalTrace preprocess(const SignalTrace& raw, const EnvelopeParams& params);

// CSV layout: a time_s column followed by one column per channel, named
// after the channel. The sample rate is recovered from the time column,
// which must be uniform.
SignalTrace read_trace_csv(const std::filesystem::path& path);
void write_trace_csv(const std::filesystem::path& path, const SignalTrace& trace);

}  // namespace neckflex
