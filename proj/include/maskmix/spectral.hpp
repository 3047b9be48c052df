#ifndef MASKMIX_SPECTRAL_HPP
#define MASKMIX_SPECTRAL_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "maskmix/audio.hpp"

namespace maskmix::spectral {

struct StftConfig {
  int window_len = 2048;  // even, >= 2
  int hop = 512;          // 1 <= hop <= window_len
  int bins() const { return window_len / 2 + 1; }
};

// Row-major frames x bins. Frame t covers samples [t*hop, t*hop + window_len).
struct ComplexSpectrogram {
  int frames = 0;
  int bins = 0;
  std::vector<std::complex<double>> data;
  StftConfig config;
  std::size_t original_len = 0;  // source sample count, istft truncates to it
  int rate = 0;

  std::complex<double>& at(int t, int f) { return data[static_cast<std::size_t>(t) * bins + f]; }
  const std::complex<double>& at(int t, int f) const {
    return data[static_cast<std::size_t>(t) * bins + f];
  }
};

struct MagnitudeSpectrogram {
  int frames = 0;
  int bins = 0;
  std::vector<double> data;  // nonnegative
  StftConfig config;

  double& at(int t, int f) { return data[static_cast<std::size_t>(t) * bins + f]; }
  double at(int t, int f) const { return data[static_cast<std::size_t>(t) * bins + f]; }
};

// Periodic (DFT-even) Hann: w[k] = 0.5 - 0.5*cos(2*pi*k/n), k = 0..n-1.
std::vector<double> hann_window(int n);

ComplexSpectrogram stft(const audio::AudioClip& clip, const StftConfig& cfg);

// Weighted overlap-add: synthesis windowing with the same Hann, then pointwise
// division by the accumulated squared-window sum (floored at 1e-12).
audio::AudioClip istft(const ComplexSpectrogram& spec);

MagnitudeSpectrogram magnitude(const ComplexSpectrogram& spec);

}  // namespace maskmix::spectral

#endif  // MASKMIX_SPECTRAL_HPP
