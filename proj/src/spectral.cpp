#include "maskmix/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maskmix::spectral {

namespace {

using cd = std::complex<double>;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Radix-2 FFT with precomputed twiddles; naive DFT fallback for other sizes.
// Butterfly order is fixed, so results are run-to-run identical.
class FftPlan {
 public:
  explicit FftPlan(int n) : n_(n), pow2_(is_pow2(n)) {
    if (pow2_) {
      rev_.resize(n_);
      int log2n = 0;
      while ((1 << log2n) < n_) ++log2n;
      for (int i = 0; i < n_; ++i) {
        int r = 0;
        for (int b = 0; b < log2n; ++b)
          if (i & (1 << b)) r |= 1 << (log2n - 1 - b);
        rev_[i] = r;
      }
      tw_.resize(n_ / 2);
      for (int k = 0; k < n_ / 2; ++k)
        tw_[k] = std::polar(1.0, -2.0 * std::numbers::pi * k / n_);
    } else {
      table_.resize(n_);
      for (int k = 0; k < n_; ++k)
        table_[k] = std::polar(1.0, -2.0 * std::numbers::pi * k / n_);
    }
  }

  void forward(std::vector<cd>& a) const { transform(a, false); }

  void inverse(std::vector<cd>& a) const {
    transform(a, true);
    const double scale = 1.0 / n_;
    for (auto& v : a) v *= scale;
  }

 private:
  void transform(std::vector<cd>& a, bool inverse) const {
    if (pow2_) {
      for (int i = 0; i < n_; ++i)
        if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
      for (int len = 2; len <= n_; len <<= 1) {
        const int half = len / 2;
        const int step = n_ / len;
        for (int base = 0; base < n_; base += len) {
          for (int j = 0; j < half; ++j) {
            cd w = tw_[j * step];
            if (inverse) w = std::conj(w);
            cd u = a[base + j];
            cd v = a[base + j + half] * w;
            a[base + j] = u + v;
            a[base + j + half] = u - v;
          }
        }
      }
    } else {
      std::vector<cd> out(n_);
      for (int k = 0; k < n_; ++k) {
        cd acc = 0.0;
        for (int j = 0; j < n_; ++j) {
          int idx = static_cast<int>((static_cast<long long>(j) * k) % n_);
          cd w = table_[idx];
          if (inverse) w = std::conj(w);
          acc += a[j] * w;
        }
        out[k] = acc;
      }
      a = std::move(out);
    }
  }

  int n_;
  bool pow2_;
  std::vector<int> rev_;
  std::vector<cd> tw_;
  std::vector<cd> table_;
};

void validate_config(const StftConfig& cfg) {
  if (cfg.window_len < 2 || cfg.window_len % 2 != 0)
    throw std::invalid_argument("stft: window_len must be even and >= 2");
  if (cfg.hop < 1 || cfg.hop > cfg.window_len)
    throw std::invalid_argument("stft: hop must be in [1, window_len]");
}

}  // namespace

std::vector<double> hann_window(int n) {
  if (n < 2) throw std::invalid_argument("hann_window: n must be >= 2");
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k)
    w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / n);
  return w;
}

ComplexSpectrogram stft(const audio::AudioClip& clip, const StftConfig& cfg) {
  validate_config(cfg);
  const int win = cfg.window_len;
  const auto len = clip.samples.size();
  if (len < static_cast<std::size_t>(win))
    throw std::invalid_argument("stft: clip shorter than one window");

  ComplexSpectrogram spec;
  spec.config = cfg;
  spec.original_len = len;
  spec.rate = clip.rate;
  spec.frames = static_cast<int>((len - win) / cfg.hop) + 1;
  spec.bins = cfg.bins();
  spec.data.resize(static_cast<std::size_t>(spec.frames) * spec.bins);

  const std::vector<double> window = hann_window(win);
  FftPlan plan(win);
  std::vector<cd> buf(win);

  for (int t = 0; t < spec.frames; ++t) {
    const std::size_t start = static_cast<std::size_t>(t) * cfg.hop;
    for (int j = 0; j < win; ++j)
      buf[j] = cd(clip.samples[start + j] * window[j], 0.0);
    plan.forward(buf);
    for (int f = 0; f < spec.bins; ++f) spec.at(t, f) = buf[f];
  }
  return spec;
}

audio::AudioClip istft(const ComplexSpectrogram& spec) {
  validate_config(spec.config);
  const int win = spec.config.window_len;
  const int hop = spec.config.hop;
  if (spec.bins != spec.config.bins())
    throw std::invalid_argument("istft: bins inconsistent with config");
  if (spec.data.size() != static_cast<std::size_t>(spec.frames) * spec.bins)
    throw std::invalid_argument("istft: data size inconsistent with dimensions");
  if (spec.original_len < static_cast<std::size_t>(win) ||
      spec.frames != static_cast<int>((spec.original_len - win) / hop) + 1)
    throw std::invalid_argument("istft: original_len inconsistent with frame count");

  const std::vector<double> window = hann_window(win);
  FftPlan plan(win);

  std::vector<double> acc(spec.original_len, 0.0);
  std::vector<double> wsum(spec.original_len, 0.0);
  std::vector<cd> buf(win);

  for (int t = 0; t < spec.frames; ++t) {
    buf[0] = spec.at(t, 0);
    buf[win / 2] = spec.at(t, win / 2);
    for (int f = 1; f < win / 2; ++f) {
      buf[f] = spec.at(t, f);
      buf[win - f] = std::conj(spec.at(t, f));
    }
    plan.inverse(buf);
    const std::size_t start = static_cast<std::size_t>(t) * hop;
    for (int j = 0; j < win; ++j) {
      acc[start + j] += buf[j].real() * window[j];
      wsum[start + j] += window[j] * window[j];
    }
  }

  audio::AudioClip out;
  out.rate = spec.rate;
  out.samples.resize(spec.original_len);
  for (std::size_t i = 0; i < spec.original_len; ++i)
    out.samples[i] = acc[i] / std::max(wsum[i], 1e-12);
  return out;
}

MagnitudeSpectrogram magnitude(const ComplexSpectrogram& spec) {
  MagnitudeSpectrogram mag;
  mag.frames = spec.frames;
  mag.bins = spec.bins;
  mag.config = spec.config;
  mag.data.resize(spec.data.size());
  for (std::size_t i = 0; i < spec.data.size(); ++i) mag.data[i] = std::abs(spec.data[i]);
  return mag;
}

}  // namespace maskmix::spectral
