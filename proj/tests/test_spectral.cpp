#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "maskmix/rng.hpp"
#include "maskmix/spectral.hpp"

using namespace maskmix;
using spectral::StftConfig;

namespace {

// Brute-force reference DFT, written independently of the production FFT.
std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
  const auto n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      acc += x[j] * std::polar(1.0, -2.0 * std::numbers::pi *
                                        static_cast<double>(k * j % n) / static_cast<double>(n));
    out[k] = acc;
  }
  return out;
}

audio::AudioClip random_clip(std::uint64_t seed, std::size_t n, int rate = 8000) {
  SplitMix64 rng(seed);
  audio::AudioClip c;
  c.rate = rate;
  c.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) c.samples.push_back(rng.uniform(-1.0, 1.0));
  return c;
}

double interior_rel_l2(const std::vector<double>& a, const std::vector<double>& b,
                       std::size_t lo, std::size_t hi) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("hann_window closed-form values") {
  auto w4 = spectral::hann_window(4);
  CHECK(w4[0] == 0.0);
  CHECK(w4[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w4[2] == 1.0);
  CHECK(w4[3] == doctest::Approx(0.5).epsilon(1e-15));

  auto w2 = spectral::hann_window(2);
  CHECK(w2[0] == 0.0);
  CHECK(w2[1] == 1.0);

  CHECK_THROWS_AS(spectral::hann_window(1), std::invalid_argument);
}

TEST_CASE("hann_window sums to n/2") {
  auto w = spectral::hann_window(2048);
  double sum = 0.0;
  for (double v : w) sum += v;
  CHECK(std::fabs(sum - 1024.0) < 1e-9);
}

TEST_CASE("hann_window is symmetric about n/2") {
  auto w = spectral::hann_window(256);
  for (int k = 1; k < 256; ++k) CHECK(w[k] == doctest::Approx(w[256 - k]).epsilon(1e-14));
}

TEST_CASE("stft shape and zero input") {
  StftConfig cfg{2048, 512};
  CHECK(cfg.bins() == 1025);

  audio::AudioClip silence;
  silence.rate = 8000;
  silence.samples.assign(4096, 0.0);
  auto spec = spectral::stft(silence, {256, 64});
  CHECK(spec.frames == (4096 - 256) / 64 + 1);
  CHECK(spec.bins == 129);
  for (const auto& v : spec.data) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("stft rejects short clips") {
  audio::AudioClip c = random_clip(1, 100);
  CHECK_THROWS_AS(spectral::stft(c, {256, 64}), std::invalid_argument);
}

TEST_CASE("stft matches the naive DFT oracle") {
  StftConfig cfg{64, 16};
  audio::AudioClip c = random_clip(42, 256);
  auto spec = spectral::stft(c, cfg);
  auto window = spectral::hann_window(64);

  for (int t : {0, 3, spec.frames - 1}) {
    std::vector<double> frame(64);
    for (int j = 0; j < 64; ++j) frame[j] = c.samples[t * 16 + j] * window[j];
    auto ref = naive_dft(frame);
    for (int f = 0; f < spec.bins; ++f)
      CHECK(std::abs(spec.at(t, f) - ref[f]) < 1e-10);
  }
}

TEST_CASE("bin-centered cosine concentrates around its bin") {
  const int win = 256, hop = 64, k = 37;
  const int rate = 8000;
  audio::AudioClip c;
  c.rate = rate;
  const double freq = static_cast<double>(k) * rate / win;
  for (int i = 0; i < win * 8; ++i)
    c.samples.push_back(std::cos(2.0 * std::numbers::pi * freq * i / rate));

  auto spec = spectral::stft(c, {win, hop});
  for (int t = 1; t + 1 < spec.frames; ++t) {
    double total = 0.0, near = 0.0;
    int argmax = 0;
    double best = -1.0;
    for (int f = 0; f < spec.bins; ++f) {
      const double e = std::norm(spec.at(t, f));
      total += e;
      if (f >= k - 1 && f <= k + 1) near += e;
      if (e > best) {
        best = e;
        argmax = f;
      }
    }
    CHECK(argmax == k);
    CHECK(near / total >= 0.99);
  }
}

TEST_CASE("istft round trip, paper-scale config") {
  StftConfig cfg{2048, 512};
  audio::AudioClip c = random_clip(7, 5 * 2048, 44100);
  auto back = spectral::istft(spectral::stft(c, cfg));
  REQUIRE(back.samples.size() == c.samples.size());
  CHECK(back.rate == c.rate);
  double err = interior_rel_l2(back.samples, c.samples, 2048, c.samples.size() - 2048);
  CHECK(err < 1e-10);
}

TEST_CASE("istft round trip at quarter-window hop stays below -100 dB") {
  StftConfig cfg{256, 64};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    audio::AudioClip c = random_clip(100 + seed, 4 * 4096);
    auto back = spectral::istft(spectral::stft(c, cfg));
    double err = interior_rel_l2(back.samples, c.samples, 256, c.samples.size() - 256);
    CHECK(20.0 * std::log10(err) <= -100.0);
  }
}

TEST_CASE("istft preserves a sinusoid at 75% overlap") {
  StftConfig cfg{256, 64};
  audio::AudioClip c;
  c.rate = 8000;
  for (int i = 0; i < 4096; ++i)
    c.samples.push_back(0.7 * std::sin(2.0 * std::numbers::pi * 440.0 * i / 8000.0));
  auto back = spectral::istft(spectral::stft(c, cfg));
  for (std::size_t i = 256; i < c.samples.size() - 256; ++i)
    CHECK(std::fabs(back.samples[i] - c.samples[i]) < 1e-9);
}

TEST_CASE("istft of an all-zero spectrogram is silence") {
  audio::AudioClip silence;
  silence.rate = 8000;
  silence.samples.assign(2048, 0.0);
  auto spec = spectral::stft(silence, {256, 64});
  auto back = spectral::istft(spec);
  for (double s : back.samples) CHECK(s == 0.0);
}

TEST_CASE("istft validates dimensions") {
  audio::AudioClip c = random_clip(3, 2048);
  auto spec = spectral::stft(c, {256, 64});
  spec.data.pop_back();
  CHECK_THROWS_AS(spectral::istft(spec), std::invalid_argument);
}

TEST_CASE("stft is linear") {
  StftConfig cfg{256, 64};
  audio::AudioClip x = random_clip(21, 2048);
  audio::AudioClip y = random_clip(22, 2048);
  const double a = 0.37, b = -1.9;
  audio::AudioClip z = x;
  for (std::size_t i = 0; i < z.samples.size(); ++i)
    z.samples[i] = a * x.samples[i] + b * y.samples[i];

  auto sx = spectral::stft(x, cfg), sy = spectral::stft(y, cfg), sz = spectral::stft(z, cfg);
  double max_rel = 0.0;
  for (std::size_t i = 0; i < sz.data.size(); ++i) {
    std::complex<double> combo = a * sx.data[i] + b * sy.data[i];
    double denom = std::max(1.0, std::abs(sz.data[i]));
    max_rel = std::max(max_rel, std::abs(sz.data[i] - combo) / denom);
  }
  CHECK(max_rel < 1e-12);
}

TEST_CASE("frame energy satisfies Parseval against the windowed signal") {
  StftConfig cfg{256, 64};
  audio::AudioClip c = random_clip(55, 2048);
  auto spec = spectral::stft(c, cfg);
  auto window = spectral::hann_window(256);

  for (int t : {0, 5, spec.frames - 1}) {
    double time_energy = 0.0;
    for (int j = 0; j < 256; ++j) {
      const double v = c.samples[t * 64 + j] * window[j];
      time_energy += v * v;
    }
    // Hermitian completion: interior bins count twice
    double freq_energy = std::norm(spec.at(t, 0)) + std::norm(spec.at(t, 128));
    for (int f = 1; f < 128; ++f) freq_energy += 2.0 * std::norm(spec.at(t, f));
    CHECK(freq_energy == doctest::Approx(256.0 * time_energy).epsilon(1e-9));
  }
}

TEST_CASE("magnitude is the entrywise modulus") {
  spectral::ComplexSpectrogram spec;
  spec.frames = 1;
  spec.bins = 2;
  spec.config = {2, 1};
  spec.original_len = 2;
  spec.rate = 8000;
  spec.data = {{3.0, 4.0}, {0.0, 0.0}};
  auto mag = spectral::magnitude(spec);
  CHECK(mag.at(0, 0) == 5.0);
  CHECK(mag.at(0, 1) == 0.0);
}

TEST_CASE("magnitude of an stft is nonnegative") {
  auto spec = spectral::stft(random_clip(9, 2048), {256, 64});
  auto mag = spectral::magnitude(spec);
  for (double v : mag.data) CHECK(v >= 0.0);
}
