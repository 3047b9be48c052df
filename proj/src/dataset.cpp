#include "maskmix/dataset.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "maskmix/rng.hpp"

namespace maskmix::dataset {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// Raised-cosine gate: phrase-like on/off bursts with ~25 ms edges.
class PhraseGate {
 public:
  PhraseGate(SplitMix64& rng, double duration_s, int rate) : rate_(rate) {
    double t = 0.0;
    bool on = true;  // first segment is always a phrase, so stems are non-silent
    while (t < duration_s) {
      double seg = on ? rng.uniform(0.6, 1.5) : rng.uniform(0.2, 0.6);
      segments_.push_back({t, t + seg, on});
      t += seg;
      on = !on;
    }
  }

  double at(std::size_t i) const {
    const double t = static_cast<double>(i) / rate_;
    for (const auto& s : segments_) {
      if (t >= s.begin && t < s.end) {
        if (!s.on) return 0.0;
        const double ramp = 0.025;
        double x = 1.0;
        if (t - s.begin < ramp) x = 0.5 - 0.5 * std::cos(std::numbers::pi * (t - s.begin) / ramp);
        if (s.end - t < ramp)
          x = std::min(x, 0.5 - 0.5 * std::cos(std::numbers::pi * (s.end - t) / ramp));
        return x;
      }
    }
    return 0.0;
  }

 private:
  struct Segment {
    double begin, end;
    bool on;
  };
  std::vector<Segment> segments_;
  int rate_;
};

audio::AudioClip synth_vocal(std::uint64_t seed, std::size_t n, int rate, double duration_s) {
  SplitMix64 rng(seed);
  const double f0 = rng.uniform(150.0, 400.0);
  const int harmonics = 4 + static_cast<int>(rng.below(5));  // 4..8
  const double vib_rate = rng.uniform(4.0, 7.0);
  const double vib_depth = rng.uniform(0.008, 0.02);
  const double vib_phase = rng.uniform(0.0, kTau);
  const double env_rate = rng.uniform(0.1, 0.4);
  const double env_phase = rng.uniform(0.0, kTau);

  std::vector<double> amps(harmonics);
  for (int h = 0; h < harmonics; ++h) amps[h] = (0.7 + 0.6 * rng.uniform()) / (h + 1);

  PhraseGate gate(rng, duration_s, rate);

  audio::AudioClip clip;
  clip.rate = rate;
  clip.samples.resize(n);
  std::vector<double> phases(harmonics, 0.0);
  for (int h = 0; h < harmonics; ++h) phases[h] = rng.uniform(0.0, kTau);

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double freq = f0 * (1.0 + vib_depth * std::sin(kTau * vib_rate * t + vib_phase));
    const double env = 0.6 + 0.4 * std::sin(kTau * env_rate * t + env_phase);
    double s = 0.0;
    for (int h = 0; h < harmonics; ++h) {
      phases[h] += kTau * (h + 1) * freq / rate;
      s += amps[h] * std::sin(phases[h]);
    }
    clip.samples[i] = s * env * gate.at(i);
  }
  return clip;
}

audio::AudioClip synth_bass(std::uint64_t seed, std::size_t n, int rate) {
  SplitMix64 rng(seed);
  const double f1 = rng.uniform(40.0, 130.0);
  double f2 = f1 * rng.uniform(1.05, 1.3);
  if (f2 > 145.0) f2 = f1 * 0.75;
  const double note_len = rng.uniform(0.4, 0.8);
  const double phase0 = rng.uniform(0.0, kTau);

  audio::AudioClip clip;
  clip.rate = rate;
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const int note = static_cast<int>(t / note_len);
    const double f = (note % 2 == 0) ? f1 : f2;
    const double t_in = t - note * note_len;
    // pluck-like: 4 ms attack, slow decay
    const double env = std::min(1.0, t_in / 0.004) * std::exp(-t_in / 0.35);
    const double s = std::sin(kTau * f * t + phase0) + 0.3 * std::sin(2.0 * kTau * f * t + phase0);
    clip.samples[i] = 0.9 * s * env;
  }
  return clip;
}

// Noise bursts through a two-pole resonator, plus a quiet broadband bed so
// the accompaniment keeps a deterministic floor in otherwise-empty cells.
audio::AudioClip synth_drums(std::uint64_t seed, std::size_t n, int rate) {
  SplitMix64 rng(seed);
  const double hit_period = rng.uniform(0.3, 0.55);
  const double decay_s = rng.uniform(0.03, 0.06);
  const double fc = rng.uniform(900.0, 3000.0);
  const double q = rng.uniform(1.5, 4.0);
  const double bed_amp = 0.006;

  // resonator coefficients (two-pole bandpass)
  const double r = std::exp(-kTau * fc / (2.0 * q * rate));
  const double a1 = -2.0 * r * std::cos(kTau * fc / rate);
  const double a2 = r * r;

  audio::AudioClip clip;
  clip.rate = rate;
  clip.samples.resize(n);
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double t_in = std::fmod(t, hit_period);
    const double white = 2.0 * rng.uniform() - 1.0;
    double x = bed_amp * white;
    if (t_in < 0.12) x += white * std::exp(-t_in / decay_s);  // sharp attack burst
    const double y = x - a1 * y1 - a2 * y2;
    y2 = y1;
    y1 = y;
    clip.samples[i] = 0.8 * y * (1.0 - r) + bed_amp * white;
  }
  return clip;
}

audio::AudioClip synth_pad(std::uint64_t seed, std::size_t n, int rate,
                           const std::vector<double>& vocal_f0s) {
  SplitMix64 rng(seed);
  double f = 0.0;
  bool placed = false;
  for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
    f = rng.uniform(450.0, 3500.0);
    placed = true;
    for (double f0 : vocal_f0s) {
      for (int h = 1; h <= 10; ++h) {
        const double hf = h * f0;
        if (hf > 4000.0) break;
        if (std::fabs(f - hf) / hf < 0.06) placed = false;
      }
    }
  }
  if (!placed && !vocal_f0s.empty()) f = vocal_f0s.front() * 6.5;  // midway on the grid

  const double lfo_rate = rng.uniform(0.05, 0.2);
  const double lfo_phase = rng.uniform(0.0, kTau);
  const double phase0 = rng.uniform(0.0, kTau);
  const double detune = rng.uniform(0.9995, 1.0005);

  audio::AudioClip clip;
  clip.rate = rate;
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double env = 0.75 + 0.25 * std::sin(kTau * lfo_rate * t + lfo_phase);
    clip.samples[i] = 0.7 * env *
                      (std::sin(kTau * f * t + phase0) + 0.5 * std::sin(kTau * f * detune * t));
  }
  return clip;
}

// Vocal fundamental of stem `seed`, re-derived with the same draw order as
// synth_vocal so pads can avoid the harmonic grid.
double vocal_f0_of(std::uint64_t seed) {
  SplitMix64 rng(seed);
  return rng.uniform(150.0, 400.0);
}

}  // namespace

audio::StemSet synth_song(const SongSpec& spec) {
  if (spec.duration_s <= 0.0 || spec.rate <= 0)
    throw std::invalid_argument("synth_song: duration and rate must be positive");
  if (spec.n_vocal < 1 || spec.n_accomp < 1)
    throw std::invalid_argument("synth_song: need at least one stem per group");

  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.rate));

  // Fixed draw order: all stem seeds first, so stem content is independent of
  // how the stems are later consumed.
  SplitMix64 song_rng(spec.seed);
  std::vector<std::uint64_t> vocal_seeds(spec.n_vocal);
  std::vector<std::uint64_t> accomp_seeds(spec.n_accomp);
  for (auto& s : vocal_seeds) s = song_rng.next();
  for (auto& s : accomp_seeds) s = song_rng.next();

  std::vector<double> f0s;
  f0s.reserve(vocal_seeds.size());
  for (auto s : vocal_seeds) f0s.push_back(vocal_f0_of(s));

  audio::StemSet stems;
  for (int i = 0; i < spec.n_vocal; ++i)
    stems.vocal_stems.push_back(synth_vocal(vocal_seeds[i], n, spec.rate, spec.duration_s));
  for (int j = 0; j < spec.n_accomp; ++j) {
    switch (j % 3) {
      case 0:
        stems.accomp_stems.push_back(synth_drums(accomp_seeds[j], n, spec.rate));
        break;
      case 1:
        stems.accomp_stems.push_back(synth_bass(accomp_seeds[j], n, spec.rate));
        break;
      default:
        stems.accomp_stems.push_back(synth_pad(accomp_seeds[j], n, spec.rate, f0s));
        break;
    }
  }
  return stems;
}

Corpus make_corpus(int n_train, int n_test, std::uint64_t base_seed,
                   const SongSpec& template_spec) {
  if (n_train < 1 || n_test < 1)
    throw std::invalid_argument("make_corpus: n_train and n_test must be >= 1");

  Corpus corpus;
  for (int k = 0; k < n_train + n_test; ++k) {
    SongSpec spec = template_spec;
    spec.seed = base_seed + static_cast<std::uint64_t>(k);
    SplitMix64 jitter(spec.seed + kRngStreamGamma);
    spec.n_vocal = std::max(1, template_spec.n_vocal + static_cast<int>(jitter.below(2)));
    spec.n_accomp = std::max(1, template_spec.n_accomp - 1 + static_cast<int>(jitter.below(3)));
    Song song{spec, synth_song(spec)};
    if (k < n_train)
      corpus.train_songs.push_back(std::move(song));
    else
      corpus.test_songs.push_back(std::move(song));
  }
  return corpus;
}

}  // namespace maskmix::dataset
