#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "maskmix/dataset.hpp"
#include "maskmix/masking.hpp"
#include "maskmix/spectral.hpp"

using namespace maskmix;
using dataset::SongSpec;

namespace {

SongSpec desk_spec(std::uint64_t seed, int n_vocal = 1, int n_accomp = 2) {
  SongSpec s;
  s.seed = seed;
  s.duration_s = 3.0;
  s.rate = 8000;
  s.n_vocal = n_vocal;
  s.n_accomp = n_accomp;
  return s;
}

bool clips_equal(const audio::AudioClip& a, const audio::AudioClip& b) {
  return a.rate == b.rate && a.samples == b.samples;
}

// Fraction of total magnitude mass in cells where both sources exceed 1% of
// their own peak.
double spectral_overlap_score(const spectral::MagnitudeSpectrogram& v,
                              const spectral::MagnitudeSpectrogram& a) {
  double v_peak = 0.0, a_peak = 0.0;
  for (double x : v.data) v_peak = std::max(v_peak, x);
  for (double x : a.data) a_peak = std::max(a_peak, x);
  double overlap_mass = 0.0, total_mass = 0.0;
  for (std::size_t i = 0; i < v.data.size(); ++i) {
    const double cell = v.data[i] + a.data[i];
    total_mass += cell;
    if (v.data[i] > 0.01 * v_peak && a.data[i] > 0.01 * a_peak) overlap_mass += cell;
  }
  return overlap_mass / total_mass;
}

}  // namespace

TEST_CASE("synth_song is deterministic") {
  SongSpec spec = desk_spec(12345);
  audio::StemSet a = dataset::synth_song(spec);
  audio::StemSet b = dataset::synth_song(spec);
  REQUIRE(a.vocal_stems.size() == b.vocal_stems.size());
  REQUIRE(a.accomp_stems.size() == b.accomp_stems.size());
  for (std::size_t i = 0; i < a.vocal_stems.size(); ++i)
    CHECK(clips_equal(a.vocal_stems[i], b.vocal_stems[i]));
  for (std::size_t i = 0; i < a.accomp_stems.size(); ++i)
    CHECK(clips_equal(a.accomp_stems[i], b.accomp_stems[i]));
}

TEST_CASE("synth_song shape follows the spec") {
  SongSpec spec = desk_spec(99, 1, 2);
  audio::StemSet stems = dataset::synth_song(spec);
  CHECK(stems.vocal_stems.size() == 1);
  CHECK(stems.accomp_stems.size() == 2);
  const std::size_t expected = 3 * 8000;
  for (const auto& c : stems.vocal_stems) CHECK(c.samples.size() == expected);
  for (const auto& c : stems.accomp_stems) CHECK(c.samples.size() == expected);
}

TEST_CASE("every stem is finite and non-silent") {
  for (std::uint64_t seed : {1ULL, 202ULL, 9999ULL}) {
    audio::StemSet stems = dataset::synth_song(desk_spec(seed, 2, 4));
    auto check_clip = [](const audio::AudioClip& c) {
      CHECK(audio::peak_abs(c) > 0.0);
      for (double s : c.samples) CHECK(std::isfinite(s));
    };
    for (const auto& c : stems.vocal_stems) check_clip(c);
    for (const auto& c : stems.accomp_stems) check_clip(c);
  }
}

TEST_CASE("make_corpus assigns sequential seeds and split sizes") {
  dataset::Corpus corpus = dataset::make_corpus(2, 1, 7, desk_spec(0));
  REQUIRE(corpus.train_songs.size() == 2);
  REQUIRE(corpus.test_songs.size() == 1);
  CHECK(corpus.train_songs[0].spec.seed == 7);
  CHECK(corpus.train_songs[1].spec.seed == 8);
  CHECK(corpus.test_songs[0].spec.seed == 9);
}

TEST_CASE("make_corpus is deterministic and splits share no seed") {
  dataset::Corpus a = dataset::make_corpus(3, 2, 500, desk_spec(0));
  dataset::Corpus b = dataset::make_corpus(3, 2, 500, desk_spec(0));
  std::set<std::uint64_t> train_seeds, test_seeds;
  for (std::size_t i = 0; i < a.train_songs.size(); ++i) {
    train_seeds.insert(a.train_songs[i].spec.seed);
    CHECK(a.train_songs[i].spec.seed == b.train_songs[i].spec.seed);
    for (std::size_t s = 0; s < a.train_songs[i].stems.vocal_stems.size(); ++s)
      CHECK(clips_equal(a.train_songs[i].stems.vocal_stems[s],
                        b.train_songs[i].stems.vocal_stems[s]));
  }
  for (const auto& song : a.test_songs) test_seeds.insert(song.spec.seed);
  for (auto s : test_seeds) CHECK(train_seeds.count(s) == 0);
}

TEST_CASE("ideal mask density sits between 5% and 70%") {
  spectral::StftConfig cfg{256, 64};
  for (std::uint64_t seed : {11ULL, 407ULL, 3001ULL}) {
    SongSpec spec = desk_spec(seed, 1, 3);
    spec.duration_s = 6.0;
    audio::MixBundle bundle = audio::mix_stems(dataset::synth_song(spec));
    auto v = spectral::magnitude(spectral::stft(bundle.vocal_mix, cfg));
    auto a = spectral::magnitude(spectral::stft(bundle.accomp_mix, cfg));
    masking::BinaryMask ibm = masking::ideal_binary_mask(v, a);
    double ones = 0.0;
    for (auto x : ibm.data) ones += x;
    const double density = ones / static_cast<double>(ibm.data.size());
    CHECK(density > 0.05);
    CHECK(density < 0.70);
  }
}

TEST_CASE("vocal and accompaniment spectra are mostly disjoint") {
  spectral::StftConfig cfg{256, 64};
  dataset::Corpus corpus = dataset::make_corpus(9, 1, 8800, desk_spec(0, 1, 3));
  double total = 0.0;
  int n = 0;
  auto score_song = [&](const dataset::Song& song) {
    audio::MixBundle bundle = audio::mix_stems(song.stems);
    auto v = spectral::magnitude(spectral::stft(bundle.vocal_mix, cfg));
    auto a = spectral::magnitude(spectral::stft(bundle.accomp_mix, cfg));
    total += spectral_overlap_score(v, a);
    ++n;
  };
  for (const auto& song : corpus.train_songs) score_song(song);
  for (const auto& song : corpus.test_songs) score_song(song);
  const double mean_score = total / n;
  CHECK(mean_score < 0.5);
}

TEST_CASE("synth_song validates its spec") {
  SongSpec bad = desk_spec(1);
  bad.n_vocal = 0;
  CHECK_THROWS_AS(dataset::synth_song(bad), std::invalid_argument);
  bad = desk_spec(1);
  bad.duration_s = -1.0;
  CHECK_THROWS_AS(dataset::synth_song(bad), std::invalid_argument);
  CHECK_THROWS_AS(dataset::make_corpus(0, 1, 5, desk_spec(0)), std::invalid_argument);
}
