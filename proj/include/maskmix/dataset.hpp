#ifndef MASKMIX_DATASET_HPP
#define MASKMIX_DATASET_HPP

#include <cstdint>
#include <vector>

#include "maskmix/audio.hpp"

namespace maskmix::dataset {

struct SongSpec {
  std::uint64_t seed = 0;
  double duration_s = 6.0;
  int rate = 8000;
  int n_vocal = 1;
  int n_accomp = 3;
};

struct Song {
  SongSpec spec;
  audio::StemSet stems;
};

struct Corpus {
  std::vector<Song> train_songs;
  std::vector<Song> test_songs;
};

// Deterministic stand-in for a multitrack corpus. Vocal stems are harmonic
// complexes (fundamental 150-400 Hz, 4-8 partials) with 4-7 Hz vibrato and
// phrase gating; accompaniment stems cycle through drum-like noise bursts
// (over a quiet broadband bed), sub-150 Hz bass tones, and sustained mid-band
// pad tones placed away from the song's vocal harmonic grid. Bit-identical
// output for identical specs.
audio::StemSet synth_song(const SongSpec& spec);

// Songs take seeds base_seed .. base_seed + n_train + n_test - 1, first
// n_train in the train split. Stem counts are jittered deterministically
// around the template's.
Corpus make_corpus(int n_train, int n_test, std::uint64_t base_seed,
                   const SongSpec& template_spec);

}  // namespace maskmix::dataset

#endif  // MASKMIX_DATASET_HPP
