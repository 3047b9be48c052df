#ifndef MASKMIX_AUDIO_HPP
#define MASKMIX_AUDIO_HPP

#include <filesystem>
#include <vector>

namespace maskmix::audio {

// Monaural signal, double precision throughout; quantization happens only at
// WAV write time.
struct AudioClip {
  std::vector<double> samples;
  int rate = 0;  // Hz
};

struct StemSet {
  std::vector<AudioClip> vocal_stems;
  std::vector<AudioClip> accomp_stems;
};

// mixture = vocal_mix + accomp_mix sample-exactly; both mixes peak at 1.0.
// The final sum is deliberately not re-normalized, so the mixture peak may
// reach 2.0.
struct MixBundle {
  AudioClip vocal_mix;
  AudioClip accomp_mix;
  AudioClip mixture;
};

enum class WavEncoding { pcm16, float32 };

double peak_abs(const AudioClip& clip);

// Mono RIFF/WAVE, PCM 16-bit or IEEE float 32-bit. 16-bit samples are scaled
// by 1/32768. Multichannel files are rejected.
AudioClip read_wav(const std::filesystem::path& path);

// pcm16 clamps to [-1, 1] and rounds to nearest; float32 stores the sample
// value unclipped (single precision).
void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               WavEncoding encoding);

// Scales so the peak absolute sample is exactly 1. All-zero input is an
// error ("degenerate silent signal").
AudioClip peak_normalize(const AudioClip& clip);

// Per-stem peak normalization, group sums, group normalization, then the
// final un-normalized sum.
MixBundle mix_stems(const StemSet& stems);

}  // namespace maskmix::audio

#endif  // MASKMIX_AUDIO_HPP
