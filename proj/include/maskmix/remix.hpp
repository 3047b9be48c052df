#ifndef MASKMIX_REMIX_HPP
#define MASKMIX_REMIX_HPP

#include <utility>

#include "maskmix/audio.hpp"
#include "maskmix/masking.hpp"
#include "maskmix/spectral.hpp"

namespace maskmix::remix {

struct RemixRequest {
  audio::AudioClip mixture;
  masking::ScalingMatrix scaling;
  spectral::StftConfig stft_config;
};

// istft(stft(mixture) .* scaling). Output length equals the mixture length;
// values are neither renormalized nor clipped.
audio::AudioClip apply_remix(const RemixRequest& req);

// The ideal linear remix: gain applied to the vocal signal before summing
// with the untouched accompaniment.
audio::AudioClip reference_remix(const audio::AudioClip& vocal_mix,
                                 const audio::AudioClip& accomp_mix, double gain);

// The do-nothing comparator: (unprocessed mixture, ideal remix at g).
std::pair<audio::AudioClip, audio::AudioClip> baseline_pair(const audio::MixBundle& bundle,
                                                            double gain);

}  // namespace maskmix::remix

#endif  // MASKMIX_REMIX_HPP
