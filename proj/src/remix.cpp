#include "maskmix/remix.hpp"

#include <cmath>
#include <stdexcept>

namespace maskmix::remix {

audio::AudioClip apply_remix(const RemixRequest& req) {
  spectral::ComplexSpectrogram spec = spectral::stft(req.mixture, req.stft_config);
  if (req.scaling.frames != spec.frames || req.scaling.bins != spec.bins)
    throw std::invalid_argument("apply_remix: scaling dimensions mismatch spectrogram");
  for (std::size_t i = 0; i < spec.data.size(); ++i) spec.data[i] *= req.scaling.data[i];
  return spectral::istft(spec);
}

audio::AudioClip reference_remix(const audio::AudioClip& vocal_mix,
                                 const audio::AudioClip& accomp_mix, double gain) {
  if (vocal_mix.samples.size() != accomp_mix.samples.size())
    throw std::invalid_argument("reference_remix: length mismatch");
  if (vocal_mix.rate != accomp_mix.rate)
    throw std::invalid_argument("reference_remix: rate mismatch");
  if (!std::isfinite(gain)) throw std::invalid_argument("reference_remix: non-finite gain");

  audio::AudioClip out;
  out.rate = vocal_mix.rate;
  out.samples.resize(vocal_mix.samples.size());
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] = gain * vocal_mix.samples[i] + accomp_mix.samples[i];
  return out;
}

std::pair<audio::AudioClip, audio::AudioClip> baseline_pair(const audio::MixBundle& bundle,
                                                            double gain) {
  return {bundle.mixture, reference_remix(bundle.vocal_mix, bundle.accomp_mix, gain)};
}

}  // namespace maskmix::remix
