#ifndef MASKMIX_METRICS_HPP
#define MASKMIX_METRICS_HPP

#include <vector>

#include "maskmix/audio.hpp"

namespace maskmix::metrics {

struct ProjectionConfig {
  int filter_len = 512;     // taps of the allowed time-invariant distortion filter
  int exclude_edge = 256;   // samples trimmed from each end (one STFT window)
  double sar_cap_db = 200.0;
};

struct SarResult {
  double sar_db = 0.0;
  bool capped = false;
};

// Decomposition of the trimmed estimate: s_target is the least-squares
// projection onto delayed copies (lags 0..filter_len-1, zero-padded at the
// start) of the trimmed reference; e_artif is the remainder. estimate =
// s_target + e_artif holds sample-exactly over the trimmed interior.
struct Projection {
  std::vector<double> s_target;
  std::vector<double> e_artif;
};

Projection project_target(const audio::AudioClip& estimate, const audio::AudioClip& reference,
                          const ProjectionConfig& cfg);

// 10*log10(||s_target||^2 / ||e_artif||^2), capped at sar_cap_db when the
// artifact energy underflows the cap threshold.
SarResult sar(const audio::AudioClip& estimate, const audio::AudioClip& reference,
              const ProjectionConfig& cfg);

}  // namespace maskmix::metrics

#endif  // MASKMIX_METRICS_HPP
