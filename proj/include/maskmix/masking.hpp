#ifndef MASKMIX_MASKING_HPP
#define MASKMIX_MASKING_HPP

#include <cstdint>
#include <vector>

#include "maskmix/spectral.hpp"

namespace maskmix::masking {

struct BinaryMask {
  int frames = 0;
  int bins = 0;
  std::vector<std::uint8_t> data;  // 0 or 1

  std::uint8_t& at(int t, int f) { return data[static_cast<std::size_t>(t) * bins + f]; }
  std::uint8_t at(int t, int f) const { return data[static_cast<std::size_t>(t) * bins + f]; }
};

// Per-cell mean of all sliding-window predictions covering that cell, plus
// the covering-window count (equals the window size on interior frames).
struct PredictionField {
  int frames = 0;
  int bins = 0;
  std::vector<double> values;  // in [0, 1]
  std::vector<int> coverage;

  double value_at(int t, int f) const { return values[static_cast<std::size_t>(t) * bins + f]; }
  int coverage_at(int t, int f) const { return coverage[static_cast<std::size_t>(t) * bins + f]; }
};

// Entries are exactly 1 (cell untouched) or g (cell scaled).
struct ScalingMatrix {
  int frames = 0;
  int bins = 0;
  std::vector<double> data;

  double at(int t, int f) const { return data[static_cast<std::size_t>(t) * bins + f]; }
};

class Confidence {
 public:
  explicit Confidence(double alpha);
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

// One sliding-window prediction: `values` is a frames x bins grid starting at
// frame `offset` of the full spectrogram.
struct PredictionWindow {
  int offset = 0;
  int frames = 0;
  int bins = 0;
  std::vector<double> values;
};

// 1 where vocal magnitude strictly dominates; ties (including silence) go to
// 0 so untouched regions stay untouched in the remix.
BinaryMask ideal_binary_mask(const spectral::MagnitudeSpectrogram& vocal,
                             const spectral::MagnitudeSpectrogram& accomp);

// Windows must sit at contiguous offsets 0, 1, ..., all with equal frame and
// bin counts. Edge cells are averaged over their actual coverage. Values are
// clamped to [0, 1] before averaging.
PredictionField aggregate_predictions(const std::vector<PredictionWindow>& windows,
                                      int total_frames);

// Strict comparison: mask = 1 iff field value > alpha.
BinaryMask threshold_mask(const PredictionField& field, Confidence alpha);

ScalingMatrix scaling_matrix(const BinaryMask& mask, double gain);

// The gain-to-decibel convention used throughout: db = 10*log10(g), i.e.
// g = 10^(db/10), applied to spectrogram (amplitude) cells as-is.
double db_to_gain(double db);

}  // namespace maskmix::masking

#endif  // MASKMIX_MASKING_HPP
