#include "maskmix/masking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maskmix::masking {

Confidence::Confidence(double alpha) : alpha_(alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("Confidence: alpha must be in [0, 1]");
}

BinaryMask ideal_binary_mask(const spectral::MagnitudeSpectrogram& vocal,
                             const spectral::MagnitudeSpectrogram& accomp) {
  if (vocal.frames != accomp.frames || vocal.bins != accomp.bins)
    throw std::invalid_argument("ideal_binary_mask: dimension mismatch");
  BinaryMask mask;
  mask.frames = vocal.frames;
  mask.bins = vocal.bins;
  mask.data.resize(vocal.data.size());
  for (std::size_t i = 0; i < vocal.data.size(); ++i)
    mask.data[i] = vocal.data[i] > accomp.data[i] ? 1 : 0;
  return mask;
}

PredictionField aggregate_predictions(const std::vector<PredictionWindow>& windows,
                                      int total_frames) {
  if (windows.empty()) throw std::invalid_argument("aggregate_predictions: empty window list");
  const int t_frames = windows.front().frames;
  const int bins = windows.front().bins;
  if (t_frames < 1 || bins < 1)
    throw std::invalid_argument("aggregate_predictions: degenerate window dimensions");
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto& win = windows[w];
    if (win.frames != t_frames || win.bins != bins ||
        win.values.size() != static_cast<std::size_t>(t_frames) * bins)
      throw std::invalid_argument("aggregate_predictions: window dimensions inconsistent");
    if (win.offset != static_cast<int>(w))
      throw std::invalid_argument("aggregate_predictions: offsets must be contiguous at stride 1");
  }
  const int last_offset = static_cast<int>(windows.size()) - 1;
  if (total_frames != last_offset + t_frames)
    throw std::invalid_argument("aggregate_predictions: total_frames inconsistent with windows");

  PredictionField field;
  field.frames = total_frames;
  field.bins = bins;
  field.values.assign(static_cast<std::size_t>(total_frames) * bins, 0.0);
  field.coverage.assign(static_cast<std::size_t>(total_frames) * bins, 0);

  for (const auto& win : windows) {
    for (int i = 0; i < t_frames; ++i) {
      const std::size_t dst = static_cast<std::size_t>(win.offset + i) * bins;
      const std::size_t src = static_cast<std::size_t>(i) * bins;
      for (int f = 0; f < bins; ++f) {
        double v = std::clamp(win.values[src + f], 0.0, 1.0);
        field.values[dst + f] += v;
        field.coverage[dst + f] += 1;
      }
    }
  }
  for (std::size_t i = 0; i < field.values.size(); ++i) field.values[i] /= field.coverage[i];
  return field;
}

BinaryMask threshold_mask(const PredictionField& field, Confidence alpha) {
  BinaryMask mask;
  mask.frames = field.frames;
  mask.bins = field.bins;
  mask.data.resize(field.values.size());
  const double a = alpha.value();
  for (std::size_t i = 0; i < field.values.size(); ++i)
    mask.data[i] = field.values[i] > a ? 1 : 0;
  return mask;
}

ScalingMatrix scaling_matrix(const BinaryMask& mask, double gain) {
  if (!(gain > 0.0) || !std::isfinite(gain))
    throw std::invalid_argument("scaling_matrix: gain must be positive and finite");
  ScalingMatrix z;
  z.frames = mask.frames;
  z.bins = mask.bins;
  z.data.resize(mask.data.size());
  for (std::size_t i = 0; i < mask.data.size(); ++i)
    z.data[i] = mask.data[i] ? gain : 1.0;
  return z;
}

double db_to_gain(double db) {
  if (!std::isfinite(db)) throw std::invalid_argument("db_to_gain: db must be finite");
  return std::pow(10.0, db / 10.0);
}

}  // namespace maskmix::masking
