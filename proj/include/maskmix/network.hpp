#ifndef MASKMIX_NETWORK_HPP
#define MASKMIX_NETWORK_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "maskmix/masking.hpp"
#include "maskmix/spectral.hpp"

namespace maskmix::network {

struct PatchConfig {
  int t_frames = 20;   // frames per patch
  int train_hop = 60;  // offset stride in train mode; inference stride is fixed at 1
};

enum class PatchMode { train, infer };

// Input (and target, when present) is the patch's frames x bins grid
// flattened frame-major: frame 0's bins, then frame 1's bins, ...
struct Patch {
  int offset = 0;
  std::vector<double> input;
  std::optional<std::vector<double>> target;
};

// Fully connected net with logistic sigmoid on every layer, including the
// output. The output layer has no bias term; hidden_biases holds one vector
// per hidden layer. weights[l] has shape layer_dims[l+1] x layer_dims[l].
struct MlpModel {
  std::vector<int> layer_dims;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> hidden_biases;
};

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;  // drives both initialization and epoch shuffles
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean per-patch loss over each sweep
  double heldout_accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> hidden_biases;
};

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] drawn layer by layer,
// row-major, from SplitMix64(seed); hidden biases start at zero.
MlpModel make_model(const std::vector<int>& layer_dims, std::uint64_t seed);

// Train mode: offsets 0, train_hop, 2*train_hop, ... while offset + T fits;
// infer mode: every offset 0 .. frames - T. The mask, when given, supplies
// per-patch targets.
std::vector<Patch> extract_patches(const spectral::MagnitudeSpectrogram& mag,
                                   const masking::BinaryMask* mask, const PatchConfig& cfg,
                                   PatchMode mode);

// Affine-then-sigmoid per layer; outputs clamped to (0, 1) at double
// precision so downstream cross-entropy stays finite.
std::vector<double> forward(const MlpModel& model, const std::vector<double>& input);

// Binary cross-entropy averaged over output units.
double bce_loss(const std::vector<double>& output, const std::vector<double>& target);

// Backprop of bce_loss through the net for a single example. The output
// layer's bias is pinned at zero, so no gradient is produced for it.
Gradients compute_gradients(const MlpModel& model, const std::vector<double>& input,
                            const std::vector<double>& target, double* loss_out = nullptr);

// Plain per-example SGD: each epoch reshuffles (seeded) and sweeps all
// patches once. Throws if the loss goes non-finite, naming the epoch.
// heldout patches, if any, only feed the report's mask accuracy.
std::pair<MlpModel, TrainReport> train(MlpModel model, const std::vector<Patch>& patches,
                                       const TrainConfig& cfg,
                                       const std::vector<Patch>& heldout = {});

// Sliding-window inference at stride 1, aggregated into a prediction field.
masking::PredictionField predict_field(const MlpModel& model,
                                       const spectral::MagnitudeSpectrogram& mag,
                                       const PatchConfig& cfg);

// JSON model file: format_version, layer_dims, weights (nested row-major),
// hidden_biases, activation. Parameters are written with 17 significant
// digits so doubles round-trip exactly.
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

// Test instrumentation: counts predict_field calls since the last reset.
std::uint64_t predict_field_invocations() noexcept;
void reset_predict_field_invocations() noexcept;

}  // namespace maskmix::network

#endif  // MASKMIX_NETWORK_HPP
