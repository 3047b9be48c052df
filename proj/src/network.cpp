#include "maskmix/network.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>
#include <string>

#include "maskmix/rng.hpp"

namespace maskmix::network {

namespace {

using json = nlohmann::json;

std::atomic<std::uint64_t> g_predict_field_calls{0};

// Smallest representable margin from 0 and 1: keeps outputs strictly inside
// (0, 1) even when the pre-activation saturates the double-precision sigmoid.
constexpr double kUnitEps = 1.1102230246251565e-16;  // 2^-53

double sigmoid(double z) {
  double s;
  if (z >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    s = e / (1.0 + e);
  }
  return std::min(1.0 - kUnitEps, std::max(kUnitEps, s));
}

void validate_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) throw std::invalid_argument("MlpModel: need at least input and output dims");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("MlpModel: layer dims must be positive");
}

void validate_model(const MlpModel& model) {
  validate_dims(model.layer_dims);
  const std::size_t layers = model.layer_dims.size() - 1;
  if (model.weights.size() != layers || model.hidden_biases.size() != layers - 1)
    throw std::invalid_argument("MlpModel: parameter count inconsistent with layer_dims");
  for (std::size_t l = 0; l < layers; ++l) {
    if (model.weights[l].rows() != model.layer_dims[l + 1] ||
        model.weights[l].cols() != model.layer_dims[l])
      throw std::invalid_argument("MlpModel: weight shape mismatch at layer " + std::to_string(l));
    if (l + 1 < layers && model.hidden_biases[l].size() != model.layer_dims[l + 1])
      throw std::invalid_argument("MlpModel: bias shape mismatch at layer " + std::to_string(l));
  }
}

// Forward pass keeping all layer activations (a[0] is the input).
std::vector<Eigen::VectorXd> forward_activations(const MlpModel& model,
                                                 const Eigen::VectorXd& input) {
  const std::size_t layers = model.layer_dims.size() - 1;
  std::vector<Eigen::VectorXd> acts(layers + 1);
  acts[0] = input;
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::VectorXd z = model.weights[l] * acts[l];
    if (l + 1 < layers) z += model.hidden_biases[l];
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]);
    acts[l + 1] = std::move(z);
  }
  return acts;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

constexpr int kModelFormatVersion = 1;

}  // namespace

MlpModel make_model(const std::vector<int>& layer_dims, std::uint64_t seed) {
  validate_dims(layer_dims);
  MlpModel model;
  model.layer_dims = layer_dims;
  SplitMix64 rng(seed);
  const std::size_t layers = layer_dims.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int rows = layer_dims[l + 1];
    const int cols = layer_dims[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    Eigen::MatrixXd w(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) w(r, c) = rng.uniform(-bound, bound);
    model.weights.push_back(std::move(w));
    if (l + 1 < layers) model.hidden_biases.push_back(Eigen::VectorXd::Zero(rows));
  }
  return model;
}

std::vector<Patch> extract_patches(const spectral::MagnitudeSpectrogram& mag,
                                   const masking::BinaryMask* mask, const PatchConfig& cfg,
                                   PatchMode mode) {
  if (cfg.t_frames < 1 || cfg.train_hop < 1)
    throw std::invalid_argument("extract_patches: t_frames and train_hop must be >= 1");
  if (mag.frames < cfg.t_frames)
    throw std::invalid_argument("extract_patches: spectrogram has fewer frames than one patch");
  if (mask && (mask->frames != mag.frames || mask->bins != mag.bins))
    throw std::invalid_argument("extract_patches: mask dimensions mismatch");

  const int stride = mode == PatchMode::train ? cfg.train_hop : 1;
  const std::size_t patch_len = static_cast<std::size_t>(cfg.t_frames) * mag.bins;

  std::vector<Patch> patches;
  for (int offset = 0; offset + cfg.t_frames <= mag.frames; offset += stride) {
    Patch p;
    p.offset = offset;
    p.input.resize(patch_len);
    for (int i = 0; i < cfg.t_frames; ++i)
      for (int f = 0; f < mag.bins; ++f)
        p.input[static_cast<std::size_t>(i) * mag.bins + f] = mag.at(offset + i, f);
    if (mask) {
      std::vector<double> target(patch_len);
      for (int i = 0; i < cfg.t_frames; ++i)
        for (int f = 0; f < mag.bins; ++f)
          target[static_cast<std::size_t>(i) * mag.bins + f] =
              static_cast<double>(mask->at(offset + i, f));
      p.target = std::move(target);
    }
    patches.push_back(std::move(p));
  }
  return patches;
}

std::vector<double> forward(const MlpModel& model, const std::vector<double>& input) {
  validate_model(model);
  if (input.size() != static_cast<std::size_t>(model.layer_dims.front()))
    throw std::invalid_argument("forward: input length mismatch");
  for (double v : input)
    if (!std::isfinite(v)) throw std::invalid_argument("forward: non-finite input");

  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(input.data(), input.size());
  auto acts = forward_activations(model, x);
  const Eigen::VectorXd& out = acts.back();
  return {out.data(), out.data() + out.size()};
}

double bce_loss(const std::vector<double>& output, const std::vector<double>& target) {
  if (output.size() != target.size() || output.empty())
    throw std::invalid_argument("bce_loss: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < output.size(); ++i)
    acc += -(target[i] * std::log(output[i]) + (1.0 - target[i]) * std::log(1.0 - output[i]));
  return acc / static_cast<double>(output.size());
}

Gradients compute_gradients(const MlpModel& model, const std::vector<double>& input,
                            const std::vector<double>& target, double* loss_out) {
  validate_model(model);
  if (input.size() != static_cast<std::size_t>(model.layer_dims.front()))
    throw std::invalid_argument("compute_gradients: input length mismatch");
  if (target.size() != static_cast<std::size_t>(model.layer_dims.back()))
    throw std::invalid_argument("compute_gradients: target length mismatch");

  const std::size_t layers = model.layer_dims.size() - 1;
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(input.data(), input.size());
  auto acts = forward_activations(model, x);

  if (loss_out) {
    const Eigen::VectorXd& out = acts.back();
    std::vector<double> out_v(out.data(), out.data() + out.size());
    *loss_out = bce_loss(out_v, target);
  }

  Gradients grads;
  grads.weights.resize(layers);
  grads.hidden_biases.resize(layers - 1);

  const double inv_m = 1.0 / static_cast<double>(model.layer_dims.back());
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(target.data(), target.size());
  // sigmoid + cross-entropy: output-layer delta is (a - y), scaled by the
  // per-unit averaging in the loss
  Eigen::VectorXd delta = (acts.back() - y) * inv_m;

  for (std::size_t l = layers; l-- > 0;) {
    grads.weights[l] = delta * acts[l].transpose();
    // delta currently belongs to z_{l+1}; layer l's bias feeds that
    // pre-activation and exists only while the layer is hidden
    if (l + 1 < layers) grads.hidden_biases[l] = delta;
    if (l > 0) {
      Eigen::VectorXd back = model.weights[l].transpose() * delta;
      const Eigen::VectorXd& a = acts[l];
      delta = back.cwiseProduct(a.cwiseProduct(Eigen::VectorXd::Ones(a.size()) - a));
    }
  }
  return grads;
}

std::pair<MlpModel, TrainReport> train(MlpModel model, const std::vector<Patch>& patches,
                                       const TrainConfig& cfg, const std::vector<Patch>& heldout) {
  validate_model(model);
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate))
    throw std::invalid_argument("train: learning_rate must be finite and >= 0");
  if (patches.empty()) throw std::invalid_argument("train: empty patch list");
  for (const auto& p : patches)
    if (!p.target) throw std::invalid_argument("train: patch without target");

  const std::size_t layers = model.layer_dims.size() - 1;
  TrainReport report;
  report.epoch_loss.reserve(cfg.epochs);

  // Separate stream from initialization so reseeding the model does not
  // perturb the shuffle order.
  SplitMix64 shuffle_rng(cfg.seed + kRngStreamGamma);
  std::vector<std::size_t> order(patches.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i-- > 1;) {
      const std::size_t j = shuffle_rng.below(i + 1);
      std::swap(order[i], order[j]);
    }

    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const Patch& p = patches[idx];
      double loss = 0.0;
      Gradients g = compute_gradients(model, p.input, *p.target, &loss);
      loss_sum += loss;
      for (std::size_t l = 0; l < layers; ++l) {
        model.weights[l] -= cfg.learning_rate * g.weights[l];
        if (l + 1 < layers) model.hidden_biases[l] -= cfg.learning_rate * g.hidden_biases[l];
      }
    }
    const double mean_loss = loss_sum / static_cast<double>(patches.size());
    if (!std::isfinite(mean_loss))
      throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch + 1));
    report.epoch_loss.push_back(mean_loss);
  }

  if (!heldout.empty()) {
    std::size_t correct = 0, total = 0;
    for (const auto& p : heldout) {
      if (!p.target) throw std::invalid_argument("train: held-out patch without target");
      std::vector<double> out = forward(model, p.input);
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double pred = out[i] > 0.5 ? 1.0 : 0.0;
        if (pred == (*p.target)[i]) ++correct;
        ++total;
      }
    }
    report.heldout_accuracy = static_cast<double>(correct) / static_cast<double>(total);
  }
  return {std::move(model), std::move(report)};
}

masking::PredictionField predict_field(const MlpModel& model,
                                       const spectral::MagnitudeSpectrogram& mag,
                                       const PatchConfig& cfg) {
  g_predict_field_calls.fetch_add(1, std::memory_order_relaxed);
  validate_model(model);
  auto patches = extract_patches(mag, nullptr, cfg, PatchMode::infer);

  std::vector<masking::PredictionWindow> windows;
  windows.reserve(patches.size());
  for (const auto& p : patches) {
    masking::PredictionWindow w;
    w.offset = p.offset;
    w.frames = cfg.t_frames;
    w.bins = mag.bins;
    w.values = forward(model, p.input);
    windows.push_back(std::move(w));
  }
  return masking::aggregate_predictions(windows, mag.frames);
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  validate_model(model);
  // Hand-rolled writer: fixed key order and %.17g floats keep the file stable
  // byte-for-byte for a given model.
  std::string out;
  out += "{\n  \"format\": \"maskmix-model\",\n";
  out += "  \"format_version\": " + std::to_string(kModelFormatVersion) + ",\n";
  out += "  \"activation\": \"logistic\",\n";
  out += "  \"layer_dims\": [";
  for (std::size_t i = 0; i < model.layer_dims.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(model.layer_dims[i]);
  }
  out += "],\n  \"weights\": [";
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    if (l) out += ",";
    out += "\n    [";
    const auto& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      if (r) out += ",";
      out += "\n      [";
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        if (c) out += ", ";
        out += format_double(w(r, c));
      }
      out += "]";
    }
    out += "\n    ]";
  }
  out += "\n  ],\n  \"hidden_biases\": [";
  for (std::size_t l = 0; l < model.hidden_biases.size(); ++l) {
    if (l) out += ",";
    out += "\n    [";
    const auto& b = model.hidden_biases[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      if (i) out += ", ";
      out += format_double(b[i]);
    }
    out += "]";
  }
  out += "\n  ]\n}\n";

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os.good()) throw std::runtime_error("cannot write model file: " + path.string());
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os.good()) throw std::runtime_error("model write failed: " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open model file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("model file is not valid JSON: " + std::string(e.what()));
  }

  if (!j.contains("format") || j["format"] != "maskmix-model")
    throw std::runtime_error("model file magic mismatch: " + path.string());
  if (!j.contains("format_version") || j["format_version"].get<int>() != kModelFormatVersion)
    throw std::runtime_error("model file format_version mismatch: " + path.string());
  if (!j.contains("activation") || j["activation"] != "logistic")
    throw std::runtime_error("model file activation unsupported: " + path.string());

  MlpModel model;
  model.layer_dims = j.at("layer_dims").get<std::vector<int>>();
  validate_dims(model.layer_dims);
  const std::size_t layers = model.layer_dims.size() - 1;

  const auto& weights = j.at("weights");
  const auto& biases = j.at("hidden_biases");
  if (weights.size() != layers || biases.size() != layers - 1)
    throw std::runtime_error("model file parameter count disagrees with layer_dims");

  for (std::size_t l = 0; l < layers; ++l) {
    const int rows = model.layer_dims[l + 1];
    const int cols = model.layer_dims[l];
    const auto& wj = weights[l];
    if (static_cast<int>(wj.size()) != rows)
      throw std::runtime_error("model file weight payload size disagrees with layer_dims");
    Eigen::MatrixXd w(rows, cols);
    for (int r = 0; r < rows; ++r) {
      const auto& row = wj[r];
      if (static_cast<int>(row.size()) != cols)
        throw std::runtime_error("model file weight payload size disagrees with layer_dims");
      for (int c = 0; c < cols; ++c) w(r, c) = row[c].get<double>();
    }
    model.weights.push_back(std::move(w));
    if (l + 1 < layers) {
      const auto& bj = biases[l];
      if (static_cast<int>(bj.size()) != rows)
        throw std::runtime_error("model file bias payload size disagrees with layer_dims");
      Eigen::VectorXd b(rows);
      for (int i = 0; i < rows; ++i) b[i] = bj[i].get<double>();
      model.hidden_biases.push_back(std::move(b));
    }
  }
  validate_model(model);
  return model;
}

std::uint64_t predict_field_invocations() noexcept {
  return g_predict_field_calls.load(std::memory_order_relaxed);
}

void reset_predict_field_invocations() noexcept {
  g_predict_field_calls.store(0, std::memory_order_relaxed);
}

}  // namespace maskmix::network
