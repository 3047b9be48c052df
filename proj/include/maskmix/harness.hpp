#ifndef MASKMIX_HARNESS_HPP
#define MASKMIX_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "maskmix/dataset.hpp"
#include "maskmix/metrics.hpp"
#include "maskmix/network.hpp"
#include "maskmix/remix.hpp"
#include "maskmix/spectral.hpp"

namespace maskmix::harness {

struct CorpusConfig {
  int n_train = 6;
  int n_test = 5;
  std::uint64_t base_seed = 4711;
  double duration_s = 6.0;
  int rate = 8000;
  int n_vocal = 1;
  int n_accomp = 3;
};

// Desk-scale defaults mirror the structural ratios of a 44.1 kHz / 2048 / 512
// production setup at 8 kHz / 256 / 64.
struct ExperimentConfig {
  CorpusConfig corpus;
  spectral::StftConfig stft{256, 64};
  network::PatchConfig patch{8, 8};
  network::TrainConfig train{30, 0.1, 101};
  std::vector<int> hidden_dims{256};
  std::vector<double> gain_grid_db;  // defaults to integer steps over [-20,-5] and [5,20]
  std::vector<double> alpha_grid{0.1, 0.3, 0.6, 0.9};
  metrics::ProjectionConfig projection{512, 256, 200.0};
};

ExperimentConfig default_config();

// JSON round trip. Unknown keys are rejected; absent keys keep defaults.
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate_config(const ExperimentConfig& cfg);

struct SweepRecord {
  std::string song_id;
  double gain_db = 0.0;
  double alpha = 0.0;
  double sar_db = 0.0;
  bool capped = false;
  bool is_baseline = false;
};

struct SummaryRow {
  double gain_db = 0.0;
  double alpha = 0.0;
  double mean_sar_db = 0.0;
  double ci_half_width = 0.0;
  int n_songs = 0;
};

dataset::Corpus build_corpus(const ExperimentConfig& cfg);

std::string song_id(const std::string& split, std::size_t index);

// mixture spectrogram + ideal-mask targets for every song in the list,
// extracted in the given patch mode.
std::vector<network::Patch> corpus_patches(const std::vector<dataset::Song>& songs,
                                           const ExperimentConfig& cfg,
                                           network::PatchMode mode);

// Train-split patches feed SGD; test-split patches are the held-out set for
// the report's mask accuracy.
std::pair<network::MlpModel, network::TrainReport> train_pipeline(const dataset::Corpus& corpus,
                                                                  const ExperimentConfig& cfg);

// For each test song: one prediction field, reused across the whole
// (gain, alpha) grid, plus one baseline row per gain.
std::vector<SweepRecord> run_sweep(const dataset::Corpus& corpus,
                                   const network::MlpModel& model,
                                   const ExperimentConfig& cfg);

// Per-(gain, alpha) mean and normal-approximation 95% CI half-width across
// songs (1.96 * sd / sqrt(n), population sd).
std::vector<SummaryRow> summarize(const std::vector<SweepRecord>& records);

std::string to_csv(const std::vector<SweepRecord>& records, const ExperimentConfig& cfg);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);

// corpus/<split>/<song_id>/{vocal_NN.wav, accomp_NN.wav} + per-song
// manifest.json; stems stored as float32 WAV.
void write_corpus(const dataset::Corpus& corpus, const std::filesystem::path& dir);
dataset::Corpus read_corpus(const std::filesystem::path& dir);

// Subcommands: synth, train, remix, eval, sweep. Returns the process exit
// status (0 success, 1 runtime failure, 2 usage error).
int cli(int argc, const char* const* argv);

}  // namespace maskmix::harness

#endif  // MASKMIX_HARNESS_HPP
