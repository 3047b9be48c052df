#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "maskmix/harness.hpp"

namespace maskmix::harness {

namespace {

using json = nlohmann::json;

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os.good()) throw std::runtime_error("cannot write file: " + path.string());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os.good()) throw std::runtime_error("write failed: " + path.string());
}

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

ExperimentConfig resolve_config(const CommonOpts& opts) {
  ExperimentConfig cfg =
      opts.config_path.empty() ? default_config() : load_config(opts.config_path);
  if (opts.seed_given) {
    cfg.corpus.base_seed = opts.seed;
    cfg.train.seed = opts.seed;
  }
  validate_config(cfg);
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config JSON file");
  cmd->add_option("--seed", opts.seed, "override corpus and training seeds")
      ->each([&opts](const std::string&) { opts.seed_given = true; });
}

}  // namespace

int cli(int argc, const char* const* argv) {
  CLI::App app{"maskmix: mask-based vocal remixing toolkit"};
  app.require_subcommand(1);

  // synth
  CommonOpts synth_opts;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "generate the synthetic corpus as WAV stems");
  add_common(synth_cmd, synth_opts);
  synth_cmd->add_option("--out", synth_out, "output corpus directory")->required();

  // train
  CommonOpts train_opts;
  std::string train_out, train_corpus, train_report;
  auto* train_cmd = app.add_subcommand("train", "train the mask-prediction network");
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--out", train_out, "output model JSON file")->required();
  train_cmd->add_option("--corpus", train_corpus,
                        "read corpus from this directory instead of regenerating");
  train_cmd->add_option("--report", train_report, "write the training report as JSON");

  // remix
  CommonOpts remix_opts;
  std::string remix_in, remix_model, remix_out;
  double remix_alpha = 0.0, remix_gain_db = 0.0;
  bool remix_pcm16 = false;
  auto* remix_cmd = app.add_subcommand("remix", "remix a mixture WAV with a trained model");
  add_common(remix_cmd, remix_opts);
  remix_cmd->add_option("mixture", remix_in, "input mixture WAV")->required();
  remix_cmd->add_option("--model", remix_model, "model JSON file")->required();
  remix_cmd->add_option("--alpha", remix_alpha, "confidence threshold in [0, 1]")->required();
  remix_cmd->add_option("--gain-db", remix_gain_db, "vocal gain in dB (10*log10 g)")->required();
  remix_cmd->add_option("--out", remix_out, "output WAV path")->required();
  remix_cmd->add_flag("--pcm16", remix_pcm16, "write 16-bit PCM instead of float32");

  // eval
  CommonOpts eval_opts;
  std::string eval_estimate, eval_reference, eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "signal-to-artefact ratio of estimate vs reference");
  add_common(eval_cmd, eval_opts);
  eval_cmd->add_option("estimate", eval_estimate, "estimated remix WAV")->required();
  eval_cmd->add_option("reference", eval_reference, "reference remix WAV")->required();
  eval_cmd->add_option("--out", eval_out, "write the result as JSON");

  // sweep
  CommonOpts sweep_opts;
  std::string sweep_model, sweep_corpus, sweep_out, sweep_summary;
  auto* sweep_cmd = app.add_subcommand("sweep", "SAR over the (gain, alpha) grid, as CSV");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--model", sweep_model, "model JSON file")->required();
  sweep_cmd->add_option("--corpus", sweep_corpus,
                        "read corpus from this directory instead of regenerating");
  sweep_cmd->add_option("--out", sweep_out, "output CSV path")->required();
  sweep_cmd->add_option("--summary-out", sweep_summary, "also write per-cell mean/CI CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth_cmd->parsed()) {
      ExperimentConfig cfg = resolve_config(synth_opts);
      dataset::Corpus corpus = build_corpus(cfg);
      write_corpus(corpus, synth_out);
      std::printf("wrote %zu train + %zu test songs to %s\n", corpus.train_songs.size(),
                  corpus.test_songs.size(), synth_out.c_str());
    } else if (train_cmd->parsed()) {
      ExperimentConfig cfg = resolve_config(train_opts);
      dataset::Corpus corpus =
          train_corpus.empty() ? build_corpus(cfg) : read_corpus(train_corpus);
      auto [model, report] = train_pipeline(corpus, cfg);
      network::save_model(model, train_out);
      for (std::size_t e = 0; e < report.epoch_loss.size(); ++e)
        std::printf("epoch %zu loss %.6f\n", e + 1, report.epoch_loss[e]);
      std::printf("heldout accuracy %.6f\n", report.heldout_accuracy);
      std::printf("model written to %s\n", train_out.c_str());
      if (!train_report.empty()) {
        json r;
        r["epoch_loss"] = report.epoch_loss;
        r["heldout_accuracy"] = report.heldout_accuracy;
        write_text_file(train_report, r.dump(2) + "\n");
      }
    } else if (remix_cmd->parsed()) {
      ExperimentConfig cfg = resolve_config(remix_opts);
      audio::AudioClip mixture = audio::read_wav(remix_in);
      network::MlpModel model = network::load_model(remix_model);
      auto mag = spectral::magnitude(spectral::stft(mixture, cfg.stft));
      const int expected = cfg.stft.bins() * cfg.patch.t_frames;
      if (model.layer_dims.front() != expected)
        throw std::runtime_error("model input dim " + std::to_string(model.layer_dims.front()) +
                                 " does not match stft/patch config (" +
                                 std::to_string(expected) + ")");
      auto field = network::predict_field(model, mag, cfg.patch);
      auto mask = masking::threshold_mask(field, masking::Confidence(remix_alpha));
      auto z = masking::scaling_matrix(mask, masking::db_to_gain(remix_gain_db));
      audio::AudioClip out = remix::apply_remix({mixture, z, cfg.stft});
      audio::write_wav(remix_out, out,
                       remix_pcm16 ? audio::WavEncoding::pcm16 : audio::WavEncoding::float32);
      std::printf("remix written to %s\n", remix_out.c_str());
    } else if (eval_cmd->parsed()) {
      ExperimentConfig cfg = resolve_config(eval_opts);
      audio::AudioClip estimate = audio::read_wav(eval_estimate);
      audio::AudioClip reference = audio::read_wav(eval_reference);
      metrics::SarResult r = metrics::sar(estimate, reference, cfg.projection);
      std::printf("sar_db=%.6f capped=%d\n", r.sar_db, r.capped ? 1 : 0);
      if (!eval_out.empty()) {
        json out;
        out["sar_db"] = r.sar_db;
        out["capped"] = r.capped;
        write_text_file(eval_out, out.dump() + "\n");
      }
    } else if (sweep_cmd->parsed()) {
      ExperimentConfig cfg = resolve_config(sweep_opts);
      dataset::Corpus corpus =
          sweep_corpus.empty() ? build_corpus(cfg) : read_corpus(sweep_corpus);
      network::MlpModel model = network::load_model(sweep_model);
      auto records = run_sweep(corpus, model, cfg);
      write_text_file(sweep_out, to_csv(records, cfg));
      std::printf("%zu records written to %s\n", records.size(), sweep_out.c_str());
      if (!sweep_summary.empty())
        write_text_file(sweep_summary, summary_to_csv(summarize(records)));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace maskmix::harness
