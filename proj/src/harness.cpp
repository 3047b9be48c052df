#include "maskmix/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>

namespace maskmix::harness {

namespace {

using json = nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw std::runtime_error("config: unknown key \"" + key + "\" in " + where);
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  for (int db = -20; db <= -5; ++db) cfg.gain_grid_db.push_back(db);
  for (int db = 5; db <= 20; ++db) cfg.gain_grid_db.push_back(db);
  return cfg;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error("config is not valid JSON: " + std::string(e.what()));
  }

  ExperimentConfig cfg = default_config();
  reject_unknown_keys(j, {"corpus", "stft", "patch", "train", "hidden_dims", "gain_grid_db",
                          "alpha_grid", "projection"},
                      "top level");

  if (j.contains("corpus")) {
    const auto& c = j["corpus"];
    reject_unknown_keys(c, {"n_train", "n_test", "base_seed", "duration_s", "rate", "n_vocal",
                            "n_accomp"},
                        "corpus");
    read_key(c, "n_train", cfg.corpus.n_train);
    read_key(c, "n_test", cfg.corpus.n_test);
    read_key(c, "base_seed", cfg.corpus.base_seed);
    read_key(c, "duration_s", cfg.corpus.duration_s);
    read_key(c, "rate", cfg.corpus.rate);
    read_key(c, "n_vocal", cfg.corpus.n_vocal);
    read_key(c, "n_accomp", cfg.corpus.n_accomp);
  }
  if (j.contains("stft")) {
    const auto& s = j["stft"];
    reject_unknown_keys(s, {"window_len", "hop"}, "stft");
    read_key(s, "window_len", cfg.stft.window_len);
    read_key(s, "hop", cfg.stft.hop);
  }
  if (j.contains("patch")) {
    const auto& p = j["patch"];
    reject_unknown_keys(p, {"t_frames", "train_hop"}, "patch");
    read_key(p, "t_frames", cfg.patch.t_frames);
    read_key(p, "train_hop", cfg.patch.train_hop);
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    reject_unknown_keys(t, {"epochs", "learning_rate", "seed"}, "train");
    read_key(t, "epochs", cfg.train.epochs);
    read_key(t, "learning_rate", cfg.train.learning_rate);
    read_key(t, "seed", cfg.train.seed);
  }
  read_key(j, "hidden_dims", cfg.hidden_dims);
  read_key(j, "gain_grid_db", cfg.gain_grid_db);
  read_key(j, "alpha_grid", cfg.alpha_grid);
  if (j.contains("projection")) {
    const auto& p = j["projection"];
    reject_unknown_keys(p, {"filter_len", "exclude_edge", "sar_cap_db"}, "projection");
    read_key(p, "filter_len", cfg.projection.filter_len);
    read_key(p, "exclude_edge", cfg.projection.exclude_edge);
    read_key(p, "sar_cap_db", cfg.projection.sar_cap_db);
  }

  validate_config(cfg);
  return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json j;
  j["corpus"] = {{"n_train", cfg.corpus.n_train},       {"n_test", cfg.corpus.n_test},
                 {"base_seed", cfg.corpus.base_seed},   {"duration_s", cfg.corpus.duration_s},
                 {"rate", cfg.corpus.rate},             {"n_vocal", cfg.corpus.n_vocal},
                 {"n_accomp", cfg.corpus.n_accomp}};
  j["stft"] = {{"window_len", cfg.stft.window_len}, {"hop", cfg.stft.hop}};
  j["patch"] = {{"t_frames", cfg.patch.t_frames}, {"train_hop", cfg.patch.train_hop}};
  j["train"] = {{"epochs", cfg.train.epochs},
                {"learning_rate", cfg.train.learning_rate},
                {"seed", cfg.train.seed}};
  j["hidden_dims"] = cfg.hidden_dims;
  j["gain_grid_db"] = cfg.gain_grid_db;
  j["alpha_grid"] = cfg.alpha_grid;
  j["projection"] = {{"filter_len", cfg.projection.filter_len},
                     {"exclude_edge", cfg.projection.exclude_edge},
                     {"sar_cap_db", cfg.projection.sar_cap_db}};
  return j.dump();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open config file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json_text(text);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.corpus.n_train < 1 || cfg.corpus.n_test < 1)
    throw std::runtime_error("config: corpus split counts must be >= 1");
  if (cfg.corpus.duration_s <= 0 || cfg.corpus.rate <= 0)
    throw std::runtime_error("config: duration and rate must be positive");
  if (cfg.corpus.n_vocal < 1 || cfg.corpus.n_accomp < 1)
    throw std::runtime_error("config: stem counts must be >= 1");
  if (cfg.stft.window_len < 2 || cfg.stft.window_len % 2 != 0)
    throw std::runtime_error("config: window_len must be even and >= 2");
  if (cfg.stft.hop < 1 || cfg.stft.hop > cfg.stft.window_len)
    throw std::runtime_error("config: hop must be in [1, window_len]");
  if (cfg.corpus.duration_s * cfg.corpus.rate < 4.0 * cfg.stft.window_len)
    throw std::runtime_error("config: songs must span at least four STFT windows");
  if (cfg.patch.t_frames < 1 || cfg.patch.train_hop < 1)
    throw std::runtime_error("config: patch t_frames and train_hop must be >= 1");
  if (cfg.train.epochs < 1) throw std::runtime_error("config: epochs must be >= 1");
  if (!(cfg.train.learning_rate > 0) || !std::isfinite(cfg.train.learning_rate))
    throw std::runtime_error("config: learning_rate must be positive");
  if (cfg.hidden_dims.empty())
    throw std::runtime_error("config: hidden_dims must not be empty");
  for (int d : cfg.hidden_dims)
    if (d < 1) throw std::runtime_error("config: hidden dims must be positive");
  if (cfg.gain_grid_db.empty() || cfg.alpha_grid.empty())
    throw std::runtime_error("config: gain and alpha grids must not be empty");
  for (double g : cfg.gain_grid_db)
    if (!std::isfinite(g)) throw std::runtime_error("config: gains must be finite");
  for (double a : cfg.alpha_grid)
    if (!(a > 0.0) || a > 1.0)
      throw std::runtime_error(
          "config: alpha grid entries must be in (0, 1]; alpha = 0 is the implicit baseline row");
  if (cfg.projection.filter_len < 1 || cfg.projection.exclude_edge < 0)
    throw std::runtime_error("config: invalid projection settings");
  if (cfg.projection.sar_cap_db <= 0) throw std::runtime_error("config: sar_cap_db must be > 0");
}

dataset::Corpus build_corpus(const ExperimentConfig& cfg) {
  dataset::SongSpec tmpl;
  tmpl.duration_s = cfg.corpus.duration_s;
  tmpl.rate = cfg.corpus.rate;
  tmpl.n_vocal = cfg.corpus.n_vocal;
  tmpl.n_accomp = cfg.corpus.n_accomp;
  return dataset::make_corpus(cfg.corpus.n_train, cfg.corpus.n_test, cfg.corpus.base_seed, tmpl);
}

std::string song_id(const std::string& split, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%03zu", split.c_str(), index);
  return buf;
}

std::vector<network::Patch> corpus_patches(const std::vector<dataset::Song>& songs,
                                           const ExperimentConfig& cfg,
                                           network::PatchMode mode) {
  std::vector<network::Patch> patches;
  for (const auto& song : songs) {
    audio::MixBundle bundle = audio::mix_stems(song.stems);
    auto mix_mag = spectral::magnitude(spectral::stft(bundle.mixture, cfg.stft));
    auto vocal_mag = spectral::magnitude(spectral::stft(bundle.vocal_mix, cfg.stft));
    auto accomp_mag = spectral::magnitude(spectral::stft(bundle.accomp_mix, cfg.stft));
    masking::BinaryMask ibm = masking::ideal_binary_mask(vocal_mag, accomp_mag);
    auto song_patches = network::extract_patches(mix_mag, &ibm, cfg.patch, mode);
    for (auto& p : song_patches) patches.push_back(std::move(p));
  }
  return patches;
}

std::pair<network::MlpModel, network::TrainReport> train_pipeline(const dataset::Corpus& corpus,
                                                                  const ExperimentConfig& cfg) {
  auto train_patches = corpus_patches(corpus.train_songs, cfg, network::PatchMode::train);
  auto heldout_patches = corpus_patches(corpus.test_songs, cfg, network::PatchMode::train);

  std::vector<int> dims;
  const int io_dim = cfg.stft.bins() * cfg.patch.t_frames;
  dims.push_back(io_dim);
  for (int d : cfg.hidden_dims) dims.push_back(d);
  dims.push_back(io_dim);

  network::MlpModel model = network::make_model(dims, cfg.train.seed);
  return network::train(std::move(model), train_patches, cfg.train, heldout_patches);
}

std::vector<SweepRecord> run_sweep(const dataset::Corpus& corpus,
                                   const network::MlpModel& model,
                                   const ExperimentConfig& cfg) {
  std::vector<SweepRecord> records;
  for (std::size_t s = 0; s < corpus.test_songs.size(); ++s) {
    const std::string id = song_id("test", s);
    try {
      const dataset::Song& song = corpus.test_songs[s];
      audio::MixBundle bundle = audio::mix_stems(song.stems);
      auto mag = spectral::magnitude(spectral::stft(bundle.mixture, cfg.stft));
      masking::PredictionField field = network::predict_field(model, mag, cfg.patch);

      for (double gain_db : cfg.gain_grid_db) {
        const double g = masking::db_to_gain(gain_db);
        audio::AudioClip reference =
            remix::reference_remix(bundle.vocal_mix, bundle.accomp_mix, g);

        metrics::SarResult base = metrics::sar(bundle.mixture, reference, cfg.projection);
        records.push_back({id, gain_db, 0.0, base.sar_db, base.capped, true});

        for (double alpha : cfg.alpha_grid) {
          masking::BinaryMask mask = masking::threshold_mask(field, masking::Confidence(alpha));
          masking::ScalingMatrix z = masking::scaling_matrix(mask, g);
          audio::AudioClip estimate = remix::apply_remix({bundle.mixture, z, cfg.stft});
          metrics::SarResult r = metrics::sar(estimate, reference, cfg.projection);
          records.push_back({id, gain_db, alpha, r.sar_db, r.capped, false});
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep failed on song " + id + ": " + e.what());
    }
  }

  std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    if (a.song_id != b.song_id) return a.song_id < b.song_id;
    if (a.gain_db != b.gain_db) return a.gain_db < b.gain_db;
    return a.alpha < b.alpha;
  });
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<SweepRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  std::map<std::pair<double, double>, std::vector<double>> cells;
  for (const auto& r : records) cells[{r.gain_db, r.alpha}].push_back(r.sar_db);

  std::vector<SummaryRow> rows;
  for (const auto& [key, values] : cells) {
    if (values.empty()) throw std::runtime_error("summarize: empty cell");
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= n;
    SummaryRow row;
    row.gain_db = key.first;
    row.alpha = key.second;
    row.mean_sar_db = mean;
    row.ci_half_width = 1.96 * std::sqrt(var) / std::sqrt(n);
    row.n_songs = static_cast<int>(values.size());
    rows.push_back(row);
  }
  return rows;
}

std::string to_csv(const std::vector<SweepRecord>& records, const ExperimentConfig& cfg) {
  std::string out;
  out += "# maskmix sweep\n";
  out += "# config: " + config_to_json_text(cfg) + "\n";
  out += "song_id,gain_db,alpha,sar_db,capped,is_baseline\n";
  for (const auto& r : records) {
    out += r.song_id + "," + fmt6(r.gain_db) + "," + fmt6(r.alpha) + "," + fmt6(r.sar_db) + "," +
           (r.capped ? "1" : "0") + "," + (r.is_baseline ? "1" : "0") + "\n";
  }
  return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "gain_db,alpha,mean_sar_db,ci_half_width,n_songs\n";
  for (const auto& r : rows)
    out += fmt6(r.gain_db) + "," + fmt6(r.alpha) + "," + fmt6(r.mean_sar_db) + "," +
           fmt6(r.ci_half_width) + "," + std::to_string(r.n_songs) + "\n";
  return out;
}

void write_corpus(const dataset::Corpus& corpus, const std::filesystem::path& dir) {
  auto write_split = [&](const std::vector<dataset::Song>& songs, const std::string& split) {
    for (std::size_t s = 0; s < songs.size(); ++s) {
      const std::string id = song_id(split, s);
      const std::filesystem::path song_dir = dir / split / id;
      std::filesystem::create_directories(song_dir);

      json manifest;
      manifest["song_id"] = id;
      manifest["seed"] = songs[s].spec.seed;
      manifest["rate"] = songs[s].spec.rate;
      json vocals = json::array(), accomps = json::array();
      for (std::size_t i = 0; i < songs[s].stems.vocal_stems.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "vocal_%02zu.wav", i);
        audio::write_wav(song_dir / name, songs[s].stems.vocal_stems[i],
                         audio::WavEncoding::float32);
        vocals.push_back(name);
      }
      for (std::size_t i = 0; i < songs[s].stems.accomp_stems.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "accomp_%02zu.wav", i);
        audio::write_wav(song_dir / name, songs[s].stems.accomp_stems[i],
                         audio::WavEncoding::float32);
        accomps.push_back(name);
      }
      manifest["vocal_stems"] = vocals;
      manifest["accomp_stems"] = accomps;

      std::ofstream os(song_dir / "manifest.json", std::ios::trunc);
      if (!os.good())
        throw std::runtime_error("cannot write manifest in " + song_dir.string());
      os << manifest.dump(2) << "\n";
    }
  };
  write_split(corpus.train_songs, "train");
  write_split(corpus.test_songs, "test");
}

dataset::Corpus read_corpus(const std::filesystem::path& dir) {
  auto read_split = [&](const std::string& split) {
    std::vector<dataset::Song> songs;
    const std::filesystem::path split_dir = dir / split;
    if (!std::filesystem::exists(split_dir)) return songs;

    std::vector<std::filesystem::path> song_dirs;
    for (const auto& entry : std::filesystem::directory_iterator(split_dir))
      if (entry.is_directory()) song_dirs.push_back(entry.path());
    std::sort(song_dirs.begin(), song_dirs.end());

    for (const auto& song_dir : song_dirs) {
      std::ifstream in(song_dir / "manifest.json");
      if (!in.good())
        throw std::runtime_error("missing manifest.json in " + song_dir.string());
      json manifest;
      in >> manifest;

      dataset::Song song;
      song.spec.seed = manifest.at("seed").get<std::uint64_t>();
      song.spec.rate = manifest.at("rate").get<int>();
      for (const auto& name : manifest.at("vocal_stems"))
        song.stems.vocal_stems.push_back(audio::read_wav(song_dir / name.get<std::string>()));
      for (const auto& name : manifest.at("accomp_stems"))
        song.stems.accomp_stems.push_back(audio::read_wav(song_dir / name.get<std::string>()));
      song.spec.n_vocal = static_cast<int>(song.stems.vocal_stems.size());
      song.spec.n_accomp = static_cast<int>(song.stems.accomp_stems.size());
      if (!song.stems.vocal_stems.empty())
        song.spec.duration_s = static_cast<double>(song.stems.vocal_stems.front().samples.size()) /
                               song.spec.rate;
      songs.push_back(std::move(song));
    }
    return songs;
  };

  dataset::Corpus corpus;
  corpus.train_songs = read_split("train");
  corpus.test_songs = read_split("test");
  if (corpus.train_songs.empty() && corpus.test_songs.empty())
    throw std::runtime_error("no songs found under " + dir.string());
  return corpus;
}

}  // namespace maskmix::harness
