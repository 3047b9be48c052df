#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "maskmix/masking.hpp"
#include "maskmix/rng.hpp"

using namespace maskmix;
using masking::BinaryMask;
using masking::Confidence;
using masking::PredictionField;
using masking::PredictionWindow;

namespace {

spectral::MagnitudeSpectrogram mag_grid(int frames, int bins, std::vector<double> values) {
  spectral::MagnitudeSpectrogram m;
  m.frames = frames;
  m.bins = bins;
  m.data = std::move(values);
  return m;
}

PredictionField field_of(int frames, int bins, std::vector<double> values) {
  PredictionField f;
  f.frames = frames;
  f.bins = bins;
  f.values = std::move(values);
  f.coverage.assign(f.values.size(), 1);
  return f;
}

}  // namespace

TEST_CASE("ideal_binary_mask dominance and tie rules") {
  auto vocal = mag_grid(1, 3, {2.0, 1.0, 0.0});
  auto accomp = mag_grid(1, 3, {1.0, 1.0, 0.0});
  BinaryMask mask = masking::ideal_binary_mask(vocal, accomp);
  CHECK(mask.at(0, 0) == 1);  // vocal dominates
  CHECK(mask.at(0, 1) == 0);  // tie goes to accompaniment
  CHECK(mask.at(0, 2) == 0);  // silence stays untouched
}

TEST_CASE("ideal_binary_mask rejects mismatched dimensions") {
  CHECK_THROWS_AS(masking::ideal_binary_mask(mag_grid(1, 2, {0, 0}), mag_grid(2, 1, {0, 0})),
                  std::invalid_argument);
}

TEST_CASE("ideal_binary_mask complements under argument swap on non-tie cells") {
  SplitMix64 rng(3);
  std::vector<double> a(60), b(60);
  for (auto& v : a) v = rng.uniform();
  for (auto& v : b) v = rng.uniform();
  auto ma = masking::ideal_binary_mask(mag_grid(6, 10, a), mag_grid(6, 10, b));
  auto mb = masking::ideal_binary_mask(mag_grid(6, 10, b), mag_grid(6, 10, a));
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) CHECK(ma.data[i] == 1 - mb.data[i]);
}

TEST_CASE("aggregate_predictions single window") {
  PredictionWindow w{0, 2, 3, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}};
  auto field = masking::aggregate_predictions({w}, 2);
  CHECK(field.frames == 2);
  CHECK(field.bins == 3);
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    CHECK(field.values[i] == w.values[i]);
    CHECK(field.coverage[i] == 1);
  }
}

TEST_CASE("aggregate_predictions averages the shared frame") {
  // window 0 covers frames {0,1}, window 1 covers {1,2}; single bin
  PredictionWindow w0{0, 2, 1, {0.0, 1.0}};
  PredictionWindow w1{1, 2, 1, {1.0, 1.0}};
  auto field = masking::aggregate_predictions({w0, w1}, 3);
  CHECK(field.value_at(0, 0) == 0.0);
  CHECK(field.value_at(1, 0) == 1.0);  // mean(1, 1)
  CHECK(field.value_at(2, 0) == 1.0);
  CHECK(field.coverage_at(0, 0) == 1);
  CHECK(field.coverage_at(1, 0) == 2);
  CHECK(field.coverage_at(2, 0) == 1);
}

TEST_CASE("aggregate_predictions of constant windows is constant") {
  std::vector<PredictionWindow> windows;
  for (int o = 0; o < 5; ++o) windows.push_back({o, 3, 2, std::vector<double>(6, 0.5)});
  auto field = masking::aggregate_predictions(windows, 7);
  for (double v : field.values) CHECK(v == 0.5);
}

TEST_CASE("aggregate_predictions interior coverage equals the window size") {
  const int t = 4, bins = 2, total = 12;
  std::vector<PredictionWindow> windows;
  SplitMix64 rng(9);
  for (int o = 0; o + t <= total; ++o) {
    PredictionWindow w{o, t, bins, {}};
    for (int i = 0; i < t * bins; ++i) w.values.push_back(rng.uniform());
    windows.push_back(std::move(w));
  }
  auto field = masking::aggregate_predictions(windows, total);
  for (int f = 0; f < bins; ++f) {
    for (int i = t - 1; i <= total - t; ++i) CHECK(field.coverage_at(i, f) == t);
    CHECK(field.coverage_at(0, f) == 1);
    CHECK(field.coverage_at(total - 1, f) == 1);
  }
  for (double v : field.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("aggregate_predictions input validation") {
  CHECK_THROWS_AS(masking::aggregate_predictions({}, 0), std::invalid_argument);

  PredictionWindow w0{0, 2, 1, {0.0, 1.0}};
  PredictionWindow bad_dims{1, 3, 1, {0.0, 1.0, 0.5}};
  CHECK_THROWS_AS(masking::aggregate_predictions({w0, bad_dims}, 3), std::invalid_argument);

  PredictionWindow gap{2, 2, 1, {0.0, 1.0}};
  CHECK_THROWS_AS(masking::aggregate_predictions({w0, gap}, 4), std::invalid_argument);
}

TEST_CASE("threshold_mask uses a strict comparison") {
  auto field = field_of(1, 3, {0.30, 0.2999999, 0.31});
  BinaryMask mask = masking::threshold_mask(field, Confidence(0.30));
  CHECK(mask.at(0, 0) == 0);  // equal to alpha -> 0
  CHECK(mask.at(0, 1) == 0);
  CHECK(mask.at(0, 2) == 1);
}

TEST_CASE("threshold_mask at alpha 0 keeps every positive cell") {
  auto field = field_of(1, 4, {0.0, 1e-12, 0.5, 1.0});
  BinaryMask mask = masking::threshold_mask(field, Confidence(0.0));
  CHECK(mask.at(0, 0) == 0);
  CHECK(mask.at(0, 1) == 1);
  CHECK(mask.at(0, 2) == 1);
  CHECK(mask.at(0, 3) == 1);
}

TEST_CASE("threshold_mask of an all-ones field passes any alpha below 1") {
  auto field = field_of(2, 2, {1.0, 1.0, 1.0, 1.0});
  BinaryMask mask = masking::threshold_mask(field, Confidence(0.9));
  for (auto v : mask.data) CHECK(v == 1);
}

TEST_CASE("threshold_mask is monotone in alpha") {
  SplitMix64 rng(17);
  auto field = field_of(8, 16, {});
  field.values.resize(128);
  for (auto& v : field.values) v = rng.uniform();
  field.coverage.assign(128, 1);

  int prev_count = 1 << 20;
  for (double alpha : {0.0, 0.1, 0.35, 0.7, 0.95, 1.0}) {
    BinaryMask mask = masking::threshold_mask(field, Confidence(alpha));
    int count = 0;
    for (auto v : mask.data) count += v;
    CHECK(count <= prev_count);
    prev_count = count;
  }
}

TEST_CASE("Confidence validates its range") {
  CHECK_THROWS_AS(Confidence(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(Confidence(1.1), std::invalid_argument);
  CHECK(Confidence(0.0).value() == 0.0);
  CHECK(Confidence(1.0).value() == 1.0);
}

TEST_CASE("scaling_matrix maps 1 -> g and 0 -> 1") {
  BinaryMask mask;
  mask.frames = 1;
  mask.bins = 2;
  mask.data = {0, 1};
  auto z = masking::scaling_matrix(mask, 2.0);
  CHECK(z.at(0, 0) == 1.0);
  CHECK(z.at(0, 1) == 2.0);

  auto identity = masking::scaling_matrix(mask, 1.0);
  for (double v : identity.data) CHECK(v == 1.0);

  CHECK_THROWS_AS(masking::scaling_matrix(mask, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(masking::scaling_matrix(mask, -2.0), std::invalid_argument);
}

TEST_CASE("db_to_gain follows the 10*log10 convention") {
  CHECK(masking::db_to_gain(0.0) == 1.0);
  CHECK(masking::db_to_gain(10.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(masking::db_to_gain(-20.0) == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("db_to_gain is multiplicative") {
  SplitMix64 rng(23);
  for (int i = 0; i < 50; ++i) {
    double a = rng.uniform(-30.0, 30.0), b = rng.uniform(-30.0, 30.0);
    double lhs = masking::db_to_gain(a + b);
    double rhs = masking::db_to_gain(a) * masking::db_to_gain(b);
    CHECK(std::fabs(lhs - rhs) / rhs < 1e-12);
  }
  CHECK_THROWS_AS(masking::db_to_gain(std::nan("")), std::invalid_argument);
}
