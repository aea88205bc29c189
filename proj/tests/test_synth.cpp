// Synthetic toy data: class distributions, exact multinomials, dataset
// layout, and pair composition.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "probin/common.hpp"
#include "probin/rng.hpp"
#include "probin/synth.hpp"
#include "test_util.hpp"

using namespace probin;

namespace {

double kl(const std::vector<double>& p, const std::vector<double>& q) {
  double sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum;
}

std::vector<double> normalized_counts(const kmer::KmerProfile& profile) {
  double total = 0;
  for (double c : profile.counts) total += c;
  std::vector<double> p(profile.counts.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = profile.counts[i] / total;
  return p;
}

}  // namespace

TEST_CASE("toy config validation rejects each bad field") {
  const synth::ToyConfig good;
  CHECK_NOTHROW(synth::validate_toy_config(good));

  synth::ToyConfig cfg = good;
  cfg.num_classes = 1;
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
  cfg = good;
  cfg.seqs_per_class = 0;
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
  cfg = good;
  cfg.k = 0;
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
  cfg = good;
  cfg.k = 9;
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
  cfg = good;
  cfg.seq_len = 3;  // < k
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
  cfg = good;
  cfg.smoothing = 0.0;
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
  cfg = good;
  cfg.num_multiclass = -1;
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
  cfg = good;
  cfg.classes_per_multi = 1;
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
  cfg = good;
  cfg.classes_per_multi = 6;  // > num_classes
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
  cfg = good;
  cfg.multi_weights = {1.0};  // must match classes_per_multi
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
  cfg = good;
  cfg.multi_weights = {1.0, 0.0};
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
  cfg = good;
  cfg.positives_per_class = 0;
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
  cfg = good;
  cfg.k = 1;  // 4 k-mers cannot host 5 classes
  CHECK_THROWS_AS(synth::validate_toy_config(cfg), ValidationError);
}

TEST_CASE("class distributions put a smoothed block on each class") {
  synth::ToyConfig cfg;
  cfg.num_classes = 2;
  cfg.k = 1;
  cfg.smoothing = 0.01;
  const std::vector<std::vector<double>> dists = synth::make_class_distributions(cfg);
  REQUIRE(dists.size() == 2);
  REQUIRE(dists[0].size() == 4);

  const double floor = 0.01 / 4.0 / 1.01;
  const double peak = floor + 0.5 / 1.01;
  CHECK(dists[0][0] == doctest::Approx(peak).epsilon(1e-14));
  CHECK(dists[0][1] == doctest::Approx(peak).epsilon(1e-14));
  CHECK(dists[0][2] == doctest::Approx(floor).epsilon(1e-14));
  CHECK(dists[0][3] == doctest::Approx(floor).epsilon(1e-14));
  CHECK(dists[1][0] == doctest::Approx(floor).epsilon(1e-14));
  CHECK(dists[1][2] == doctest::Approx(peak).epsilon(1e-14));
  for (const std::vector<double>& d : dists) {
    double sum = 0;
    for (double p : d) {
      CHECK(p >= floor);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(kl(dists[0], dists[1]) > 1.0);
  CHECK(kl(dists[0], dists[0]) == 0.0);
}

TEST_CASE("default class blocks are disjoint and hold each argmax") {
  const synth::ToyConfig cfg;  // 5 classes, k = 4 -> block of 51 indices
  const std::vector<std::vector<double>> dists = synth::make_class_distributions(cfg);
  for (std::size_t c = 0; c < dists.size(); ++c) {
    const std::size_t argmax = static_cast<std::size_t>(
        std::max_element(dists[c].begin(), dists[c].end()) - dists[c].begin());
    CHECK(argmax >= c * 51);
    CHECK(argmax < c * 51 + 51);
    // Everything inside the block strictly dominates everything outside.
    CHECK(dists[c][c * 51] > dists[c][(c * 51 + 51) % 256]);
  }
}

TEST_CASE("multinomial sampling is exact, deterministic, and unbiased-ish") {
  const std::vector<double> probs{0.5, 0.3, 0.2};
  Rng rng(4, "multinomial");
  const std::vector<std::uint32_t> counts = synth::multinomial_sample(50, probs, rng);
  REQUIRE(counts.size() == 3);
  CHECK(counts[0] + counts[1] + counts[2] == 50);

  Rng rng2(4, "multinomial");
  CHECK(synth::multinomial_sample(50, probs, rng2) == counts);

  // Mean behavior over repeats: each bucket near n * p (generous 5 sigma).
  Rng rng3(8, "multinomial");
  double mean0 = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) mean0 += synth::multinomial_sample(50, probs, rng3)[0];
  mean0 /= reps;
  CHECK(std::abs(mean0 - 25.0) < 5.0 * std::sqrt(50 * 0.25 / reps));

  Rng rng4(1, "multinomial");
  CHECK(synth::multinomial_sample(0, probs, rng4) ==
        std::vector<std::uint32_t>{0, 0, 0});
  CHECK_THROWS_AS(synth::multinomial_sample(-1, probs, rng4), ValidationError);
  const std::vector<double> empty;
  CHECK_THROWS_AS(synth::multinomial_sample(5, empty, rng4), ValidationError);
}

TEST_CASE("default dataset layout: 125 single-class plus 5 mixed items") {
  synth::ToyConfig cfg;
  const synth::ToyDataset data = synth::sample_dataset(cfg);
  REQUIRE(data.ids.size() == 130);
  REQUIRE(data.labels.size() == 130);
  REQUIRE(data.profiles.size() == 130);

  CHECK(data.ids[0] == "class0_seq0");
  CHECK(data.labels[0] == "class0");
  CHECK(data.ids[124] == "class4_seq24");
  CHECK(data.labels[124] == "class4");
  CHECK(data.ids[125] == "multi0");
  CHECK(data.labels[125] == "class0,class1");
  // multi4 mixes classes 4 and (4+1) mod 5, label sorted.
  CHECK(data.ids[129] == "multi4");
  CHECK(data.labels[129] == "class0,class4");

  for (const kmer::KmerProfile& p : data.profiles) {
    CHECK(p.k == 4);
    CHECK_FALSE(p.normalized);
    REQUIRE(p.counts.size() == 256);
    double total = 0;
    for (double c : p.counts) total += c;
    CHECK(total == 97.0);  // seq_len - k + 1 draws
  }

  // Same seed reproduces the dataset; another seed changes it.
  const synth::ToyDataset again = synth::sample_dataset(cfg);
  CHECK(again.profiles[7].counts == data.profiles[7].counts);
  synth::ToyConfig other = cfg;
  other.seed = 1;
  CHECK(synth::sample_dataset(other).profiles[7].counts != data.profiles[7].counts);
}

TEST_CASE("mixed items split draws by the configured weights") {
  synth::ToyConfig cfg;
  cfg.num_multiclass = 1;
  const auto block_count = [](const kmer::KmerProfile& p, int c) {
    double sum = 0;
    for (int i = c * 51; i < c * 51 + 51; ++i) sum += p.counts[static_cast<std::size_t>(i)];
    return sum;
  };

  // Equal weights: the 97 draws split 48/49 across classes 0 and 1.
  const synth::ToyDataset equal = synth::sample_dataset(cfg);
  const kmer::KmerProfile& mixed = equal.profiles[125];
  CHECK(block_count(mixed, 0) > 38);
  CHECK(block_count(mixed, 1) > 38);
  CHECK(block_count(mixed, 2) < 6);

  // Weight 1:3 pushes roughly three quarters of the draws to class 1.
  synth::ToyConfig skew = cfg;
  skew.multi_weights = {1.0, 3.0};
  const synth::ToyDataset skewed = synth::sample_dataset(skew);
  const kmer::KmerProfile& sk = skewed.profiles[125];
  CHECK(block_count(sk, 1) > block_count(sk, 0) + 20);

  // Three contributors cover three adjacent blocks.
  synth::ToyConfig triple = cfg;
  triple.classes_per_multi = 3;
  const synth::ToyDataset three = synth::sample_dataset(triple);
  CHECK(three.labels[125] == "class0,class1,class2");
  const kmer::KmerProfile& tp = three.profiles[125];
  CHECK(block_count(tp, 0) > 20);
  CHECK(block_count(tp, 1) > 20);
  CHECK(block_count(tp, 2) > 20);
}

TEST_CASE("empirical profiles sit closest to their own class distribution") {
  synth::ToyConfig cfg;
  cfg.seed = 2;
  const std::vector<std::vector<double>> dists = synth::make_class_distributions(cfg);
  const synth::ToyDataset data = synth::sample_dataset(cfg);
  for (std::size_t i = 0; i < 125; ++i) {
    const std::vector<double> p = normalized_counts(data.profiles[i]);
    const std::size_t own = i / 25;
    const double own_kl = kl(p, dists[own]);
    for (std::size_t c = 0; c < dists.size(); ++c) {
      if (c != own) CHECK(own_kl < kl(p, dists[c]));
    }
  }
}

TEST_CASE("class means recover the distributions at large sample counts") {
  synth::ToyConfig cfg;
  cfg.num_classes = 2;
  cfg.k = 2;
  cfg.seqs_per_class = 500;
  cfg.num_multiclass = 0;
  cfg.seed = 3;
  const std::vector<std::vector<double>> dists = synth::make_class_distributions(cfg);
  const synth::ToyDataset data = synth::sample_dataset(cfg);
  const int draws = cfg.seq_len - cfg.k + 1;

  for (int c = 0; c < 2; ++c) {
    std::vector<double> mean(16, 0.0);
    for (int s = 0; s < 500; ++s) {
      const kmer::KmerProfile& p = data.profiles[static_cast<std::size_t>(c * 500 + s)];
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += p.counts[i];
    }
    for (double& m : mean) m /= 500.0 * draws;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double p = dists[static_cast<std::size_t>(c)][i];
      const double se = std::sqrt(p * (1 - p) / (500.0 * draws));
      CHECK(std::abs(mean[i] - p) <= 5.0 * se + 1e-12);
    }
  }
}

TEST_CASE("toy pairs have the expected composition") {
  synth::ToyConfig cfg;
  const synth::ToyDataset data = synth::sample_dataset(cfg);
  const int negatives = 19;
  const training::PairSet set = synth::toy_pairs(data, cfg, negatives);

  // 125 single-species items plus 5 two-species items, 4 positives per
  // species membership, `negatives` negatives per positive.
  const std::size_t positives = (125 + 5 * 2) * 4;
  CHECK(set.num_positives() == positives);
  CHECK(set.num_negatives() == positives * negatives);

  // Positives join items with the partner's exact whole label.
  for (const training::TrainingPair& p : set.pairs) {
    if (p.label) CHECK(data.labels[p.right].find(',') == std::string::npos);
  }

  // Negatives hit the drawing item's own species at the rate implied by
  // uniform partner choice; compare against that exact expectation.
  std::size_t false_negatives = 0;
  double expected = 0.0;
  const std::size_t n = data.labels.size();
  std::map<std::string, std::size_t> label_count;
  for (const std::string& l : data.labels) ++label_count[l];
  for (std::size_t i = 0; i < n; ++i) {
    const double same = static_cast<double>(label_count[data.labels[i]] - 1);
    const double draws_i =
        static_cast<double>((data.labels[i].find(',') == std::string::npos ? 1 : 2) * 4 *
                            negatives);
    expected += draws_i * same / static_cast<double>(n - 1);
  }
  for (const training::TrainingPair& p : set.pairs) {
    if (!p.label && data.labels[p.left] == data.labels[p.right]) ++false_negatives;
  }
  const double total = static_cast<double>(set.num_negatives());
  const double frac = static_cast<double>(false_negatives) / total;
  const double mean = expected / total;
  const double sigma = std::sqrt(mean * (1 - mean) / total);
  CHECK(std::abs(frac - mean) <= 3.0 * sigma);
  // And that rate is roughly one in num_classes for this geometry.
  CHECK(frac > 0.5 / 5.0);
  CHECK(frac < 1.5 / 5.0);
}
