// Toy dataset generation.
#include "probin/synth.hpp"

#include <algorithm>
#include <cstddef>

#include "probin/common.hpp"

namespace probin::synth {

void validate_toy_config(const ToyConfig& cfg) {
  if (cfg.num_classes < 2) throw ValidationError("toy config: need at least 2 classes");
  if (cfg.seqs_per_class < 1) throw ValidationError("toy config: seqs_per_class must be >= 1");
  if (cfg.k < 1 || cfg.k > kmer::kMaxK) {
    throw ValidationError("toy config: k must lie in [1, " + std::to_string(kmer::kMaxK) + "]");
  }
  if (cfg.seq_len < cfg.k) throw ValidationError("toy config: seq_len must be >= k");
  if (cfg.smoothing <= 0) throw ValidationError("toy config: smoothing must be positive");
  if (cfg.num_multiclass < 0) throw ValidationError("toy config: num_multiclass must be >= 0");
  if (cfg.classes_per_multi < 2 || cfg.classes_per_multi > cfg.num_classes) {
    throw ValidationError("toy config: classes_per_multi must lie in [2, num_classes]");
  }
  if (!cfg.multi_weights.empty()) {
    if (cfg.multi_weights.size() != static_cast<std::size_t>(cfg.classes_per_multi)) {
      throw ValidationError("toy config: multi_weights must have classes_per_multi entries");
    }
    for (double w : cfg.multi_weights) {
      if (!(w > 0)) throw ValidationError("toy config: multi_weights entries must be positive");
    }
  }
  if (cfg.positives_per_class < 1) {
    throw ValidationError("toy config: positives_per_class must be >= 1");
  }
  const std::size_t space = kmer::num_kmers(cfg.k);
  if (space < static_cast<std::size_t>(cfg.num_classes)) {
    throw ValidationError("toy config: more classes than k-mer indices");
  }
}

std::vector<std::vector<double>> make_class_distributions(const ToyConfig& cfg) {
  validate_toy_config(cfg);
  const std::size_t space = kmer::num_kmers(cfg.k);
  const std::size_t block = space / static_cast<std::size_t>(cfg.num_classes);
  const double s = cfg.smoothing;
  const double floor_mass = s / static_cast<double>(space) / (1 + s);
  const double block_mass = 1.0 / static_cast<double>(block) / (1 + s);
  std::vector<std::vector<double>> dists(static_cast<std::size_t>(cfg.num_classes));
  for (std::size_t c = 0; c < dists.size(); ++c) {
    std::vector<double>& p = dists[c];
    p.assign(space, floor_mass);
    const std::size_t begin = c * block;
    for (std::size_t i = begin; i < begin + block; ++i) p[i] += block_mass;
  }
  return dists;
}

std::vector<std::uint32_t> multinomial_sample(int n, const std::vector<double>& probs, Rng& rng) {
  if (n < 0) throw ValidationError("multinomial: n must be >= 0");
  if (probs.empty()) throw ValidationError("multinomial: empty distribution");
  std::vector<std::uint32_t> counts(probs.size(), 0);
  int remaining = n;
  double mass = 1.0;
  for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
    // Binomial(remaining, probs[i] / mass) by direct Bernoulli trials; the
    // trial count is tiny here, and this stays bit-identical everywhere.
    const double p = std::min(1.0, probs[i] / mass);
    std::uint32_t hits = 0;
    for (int t = 0; t < remaining; ++t) {
      if (rng.uniform() < p) ++hits;
    }
    counts[i] = hits;
    remaining -= static_cast<int>(hits);
    mass -= probs[i];
    if (mass <= 0) break;
  }
  counts.back() += static_cast<std::uint32_t>(remaining);
  return counts;
}

namespace {

kmer::KmerProfile counts_profile(int k, std::vector<std::uint32_t>&& counts) {
  kmer::KmerProfile profile;
  profile.k = k;
  profile.normalized = false;
  profile.counts.assign(counts.begin(), counts.end());
  return profile;
}

}  // namespace

ToyDataset sample_dataset(const ToyConfig& cfg) {
  const std::vector<std::vector<double>> dists = make_class_distributions(cfg);
  const int draws = cfg.seq_len - cfg.k + 1;
  Rng rng(cfg.seed, "synth");

  ToyDataset data;
  const std::size_t total = static_cast<std::size_t>(cfg.num_classes) *
                                static_cast<std::size_t>(cfg.seqs_per_class) +
                            static_cast<std::size_t>(cfg.num_multiclass);
  data.ids.reserve(total);
  data.labels.reserve(total);
  data.profiles.reserve(total);

  for (int c = 0; c < cfg.num_classes; ++c) {
    const std::string label = "class" + std::to_string(c);
    for (int s = 0; s < cfg.seqs_per_class; ++s) {
      data.ids.push_back(label + "_seq" + std::to_string(s));
      data.labels.push_back(label);
      data.profiles.push_back(
          counts_profile(cfg.k, multinomial_sample(draws, dists[static_cast<std::size_t>(c)], rng)));
    }
  }

  const std::size_t contributors = static_cast<std::size_t>(cfg.classes_per_multi);
  std::vector<double> weights = cfg.multi_weights;
  if (weights.empty()) weights.assign(contributors, 1.0);
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;

  for (int m = 0; m < cfg.num_multiclass; ++m) {
    std::vector<std::uint32_t> counts(dists.front().size(), 0);
    std::vector<std::string> names;
    names.reserve(contributors);
    // Cumulative rounding hands each contributor its weight share of the
    // draw budget while keeping the total exactly at `draws`.
    double cum = 0.0;
    int given = 0;
    for (std::size_t j = 0; j < contributors; ++j) {
      const int c = (m + static_cast<int>(j)) % cfg.num_classes;
      cum += weights[j] / weight_sum;
      const int upto = (j + 1 == contributors)
                           ? draws
                           : static_cast<int>(cum * draws);
      const std::vector<std::uint32_t> part =
          multinomial_sample(upto - given, dists[static_cast<std::size_t>(c)], rng);
      for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += part[i];
      given = upto;
      names.push_back("class" + std::to_string(c));
    }
    std::sort(names.begin(), names.end());
    std::string label = names.front();
    for (std::size_t j = 1; j < names.size(); ++j) label += "," + names[j];
    data.ids.push_back("multi" + std::to_string(m));
    data.labels.push_back(std::move(label));
    data.profiles.push_back(counts_profile(cfg.k, std::move(counts)));
  }
  return data;
}

training::PairSet toy_pairs(const ToyDataset& data, const ToyConfig& cfg,
                            int negatives_per_positive) {
  return training::build_labeled_pairs(data.profiles, data.labels, cfg.positives_per_class,
                                       negatives_per_positive, cfg.seed);
}

}  // namespace probin::synth
