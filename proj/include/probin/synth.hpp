// Synthetic toy data: per-class k-mer distributions with disjoint support
// blocks, exact multinomial count sampling, and optional mixed-class items.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "probin/kmer.hpp"
#include "probin/rng.hpp"
#include "probin/training.hpp"

namespace probin::synth {

struct ToyConfig {
  int num_classes = 5;
  int seqs_per_class = 25;
  int seq_len = 100;  // draws per item = seq_len - k + 1
  int k = 4;
  double smoothing = 1e-2;
  int num_multiclass = 5;     // extra items mixing several adjacent classes
  int classes_per_multi = 2;  // contributing classes per mixed item
  std::vector<double> multi_weights;  // per-contributor mix; empty = equal
  int positives_per_class = 4;
  std::uint64_t seed = 0;
};

void validate_toy_config(const ToyConfig& cfg);

// Class c concentrates mass on a contiguous block of floor(4^k / C) k-mer
// indices starting at c * block; a smoothing floor keeps every entry
// positive: p = (block_indicator / block + s / 4^k) / (1 + s).
std::vector<std::vector<double>> make_class_distributions(const ToyConfig& cfg);

// Exact multinomial: sequential binomial decomposition with Bernoulli
// trials, so results are identical across platforms for a given rng state.
std::vector<std::uint32_t> multinomial_sample(int n, const std::vector<double>& probs, Rng& rng);

struct ToyDataset {
  std::vector<std::string> ids;
  std::vector<std::string> labels;  // mixed items carry comma-joined labels
  std::vector<kmer::KmerProfile> profiles;  // raw counts
};

// Items class{c}_seq{s} with label class{c}, then multi{m} items whose
// draws split across classes (m + j) mod C, j < classes_per_multi,
// proportionally to multi_weights (equal when unset).
ToyDataset sample_dataset(const ToyConfig& cfg);

training::PairSet toy_pairs(const ToyDataset& data, const ToyConfig& cfg,
                            int negatives_per_positive);

}  // namespace probin::synth
