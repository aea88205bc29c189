// Contrastive training. Pairs reference a shared profile pool by index so a
// pair list stays small even with hundreds of negatives per positive. The
// loss is -sum[y log q + (1-y) log(1-q)] with q clamped away from {0,1};
// training runs in two stages: mean head first, then the variance head with
// means frozen.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "probin/kmer.hpp"
#include "probin/model.hpp"
#include "probin/seqio.hpp"

namespace probin::training {

struct TrainConfig {
  double learning_rate = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int mean_epochs = 50;              // stage 1: mean head only
  int var_epochs = 20;               // stage 2: variance head only
  int negatives_per_positive = 200;  // sampled with replacement
  std::size_t batch_size = 100000;   // pairs per optimizer step
  std::uint64_t seed = 0;
  bool regenerate_stage2_pairs = false;  // default: stage 2 reuses stage-1 pairs
};

struct KmerOptions {
  int k = 4;
  bool normalize = true;
};

struct TrainingPair {
  std::uint32_t left = 0;   // index into PairSet::profiles
  std::uint32_t right = 0;
  std::uint8_t label = 0;   // 1 iff both sides come from the same source
};

struct PairSet {
  std::vector<kmer::KmerProfile> profiles;
  std::vector<TrainingPair> pairs;

  std::size_t num_positives() const;
  std::size_t num_negatives() const;
};

// Fragment scheme: each fragment is halved; its two halves form the positive,
// and each of `negatives_per_positive` negatives pairs the left half with the
// right half of a uniformly drawn other fragment. Profile pool layout is all
// left halves, then all right halves.
PairSet build_pairs(const std::vector<seqio::Sequence>& fragments, const TrainConfig& cfg,
                    const KmerOptions& kmer_opts);

// Label scheme for pre-profiled items: for every item and every species in
// its comma-separated label, `positives_per_class` partners are drawn from
// items carrying exactly that species as their whole label; negatives draw a
// uniform other item per positive regardless of label, so some negatives are
// false (same species) by construction.
PairSet build_labeled_pairs(std::span<const kmer::KmerProfile> profiles,
                            std::span<const std::string> labels, int positives_per_class,
                            int negatives_per_positive, std::uint64_t seed);

// Uniform subsample without replacement, preserving input order.
std::vector<seqio::LabeledSequence> subsample(const std::vector<seqio::LabeledSequence>& records,
                                              std::size_t n, std::uint64_t seed);

enum class Stage { kMeanOnly, kVarOnly, kBoth };

// Loss and gradient of one pair given the log-probability A = log q (always
// <= 0). Clamping makes both branches finite; inside the clamp region the
// gradient is exact, outside it is zero.
struct PairLoss {
  double loss = 0;
  double d_log_q = 0;
};
PairLoss pair_log_loss(double log_q, int label);

// Summed loss over every pair in the set.
double loss(const model::MlpParams& params, const PairSet& pairs);

// Exact analytic gradients, summed over pairs. Stage masking zeroes the
// frozen head's tensors (variance head during kMeanOnly and vice versa).
struct Gradients {
  model::HeadParams mean_net;
  model::HeadParams var_net;
  double loss = 0;
};
Gradients gradients(const model::MlpParams& params, const PairSet& pairs, Stage stage);

struct EpochRecord {
  int stage = 0;  // 1 = mean, 2 = variance
  int epoch = 0;  // 1-based within its stage
  double mean_loss = 0;
};

struct TrainResult {
  model::MlpParams params;
  std::vector<EpochRecord> trace;
};

// Adam over shuffled mini-batches; the shuffle is keyed by (seed, stage,
// epoch) so runs with equal seeds are bitwise identical. Deterministic-kind
// models train the mean head for mean_epochs + var_epochs total epochs.
// `stage2_pairs` substitutes a fresh pair set for the variance stage.
TrainResult train(const PairSet& pairs, const model::ModelConfig& model_cfg,
                  const TrainConfig& cfg, model::ModelKind kind = model::ModelKind::kProbabilistic,
                  const PairSet* stage2_pairs = nullptr);

// CSV columns: stage, epoch, mean_loss.
void write_trace_csv(const std::filesystem::path& path, std::span<const EpochRecord> trace);

}  // namespace probin::training
