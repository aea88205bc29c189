// Cluster scoring against ground truth (majority-label precision/recall/F1
// with quality tiers), log-variance uncertainty scores, and the two
// experiment harnesses: uncertainty-ranked filtering and the latent
// dimension sweep.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "probin/binning.hpp"
#include "probin/model.hpp"
#include "probin/training.hpp"

namespace probin::evaluation {

struct BinScore {
  int cluster_id = 0;
  std::string species;  // majority ground-truth label; lexicographic tie-break
  std::size_t size = 0;
  double precision = 0;
  double recall = 0;  // denominator counts unassigned items of that species too
  double f1 = 0;
};

// F1 tiers: (0.9, 1], (0.8, 0.9], (0.7, 0.8], (0.6, 0.7], [0, 0.6].
inline constexpr std::array<double, 4> kTierEdges{0.9, 0.8, 0.7, 0.6};

struct BinningReport {
  std::vector<BinScore> bins;
  std::array<std::size_t, 5> tier_counts{};
  std::size_t high_quality = 0;  // bins with f1 > 0.9, == tier_counts[0]
  std::size_t num_unassigned = 0;
  int num_clusters = 0;
};

// truth_labels[i] belongs to item i of the assignment. Every assigned item
// must have a non-empty label; unassigned items may be unlabeled.
BinningReport score_bins(const binning::ClusterAssignment& assignment,
                         std::span<const std::string> truth_labels);

// u = sum_d log(sigma2_d + 1); grows with any variance and is 0 only in the
// zero-variance limit.
std::vector<double> uncertainty_scores(const model::EmbeddingSet& set);

struct UncertaintyScore {
  std::string id;
  double u = 0;
};
// Sorted by u descending, ties by input order.
std::vector<UncertaintyScore> ranked_uncertainty(const model::EmbeddingSet& set);

enum class FilterMode { kUncertainty, kRandom };
FilterMode parse_filter_mode(std::string_view name);
std::string_view filter_mode_name(FilterMode mode);

struct FilterPoint {
  FilterMode mode = FilterMode::kUncertainty;
  double ratio = 0;
  std::size_t removed = 0;
  std::size_t num_clusters = 0;
  std::size_t clusters_recall_ge_threshold = 0;
};

// For each ratio r, removes floor(r*N) items (most uncertain first, or a
// seeded uniform draw), re-clusters the retained set, and counts clusters
// whose recall reaches the threshold. Removed items land in a garbage pool:
// they join no cluster but stay in the species totals, so discarding good
// items costs recall. Ratios must lie in [0, 1).
std::vector<FilterPoint> filter_experiment(const model::EmbeddingSet& set,
                                           std::span<const std::string> truth_labels,
                                           std::span<const double> ratios, FilterMode mode,
                                           double recall_threshold, std::uint64_t seed,
                                           const binning::SimilarityKernel& kernel,
                                           const binning::KmedoidParams& params);

// Items plus their training pairs; the sweep trains on `pairs` and bins the
// embeddings of `profiles`.
struct SweepDataset {
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  std::vector<kmer::KmerProfile> profiles;
  training::PairSet pairs;
};

struct SweepRow {
  int latent_dim = 0;
  model::ModelKind kind = model::ModelKind::kProbabilistic;
  std::size_t high_quality = 0;
};

// Trains a probabilistic and a deterministic model per latent dimension on
// the same pairs and seed, bins each (exp-mahalanobis vs exp-l2), and
// reports high-quality bin counts.
std::vector<SweepRow> dimension_sweep(const SweepDataset& data, std::span<const int> dims,
                                      model::ModelConfig model_cfg,
                                      const training::TrainConfig& train_cfg,
                                      const binning::KmedoidParams& params);

void write_report_json(const std::filesystem::path& path, const BinningReport& report);
void write_tiers_csv(const std::filesystem::path& path, const BinningReport& report);
void write_filter_csv(const std::filesystem::path& path, std::span<const FilterPoint> points);
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);

// Ground truth TSV with header "id\tlabel".
void write_truth_tsv(const std::filesystem::path& path, std::span<const std::string> ids,
                     std::span<const std::string> labels);
struct TruthTable {
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  const std::string* find(const std::string& id) const;
};
TruthTable read_truth_tsv(const std::filesystem::path& path);

}  // namespace probin::evaluation
