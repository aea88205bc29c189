// Majority-label bin scoring, uncertainty ranking, filtering experiment,
// and the latent dimension sweep.
#include "probin/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "json.hpp"
#include "probin/common.hpp"
#include "probin/rng.hpp"
#include "probin/util.hpp"

namespace probin::evaluation {

namespace {

std::size_t tier_index(double f1) {
  for (std::size_t t = 0; t < kTierEdges.size(); ++t) {
    if (f1 > kTierEdges[t]) return t;
  }
  return kTierEdges.size();
}

}  // namespace

BinningReport score_bins(const binning::ClusterAssignment& assignment,
                         std::span<const std::string> truth_labels) {
  const std::size_t n = assignment.labels.size();
  if (truth_labels.size() != n) {
    throw ValidationError("score_bins: " + std::to_string(n) + " assignments vs " +
                          std::to_string(truth_labels.size()) + " truth labels");
  }
  // Species totals over the whole dataset; unassigned items still count
  // toward their species' recall denominator.
  std::map<std::string, std::size_t> species_total;
  for (std::size_t i = 0; i < n; ++i) {
    if (!truth_labels[i].empty()) ++species_total[truth_labels[i]];
  }

  BinningReport report;
  report.num_clusters = assignment.num_clusters;
  std::vector<std::map<std::string, std::size_t>> per_cluster(
      static_cast<std::size_t>(assignment.num_clusters));
  std::vector<std::size_t> cluster_size(static_cast<std::size_t>(assignment.num_clusters), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = assignment.labels[i];
    if (c < 0) {
      ++report.num_unassigned;
      continue;
    }
    if (truth_labels[i].empty()) {
      throw ValidationError("score_bins: item " + std::to_string(i) +
                            " is assigned but has no truth label");
    }
    ++per_cluster[static_cast<std::size_t>(c)][truth_labels[i]];
    ++cluster_size[static_cast<std::size_t>(c)];
  }

  for (int c = 0; c < assignment.num_clusters; ++c) {
    const auto& counts = per_cluster[static_cast<std::size_t>(c)];
    // std::map iterates keys in order, so the first maximal count wins the
    // tie with the lexicographically smallest species.
    std::string best;
    std::size_t best_count = 0;
    for (const auto& [species, count] : counts) {
      if (count > best_count) {
        best = species;
        best_count = count;
      }
    }
    BinScore score;
    score.cluster_id = c;
    score.species = best;
    score.size = cluster_size[static_cast<std::size_t>(c)];
    score.precision = static_cast<double>(best_count) / static_cast<double>(score.size);
    score.recall = static_cast<double>(best_count) / static_cast<double>(species_total.at(best));
    // 2PR/(P+R) reduced to one division over the raw counts, so an edge case
    // like 8-of-10 twice gives exactly 0.8 and lands in its closed tier.
    score.f1 = 2 * static_cast<double>(best_count) /
               static_cast<double>(score.size + species_total.at(best));
    report.tier_counts[tier_index(score.f1)] += 1;
    report.bins.push_back(std::move(score));
  }
  report.high_quality = report.tier_counts[0];
  return report;
}

std::vector<double> uncertainty_scores(const model::EmbeddingSet& set) {
  if (!set.has_variance()) {
    throw ValidationError("uncertainty_scores: embeddings carry no variances");
  }
  std::vector<double> u(set.count, 0.0);
  for (std::size_t i = 0; i < set.count; ++i) {
    double total = 0;
    for (double s2 : set.sigma2_row(i)) total += std::log1p(s2);
    u[i] = total;
  }
  return u;
}

std::vector<UncertaintyScore> ranked_uncertainty(const model::EmbeddingSet& set) {
  const std::vector<double> u = uncertainty_scores(set);
  std::vector<std::size_t> order(set.count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
  std::vector<UncertaintyScore> ranked;
  ranked.reserve(set.count);
  for (std::size_t i : order) {
    std::string id = i < set.ids.size() ? set.ids[i] : "item" + std::to_string(i);
    ranked.push_back({std::move(id), u[i]});
  }
  return ranked;
}

FilterMode parse_filter_mode(std::string_view name) {
  if (name == "uncertainty") return FilterMode::kUncertainty;
  if (name == "random") return FilterMode::kRandom;
  throw ValidationError("unknown filter mode: " + std::string(name));
}

std::string_view filter_mode_name(FilterMode mode) {
  return mode == FilterMode::kUncertainty ? "uncertainty" : "random";
}

std::vector<FilterPoint> filter_experiment(const model::EmbeddingSet& set,
                                           std::span<const std::string> truth_labels,
                                           std::span<const double> ratios, FilterMode mode,
                                           double recall_threshold, std::uint64_t seed,
                                           const binning::SimilarityKernel& kernel,
                                           const binning::KmedoidParams& params) {
  const std::size_t n = set.count;
  if (truth_labels.size() != n) {
    throw ValidationError("filter_experiment: embeddings and truth labels disagree in size");
  }
  if (recall_threshold <= 0 || recall_threshold > 1) {
    throw ValidationError("filter_experiment: recall threshold must lie in (0, 1]");
  }
  for (double r : ratios) {
    if (!(r >= 0 && r < 1)) {
      throw ValidationError("filter_experiment: ratios must lie in [0, 1)");
    }
  }

  // Uncertainty order is shared across ratios; random draws are re-seeded
  // per ratio index so dropping a ratio from the list does not shift later
  // draws.
  std::vector<std::size_t> by_uncertainty;
  if (mode == FilterMode::kUncertainty) {
    const std::vector<double> u = uncertainty_scores(set);
    by_uncertainty.resize(n);
    std::iota(by_uncertainty.begin(), by_uncertainty.end(), std::size_t{0});
    std::stable_sort(by_uncertainty.begin(), by_uncertainty.end(),
                     [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
  }

  std::vector<FilterPoint> points;
  points.reserve(ratios.size());
  for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
    const std::size_t k = static_cast<std::size_t>(ratios[ri] * static_cast<double>(n));
    std::vector<char> removed(n, 0);
    if (mode == FilterMode::kUncertainty) {
      for (std::size_t i = 0; i < k; ++i) removed[by_uncertainty[i]] = 1;
    } else {
      Rng rng(seed, "filter", ri);
      std::vector<std::size_t> pool(n);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.below(n - i);
        std::swap(pool[i], pool[j]);
        removed[pool[i]] = 1;
      }
    }
    std::vector<std::size_t> retained;
    retained.reserve(n - k);
    for (std::size_t i = 0; i < n; ++i) {
      if (!removed[i]) retained.push_back(i);
    }

    const model::EmbeddingSet sub = set.subset(retained);
    const binning::ClusterAssignment assignment = binning::kmedoid_bin(sub, kernel, params);

    // Removed items land in the garbage pool: no cluster holds them, but they
    // keep their place in the species totals, so a mode that throws away good
    // items pays for it in recall.
    binning::ClusterAssignment full;
    full.labels.assign(n, -1);
    full.num_clusters = assignment.num_clusters;
    for (std::size_t i = 0; i < retained.size(); ++i) {
      full.labels[retained[i]] = assignment.labels[i];
    }
    const BinningReport report = score_bins(full, truth_labels);

    FilterPoint point;
    point.mode = mode;
    point.ratio = ratios[ri];
    point.removed = k;
    point.num_clusters = static_cast<std::size_t>(report.num_clusters);
    for (const BinScore& bin : report.bins) {
      if (bin.recall >= recall_threshold) ++point.clusters_recall_ge_threshold;
    }
    points.push_back(point);
  }
  return points;
}

std::vector<SweepRow> dimension_sweep(const SweepDataset& data, std::span<const int> dims,
                                      model::ModelConfig model_cfg,
                                      const training::TrainConfig& train_cfg,
                                      const binning::KmedoidParams& params) {
  if (data.ids.size() != data.profiles.size() || data.ids.size() != data.labels.size()) {
    throw ValidationError("dimension_sweep: ids, labels, and profiles disagree in size");
  }
  std::vector<SweepRow> rows;
  for (int d : dims) {
    if (d < 1) throw ValidationError("dimension_sweep: latent dimension must be >= 1");
    model_cfg.latent_dim = static_cast<std::size_t>(d);
    for (model::ModelKind kind :
         {model::ModelKind::kProbabilistic, model::ModelKind::kDeterministic}) {
      const training::TrainResult trained =
          training::train(data.pairs, model_cfg, train_cfg, kind);
      const model::EmbeddingSet embeddings =
          model::embed_all(trained.params, data.profiles, data.ids);
      binning::SimilarityKernel kernel;
      kernel.kind = kind == model::ModelKind::kProbabilistic ? binning::KernelKind::kExpMahalanobis
                                                             : binning::KernelKind::kExpL2;
      kernel.bandwidth = 1.0;
      const binning::ClusterAssignment assignment =
          binning::kmedoid_bin(embeddings, kernel, params);
      const BinningReport report = score_bins(assignment, data.labels);
      rows.push_back({d, kind, report.high_quality});
    }
  }
  return rows;
}

void write_report_json(const std::filesystem::path& path, const BinningReport& report) {
  nlohmann::ordered_json j;
  j["num_clusters"] = report.num_clusters;
  j["num_unassigned"] = report.num_unassigned;
  j["high_quality"] = report.high_quality;
  j["tier_counts"] = report.tier_counts;
  nlohmann::ordered_json bins = nlohmann::ordered_json::array();
  for (const BinScore& bin : report.bins) {
    nlohmann::ordered_json b;
    b["cluster_id"] = bin.cluster_id;
    b["species"] = bin.species;
    b["size"] = bin.size;
    b["precision"] = bin.precision;
    b["recall"] = bin.recall;
    b["f1"] = bin.f1;
    bins.push_back(std::move(b));
  }
  j["bins"] = std::move(bins);
  atomic_write_text(path, j.dump(1) + "\n");
}

void write_tiers_csv(const std::filesystem::path& path, const BinningReport& report) {
  static constexpr std::array<const char*, 5> kTierNames{">0.9", "0.8-0.9", "0.7-0.8", "0.6-0.7",
                                                         "<=0.6"};
  std::string out = "f1_tier,count\n";
  for (std::size_t t = 0; t < kTierNames.size(); ++t) {
    out += kTierNames[t];
    out += ',';
    out += std::to_string(report.tier_counts[t]);
    out += '\n';
  }
  atomic_write_text(path, out);
}

void write_filter_csv(const std::filesystem::path& path, std::span<const FilterPoint> points) {
  std::string out = "mode,ratio,removed,num_clusters,clusters_recall_ge_threshold\n";
  for (const FilterPoint& p : points) {
    out += filter_mode_name(p.mode);
    out += ',';
    out += format_double(p.ratio);
    out += ',';
    out += std::to_string(p.removed);
    out += ',';
    out += std::to_string(p.num_clusters);
    out += ',';
    out += std::to_string(p.clusters_recall_ge_threshold);
    out += '\n';
  }
  atomic_write_text(path, out);
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  std::string out = "latent_dim,model_kind,high_quality\n";
  for (const SweepRow& row : rows) {
    out += std::to_string(row.latent_dim);
    out += ',';
    out += model::model_kind_name(row.kind);
    out += ',';
    out += std::to_string(row.high_quality);
    out += '\n';
  }
  atomic_write_text(path, out);
}

void write_truth_tsv(const std::filesystem::path& path, std::span<const std::string> ids,
                     std::span<const std::string> labels) {
  if (ids.size() != labels.size()) {
    throw ValidationError("write_truth_tsv: ids and labels disagree in size");
  }
  std::string out = "id\tlabel\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i];
    out += '\t';
    out += labels[i];
    out += '\n';
  }
  atomic_write_text(path, out);
}

const std::string* TruthTable::find(const std::string& id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return &labels[i];
  }
  return nullptr;
}

TruthTable read_truth_tsv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const std::vector<std::string> lines = split(text, '\n');
  if (lines.empty() || lines[0] != "id\tlabel") {
    throw ParseError(path.string() + ": expected header \"id\\tlabel\"");
  }
  TruthTable table;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const std::vector<std::string> fields = split(lines[li], '\t');
    if (fields.size() != 2) {
      throw ParseError(path.string() + ":" + std::to_string(li + 1) + ": expected 2 fields, got " +
                       std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw ParseError(path.string() + ":" + std::to_string(li + 1) + ": empty id");
    }
    table.ids.push_back(fields[0]);
    table.labels.push_back(fields[1]);
  }
  return table;
}

}  // namespace probin::evaluation
