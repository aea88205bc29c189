// Similarity kernels over embeddings and a density-seeded K-medoid binner:
// the densest unassigned item (most neighbors at similarity >= t, self
// included) seeds each cluster, members are its unassigned neighbors, and the
// medoid is then recomputed as the member with the largest within-cluster
// similarity. Similarities are evaluated in fixed-size blocks so no full
// N x N matrix is ever held.
#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "probin/model.hpp"

namespace probin::binning {

enum class KernelKind { kCosine, kExpL1, kExpL2, kExpMahalanobis };

KernelKind parse_kernel(std::string_view name);
std::string_view kernel_name(KernelKind kind);

struct SimilarityKernel {
  KernelKind kind = KernelKind::kExpMahalanobis;
  double bandwidth = 1.0;  // divides the distance; unused by cosine and mahalanobis
};

// cosine: dot/(|a||b|); exp_l1: exp(-l1/bw); exp_l2: exp(-l2^2/bw);
// exp_mahalanobis: exp(-1/4 sum_d diff^2/(s_a+s_b)_d), which equals
// success_probability and needs variances.
double similarity(const SimilarityKernel& kernel, const model::GaussianEmbedding& a,
                  const model::GaussianEmbedding& b);
double similarity(const SimilarityKernel& kernel, const model::EmbeddingSet& set, std::size_t i,
                  std::size_t j);

struct KmedoidParams {
  double sim_threshold = 0.8;    // t: minimum similarity to count as a neighbor
  std::size_t min_bin_size = 5;  // m: stop once the densest item has < m neighbors
  int max_iters = 300;           // cap on clusters formed
  bool refine = false;           // one re-assignment sweep toward the best medoid
  std::size_t block_edge = 2048;
};

struct ClusterAssignment {
  std::vector<int> labels;           // per item; -1 = unassigned
  std::vector<std::size_t> medoids;  // medoids[c] is the item index of cluster c's medoid
  int num_clusters = 0;
};

ClusterAssignment kmedoid_bin(const model::EmbeddingSet& set, const SimilarityKernel& kernel,
                              const KmedoidParams& params);

// TSV: id, cluster, is_medoid. Unassigned items have cluster -1.
void write_assignment_tsv(const std::filesystem::path& path, std::span<const std::string> ids,
                          const ClusterAssignment& assignment);
struct AssignmentTable {
  std::vector<std::string> ids;
  ClusterAssignment assignment;
};
AssignmentTable read_assignment_tsv(const std::filesystem::path& path);

}  // namespace probin::binning
