#include "probin/binning.hpp"

#include <algorithm>
#include <cmath>

#include "probin/common.hpp"
#include "probin/util.hpp"

namespace probin::binning {

KernelKind parse_kernel(std::string_view name) {
  if (name == "cosine") return KernelKind::kCosine;
  if (name == "exp-l1") return KernelKind::kExpL1;
  if (name == "exp-l2") return KernelKind::kExpL2;
  if (name == "exp-mahalanobis") return KernelKind::kExpMahalanobis;
  throw ValidationError("unknown kernel '" + std::string(name) +
                        "' (expected cosine, exp-l1, exp-l2, or exp-mahalanobis)");
}

std::string_view kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::kCosine: return "cosine";
    case KernelKind::kExpL1: return "exp-l1";
    case KernelKind::kExpL2: return "exp-l2";
    case KernelKind::kExpMahalanobis: return "exp-mahalanobis";
  }
  return "";
}

namespace {

double kernel_value(const SimilarityKernel& kernel, std::span<const double> mu_a,
                    std::span<const double> mu_b, const double* s_a, const double* s_b) {
  const std::size_t dim = mu_a.size();
  switch (kernel.kind) {
    case KernelKind::kCosine: {
      double dot = 0, na = 0, nb = 0;
      for (std::size_t d = 0; d < dim; ++d) {
        dot += mu_a[d] * mu_b[d];
        na += mu_a[d] * mu_a[d];
        nb += mu_b[d] * mu_b[d];
      }
      if (na == 0.0 || nb == 0.0)
        throw ValidationError("cosine similarity is undefined for a zero vector");
      return dot / std::sqrt(na * nb);
    }
    case KernelKind::kExpL1: {
      double l1 = 0;
      for (std::size_t d = 0; d < dim; ++d) l1 += std::abs(mu_a[d] - mu_b[d]);
      return std::exp(-l1 / kernel.bandwidth);
    }
    case KernelKind::kExpL2: {
      double l2 = 0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = mu_a[d] - mu_b[d];
        l2 += diff * diff;
      }
      return std::exp(-l2 / kernel.bandwidth);
    }
    case KernelKind::kExpMahalanobis: {
      double m = 0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = mu_a[d] - mu_b[d];
        m += diff * diff / (s_a[d] + s_b[d]);
      }
      return std::exp(-0.25 * m);
    }
  }
  throw ValidationError("unknown kernel");
}

void validate_kernel(const SimilarityKernel& kernel, bool has_variance) {
  if (!(kernel.bandwidth > 0.0)) throw ValidationError("kernel bandwidth must be positive");
  if (kernel.kind == KernelKind::kExpMahalanobis && !has_variance)
    throw ValidationError("exp-mahalanobis needs embeddings with variances");
}

}  // namespace

double similarity(const SimilarityKernel& kernel, const model::GaussianEmbedding& a,
                  const model::GaussianEmbedding& b) {
  if (a.mu.size() != b.mu.size() || a.mu.empty())
    throw ValidationError("embedding dimensions do not match");
  validate_kernel(kernel, !a.sigma2.empty() && !b.sigma2.empty());
  return kernel_value(kernel, a.mu, b.mu, a.sigma2.data(), b.sigma2.data());
}

double similarity(const SimilarityKernel& kernel, const model::EmbeddingSet& set, std::size_t i,
                  std::size_t j) {
  validate_kernel(kernel, set.has_variance());
  const double* s = set.sigma2.data();
  return kernel_value(kernel, set.mu_row(i), set.mu_row(j),
                      s ? s + i * set.dim : nullptr, s ? s + j * set.dim : nullptr);
}

namespace {

// Applies fn(i, j, sim) over rows x cols in blocks of at most block_edge.
template <typename Fn>
void blockwise(const model::EmbeddingSet& set, const SimilarityKernel& kernel,
               std::span<const std::size_t> rows, std::span<const std::size_t> cols,
               std::size_t block_edge, Fn&& fn) {
  for (std::size_t rb = 0; rb < rows.size(); rb += block_edge) {
    const std::size_t rend = std::min(rows.size(), rb + block_edge);
    for (std::size_t cb = 0; cb < cols.size(); cb += block_edge) {
      const std::size_t cend = std::min(cols.size(), cb + block_edge);
      for (std::size_t r = rb; r < rend; ++r)
        for (std::size_t c = cb; c < cend; ++c)
          fn(rows[r], cols[c], similarity(kernel, set, rows[r], cols[c]));
    }
  }
}

}  // namespace

ClusterAssignment kmedoid_bin(const model::EmbeddingSet& set, const SimilarityKernel& kernel,
                              const KmedoidParams& params) {
  if (!(params.sim_threshold > 0.0) || params.sim_threshold > 1.0)
    throw ValidationError("sim_threshold must be in (0, 1]");
  if (params.min_bin_size < 1) throw ValidationError("min_bin_size must be >= 1");
  if (params.max_iters < 0) throw ValidationError("max_iters must be >= 0");
  if (params.block_edge < 1) throw ValidationError("block_edge must be >= 1");

  const std::size_t n = set.count;
  ClusterAssignment out;
  out.labels.assign(n, -1);
  if (n == 0) return out;
  validate_kernel(kernel, set.has_variance());

  const double t = params.sim_threshold;
  std::vector<std::size_t> unassigned(n);
  for (std::size_t i = 0; i < n; ++i) unassigned[i] = i;

  // Neighbor counts at >= t over unassigned items, self included. Kept
  // incremental: when a cluster forms, members' contributions are subtracted.
  std::vector<std::size_t> count(n, 0);
  blockwise(set, kernel, unassigned, unassigned, params.block_edge,
            [&](std::size_t i, std::size_t, double sim) {
              if (sim >= t) ++count[i];
            });

  std::vector<std::size_t> members;
  while (out.num_clusters < params.max_iters && !unassigned.empty()) {
    std::size_t seed_item = n;
    std::size_t best = 0;
    for (std::size_t u : unassigned) {
      if (count[u] > best) {  // ties keep the lowest index, unassigned is sorted
        best = count[u];
        seed_item = u;
      }
    }
    if (seed_item == n || best < params.min_bin_size) break;

    members.clear();
    blockwise(set, kernel, std::span(&seed_item, 1), unassigned, params.block_edge,
              [&](std::size_t, std::size_t j, double sim) {
                if (sim >= t) members.push_back(j);
              });

    const int cluster = out.num_clusters++;
    for (std::size_t m : members) out.labels[m] = cluster;

    // Medoid: member with the largest total similarity to the other members;
    // ties keep the lowest item index.
    std::vector<double> within(members.size(), 0.0);
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const double sim = similarity(kernel, set, members[a], members[b]);
        within[a] += sim;
        within[b] += sim;
      }
    std::size_t medoid = members[0];
    double best_within = within.empty() ? 0.0 : within[0];
    for (std::size_t i = 1; i < members.size(); ++i)
      if (within[i] > best_within) {
        best_within = within[i];
        medoid = members[i];
      }
    out.medoids.push_back(medoid);

    std::vector<std::size_t> remaining;
    remaining.reserve(unassigned.size() - members.size());
    for (std::size_t u : unassigned)
      if (out.labels[u] < 0) remaining.push_back(u);
    blockwise(set, kernel, remaining, members, params.block_edge,
              [&](std::size_t i, std::size_t, double sim) {
                if (sim >= t) --count[i];
              });
    unassigned = std::move(remaining);
  }

  if (params.refine && out.num_clusters > 0) {
    // Re-assign every non-medoid item to its most similar medoid, or leave it
    // unassigned when no medoid reaches the threshold.
    std::vector<char> is_medoid(n, 0);
    for (std::size_t m : out.medoids) is_medoid[m] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (is_medoid[i]) continue;
      int best_cluster = -1;
      double best_sim = 0.0;
      for (std::size_t c = 0; c < out.medoids.size(); ++c) {
        const double sim = similarity(kernel, set, i, out.medoids[c]);
        if (sim >= t && (best_cluster < 0 || sim > best_sim)) {
          best_cluster = static_cast<int>(c);
          best_sim = sim;
        }
      }
      out.labels[i] = best_cluster;
    }
  }
  return out;
}

void write_assignment_tsv(const std::filesystem::path& path, std::span<const std::string> ids,
                          const ClusterAssignment& assignment) {
  if (ids.size() != assignment.labels.size())
    throw ValidationError("ids and assignment differ in length");
  std::vector<char> is_medoid(ids.size(), 0);
  for (std::size_t m : assignment.medoids) is_medoid[m] = 1;
  std::string out = "id\tcluster\tis_medoid\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i];
    out += '\t';
    out += std::to_string(assignment.labels[i]);
    out += '\t';
    out += is_medoid[i] ? '1' : '0';
    out += '\n';
  }
  atomic_write_text(path, out);
}

AssignmentTable read_assignment_tsv(const std::filesystem::path& path) {
  const std::string data = read_text_file(path);
  const std::vector<std::string> lines = split(data, '\n');
  if (lines.empty() || lines[0] != "id\tcluster\tis_medoid")
    throw ParseError(path.string() + ":1: header must be 'id\\tcluster\\tis_medoid'");

  AssignmentTable table;
  std::vector<std::pair<int, std::size_t>> medoid_rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const std::vector<std::string> fields = split(lines[r], '\t');
    if (fields.size() != 3)
      throw ParseError(path.string() + ":" + std::to_string(r + 1) + ": expected 3 fields");
    const std::string ctx = path.string() + ":" + std::to_string(r + 1);
    const int cluster = static_cast<int>(parse_int(fields[1], ctx));
    const long long medoid_flag = parse_int(fields[2], ctx);
    table.ids.push_back(fields[0]);
    table.assignment.labels.push_back(cluster);
    if (medoid_flag == 1) {
      if (cluster < 0) throw ParseError(ctx + ": unassigned item marked as medoid");
      medoid_rows.emplace_back(cluster, table.ids.size() - 1);
    }
    if (cluster >= table.assignment.num_clusters) table.assignment.num_clusters = cluster + 1;
  }
  table.assignment.medoids.assign(static_cast<std::size_t>(table.assignment.num_clusters), 0);
  std::vector<char> seen(static_cast<std::size_t>(table.assignment.num_clusters), 0);
  for (const auto& [cluster, row] : medoid_rows) {
    table.assignment.medoids[static_cast<std::size_t>(cluster)] = row;
    seen[static_cast<std::size_t>(cluster)] = 1;
  }
  for (std::size_t c = 0; c < seen.size(); ++c)
    if (!seen[c])
      throw ParseError(path.string() + ": cluster " + std::to_string(c) + " has no medoid row");
  return table;
}

}  // namespace probin::binning
