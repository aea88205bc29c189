// Similarity kernels and the density-seeded K-medoid binner.
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "probin/binning.hpp"
#include "probin/common.hpp"
#include "probin/rng.hpp"
#include "probin/synth.hpp"
#include "probin/training.hpp"
#include "probin/util.hpp"
#include "test_util.hpp"

using namespace probin;

namespace {

// Embedding set of 2-d points with constant per-dim variance.
model::EmbeddingSet point_set(const std::vector<std::pair<double, double>>& points,
                              double sigma2) {
  model::EmbeddingSet set;
  set.count = points.size();
  set.dim = 2;
  for (std::size_t i = 0; i < points.size(); ++i) {
    set.ids.push_back("p" + std::to_string(i));
    set.mu.push_back(points[i].first);
    set.mu.push_back(points[i].second);
    set.sigma2.push_back(sigma2);
    set.sigma2.push_back(sigma2);
  }
  return set;
}

std::vector<std::pair<double, double>> two_masses(std::size_t per_mass) {
  std::vector<std::pair<double, double>> pts;
  Rng rng(41, "masses");
  for (std::size_t i = 0; i < per_mass; ++i)
    pts.emplace_back(rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01));
  for (std::size_t i = 0; i < per_mass; ++i)
    pts.emplace_back(10.0 + rng.uniform(-0.01, 0.01), 10.0 + rng.uniform(-0.01, 0.01));
  return pts;
}

}  // namespace

TEST_CASE("kernel names round trip") {
  for (const char* name : {"cosine", "exp-l1", "exp-l2", "exp-mahalanobis"}) {
    CHECK(binning::kernel_name(binning::parse_kernel(name)) == name);
  }
  CHECK_THROWS_AS(binning::parse_kernel("euclidean"), ValidationError);
}

TEST_CASE("kernels reproduce hand-computed values") {
  const model::GaussianEmbedding a{{0.0, 0.0}, {0.5, 0.5}};
  const model::GaussianEmbedding b{{1.0, 2.0}, {0.5, 0.5}};

  binning::SimilarityKernel k;
  k.kind = binning::KernelKind::kExpL1;
  k.bandwidth = 2.0;
  CHECK(binning::similarity(k, a, b) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
  k.kind = binning::KernelKind::kExpL2;
  CHECK(binning::similarity(k, a, b) == doctest::Approx(std::exp(-2.5)).epsilon(1e-12));
  k.kind = binning::KernelKind::kExpMahalanobis;
  CHECK(binning::similarity(k, a, b) == doctest::Approx(std::exp(-1.25)).epsilon(1e-12));
  CHECK(binning::similarity(k, a, b) ==
        doctest::Approx(model::success_probability(a, b)).epsilon(1e-14));
  CHECK(binning::similarity(k, a, a) == 1.0);

  const model::GaussianEmbedding e1{{1.0, 0.0}, {}};
  const model::GaussianEmbedding e2{{1.0, 1.0}, {}};
  k.kind = binning::KernelKind::kCosine;
  CHECK(binning::similarity(k, e1, e2) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("kernels validate their inputs") {
  const model::GaussianEmbedding a{{1.0, 0.0}, {}};
  const model::GaussianEmbedding zero{{0.0, 0.0}, {}};
  const model::GaussianEmbedding shorter{{1.0}, {}};
  binning::SimilarityKernel k;
  k.kind = binning::KernelKind::kCosine;
  CHECK_THROWS_AS(binning::similarity(k, a, zero), ValidationError);
  CHECK_THROWS_AS(binning::similarity(k, a, shorter), ValidationError);
  k.kind = binning::KernelKind::kExpL2;
  k.bandwidth = 0.0;
  CHECK_THROWS_AS(binning::similarity(k, a, zero), ValidationError);
  k.bandwidth = 1.0;
  k.kind = binning::KernelKind::kExpMahalanobis;
  CHECK_THROWS_AS(binning::similarity(k, a, zero), ValidationError);  // no variances
}

TEST_CASE("two well-separated masses bin into exactly two clusters") {
  const model::EmbeddingSet set = point_set(two_masses(25), 0.01);
  binning::SimilarityKernel kernel;  // exp-mahalanobis
  binning::KmedoidParams params;
  params.sim_threshold = 0.9;

  const binning::ClusterAssignment out = binning::kmedoid_bin(set, kernel, params);
  CHECK(out.num_clusters == 2);
  REQUIRE(out.medoids.size() == 2);
  for (int label : out.labels) CHECK(label >= 0);
  // Each mass is one cluster.
  for (std::size_t i = 1; i < 25; ++i) CHECK(out.labels[i] == out.labels[0]);
  for (std::size_t i = 26; i < 50; ++i) CHECK(out.labels[i] == out.labels[25]);
  CHECK(out.labels[0] != out.labels[25]);

  // The medoid belongs to its own cluster and maximizes within-cluster
  // similarity; ties go to the lowest item index.
  for (int c = 0; c < out.num_clusters; ++c) {
    const std::size_t medoid = out.medoids[static_cast<std::size_t>(c)];
    CHECK(out.labels[medoid] == c);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < set.count; ++i)
      if (out.labels[i] == c) members.push_back(i);
    const auto within = [&](std::size_t item) {
      double sum = 0;
      for (std::size_t m : members)
        if (m != item) sum += binning::similarity(kernel, set, item, m);
      return sum;
    };
    const double medoid_score = within(medoid);
    for (std::size_t m : members) {
      const double score = within(m);
      CHECK(score <= medoid_score + 1e-9);
      if (score == medoid_score) CHECK(medoid <= m);
    }
  }
}

TEST_CASE("binning is equivariant under item permutation") {
  const model::EmbeddingSet set = point_set(two_masses(10), 0.01);
  binning::SimilarityKernel kernel;
  binning::KmedoidParams params;
  params.sim_threshold = 0.9;
  params.min_bin_size = 3;

  std::vector<std::size_t> perm(set.count);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(9, "perm");
  rng.shuffle(perm);
  const model::EmbeddingSet shuffled = set.subset(perm);

  const binning::ClusterAssignment base = binning::kmedoid_bin(set, kernel, params);
  const binning::ClusterAssignment moved = binning::kmedoid_bin(shuffled, kernel, params);
  CHECK(moved.num_clusters == base.num_clusters);
  // Co-membership of every original pair is preserved.
  std::vector<std::size_t> pos(set.count);  // original index -> shuffled position
  for (std::size_t p = 0; p < perm.size(); ++p) pos[perm[p]] = p;
  for (std::size_t i = 0; i < set.count; ++i) {
    CHECK((base.labels[i] >= 0) == (moved.labels[pos[i]] >= 0));
    for (std::size_t j = i + 1; j < set.count; ++j) {
      const bool together = base.labels[i] >= 0 && base.labels[i] == base.labels[j];
      const bool together_moved =
          moved.labels[pos[i]] >= 0 && moved.labels[pos[i]] == moved.labels[pos[j]];
      CHECK(together == together_moved);
    }
  }
}

TEST_CASE("block size never changes the result") {
  const model::EmbeddingSet set = point_set(two_masses(12), 0.01);
  binning::SimilarityKernel kernel;
  binning::KmedoidParams params;
  params.sim_threshold = 0.9;
  binning::KmedoidParams blocked = params;
  blocked.block_edge = 3;

  const binning::ClusterAssignment a = binning::kmedoid_bin(set, kernel, params);
  const binning::ClusterAssignment b = binning::kmedoid_bin(set, kernel, blocked);
  CHECK(a.labels == b.labels);
  CHECK(a.medoids == b.medoids);
  CHECK(a.num_clusters == b.num_clusters);
}

TEST_CASE("binner stopping rules") {
  binning::SimilarityKernel kernel;

  // A single tight mass with min size 1 is one cluster.
  const model::EmbeddingSet mass = point_set(two_masses(8), 0.01);
  binning::KmedoidParams one;
  one.sim_threshold = 0.9;
  one.min_bin_size = 1;
  one.max_iters = 1;  // cap: only the first (densest) cluster forms
  const binning::ClusterAssignment capped = binning::kmedoid_bin(mass, kernel, one);
  CHECK(capped.num_clusters == 1);
  const int assigned = static_cast<int>(
      std::count_if(capped.labels.begin(), capped.labels.end(), [](int l) { return l >= 0; }));
  CHECK(assigned == 8);

  // Scattered singletons: below min_bin_size nothing forms, at 1 everything
  // becomes its own cluster.
  std::vector<std::pair<double, double>> scattered;
  for (int i = 0; i < 6; ++i) scattered.emplace_back(100.0 * i, -50.0 * i);
  const model::EmbeddingSet sparse = point_set(scattered, 0.01);
  binning::KmedoidParams none;
  none.sim_threshold = 0.9;
  none.min_bin_size = 2;
  const binning::ClusterAssignment empty = binning::kmedoid_bin(sparse, kernel, none);
  CHECK(empty.num_clusters == 0);
  for (int label : empty.labels) CHECK(label == -1);

  binning::KmedoidParams singles = none;
  singles.min_bin_size = 1;
  const binning::ClusterAssignment all = binning::kmedoid_bin(sparse, kernel, singles);
  CHECK(all.num_clusters == 6);
  for (std::size_t i = 0; i < sparse.count; ++i) CHECK(all.labels[all.medoids[i]] >= 0);

  // Parameter validation.
  binning::KmedoidParams bad;
  bad.sim_threshold = 0.0;
  CHECK_THROWS_AS(binning::kmedoid_bin(sparse, kernel, bad), ValidationError);
  bad = binning::KmedoidParams{};
  bad.sim_threshold = 1.5;
  CHECK_THROWS_AS(binning::kmedoid_bin(sparse, kernel, bad), ValidationError);
  bad = binning::KmedoidParams{};
  bad.min_bin_size = 0;
  CHECK_THROWS_AS(binning::kmedoid_bin(sparse, kernel, bad), ValidationError);
  bad = binning::KmedoidParams{};
  bad.max_iters = -1;
  CHECK_THROWS_AS(binning::kmedoid_bin(sparse, kernel, bad), ValidationError);
  bad = binning::KmedoidParams{};
  bad.block_edge = 0;
  CHECK_THROWS_AS(binning::kmedoid_bin(sparse, kernel, bad), ValidationError);
}

TEST_CASE("refinement reassigns toward the best medoid") {
  const model::EmbeddingSet set = point_set(two_masses(10), 0.01);
  binning::SimilarityKernel kernel;
  binning::KmedoidParams params;
  params.sim_threshold = 0.9;
  params.min_bin_size = 3;
  params.refine = true;

  const binning::ClusterAssignment out = binning::kmedoid_bin(set, kernel, params);
  REQUIRE(out.num_clusters == 2);
  for (std::size_t i = 0; i < set.count; ++i) {
    const bool is_medoid =
        std::find(out.medoids.begin(), out.medoids.end(), i) != out.medoids.end();
    if (is_medoid) continue;
    std::vector<double> sims;
    for (std::size_t m : out.medoids) sims.push_back(binning::similarity(kernel, set, i, m));
    const int label = out.labels[i];
    if (label < 0) {
      for (double s : sims) CHECK(s < params.sim_threshold);
    } else {
      CHECK(sims[static_cast<std::size_t>(label)] >= params.sim_threshold);
      for (double s : sims) CHECK(s <= sims[static_cast<std::size_t>(label)]);
    }
  }
}

TEST_CASE("trained toy embeddings bin into pure clusters") {
  synth::ToyConfig toy;
  toy.seed = 0;
  const synth::ToyDataset data = synth::sample_dataset(toy);
  const training::PairSet pairs = synth::toy_pairs(data, toy, 5);

  model::ModelConfig mc;
  mc.input_dim = 256;
  mc.hidden_dim = 64;
  mc.latent_dim = 2;
  training::TrainConfig tc;
  tc.mean_epochs = 50;
  tc.var_epochs = 20;
  tc.batch_size = 256;
  tc.seed = toy.seed;
  const training::TrainResult trained = training::train(pairs, mc, tc);

  const model::EmbeddingSet set = model::embed_all(trained.params, data.profiles, data.ids);
  // Trained classes sit far apart (cross-class similarity ~0) but within-class
  // similarity averages ~0.5, so the assignment threshold has to sit below that.
  binning::KmedoidParams params;
  params.sim_threshold = 0.4;
  params.refine = true;
  const binning::ClusterAssignment out =
      binning::kmedoid_bin(set, binning::SimilarityKernel{}, params);

  CHECK(out.num_clusters >= 4);
  CHECK(out.num_clusters <= 8);
  // Purity over assigned items: majority label mass per cluster.
  std::vector<std::map<std::string, int>> tally(static_cast<std::size_t>(out.num_clusters));
  int assigned = 0;
  for (std::size_t i = 0; i < set.count; ++i) {
    if (out.labels[i] < 0) continue;
    ++tally[static_cast<std::size_t>(out.labels[i])][data.labels[i]];
    ++assigned;
  }
  int majority = 0;
  for (const auto& counts : tally) {
    int best = 0;
    for (const auto& [label, c] : counts) best = std::max(best, c);
    majority += best;
  }
  CHECK(assigned >= static_cast<int>(set.count) / 2);
  CHECK(static_cast<double>(majority) >= 0.9 * static_cast<double>(assigned));
}

TEST_CASE("assignment TSV round trips and validates") {
  const auto dir = testutil::scratch_dir("binning_tsv");
  binning::ClusterAssignment assignment;
  assignment.labels = {0, 0, 1, -1, 1};
  assignment.medoids = {1, 2};
  assignment.num_clusters = 2;
  const std::vector<std::string> ids{"a", "b", "c", "d", "e"};

  const auto path = dir / "assign.tsv";
  binning::write_assignment_tsv(path, ids, assignment);
  const binning::AssignmentTable table = binning::read_assignment_tsv(path);
  CHECK(table.ids == ids);
  CHECK(table.assignment.labels == assignment.labels);
  CHECK(table.assignment.medoids == assignment.medoids);
  CHECK(table.assignment.num_clusters == 2);

  const std::vector<std::string> short_ids{"a"};
  CHECK_THROWS_AS(binning::write_assignment_tsv(dir / "x.tsv", short_ids, assignment),
                  ValidationError);

  const auto write = [&](const char* name, const std::string& text) {
    const auto p = dir / name;
    atomic_write_text(p, text);
    return p;
  };
  CHECK_THROWS_AS(binning::read_assignment_tsv(write("head.tsv", "id\tcluster\n")), ParseError);
  CHECK_THROWS_AS(
      binning::read_assignment_tsv(write("fields.tsv", "id\tcluster\tis_medoid\na\t0\n")),
      ParseError);
  CHECK_THROWS_AS(
      binning::read_assignment_tsv(
          write("badmedoid.tsv", "id\tcluster\tis_medoid\na\t-1\t1\n")),
      ParseError);
  CHECK_THROWS_AS(
      binning::read_assignment_tsv(
          write("nomedoid.tsv", "id\tcluster\tis_medoid\na\t0\t0\nb\t0\t0\n")),
      ParseError);
  CHECK_THROWS_AS(
      binning::read_assignment_tsv(write("badnum.tsv", "id\tcluster\tis_medoid\na\tx\t0\n")),
      ParseError);
}
