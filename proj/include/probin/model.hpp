// Gaussian sequence embeddings: two 2-layer sigmoid MLP heads map a k-mer
// profile to a mean vector and a diagonal variance vector. The pairwise
// similarity marginalizes a Gaussian kernel over both embeddings, which has
// a closed form for diagonal covariances.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "probin/kmer.hpp"

namespace probin::model {

struct ModelConfig {
  int input_dim = 256;           // profile length, 4^k
  int hidden_dim = 512;
  int latent_dim = 256;          // D
  double alpha = 1.0;            // kernel width as a multiple of the summed variances
  double variance_floor = 1e-6;  // added after softplus; keeps sigma^2 > 0
};

// Deterministic models train the mean head only and score pairs with
// exp(-||mu_i - mu_j||^2); probabilistic models use both heads.
enum class ModelKind { kProbabilistic, kDeterministic };

ModelKind parse_model_kind(std::string_view name);
std::string_view model_kind_name(ModelKind kind);

// One 2-layer head: y = w2 * sigmoid(w1 x + b1) + b2, row-major weights.
struct HeadParams {
  std::vector<double> w1;  // hidden_dim x input_dim
  std::vector<double> b1;  // hidden_dim
  std::vector<double> w2;  // latent_dim x hidden_dim
  std::vector<double> b2;  // latent_dim
};

struct MlpParams {
  ModelConfig config;
  ModelKind kind = ModelKind::kProbabilistic;
  HeadParams mean_net;
  HeadParams var_net;
};

struct GaussianEmbedding {
  std::vector<double> mu;
  std::vector<double> sigma2;  // strictly positive, one entry per latent dim
};

// Weights uniform in +-1/sqrt(fan_in) from the "init" sub-stream of `seed`;
// hidden biases zero; the variance head's output bias starts at -5 so initial
// variances are small.
MlpParams init_params(const ModelConfig& config, std::uint64_t seed,
                      ModelKind kind = ModelKind::kProbabilistic);

// Raw head evaluation; `hidden` (hidden_dim) and `y` (out_dim) are written.
void forward_head(const HeadParams& head, int input_dim, int hidden_dim, int out_dim,
                  const double* x, double* hidden, double* y);

double softplus(double x);

std::vector<double> embed_mean(const MlpParams& params, std::span<const double> x);
std::vector<double> embed_var(const MlpParams& params, std::span<const double> x);
GaussianEmbedding embed(const MlpParams& params, const kmer::KmerProfile& profile);

// E[exp(-(z_i - z_j)^T K^{-1} (z_i - z_j) / 2)] for z ~ N(mu, diag(sigma2))
// and K = alpha * diag(sigma2_i + sigma2_j):
//   (1 + 1/alpha)^(-D/2) * exp(-sum_d diff_d^2/(s_i+s_j)_d / (2(1+alpha))).
// Tends to 1 as alpha -> inf and to 0 as alpha -> 0.
double expected_likelihood(const GaussianEmbedding& a, const GaussianEmbedding& b, double alpha);

// The alpha=1 expectation renormalized by sqrt(2^D) so identical embeddings
// score exactly 1: q = exp(-1/4 * sum_d diff_d^2 / (s_i + s_j)_d).
double success_probability(const GaussianEmbedding& a, const GaussianEmbedding& b);

// Variance-free baseline score exp(-||mu_i - mu_j||^2).
double deterministic_probability(std::span<const double> mu_a, std::span<const double> mu_b);

// Probabilities are clamped to [1e-12, 1 - 1e-12] before entering logarithms.
double clamp_probability(double p);

// Embeddings for many items, with optional ids carried alongside. Rows are
// stored flat; sigma2 is empty only for sets loaded from mean-only sources.
struct EmbeddingSet {
  std::vector<std::string> ids;
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> mu;      // count x dim
  std::vector<double> sigma2;  // count x dim, or empty

  bool has_variance() const { return !sigma2.empty(); }
  std::span<const double> mu_row(std::size_t i) const { return {mu.data() + i * dim, dim}; }
  std::span<const double> sigma2_row(std::size_t i) const {
    return {sigma2.data() + i * dim, dim};
  }
  GaussianEmbedding get(std::size_t i) const;
  EmbeddingSet subset(std::span<const std::size_t> indices) const;
};

EmbeddingSet embed_all(const MlpParams& params, std::span<const kmer::KmerProfile> profiles,
                       std::span<const std::string> ids);

// TSV: id, mu_0..mu_{D-1}, var_0..var_{D-1}.
void write_embeddings_tsv(const std::filesystem::path& path, const EmbeddingSet& set);
EmbeddingSet read_embeddings_tsv(const std::filesystem::path& path);

// Self-describing JSON checkpoint (format_version, kind, config, weights).
void save_checkpoint(const std::filesystem::path& path, const MlpParams& params);
MlpParams load_checkpoint(const std::filesystem::path& path);

}  // namespace probin::model
