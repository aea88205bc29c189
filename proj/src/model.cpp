#include "probin/model.hpp"

#include <cmath>

#include "json.hpp"

#include "probin/common.hpp"
#include "probin/rng.hpp"
#include "probin/util.hpp"

namespace probin::model {

using nlohmann::json;

ModelKind parse_model_kind(std::string_view name) {
  if (name == "probabilistic") return ModelKind::kProbabilistic;
  if (name == "deterministic") return ModelKind::kDeterministic;
  throw ValidationError("unknown model kind '" + std::string(name) + "'");
}

std::string_view model_kind_name(ModelKind kind) {
  return kind == ModelKind::kProbabilistic ? "probabilistic" : "deterministic";
}

namespace {

void validate_config(const ModelConfig& c) {
  if (c.input_dim < 1 || c.hidden_dim < 1 || c.latent_dim < 1)
    throw ValidationError("model dimensions must be positive");
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha))
    throw ValidationError("alpha must be positive and finite");
  if (!(c.variance_floor > 0.0))
    throw ValidationError("variance floor must be positive");
}

void init_head(HeadParams& head, int input_dim, int hidden_dim, int out_dim, Rng& rng) {
  head.w1.resize(static_cast<std::size_t>(hidden_dim) * input_dim);
  head.b1.assign(static_cast<std::size_t>(hidden_dim), 0.0);
  head.w2.resize(static_cast<std::size_t>(out_dim) * hidden_dim);
  head.b2.assign(static_cast<std::size_t>(out_dim), 0.0);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (double& w : head.w1) w = rng.uniform(-s1, s1);
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (double& w : head.w2) w = rng.uniform(-s2, s2);
}

}  // namespace

MlpParams init_params(const ModelConfig& config, std::uint64_t seed, ModelKind kind) {
  validate_config(config);
  MlpParams p;
  p.config = config;
  p.kind = kind;
  Rng rng(seed, "init");
  init_head(p.mean_net, config.input_dim, config.hidden_dim, config.latent_dim, rng);
  init_head(p.var_net, config.input_dim, config.hidden_dim, config.latent_dim, rng);
  for (double& b : p.var_net.b2) b = -5.0;  // start near-deterministic
  return p;
}

void forward_head(const HeadParams& head, int input_dim, int hidden_dim, int out_dim,
                  const double* x, double* hidden, double* y) {
  for (int h = 0; h < hidden_dim; ++h) {
    const double* row = head.w1.data() + static_cast<std::size_t>(h) * input_dim;
    double a = head.b1[static_cast<std::size_t>(h)];
    for (int i = 0; i < input_dim; ++i) a += row[i] * x[i];
    hidden[h] = 1.0 / (1.0 + std::exp(-a));
  }
  for (int d = 0; d < out_dim; ++d) {
    const double* row = head.w2.data() + static_cast<std::size_t>(d) * hidden_dim;
    double a = head.b2[static_cast<std::size_t>(d)];
    for (int h = 0; h < hidden_dim; ++h) a += row[h] * hidden[h];
    y[d] = a;
  }
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

namespace {

void check_input(const MlpParams& params, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(params.config.input_dim))
    throw ValidationError("input has " + std::to_string(x.size()) + " dims, model expects " +
                          std::to_string(params.config.input_dim));
}

}  // namespace

std::vector<double> embed_mean(const MlpParams& params, std::span<const double> x) {
  check_input(params, x);
  const ModelConfig& c = params.config;
  std::vector<double> hidden(static_cast<std::size_t>(c.hidden_dim));
  std::vector<double> y(static_cast<std::size_t>(c.latent_dim));
  forward_head(params.mean_net, c.input_dim, c.hidden_dim, c.latent_dim, x.data(), hidden.data(),
               y.data());
  return y;
}

std::vector<double> embed_var(const MlpParams& params, std::span<const double> x) {
  check_input(params, x);
  const ModelConfig& c = params.config;
  std::vector<double> hidden(static_cast<std::size_t>(c.hidden_dim));
  std::vector<double> y(static_cast<std::size_t>(c.latent_dim));
  forward_head(params.var_net, c.input_dim, c.hidden_dim, c.latent_dim, x.data(), hidden.data(),
               y.data());
  for (double& v : y) v = softplus(v) + c.variance_floor;
  return y;
}

GaussianEmbedding embed(const MlpParams& params, const kmer::KmerProfile& profile) {
  GaussianEmbedding e;
  e.mu = embed_mean(params, profile.counts);
  e.sigma2 = embed_var(params, profile.counts);
  return e;
}

namespace {

void check_pair(const GaussianEmbedding& a, const GaussianEmbedding& b) {
  if (a.mu.size() != b.mu.size() || a.sigma2.size() != a.mu.size() ||
      b.sigma2.size() != b.mu.size())
    throw ValidationError("embedding dimensions do not match");
  if (a.mu.empty()) throw ValidationError("empty embedding");
}

// sum_d (mu_a - mu_b)_d^2 / (sigma2_a + sigma2_b)_d
double scaled_sq_distance(const GaussianEmbedding& a, const GaussianEmbedding& b) {
  double m = 0.0;
  for (std::size_t d = 0; d < a.mu.size(); ++d) {
    const double diff = a.mu[d] - b.mu[d];
    const double s = a.sigma2[d] + b.sigma2[d];
    if (!(s > 0.0)) throw ValidationError("non-positive variance in embedding pair");
    m += diff * diff / s;
  }
  if (!std::isfinite(m)) throw ValidationError("non-finite embedding distance");
  return m;
}

}  // namespace

double expected_likelihood(const GaussianEmbedding& a, const GaussianEmbedding& b, double alpha) {
  check_pair(a, b);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be positive");
  const double d = static_cast<double>(a.mu.size());
  const double m = scaled_sq_distance(a, b);
  const double log_det_term = -0.5 * d * std::log1p(1.0 / alpha);
  return std::exp(log_det_term - m / (2.0 * (1.0 + alpha)));
}

double success_probability(const GaussianEmbedding& a, const GaussianEmbedding& b) {
  check_pair(a, b);
  return std::exp(-0.25 * scaled_sq_distance(a, b));
}

double deterministic_probability(std::span<const double> mu_a, std::span<const double> mu_b) {
  if (mu_a.size() != mu_b.size() || mu_a.empty())
    throw ValidationError("mean dimensions do not match");
  double d2 = 0.0;
  for (std::size_t d = 0; d < mu_a.size(); ++d) {
    const double diff = mu_a[d] - mu_b[d];
    d2 += diff * diff;
  }
  return std::exp(-d2);
}

double clamp_probability(double p) {
  constexpr double kLo = 1e-12;
  constexpr double kHi = 1.0 - 1e-12;
  if (p < kLo) return kLo;
  if (p > kHi) return kHi;
  return p;
}

GaussianEmbedding EmbeddingSet::get(std::size_t i) const {
  GaussianEmbedding e;
  e.mu.assign(mu_row(i).begin(), mu_row(i).end());
  if (has_variance()) e.sigma2.assign(sigma2_row(i).begin(), sigma2_row(i).end());
  return e;
}

EmbeddingSet EmbeddingSet::subset(std::span<const std::size_t> indices) const {
  EmbeddingSet out;
  out.count = indices.size();
  out.dim = dim;
  out.mu.reserve(indices.size() * dim);
  if (has_variance()) out.sigma2.reserve(indices.size() * dim);
  for (std::size_t i : indices) {
    if (i >= count) throw ValidationError("subset index out of range");
    out.mu.insert(out.mu.end(), mu_row(i).begin(), mu_row(i).end());
    if (has_variance()) out.sigma2.insert(out.sigma2.end(), sigma2_row(i).begin(), sigma2_row(i).end());
    if (!ids.empty()) out.ids.push_back(ids[i]);
  }
  return out;
}

EmbeddingSet embed_all(const MlpParams& params, std::span<const kmer::KmerProfile> profiles,
                       std::span<const std::string> ids) {
  if (!ids.empty() && ids.size() != profiles.size())
    throw ValidationError("ids and profiles differ in length");
  EmbeddingSet set;
  set.count = profiles.size();
  set.dim = static_cast<std::size_t>(params.config.latent_dim);
  set.mu.resize(set.count * set.dim);
  set.sigma2.resize(set.count * set.dim);
  set.ids.assign(ids.begin(), ids.end());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const GaussianEmbedding e = embed(params, profiles[i]);
    std::copy(e.mu.begin(), e.mu.end(), set.mu.begin() + static_cast<std::ptrdiff_t>(i * set.dim));
    std::copy(e.sigma2.begin(), e.sigma2.end(),
              set.sigma2.begin() + static_cast<std::ptrdiff_t>(i * set.dim));
  }
  return set;
}

void write_embeddings_tsv(const std::filesystem::path& path, const EmbeddingSet& set) {
  if (set.count == 0) throw ValidationError("no embeddings to write");
  if (!set.has_variance()) throw ValidationError("embedding set has no variances to export");
  std::string out = "id";
  for (std::size_t d = 0; d < set.dim; ++d) out += "\tmu_" + std::to_string(d);
  for (std::size_t d = 0; d < set.dim; ++d) out += "\tvar_" + std::to_string(d);
  out += '\n';
  for (std::size_t i = 0; i < set.count; ++i) {
    out += set.ids.empty() ? "item" + std::to_string(i) : set.ids[i];
    for (double v : set.mu_row(i)) {
      out += '\t';
      out += format_double(v);
    }
    for (double v : set.sigma2_row(i)) {
      out += '\t';
      out += format_double(v);
    }
    out += '\n';
  }
  atomic_write_text(path, out);
}

EmbeddingSet read_embeddings_tsv(const std::filesystem::path& path) {
  const std::string data = read_text_file(path);
  const std::vector<std::string> lines = split(data, '\n');
  if (lines.empty() || lines[0].empty())
    throw ParseError(path.string() + ": empty file, header expected");
  const std::vector<std::string> header = split(lines[0], '\t');
  if (header.size() < 3 || header[0] != "id" || (header.size() - 1) % 2 != 0)
    throw ParseError(path.string() + ":1: expected id, mu_*, var_* columns");
  const std::size_t dim = (header.size() - 1) / 2;
  for (std::size_t d = 0; d < dim; ++d) {
    if (header[1 + d] != "mu_" + std::to_string(d) ||
        header[1 + dim + d] != "var_" + std::to_string(d))
      throw ParseError(path.string() + ":1: unexpected column names");
  }

  EmbeddingSet set;
  set.dim = dim;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const std::vector<std::string> fields = split(lines[r], '\t');
    if (fields.size() != 1 + 2 * dim)
      throw ParseError(path.string() + ":" + std::to_string(r + 1) + ": wrong field count");
    set.ids.push_back(fields[0]);
    const std::string ctx = path.string() + ":" + std::to_string(r + 1);
    for (std::size_t d = 0; d < dim; ++d) set.mu.push_back(parse_double(fields[1 + d], ctx));
    for (std::size_t d = 0; d < dim; ++d) {
      const double v = parse_double(fields[1 + dim + d], ctx);
      if (!(v > 0.0))
        throw ParseError(ctx + ": variance must be positive, got " + fields[1 + dim + d]);
      set.sigma2.push_back(v);
    }
    ++set.count;
  }
  return set;
}

namespace {

json head_to_json(const HeadParams& head) {
  return json{{"w1", head.w1}, {"b1", head.b1}, {"w2", head.w2}, {"b2", head.b2}};
}

HeadParams head_from_json(const json& j, int input_dim, int hidden_dim, int out_dim,
                          const std::string& name) {
  HeadParams head;
  head.w1 = j.at("w1").get<std::vector<double>>();
  head.b1 = j.at("b1").get<std::vector<double>>();
  head.w2 = j.at("w2").get<std::vector<double>>();
  head.b2 = j.at("b2").get<std::vector<double>>();
  if (head.w1.size() != static_cast<std::size_t>(hidden_dim) * input_dim ||
      head.b1.size() != static_cast<std::size_t>(hidden_dim) ||
      head.w2.size() != static_cast<std::size_t>(out_dim) * hidden_dim ||
      head.b2.size() != static_cast<std::size_t>(out_dim))
    throw ValidationError("checkpoint tensor sizes for " + name + " do not match its config");
  return head;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const MlpParams& params) {
  json j;
  j["format_version"] = 1;
  j["kind"] = std::string(model_kind_name(params.kind));
  j["config"] = json{{"input_dim", params.config.input_dim},
                     {"hidden_dim", params.config.hidden_dim},
                     {"latent_dim", params.config.latent_dim},
                     {"alpha", params.config.alpha},
                     {"variance_floor", params.config.variance_floor}};
  j["mean_net"] = head_to_json(params.mean_net);
  j["var_net"] = head_to_json(params.var_net);
  atomic_write_text(path, j.dump(1));
}

MlpParams load_checkpoint(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != 1)
      throw ValidationError(path.string() + ": unsupported checkpoint format_version");
    MlpParams p;
    const json& c = j.at("config");
    p.config.input_dim = c.at("input_dim").get<int>();
    p.config.hidden_dim = c.at("hidden_dim").get<int>();
    p.config.latent_dim = c.at("latent_dim").get<int>();
    p.config.alpha = c.at("alpha").get<double>();
    p.config.variance_floor = c.at("variance_floor").get<double>();
    validate_config(p.config);
    p.kind = parse_model_kind(j.at("kind").get<std::string>());
    p.mean_net = head_from_json(j.at("mean_net"), p.config.input_dim, p.config.hidden_dim,
                                p.config.latent_dim, "mean_net");
    p.var_net = head_from_json(j.at("var_net"), p.config.input_dim, p.config.hidden_dim,
                               p.config.latent_dim, "var_net");
    return p;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace probin::model
