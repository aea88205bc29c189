#include "probin/training.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "probin/common.hpp"
#include "probin/rng.hpp"
#include "probin/util.hpp"

namespace probin::training {

std::size_t PairSet::num_positives() const {
  std::size_t n = 0;
  for (const TrainingPair& p : pairs) n += p.label;
  return n;
}

std::size_t PairSet::num_negatives() const { return pairs.size() - num_positives(); }

PairSet build_pairs(const std::vector<seqio::Sequence>& fragments, const TrainConfig& cfg,
                    const KmerOptions& kmer_opts) {
  const std::size_t n = fragments.size();
  if (n < 2) throw ValidationError("pair construction needs at least 2 fragments");
  if (cfg.negatives_per_positive < 0) throw ValidationError("negatives_per_positive must be >= 0");

  PairSet set;
  set.profiles.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [left, right] = seqio::split_halves(fragments[i]);
    set.profiles[i] = kmer::profile(left, kmer_opts.k, kmer_opts.normalize);
    set.profiles[n + i] = kmer::profile(right, kmer_opts.k, kmer_opts.normalize);
  }

  Rng rng(cfg.seed, "pairs");
  set.pairs.reserve(n * (1 + static_cast<std::size_t>(cfg.negatives_per_positive)));
  for (std::size_t i = 0; i < n; ++i) {
    set.pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(n + i), 1});
    for (int t = 0; t < cfg.negatives_per_positive; ++t) {
      std::size_t j = rng.below(n - 1);
      if (j >= i) ++j;  // uniform over fragments other than i
      set.pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(n + j), 0});
    }
  }
  return set;
}

PairSet build_labeled_pairs(std::span<const kmer::KmerProfile> profiles,
                            std::span<const std::string> labels, int positives_per_class,
                            int negatives_per_positive, std::uint64_t seed) {
  const std::size_t n = profiles.size();
  if (n < 2) throw ValidationError("pair construction needs at least 2 items");
  if (labels.size() != n) throw ValidationError("labels and profiles differ in length");
  if (positives_per_class < 1) throw ValidationError("positives_per_class must be >= 1");
  if (negatives_per_positive < 0) throw ValidationError("negatives_per_positive must be >= 0");

  // Species membership is by exact whole-label match, so an item labeled with
  // a class set is not a member of its component classes.
  std::unordered_map<std::string, std::vector<std::uint32_t>> members;
  for (std::size_t i = 0; i < n; ++i) members[labels[i]].push_back(static_cast<std::uint32_t>(i));

  PairSet set;
  set.profiles.assign(profiles.begin(), profiles.end());
  Rng rng(seed, "pairs");
  for (std::size_t i = 0; i < n; ++i) {
    for (const std::string& species : split_list(labels[i])) {
      auto it = members.find(species);
      const std::vector<std::uint32_t>* group = it == members.end() ? nullptr : &it->second;
      std::size_t group_size = group ? group->size() : 0;
      const bool contains_self = group && std::binary_search(group->begin(), group->end(),
                                                             static_cast<std::uint32_t>(i));
      if (group_size - (contains_self ? 1 : 0) == 0)
        throw ValidationError("item '" + std::to_string(i) + "' has no positive partner labeled '" +
                              species + "'");
      for (int p = 0; p < positives_per_class; ++p) {
        std::size_t r = rng.below(group_size - (contains_self ? 1 : 0));
        if (contains_self) {
          const std::size_t self_pos = static_cast<std::size_t>(
              std::lower_bound(group->begin(), group->end(), static_cast<std::uint32_t>(i)) -
              group->begin());
          if (r >= self_pos) ++r;
        }
        set.pairs.push_back({static_cast<std::uint32_t>(i), (*group)[r], 1});
        for (int t = 0; t < negatives_per_positive; ++t) {
          std::size_t j = rng.below(n - 1);
          if (j >= i) ++j;
          set.pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 0});
        }
      }
    }
  }
  return set;
}

std::vector<seqio::LabeledSequence> subsample(const std::vector<seqio::LabeledSequence>& records,
                                              std::size_t n, std::uint64_t seed) {
  if (n >= records.size()) return records;
  std::vector<std::size_t> idx(records.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(seed, "subsample");
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<seqio::LabeledSequence> out;
  out.reserve(n);
  for (std::size_t i : idx) out.push_back(records[i]);
  return out;
}

PairLoss pair_log_loss(double log_q, int label) {
  constexpr double kLo = 1e-12;
  const double q = std::exp(log_q);
  const bool clamped = q < kLo || q > 1.0 - kLo;
  if (label == 1) {
    if (!clamped) return {-log_q, -1.0};
    return {q < kLo ? -std::log(kLo) : -std::log1p(-kLo), 0.0};
  }
  if (!clamped) return {-std::log1p(-q), q / (1.0 - q)};
  return {q < kLo ? -std::log1p(-kLo) : -std::log(kLo), 0.0};
}

namespace {

using model::HeadParams;
using model::MlpParams;
using model::ModelKind;

void zero_like(const HeadParams& src, HeadParams& dst) {
  dst.w1.assign(src.w1.size(), 0.0);
  dst.b1.assign(src.b1.size(), 0.0);
  dst.w2.assign(src.w2.size(), 0.0);
  dst.b2.assign(src.b2.size(), 0.0);
}

// Per-batch forward cache over the distinct profiles that batch touches.
struct BatchCache {
  std::vector<std::uint32_t> uniques;
  std::vector<std::int32_t> slot;     // profile index -> slot, -1 if absent
  std::vector<double> hidden_mu;      // uniques x hidden
  std::vector<double> mu;             // uniques x latent
  std::vector<double> hidden_var;
  std::vector<double> raw_var;        // pre-softplus variance head output
  std::vector<double> sigma2;
  std::vector<double> d_mu;           // accumulated dL/dmu per unique
  std::vector<double> d_sigma2;
};

void collect_uniques(const PairSet& set, std::span<const std::uint32_t> batch, BatchCache& c) {
  c.slot.assign(set.profiles.size(), -1);
  c.uniques.clear();
  for (std::uint32_t pi : batch) {
    const TrainingPair& pr = set.pairs[pi];
    for (std::uint32_t side : {pr.left, pr.right}) {
      if (c.slot[side] < 0) {
        c.slot[side] = static_cast<std::int32_t>(c.uniques.size());
        c.uniques.push_back(side);
      }
    }
  }
}

void forward_uniques(const MlpParams& params, const PairSet& set, BatchCache& c, bool want_var) {
  const auto& cfg = params.config;
  const std::size_t nu = c.uniques.size();
  const std::size_t hid = static_cast<std::size_t>(cfg.hidden_dim);
  const std::size_t lat = static_cast<std::size_t>(cfg.latent_dim);
  c.hidden_mu.resize(nu * hid);
  c.mu.resize(nu * lat);
  c.d_mu.assign(nu * lat, 0.0);
  if (want_var) {
    c.hidden_var.resize(nu * hid);
    c.raw_var.resize(nu * lat);
    c.sigma2.resize(nu * lat);
    c.d_sigma2.assign(nu * lat, 0.0);
  }
  for (std::size_t u = 0; u < nu; ++u) {
    const kmer::KmerProfile& prof = set.profiles[c.uniques[u]];
    if (prof.counts.size() != static_cast<std::size_t>(cfg.input_dim))
      throw ValidationError("profile has " + std::to_string(prof.counts.size()) +
                            " dims, model expects " + std::to_string(cfg.input_dim));
    model::forward_head(params.mean_net, cfg.input_dim, cfg.hidden_dim, cfg.latent_dim,
                        prof.counts.data(), c.hidden_mu.data() + u * hid, c.mu.data() + u * lat);
    if (want_var) {
      model::forward_head(params.var_net, cfg.input_dim, cfg.hidden_dim, cfg.latent_dim,
                          prof.counts.data(), c.hidden_var.data() + u * hid,
                          c.raw_var.data() + u * lat);
      for (std::size_t d = 0; d < lat; ++d) {
        const double raw = c.raw_var[u * lat + d];
        c.sigma2[u * lat + d] = model::softplus(raw) + cfg.variance_floor;
      }
    }
  }
}

// dy has out_dim entries; x is the input; hidden are the cached activations.
void backward_head(const HeadParams& head, int input_dim, int hidden_dim, int out_dim,
                   const double* x, const double* hidden, const double* dy, HeadParams& grad,
                   std::vector<double>& scratch) {
  scratch.assign(static_cast<std::size_t>(hidden_dim), 0.0);
  for (int d = 0; d < out_dim; ++d) {
    const double g = dy[d];
    if (g == 0.0) continue;
    grad.b2[static_cast<std::size_t>(d)] += g;
    const double* w2_row = head.w2.data() + static_cast<std::size_t>(d) * hidden_dim;
    double* gw2_row = grad.w2.data() + static_cast<std::size_t>(d) * hidden_dim;
    for (int h = 0; h < hidden_dim; ++h) {
      gw2_row[h] += g * hidden[h];
      scratch[static_cast<std::size_t>(h)] += g * w2_row[h];
    }
  }
  for (int h = 0; h < hidden_dim; ++h) {
    const double s = hidden[h];
    const double da = scratch[static_cast<std::size_t>(h)] * s * (1.0 - s);
    if (da == 0.0) continue;
    grad.b1[static_cast<std::size_t>(h)] += da;
    double* gw1_row = grad.w1.data() + static_cast<std::size_t>(h) * input_dim;
    for (int i = 0; i < input_dim; ++i) gw1_row[i] += da * x[i];
  }
}

void check_finite(const std::vector<double>& g, const char* tensor) {
  for (double v : g)
    if (!std::isfinite(v))
      throw std::runtime_error(std::string("non-finite gradient in ") + tensor);
}

// Accumulates loss and, unless loss_only, parameter gradients for one batch.
double batch_pass(const MlpParams& params, const PairSet& set,
                  std::span<const std::uint32_t> batch, Stage stage, bool loss_only,
                  BatchCache& cache, Gradients* grads) {
  const auto& cfg = params.config;
  const std::size_t lat = static_cast<std::size_t>(cfg.latent_dim);
  const bool probabilistic = params.kind == ModelKind::kProbabilistic;
  const bool want_mu_grad = !loss_only && stage != Stage::kVarOnly;
  const bool want_var_grad = !loss_only && probabilistic && stage != Stage::kMeanOnly;

  collect_uniques(set, batch, cache);
  forward_uniques(params, set, cache, probabilistic);

  double total = 0.0;
  for (std::uint32_t pi : batch) {
    const TrainingPair& pr = set.pairs[pi];
    const std::size_t a = static_cast<std::size_t>(cache.slot[pr.left]);
    const std::size_t b = static_cast<std::size_t>(cache.slot[pr.right]);
    const double* mu_a = cache.mu.data() + a * lat;
    const double* mu_b = cache.mu.data() + b * lat;

    double log_q = 0.0;
    if (probabilistic) {
      const double* s_a = cache.sigma2.data() + a * lat;
      const double* s_b = cache.sigma2.data() + b * lat;
      for (std::size_t d = 0; d < lat; ++d) {
        const double diff = mu_a[d] - mu_b[d];
        log_q -= 0.25 * diff * diff / (s_a[d] + s_b[d]);
      }
      const PairLoss pl = pair_log_loss(log_q, pr.label);
      total += pl.loss;
      if (pl.d_log_q != 0.0 && (want_mu_grad || want_var_grad)) {
        for (std::size_t d = 0; d < lat; ++d) {
          const double s = s_a[d] + s_b[d];
          const double diff = mu_a[d] - mu_b[d];
          if (want_mu_grad) {
            const double g = pl.d_log_q * (-0.5 * diff / s);
            cache.d_mu[a * lat + d] += g;
            cache.d_mu[b * lat + d] -= g;
          }
          if (want_var_grad) {
            const double g = pl.d_log_q * (0.25 * diff * diff / (s * s));
            cache.d_sigma2[a * lat + d] += g;
            cache.d_sigma2[b * lat + d] += g;
          }
        }
      }
    } else {
      for (std::size_t d = 0; d < lat; ++d) {
        const double diff = mu_a[d] - mu_b[d];
        log_q -= diff * diff;
      }
      const PairLoss pl = pair_log_loss(log_q, pr.label);
      total += pl.loss;
      if (pl.d_log_q != 0.0 && want_mu_grad) {
        for (std::size_t d = 0; d < lat; ++d) {
          const double g = pl.d_log_q * (-2.0 * (mu_a[d] - mu_b[d]));
          cache.d_mu[a * lat + d] += g;
          cache.d_mu[b * lat + d] -= g;
        }
      }
    }
  }

  if (loss_only) return total;

  const std::size_t hid = static_cast<std::size_t>(cfg.hidden_dim);
  std::vector<double> scratch;
  std::vector<double> dy_var(lat);
  for (std::size_t u = 0; u < cache.uniques.size(); ++u) {
    const kmer::KmerProfile& prof = set.profiles[cache.uniques[u]];
    if (want_mu_grad)
      backward_head(params.mean_net, cfg.input_dim, cfg.hidden_dim, cfg.latent_dim,
                    prof.counts.data(), cache.hidden_mu.data() + u * hid,
                    cache.d_mu.data() + u * lat, grads->mean_net, scratch);
    if (want_var_grad) {
      // d sigma2 / d raw = sigmoid(raw), the softplus derivative
      for (std::size_t d = 0; d < lat; ++d) {
        const double raw = cache.raw_var[u * lat + d];
        dy_var[d] = cache.d_sigma2[u * lat + d] / (1.0 + std::exp(-raw));
      }
      backward_head(params.var_net, cfg.input_dim, cfg.hidden_dim, cfg.latent_dim,
                    prof.counts.data(), cache.hidden_var.data() + u * hid, dy_var.data(),
                    grads->var_net, scratch);
    }
  }
  return total;
}

void validate_pairs(const PairSet& set) {
  if (set.pairs.empty()) throw ValidationError("pair set is empty");
  for (const TrainingPair& p : set.pairs)
    if (p.left >= set.profiles.size() || p.right >= set.profiles.size())
      throw ValidationError("pair references a profile outside the pool");
}

// Adam with bias correction; one instance per training stage so the variance
// stage starts with fresh moments.
class Adam {
 public:
  Adam(const TrainConfig& cfg) : cfg_(cfg) {}

  void begin_step() { ++t_; }

  void apply(std::size_t slot, std::vector<double>& p, const std::vector<double>& g) {
    if (slots_.size() <= slot) slots_.resize(slot + 1);
    Moments& mo = slots_[slot];
    if (mo.m.empty()) {
      mo.m.assign(p.size(), 0.0);
      mo.v.assign(p.size(), 0.0);
    }
    const double bc1 = 1.0 - std::pow(cfg_.adam_beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.adam_beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < p.size(); ++i) {
      mo.m[i] = cfg_.adam_beta1 * mo.m[i] + (1.0 - cfg_.adam_beta1) * g[i];
      mo.v[i] = cfg_.adam_beta2 * mo.v[i] + (1.0 - cfg_.adam_beta2) * g[i] * g[i];
      const double mhat = mo.m[i] / bc1;
      const double vhat = mo.v[i] / bc2;
      p[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
    }
  }

 private:
  struct Moments {
    std::vector<double> m, v;
  };
  TrainConfig cfg_;
  std::vector<Moments> slots_;
  std::uint64_t t_ = 0;
};

}  // namespace

double loss(const model::MlpParams& params, const PairSet& pairs) {
  validate_pairs(pairs);
  std::vector<std::uint32_t> all(pairs.pairs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
  BatchCache cache;
  return batch_pass(params, pairs, all, Stage::kBoth, /*loss_only=*/true, cache, nullptr);
}

Gradients gradients(const model::MlpParams& params, const PairSet& pairs, Stage stage) {
  validate_pairs(pairs);
  Gradients g;
  zero_like(params.mean_net, g.mean_net);
  zero_like(params.var_net, g.var_net);
  std::vector<std::uint32_t> all(pairs.pairs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
  BatchCache cache;
  g.loss = batch_pass(params, pairs, all, stage, /*loss_only=*/false, cache, &g);
  check_finite(g.mean_net.w1, "mean_net.w1");
  check_finite(g.mean_net.b1, "mean_net.b1");
  check_finite(g.mean_net.w2, "mean_net.w2");
  check_finite(g.mean_net.b2, "mean_net.b2");
  check_finite(g.var_net.w1, "var_net.w1");
  check_finite(g.var_net.b1, "var_net.b1");
  check_finite(g.var_net.w2, "var_net.w2");
  check_finite(g.var_net.b2, "var_net.b2");
  return g;
}

TrainResult train(const PairSet& pairs, const model::ModelConfig& model_cfg,
                  const TrainConfig& cfg, model::ModelKind kind, const PairSet* stage2_pairs) {
  if (cfg.mean_epochs < 0 || cfg.var_epochs < 0) throw ValidationError("epochs must be >= 0");
  if (cfg.batch_size == 0) throw ValidationError("batch_size must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");

  TrainResult result;
  result.params = model::init_params(model_cfg, cfg.seed, kind);

  struct StagePlan {
    int stage_no;
    Stage mask;
    int epochs;
    const PairSet* data;
  };
  std::vector<StagePlan> plan;
  if (kind == model::ModelKind::kProbabilistic) {
    plan.push_back({1, Stage::kMeanOnly, cfg.mean_epochs, &pairs});
    plan.push_back({2, Stage::kVarOnly, cfg.var_epochs,
                    stage2_pairs != nullptr ? stage2_pairs : &pairs});
  } else {
    plan.push_back({1, Stage::kMeanOnly, cfg.mean_epochs + cfg.var_epochs, &pairs});
  }

  BatchCache cache;
  for (const StagePlan& sp : plan) {
    if (sp.epochs == 0) continue;
    validate_pairs(*sp.data);
    Adam adam(cfg);
    std::vector<std::uint32_t> order(sp.data->pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);

    Gradients g;
    for (int epoch = 1; epoch <= sp.epochs; ++epoch) {
      Rng shuffle_rng(cfg.seed, "shuffle",
                      (static_cast<std::uint64_t>(sp.stage_no) << 32) |
                          static_cast<std::uint64_t>(epoch));
      shuffle_rng.shuffle(order);

      double epoch_loss = 0.0;
      for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
        const std::size_t len = std::min(cfg.batch_size, order.size() - start);
        zero_like(result.params.mean_net, g.mean_net);
        zero_like(result.params.var_net, g.var_net);
        epoch_loss += batch_pass(result.params, *sp.data, {order.data() + start, len}, sp.mask,
                                 /*loss_only=*/false, cache, &g);
        adam.begin_step();
        if (sp.mask == Stage::kMeanOnly) {
          check_finite(g.mean_net.w1, "mean_net.w1");
          check_finite(g.mean_net.w2, "mean_net.w2");
          adam.apply(0, result.params.mean_net.w1, g.mean_net.w1);
          adam.apply(1, result.params.mean_net.b1, g.mean_net.b1);
          adam.apply(2, result.params.mean_net.w2, g.mean_net.w2);
          adam.apply(3, result.params.mean_net.b2, g.mean_net.b2);
        } else {
          check_finite(g.var_net.w1, "var_net.w1");
          check_finite(g.var_net.w2, "var_net.w2");
          adam.apply(0, result.params.var_net.w1, g.var_net.w1);
          adam.apply(1, result.params.var_net.b1, g.var_net.b1);
          adam.apply(2, result.params.var_net.w2, g.var_net.w2);
          adam.apply(3, result.params.var_net.b2, g.var_net.b2);
        }
      }
      if (!std::isfinite(epoch_loss))
        throw std::runtime_error("training diverged: non-finite loss at stage " +
                                 std::to_string(sp.stage_no) + " epoch " + std::to_string(epoch));
      result.trace.push_back(
          {sp.stage_no, epoch, epoch_loss / static_cast<double>(sp.data->pairs.size())});
    }
  }
  return result;
}

void write_trace_csv(const std::filesystem::path& path, std::span<const EpochRecord> trace) {
  std::string out = "stage,epoch,mean_loss\n";
  for (const EpochRecord& r : trace) {
    out += std::to_string(r.stage);
    out += ',';
    out += std::to_string(r.epoch);
    out += ',';
    out += format_double(r.mean_loss);
    out += '\n';
  }
  atomic_write_text(path, out);
}

}  // namespace probin::training
