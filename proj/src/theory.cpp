// Numeric property checks: MC oracles, separation bounds, packing search,
// hub-spoke probes, and the suite that runs them all.
#include "probin/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "probin/common.hpp"
#include "probin/rng.hpp"
#include "probin/util.hpp"

namespace probin::theory {

McResult mc_expected_likelihood(const model::GaussianEmbedding& a,
                                const model::GaussianEmbedding& b, double alpha,
                                std::size_t num_samples, std::uint64_t seed) {
  const std::size_t dim = a.mu.size();
  if (b.mu.size() != dim || a.sigma2.size() != dim || b.sigma2.size() != dim) {
    throw ValidationError("mc_expected_likelihood: dimension mismatch");
  }
  if (alpha <= 0) throw ValidationError("mc_expected_likelihood: alpha must be positive");
  if (num_samples < 1000) {
    throw ValidationError("mc_expected_likelihood: need at least 1000 samples");
  }

  Rng rng(seed, "mc");
  double sum = 0;
  double sum_sq = 0;
  for (std::size_t s = 0; s < num_samples; ++s) {
    double exponent = 0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double za = a.mu[d] + std::sqrt(a.sigma2[d]) * rng.normal();
      const double zb = b.mu[d] + std::sqrt(b.sigma2[d]) * rng.normal();
      const double diff = za - zb;
      exponent += diff * diff / (alpha * (a.sigma2[d] + b.sigma2[d]));
    }
    const double w = std::exp(-0.5 * exponent);
    sum += w;
    sum_sq += w * w;
  }
  const double n = static_cast<double>(num_samples);
  McResult result;
  result.mean = sum / n;
  const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1));
  result.se = std::sqrt(var / n);
  return result;
}

BoundCheck check_bounds(const model::GaussianEmbedding& a, const model::GaussianEmbedding& b,
                        int label, double eps) {
  if (label != 0 && label != 1) throw ValidationError("check_bounds: label must be 0 or 1");
  if (!(eps > 0 && eps < 0.5)) throw ValidationError("check_bounds: eps must lie in (0, 0.5)");
  const std::size_t dim = a.mu.size();
  BoundCheck check;
  check.q = model::success_probability(a, b);
  double s_min = std::numeric_limits<double>::infinity();
  double s_max = 0;
  for (std::size_t d = 0; d < dim; ++d) {
    const double s = a.sigma2[d] + b.sigma2[d];
    s_min = std::min(s_min, s);
    s_max = std::max(s_max, s);
    const double diff = a.mu[d] - b.mu[d];
    check.mu_dist_sq += diff * diff;
  }
  const double slack = 1e-9 * std::max(1.0, check.mu_dist_sq);
  if (label == 1) {
    check.distinguishable = check.q >= 1 - eps;
    check.bound = s_max * 4 * std::log(1 / (1 - eps));
    check.holds = !check.distinguishable || check.mu_dist_sq <= check.bound + slack;
  } else {
    check.distinguishable = 1 - check.q >= 1 - eps;
    check.bound = s_min * 4 * std::log(1 / eps);
    check.holds = !check.distinguishable || check.mu_dist_sq >= check.bound - slack;
  }
  return check;
}

std::vector<std::array<double, 2>> packing_lower_bound_config(double tau) {
  if (!(tau > 0)) throw ValidationError("packing config: tau must be positive");
  const double y = tau * std::sqrt(3.0) / 2;
  const double x = tau / 2;
  const std::vector<std::array<double, 2>> points{
      {0.0, 0.0}, {tau, 0.0}, {x, y}, {-x, y}, {-tau, 0.0}, {-x, -y}, {x, -y}};
  const double ball_sq = tau * tau * (1 + 1e-12) + 1e-300;
  const double sep = tau - 1e-12;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i][0] * points[i][0] + points[i][1] * points[i][1] > ball_sq) {
      throw std::logic_error("packing config: point escaped the ball");
    }
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double dx = points[i][0] - points[j][0];
      const double dy = points[i][1] - points[j][1];
      if (dx * dx + dy * dy < sep * sep) {
        throw std::logic_error("packing config: separation violated");
      }
    }
  }
  return points;
}

double grid_cover_gap_2d(std::span<const std::array<double, 2>> points, int resolution) {
  if (resolution < 2) throw ValidationError("grid_cover_gap_2d: resolution must be >= 2");
  if (points.empty()) throw ValidationError("grid_cover_gap_2d: empty point set");
  const double h = 2.0 / resolution;
  const double radius = 1 + 2 * h;
  double gap = 0;
  for (int i = 0; i <= resolution + 2; ++i) {
    const double x = -radius + 2 * radius * i / (resolution + 2);
    for (int j = 0; j <= resolution + 2; ++j) {
      const double y = -radius + 2 * radius * j / (resolution + 2);
      if (x * x + y * y > radius * radius) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& p : points) {
        const double dx = x - p[0];
        const double dy = y - p[1];
        nearest = std::min(nearest, dx * dx + dy * dy);
      }
      gap = std::max(gap, nearest);
    }
  }
  return std::sqrt(gap);
}

namespace {

// Greedy fill over candidates in `order`, on top of the points already in
// `chosen` (given as candidate indices). Coordinates are flattened.
void greedy_fill(const std::vector<double>& coords, int dim, const std::vector<int>& order,
                 std::vector<int>& chosen, double min_dist_sq) {
  for (int c : order) {
    bool ok = true;
    for (int k : chosen) {
      double dist_sq = 0;
      for (int d = 0; d < dim; ++d) {
        const double diff = coords[static_cast<std::size_t>(c) * dim + d] -
                            coords[static_cast<std::size_t>(k) * dim + d];
        dist_sq += diff * diff;
      }
      if (dist_sq < min_dist_sq) {
        ok = false;
        break;
      }
    }
    if (ok) chosen.push_back(c);
  }
}

}  // namespace

int packing_number_bruteforce(double tau, int dim, int resolution, int restarts,
                              std::uint64_t seed) {
  if (tau <= 0) throw ValidationError("packing search: tau must be positive");
  if (dim < 1 || dim > 3) throw ValidationError("packing search: dim must lie in [1, 3]");
  if (resolution < 50) throw ValidationError("packing search: resolution must be >= 50");
  if (restarts < 1) throw ValidationError("packing search: restarts must be >= 1");

  // Everything below runs in units of tau (ball radius 1, separation 1), so
  // every tau produces identical floating-point work and identical counts.
  const double r = 1.0;
  const double r_sq = r * r * (1 + 1e-9);
  const double min_dist_sq = (1 - 1e-12) * (1 - 1e-12);

  std::vector<double> coords;
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    double norm_sq = 0;
    std::array<double, 3> p{};
    for (int d = 0; d < dim; ++d) {
      p[static_cast<std::size_t>(d)] = r * (2.0 * idx[static_cast<std::size_t>(d)] / resolution - 1.0);
      norm_sq += p[static_cast<std::size_t>(d)] * p[static_cast<std::size_t>(d)];
    }
    if (norm_sq <= r_sq) {
      for (int d = 0; d < dim; ++d) coords.push_back(p[static_cast<std::size_t>(d)]);
    }
    int d = dim - 1;
    while (d >= 0 && idx[static_cast<std::size_t>(d)] == resolution) {
      idx[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
    ++idx[static_cast<std::size_t>(d)];
  }
  const int n = static_cast<int>(coords.size()) / dim;
  if (n == 0) return 0;

  std::vector<int> base_order(static_cast<std::size_t>(n));
  std::iota(base_order.begin(), base_order.end(), 0);
  std::vector<double> norms(static_cast<std::size_t>(n), 0);
  for (int c = 0; c < n; ++c) {
    for (int d = 0; d < dim; ++d) {
      const double v = coords[static_cast<std::size_t>(c) * dim + d];
      norms[static_cast<std::size_t>(c)] += v * v;
    }
  }
  std::stable_sort(base_order.begin(), base_order.end(),
                   [&](int a, int b) { return norms[static_cast<std::size_t>(a)] >
                                              norms[static_cast<std::size_t>(b)]; });

  int best = 0;
  std::vector<int> order = base_order;
  for (int restart = 0; restart < restarts; ++restart) {
    if (restart > 0) {
      order = base_order;
      Rng rng(seed, "packing", static_cast<std::uint64_t>(restart));
      rng.shuffle(order);
    }
    std::vector<int> chosen;
    greedy_fill(coords, dim, order, chosen, min_dist_sq);
    // Remove-one local search: dropping a point sometimes frees room for
    // two; retry until no single removal improves the count.
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t drop = 0; drop < chosen.size(); ++drop) {
        std::vector<int> trial;
        trial.reserve(chosen.size() + 1);
        for (std::size_t i = 0; i < chosen.size(); ++i) {
          if (i != drop) trial.push_back(chosen[i]);
        }
        greedy_fill(coords, dim, order, trial, min_dist_sq);
        if (trial.size() > chosen.size()) {
          chosen = std::move(trial);
          improved = true;
          break;
        }
      }
    }
    best = std::max(best, static_cast<int>(chosen.size()));
  }
  return best;
}

namespace {

struct ProbePair {
  int a = 0;
  int b = 0;
  int label = 0;
};

double pair_q(const std::vector<double>& mu, const std::vector<double>& sigma2, int dim,
              const ProbePair& pair) {
  double m = 0;
  for (int d = 0; d < dim; ++d) {
    const double diff = mu[static_cast<std::size_t>(pair.a) * dim + d] -
                        mu[static_cast<std::size_t>(pair.b) * dim + d];
    const double s = sigma2[static_cast<std::size_t>(pair.a) * dim + d] +
                     sigma2[static_cast<std::size_t>(pair.b) * dim + d];
    m += diff * diff / s;
  }
  return std::exp(-0.25 * m);
}

}  // namespace

ProbeResult variance_blowup_probe(const ProbeConfig& cfg) {
  if (cfg.num_spokes < 2) throw ValidationError("probe: need at least 2 spokes");
  if (cfg.dim < 1) throw ValidationError("probe: dim must be >= 1");
  if (!(cfg.eps > 0 && cfg.eps < 0.5)) throw ValidationError("probe: eps must lie in (0, 0.5)");
  if (!(cfg.tau > 0)) throw ValidationError("probe: tau must be positive");
  if (cfg.restarts < 1) throw ValidationError("probe: restarts must be >= 1");
  if (cfg.steps < 0) throw ValidationError("probe: steps must be >= 0");
  if (cfg.learning_rate <= 0) throw ValidationError("probe: learning rate must be positive");

  const int items = cfg.num_spokes + 1;  // item 0 is the hub
  const int dim = cfg.dim;
  std::vector<ProbePair> pairs;
  for (int i = 1; i < items; ++i) pairs.push_back({0, i, 1});
  for (int i = 1; i < items; ++i) {
    for (int j = i + 1; j < items; ++j) pairs.push_back({i, j, 0});
  }

  ProbeResult result;
  result.violation = std::numeric_limits<double>::infinity();
  const std::size_t total = static_cast<std::size_t>(items) * static_cast<std::size_t>(dim);
  std::vector<double> mu(total), theta(total), sigma2(total);
  std::vector<double> grad_mu(total), grad_theta(total);

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(cfg.seed, "probe", static_cast<std::uint64_t>(restart));
    for (double& v : mu) v = 0.5 * rng.normal();
    std::fill(theta.begin(), theta.end(), 0.0);

    for (int step = 0; step < cfg.steps; ++step) {
      for (std::size_t i = 0; i < total; ++i) {
        sigma2[i] = cfg.tie_variances ? 1.0 : std::exp(theta[i]);
      }
      std::fill(grad_mu.begin(), grad_mu.end(), 0.0);
      std::fill(grad_theta.begin(), grad_theta.end(), 0.0);
      for (const ProbePair& pair : pairs) {
        const double q = pair_q(mu, sigma2, dim, pair);
        const double g = pair.label == 1 ? (1 - cfg.eps) - q : q - cfg.eps;
        if (g <= 0) continue;
        // Linear hinge P = max(0, g): the push keeps a constant scale until
        // the constraint is met, so feasible geometries are driven all the
        // way into the interior instead of stalling at the boundary.
        const double dp_dq = pair.label == 1 ? -1.0 : 1.0;
        const double dp_dm = dp_dq * (-0.25 * q);
        for (int d = 0; d < dim; ++d) {
          const std::size_t ia = static_cast<std::size_t>(pair.a) * dim + d;
          const std::size_t ib = static_cast<std::size_t>(pair.b) * dim + d;
          const double diff = mu[ia] - mu[ib];
          const double s = sigma2[ia] + sigma2[ib];
          const double dm_dmu = 2 * diff / s;
          grad_mu[ia] += dp_dm * dm_dmu;
          grad_mu[ib] -= dp_dm * dm_dmu;
          if (!cfg.tie_variances) {
            const double dm_ds = -diff * diff / (s * s);
            grad_theta[ia] += dp_dm * dm_ds * sigma2[ia];
            grad_theta[ib] += dp_dm * dm_ds * sigma2[ib];
          }
        }
      }
      for (std::size_t i = 0; i < total; ++i) {
        mu[i] -= cfg.learning_rate * grad_mu[i];
        if (!cfg.tie_variances) theta[i] -= cfg.learning_rate * grad_theta[i];
      }
    }

    for (std::size_t i = 0; i < total; ++i) {
      sigma2[i] = cfg.tie_variances ? 1.0 : std::exp(theta[i]);
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (const ProbePair& pair : pairs) {
      const double q = pair_q(mu, sigma2, dim, pair);
      worst = std::max(worst, pair.label == 1 ? (1 - cfg.eps) - q : q - cfg.eps);
    }
    if (worst < result.violation) {
      result.violation = worst;
      auto min_dim = [&](int item) {
        double lo = std::numeric_limits<double>::infinity();
        for (int d = 0; d < dim; ++d) {
          lo = std::min(lo, sigma2[static_cast<std::size_t>(item) * dim + d]);
        }
        return lo;
      };
      result.hub_min_sigma2 = min_dim(0);
      std::vector<double> spokes;
      for (int i = 1; i < items; ++i) spokes.push_back(min_dim(i));
      std::sort(spokes.begin(), spokes.end());
      const std::size_t half = spokes.size() / 2;
      result.spoke_median_min_sigma2 = spokes.size() % 2 == 1
                                           ? spokes[half]
                                           : 0.5 * (spokes[half - 1] + spokes[half]);
    }
  }
  return result;
}

namespace {

CheckResult closed_form_vs_mc_check(std::uint64_t seed, bool quick) {
  const std::size_t samples = quick ? 20000 : 200000;
  Rng cfg_rng(seed, "theory-cfg");
  double worst_z = 0;
  bool passed = true;
  for (int i = 0; i < 10; ++i) {
    const std::size_t dim = static_cast<std::size_t>(1 + i % 3);
    const double alpha = std::array<double, 4>{0.25, 1.0, 4.0, 10.0}[static_cast<std::size_t>(i) % 4];
    model::GaussianEmbedding a, b;
    for (std::size_t d = 0; d < dim; ++d) {
      a.mu.push_back(cfg_rng.uniform(-1.5, 1.5));
      b.mu.push_back(cfg_rng.uniform(-1.5, 1.5));
      a.sigma2.push_back(cfg_rng.uniform(0.1, 2.0));
      b.sigma2.push_back(cfg_rng.uniform(0.1, 2.0));
    }
    const double closed = model::expected_likelihood(a, b, alpha);
    const McResult mc =
        mc_expected_likelihood(a, b, alpha, samples, seed + static_cast<std::uint64_t>(i));
    const double z = std::abs(closed - mc.mean) / (mc.se + 1e-12);
    worst_z = std::max(worst_z, z);
    if (std::abs(closed - mc.mean) > 5 * mc.se + 1e-9) passed = false;
  }
  return {"closed_form_vs_mc", passed,
          "max |closed - mc| z-score " + format_double(worst_z) + " over 10 configs"};
}

CheckResult alpha_limits_check() {
  model::GaussianEmbedding a{{0.3, -0.8}, {0.6, 1.1}};
  model::GaussianEmbedding b{{-0.5, 0.4}, {0.9, 0.4}};
  const std::array<double, 7> alphas{1e-6, 1e-3, 0.1, 1.0, 10.0, 1e3, 1e6};
  double prev = -1;
  bool monotone = true;
  for (double alpha : alphas) {
    const double v = model::expected_likelihood(a, b, alpha);
    if (v <= prev) monotone = false;
    prev = v;
  }
  const double lo = model::expected_likelihood(a, b, 1e-6);
  const double hi = model::expected_likelihood(a, b, 1e6);
  const bool passed = monotone && lo < 1e-3 && hi > 1 - 1e-3;
  return {"alpha_limits", passed,
          "value " + format_double(lo) + " at alpha 1e-6, " + format_double(hi) +
              " at alpha 1e6, monotone " + (monotone ? "yes" : "no")};
}

CheckResult lemma2_check(std::uint64_t seed) {
  Rng rng(seed, "lemma");
  int distinguishable_pos = 0;
  int distinguishable_neg = 0;
  bool passed = true;
  for (int i = 0; i < 200; ++i) {
    const std::size_t dim = static_cast<std::size_t>(1 + i % 4);
    model::GaussianEmbedding a, b;
    for (std::size_t d = 0; d < dim; ++d) {
      a.mu.push_back(rng.uniform(-2.0, 2.0));
      b.mu.push_back(rng.uniform(-2.0, 2.0));
      a.sigma2.push_back(rng.uniform(0.05, 2.0));
      b.sigma2.push_back(rng.uniform(0.05, 2.0));
    }
    for (double eps : {0.1, 0.25, 0.4}) {
      for (int label : {0, 1}) {
        const BoundCheck check = check_bounds(a, b, label, eps);
        if (!check.holds) passed = false;
        if (check.distinguishable) {
          (label == 1 ? distinguishable_pos : distinguishable_neg) += 1;
        }
      }
    }
  }
  passed = passed && distinguishable_pos >= 10 && distinguishable_neg >= 10;
  return {"lemma2_implication", passed,
          std::to_string(distinguishable_pos) + " distinguishable positive and " +
              std::to_string(distinguishable_neg) + " negative cases over 1200 checks"};
}

CheckResult mc_se_scaling_check(std::uint64_t seed, bool quick) {
  model::GaussianEmbedding a{{0.2, 0.9}, {0.5, 1.2}};
  model::GaussianEmbedding b{{-0.4, 0.1}, {0.8, 0.6}};
  const std::size_t n_hi = quick ? 100000 : 1000000;
  const McResult lo = mc_expected_likelihood(a, b, 1.0, n_hi / 100, seed);
  const McResult hi = mc_expected_likelihood(a, b, 1.0, n_hi, seed);
  const double ratio = lo.se / hi.se;
  const bool passed = ratio > 5 && ratio < 20;
  return {"mc_se_scaling",
          passed, "se ratio " + format_double(ratio) + " for a 100x sample increase"};
}

CheckResult packing_witness_check(bool quick) {
  const auto witness = packing_lower_bound_config(1.0);
  bool geometry = witness.size() == 7;
  for (std::size_t i = 0; i < witness.size() && geometry; ++i) {
    const double norm_sq = witness[i][0] * witness[i][0] + witness[i][1] * witness[i][1];
    if (norm_sq > 1 + 1e-12) geometry = false;
    for (std::size_t j = i + 1; j < witness.size(); ++j) {
      const double dx = witness[i][0] - witness[j][0];
      const double dy = witness[i][1] - witness[j][1];
      if (dx * dx + dy * dy < (1 - 1e-12) * (1 - 1e-12)) geometry = false;
    }
  }
  const int res = quick ? 100 : kPackingRes2d;
  const double gap = grid_cover_gap_2d(witness, res);
  const double threshold = 1 - 1.5 * (2.0 / res);
  const bool passed = geometry && gap < threshold;
  return {"packing_witness_2d", passed,
          "7 valid points, cover gap " + format_double(gap) + " < " +
              format_double(threshold) + " leaves no room for an 8th"};
}

CheckResult packing_bruteforce_check(std::uint64_t seed, bool quick) {
  const int res1 = quick ? 100 : kPackingRes1d;
  const int res2 = quick ? 50 : kPackingRes2d;
  const int res3 = kPackingRes3d;
  const int restarts = quick ? 3 : 8;
  const int p1 = packing_number_bruteforce(1.0, 1, res1, restarts, seed);
  const int p2 = packing_number_bruteforce(1.0, 2, res2, restarts, seed);
  const int p3 = packing_number_bruteforce(1.0, 3, res3, restarts, seed);
  const int scaled = packing_number_bruteforce(5.0, 2, res2, restarts, seed);
  bool passed = p1 == 3 && p2 >= 5 && p2 <= 7 && p3 >= 7 && p3 <= 13 && p1 <= p2 && p2 <= p3 &&
                scaled == p2;
  return {"packing_bruteforce", passed,
          "grid packing counts " + std::to_string(p1) + "/" + std::to_string(p2) + "/" +
              std::to_string(p3) + " for dims 1-3, tau-scaled rerun " + std::to_string(scaled)};
}

CheckResult hub_spoke_feasible_check(std::uint64_t seed, bool quick) {
  ProbeConfig cfg;
  cfg.num_spokes = 5;
  cfg.eps = 0.499;
  cfg.tie_variances = true;
  // Individual descents stall in local minima with ~2e-3 residual violation
  // for some seeds; restarts are what buy feasibility, and the 6-point
  // instance costs milliseconds, so quick mode only trims the step count.
  cfg.restarts = 10;
  cfg.steps = quick ? 1500 : 5000;
  cfg.seed = seed;
  const ProbeResult result = variance_blowup_probe(cfg);
  const bool passed = result.violation <= 1e-3;
  return {"hub_spoke_feasible", passed,
          "5 spokes at eps 0.499: violation " + format_double(result.violation)};
}

CheckResult hub_spoke_infeasible_check(std::uint64_t seed, bool quick) {
  ProbeConfig cfg;
  cfg.num_spokes = 10;
  cfg.eps = 0.25;
  cfg.tie_variances = true;
  cfg.restarts = quick ? 3 : 10;
  cfg.steps = quick ? 1500 : 5000;
  cfg.seed = seed;
  const ProbeResult result = variance_blowup_probe(cfg);
  const bool passed = result.violation > 1e-3;
  return {"hub_spoke_infeasible_tied", passed,
          "10 spokes at eps 0.25, tied variances: violation " +
              format_double(result.violation)};
}

CheckResult hub_spoke_blowup_check(std::uint64_t seed, bool quick) {
  ProbeConfig cfg;
  cfg.num_spokes = 10;
  cfg.eps = 0.25;
  cfg.tie_variances = false;
  cfg.restarts = quick ? 3 : 10;
  cfg.steps = quick ? 2000 : 8000;
  cfg.seed = seed;
  const ProbeResult result = variance_blowup_probe(cfg);
  const double ratio = result.hub_min_sigma2 / std::max(result.spoke_median_min_sigma2, 1e-12);
  const bool passed = result.violation <= 1e-3 && ratio >= 5;
  return {"hub_spoke_variance_blowup", passed,
          "free variances: violation " + format_double(result.violation) +
              ", hub/spoke sigma2 ratio " + format_double(ratio)};
}

}  // namespace

TheoryReport run_theory_suite(std::uint64_t seed, bool quick) {
  TheoryReport report;
  report.checks.push_back(closed_form_vs_mc_check(seed, quick));
  report.checks.push_back(alpha_limits_check());
  report.checks.push_back(lemma2_check(seed));
  report.checks.push_back(mc_se_scaling_check(seed, quick));
  report.checks.push_back(packing_witness_check(quick));
  report.checks.push_back(packing_bruteforce_check(seed, quick));
  report.checks.push_back(hub_spoke_feasible_check(seed, quick));
  report.checks.push_back(hub_spoke_infeasible_check(seed, quick));
  report.checks.push_back(hub_spoke_blowup_check(seed, quick));
  report.all_passed = std::all_of(report.checks.begin(), report.checks.end(),
                                  [](const CheckResult& c) { return c.passed; });
  return report;
}

void write_theory_json(const std::filesystem::path& path, const TheoryReport& report) {
  nlohmann::ordered_json j;
  j["all_passed"] = report.all_passed;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckResult& check : report.checks) {
    nlohmann::ordered_json c;
    c["name"] = check.name;
    c["passed"] = check.passed;
    c["detail"] = check.detail;
    checks.push_back(std::move(c));
  }
  j["checks"] = std::move(checks);
  atomic_write_text(path, j.dump(1) + "\n");
}

}  // namespace probin::theory
