// Numeric checks for the model's analytic claims: Monte-Carlo validation of
// the closed-form expected likelihood, mean-separation bounds implied by
// eps-distinguishability, sphere-packing counts for latent capacity, and
// gradient probes of hub-spoke label geometries.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "probin/model.hpp"

namespace probin::theory {

struct McResult {
  double mean = 0;
  double se = 0;  // sample standard deviation / sqrt(n)
};

// Monte-Carlo estimate of E[exp(-1/2 sum_d (z_a - z_b)_d^2 / (alpha * s_d))]
// with z ~ N(mu, diag sigma2) drawn independently per item and
// s_d = sigma2_a_d + sigma2_b_d.
McResult mc_expected_likelihood(const model::GaussianEmbedding& a,
                                const model::GaussianEmbedding& b, double alpha,
                                std::size_t num_samples, std::uint64_t seed);

// If a pair is eps-distinguishable for its label, its mean separation obeys
//   y=1: ||mu_a - mu_b||^2 <= max_d s_d * log(1 / (1-eps)^4)
//   y=0: ||mu_a - mu_b||^2 >= min_d s_d * log(1 / eps^4)
// `holds` is the implication (vacuously true when not distinguishable);
// comparisons carry a small relative slack to absorb rounding.
struct BoundCheck {
  double q = 0;            // renormalized success probability of the pair
  double mu_dist_sq = 0;   // ||mu_a - mu_b||^2
  double bound = 0;        // the lemma's bound on mu_dist_sq
  bool distinguishable = false;
  bool holds = false;
};
BoundCheck check_bounds(const model::GaussianEmbedding& a, const model::GaussianEmbedding& b,
                        int label, double eps);

// Center plus hexagon: 7 points in the closed radius-tau disk with pairwise
// distances at least tau. Verifies both properties before returning.
std::vector<std::array<double, 2>> packing_lower_bound_config(double tau);

// Max over grid points p (|p| <= 1 + 2h, h = 2/resolution) of the distance
// from p to the nearest of `points`, which are taken at tau = 1. A value
// below 1 - 1.5h certifies that no disk point is >= 1 away from all of them.
double grid_cover_gap_2d(std::span<const std::array<double, 2>> points, int resolution);

// Greedy multi-start search for the largest set of grid points in the closed
// radius-tau ball with pairwise distances >= tau. Coordinates are normalized
// by tau internally, so every tau runs identically. A lower bound on the
// continuum packing number; exact for dim 1 at even resolutions.
int packing_number_bruteforce(double tau, int dim, int resolution,
                              int restarts = 8, std::uint64_t seed = 0);

// Grid-search values at the suite's default resolutions, pinned so any
// change in the search or the rng surfaces as a failure. Update only
// together with the resolutions.
inline constexpr int kPackingRes1d = 200;
inline constexpr int kPackingRes2d = 200;
inline constexpr int kPackingRes3d = 50;

// One hub item with a positive pair to each of N spokes, all spoke-spoke
// pairs negative. Gradient descent searches for an eps-distinguishable
// configuration; with tied unit variances only the means move, otherwise
// per-item log-variances are optimized too.
struct ProbeConfig {
  int num_spokes = 10;
  int dim = 2;
  double eps = 0.25;
  double tau = 1.0;  // separation scale of the packing instance; reported only
  bool tie_variances = true;
  int restarts = 10;
  int steps = 5000;
  double learning_rate = 1e-2;
  std::uint64_t seed = 0;
};

struct ProbeResult {
  // Max over pairs of the distinguishability shortfall ((1-eps) - q for
  // positives, q - eps for negatives), minimized across restarts; <= 0
  // means a feasible configuration was found.
  double violation = 0;
  double hub_min_sigma2 = 0;           // min over dims, best restart
  double spoke_median_min_sigma2 = 0;  // median over spokes of min over dims
};
ProbeResult variance_blowup_probe(const ProbeConfig& cfg);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct TheoryReport {
  std::vector<CheckResult> checks;
  bool all_passed = false;
};

// Runs every check; `quick` shrinks sample counts, restarts, and packing
// resolutions for smoke testing.
TheoryReport run_theory_suite(std::uint64_t seed, bool quick = false);

void write_theory_json(const std::filesystem::path& path, const TheoryReport& report);

}  // namespace probin::theory
