#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maskcert/classifier.hpp"
#include "maskcert/smoothing.hpp"
#include "maskcert/text.hpp"

namespace maskcert {

inline constexpr std::int64_t kDefaultEnumerationCap = 1'000'000;

// ---------------------------------------------------------------------------
// Certified-robustness arithmetic
// ---------------------------------------------------------------------------

// Delta(h, k, d) = 1 - C(h-d, k) / C(h, k): the probability that a uniform
// k-subset of [0, h) intersects a fixed d-subset. C(h-d, k) := 0 when
// k > h-d. Exact integer arithmetic when the binomials fit in 64 bits,
// log-gamma otherwise.
double delta(int h, int k, int d);

// Regularized incomplete beta I_x(a, b) via the continued-fraction
// expansion (Lentz); a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// x with I_x(a, b) = alpha, found by bracketed bisection to absolute
// tolerance 1e-10. Throws NumericalError if the iteration cap is hit.
double beta_quantile(double alpha, double a, double b);

// One-sided Clopper-Pearson lower confidence bound: the alpha-quantile of
// Beta(n_c, n - n_c + 1); defined as 0 when n_c = 0.
double clopper_pearson_lower(long n_c, long n, double alpha);

// Probability that none of the perturbed words is masked (all survive),
// with gamma*h and rho*h rounded by the retained_count rule.
struct RiskParams {
    double gamma = 0.0;  // maximum perturbed fraction
    double rho = 0.0;    // masking rate
    int h = 1;           // text length
};
double risk_probability(const RiskParams& p);

// Jensen-Shannon divergence with natural log; inputs must share support
// and each sum to 1 within 1e-9.
double js_divergence(const std::vector<double>& p, const std::vector<double>& q);

// ---------------------------------------------------------------------------
// Monte Carlo certification
// ---------------------------------------------------------------------------

struct Certificate {
    std::optional<int> label;        // nullopt encodes "N/A" (g misclassified)
    std::optional<double> p_lower;
    std::optional<double> beta_hat;
    std::optional<int> radius;       // absent when even d = 0 fails
    std::optional<double> certified_rate;  // radius / h
};

struct BetaEstimatorConfig {
    long n_r = 200;     // outer perturbation-set samples
    long n_k = 10000;   // inner retention-set samples
    int r = 1;          // assumed perturbation size, 1 <= r <= h
    bool compute_pooled = false;  // also classify discarded draws for pooled p_c
    bool keep_outer = false;      // expose per-outer fractions (jackknife input)
};

enum class BetaMode {
    Approximate,  // beta_hat = counts[y] / n' (the beta ~ p_c shortcut)
    MonteCarlo,   // run the two-level estimator with r = 1
};

// Predict with n samples; if the prediction misses y return "N/A".
// Otherwise draw n' fresh samples, bound p_lower by Clopper-Pearson, and
// return the largest d with p_lower - beta_hat * Delta(h, k, d) > 0.5.
// Rejects weighted samplers: importance-weighted draws void the guarantee.
Certificate certify(const Text& x, int y, const BaseClassifier& f,
                    const SmoothingConfig& cfg, std::uint64_t batch_base = 0,
                    BetaMode beta_mode = BetaMode::Approximate,
                    const BetaEstimatorConfig* estimator = nullptr);

// Two-level Monte Carlo estimate of the per-class conditional probability
// that f labels a masked copy c given the retention set touches a random
// r-subset. Outer draws with zero surviving retention sets contribute a
// zero vector and are counted in zero_survivor_draws.
struct BetaEstimate {
    std::vector<double> per_class;
    // Unconditioned vote fractions over the same inner draws, averaged with
    // the same arithmetic as per_class; only filled when compute_pooled is
    // set. With r = h the two vectors are identical.
    std::vector<double> pooled_pc;
    long zero_survivor_draws = 0;
    long n_r = 0;
    // Per-outer-draw slices (keep_outer): conditional and pooled fractions.
    std::vector<std::vector<double>> outer_beta;
    std::vector<std::vector<double>> outer_pooled;
};

BetaEstimate estimate_beta_distribution(const Text& x, const BaseClassifier& f,
                                        const SmoothingConfig& cfg,
                                        const BetaEstimatorConfig& est);
BetaEstimate estimate_beta_distribution_serial(const Text& x, const BaseClassifier& f,
                                               const SmoothingConfig& cfg,
                                               const BetaEstimatorConfig& est);

double estimate_beta(const Text& x, const BaseClassifier& f, const SmoothingConfig& cfg,
                     const BetaEstimatorConfig& est, int target_class);

// ---------------------------------------------------------------------------
// Exact enumeration oracles
// ---------------------------------------------------------------------------

// Exact per-class probabilities over all C(h, k) retention sets.
// Throws EnumerationCapError when C(h, k) exceeds enum_cap.
std::vector<double> exact_pc(const Text& x, const BaseClassifier& f, int k,
                             std::int64_t enum_cap = kDefaultEnumerationCap,
                             const std::string& sentinel = kMaskSentinel);
std::vector<double> exact_pc_serial(const Text& x, const BaseClassifier& f, int k,
                                    std::int64_t enum_cap = kDefaultEnumerationCap,
                                    const std::string& sentinel = kMaskSentinel);

// Exact conditional probability that f labels a masked copy of x with
// target_class, given the retention set intersects `positions`.
// Returns 0 when no retention set intersects (empty condition).
double exact_beta(const Text& x, const DiffSet& positions, const BaseClassifier& f,
                  int k, int target_class,
                  std::int64_t enum_cap = kDefaultEnumerationCap,
                  const std::string& sentinel = kMaskSentinel);

// Exact certification for small instances. predicted_correct is false when
// argmax of exact_pc is not y. The radius uses the exact worst case of the
// joint P(f = y and overlap) over all d-subsets, so a granted radius is
// sound against every adversary in the threat model.
struct ExactCertificate {
    bool predicted_correct = false;
    std::optional<int> radius;  // absent when p_y <= 0.5
    double p_y = 0.0;
};

ExactCertificate exact_certify_radius(const Text& x, int y, const BaseClassifier& f,
                                      int k, std::int64_t enum_cap = kDefaultEnumerationCap,
                                      const std::string& sentinel = kMaskSentinel);

// Exhaustive adversary: true iff every x' with Hamming distance <= d
// (positions substituted from per-position candidate lists) keeps
// argmax exact_pc(x') = y. Throws EnumerationCapError when the total
// neighborhood times C(h, k) exceeds enum_cap.
bool exact_certify_check(const Text& x, int y, const BaseClassifier& f, int k, int d,
                         const std::vector<std::vector<std::string>>& substitutes,
                         std::int64_t enum_cap = kDefaultEnumerationCap,
                         const std::string& sentinel = kMaskSentinel);

}  // namespace maskcert
