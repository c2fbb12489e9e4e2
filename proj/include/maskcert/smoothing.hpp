#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maskcert/classifier.hpp"
#include "maskcert/sampling.hpp"
#include "maskcert/text.hpp"

namespace maskcert {

enum class EnsembleMode { Vote, Logit };

struct SmoothingConfig {
    double rho = 0.0;        // masking rate
    long n = 1000;           // prediction sample count
    long n_prime = 5000;     // certification sample count
    double alpha = 0.05;     // one-sided confidence complement
    EnsembleMode ensemble = EnsembleMode::Vote;
    SamplerSpec sampler;
    std::string mask_sentinel = kMaskSentinel;

    void validate() const;
};

// Vote tallies and mean raw scores over one batch of masked copies.
// counts always sums exactly to n; mean_scores is the order-independent
// in-order reduction over the per-sample scores.
struct ClassDistribution {
    std::vector<long> counts;
    std::vector<double> mean_scores;
    long n = 0;

    int argmax_votes() const;
    int argmax_mean() const;
};

// Smoothed-classifier sampling pass: draw n_draws retention sets with
// k = retained_count(h, rho), classify each masked copy, tally votes and
// accumulate mean scores. Parallelized over samples; the result is
// bitwise-identical to classifier_g_serial for any worker count.
ClassDistribution classifier_g(const Text& x, const BaseClassifier& f,
                               const SmoothingConfig& cfg, long n_draws,
                               std::uint64_t batch_index = 0);

// Sequential reference implementation kept for testing and benchmarks.
ClassDistribution classifier_g_serial(const Text& x, const BaseClassifier& f,
                                      const SmoothingConfig& cfg, long n_draws,
                                      std::uint64_t batch_index = 0);

struct Prediction {
    int label = 0;
    double p_hat = 0.0;  // vote fraction of the predicted class
};

// Vote mode: argmax of counts. Logit mode: argmax of mean scores; p_hat is
// still the vote fraction of that class (diagnostic only).
Prediction predict(const Text& x, const BaseClassifier& f, const SmoothingConfig& cfg,
                   std::uint64_t batch_index = 0);

// Shannon entropy (natural log) of the vote distribution, 0 ln 0 := 0.
double distribution_entropy(const ClassDistribution& dist);

}  // namespace maskcert
