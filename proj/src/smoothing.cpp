#include "maskcert/smoothing.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "maskcert/errors.hpp"

namespace maskcert {

void SmoothingConfig::validate() const {
    if (!(rho >= 0.0 && rho <= 1.0))
        throw std::invalid_argument("rho must lie in [0, 1]");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (n_prime < n) throw std::invalid_argument("n_prime must be >= n");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1)");
}

int ClassDistribution::argmax_votes() const {
    int best = 0;
    for (int c = 1; c < static_cast<int>(counts.size()); ++c)
        if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
    return best;
}

int ClassDistribution::argmax_mean() const { return argmax_lowest(mean_scores); }

namespace {

struct SampleFailure {
    long index = -1;
    std::string message;
    int kind = 0;  // 0 none, 1 transport, 2 protocol, 3 other
};

void record_failure(SampleFailure& failure, long index, int kind, const char* what) {
    // keep the lowest failing sample index for the diagnostic
    if (failure.kind == 0 || index < failure.index) {
        failure.index = index;
        failure.kind = kind;
        failure.message = what;
    }
}

[[noreturn]] void rethrow_failure(const SampleFailure& failure) {
    const std::string msg =
        failure.message + " (sample " + std::to_string(failure.index) + ")";
    switch (failure.kind) {
        case 1: throw TransportError(msg);
        case 2: throw ProtocolError(msg);
        default: throw std::runtime_error(msg);
    }
}

// Reduce per-sample labels/scores in index order. Shared by the serial and
// parallel paths so both produce bit-identical distributions.
ClassDistribution reduce_samples(const std::vector<int>& labels,
                                 const std::vector<double>& scores, int classes, long n) {
    ClassDistribution dist;
    dist.n = n;
    dist.counts.assign(static_cast<std::size_t>(classes), 0);
    dist.mean_scores.assign(static_cast<std::size_t>(classes), 0.0);
    for (long i = 0; i < n; ++i) {
        ++dist.counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        const double* row = &scores[static_cast<std::size_t>(i) * static_cast<std::size_t>(classes)];
        for (int c = 0; c < classes; ++c)
            dist.mean_scores[static_cast<std::size_t>(c)] += row[c];
    }
    for (int c = 0; c < classes; ++c)
        dist.mean_scores[static_cast<std::size_t>(c)] /= static_cast<double>(n);
    return dist;
}

void classify_one(const Text& x, const BaseClassifier& f, const SmoothingConfig& cfg,
                  int h, int k, std::uint64_t batch_index, long i, MaskedText& scratch,
                  std::vector<int>& labels, std::vector<double>& scores, int classes) {
    const auto set = sample_retention_set(h, k, cfg.sampler, batch_index,
                                          static_cast<std::uint64_t>(i));
    mask_into(x, set, cfg.mask_sentinel, scratch);
    ClassScores s = f.classify(scratch);
    if (static_cast<int>(s.scores.size()) != classes)
        throw ProtocolError("classifier returned wrong score count");
    labels[static_cast<std::size_t>(i)] = s.argmax();
    double* row = &scores[static_cast<std::size_t>(i) * static_cast<std::size_t>(classes)];
    for (int c = 0; c < classes; ++c) row[c] = s.scores[static_cast<std::size_t>(c)];
}

}  // namespace

ClassDistribution classifier_g_serial(const Text& x, const BaseClassifier& f,
                                      const SmoothingConfig& cfg, long n_draws,
                                      std::uint64_t batch_index) {
    cfg.validate();
    if (n_draws < 1) throw std::invalid_argument("n_draws must be >= 1");
    const int h = x.length();
    if (h < 1) throw std::invalid_argument("text must be non-empty");
    const int k = retained_count(h, cfg.rho);
    const int classes = f.class_count();

    std::vector<int> labels(static_cast<std::size_t>(n_draws));
    std::vector<double> scores(static_cast<std::size_t>(n_draws) * static_cast<std::size_t>(classes));
    MaskedText scratch;
    for (long i = 0; i < n_draws; ++i) {
        try {
            classify_one(x, f, cfg, h, k, batch_index, i, scratch, labels, scores, classes);
        } catch (const TransportError& e) {
            throw TransportError(std::string(e.what()) + " (sample " + std::to_string(i) + ")");
        } catch (const ProtocolError& e) {
            throw ProtocolError(std::string(e.what()) + " (sample " + std::to_string(i) + ")");
        }
    }
    return reduce_samples(labels, scores, classes, n_draws);
}

ClassDistribution classifier_g(const Text& x, const BaseClassifier& f,
                               const SmoothingConfig& cfg, long n_draws,
                               std::uint64_t batch_index) {
    cfg.validate();
    if (n_draws < 1) throw std::invalid_argument("n_draws must be >= 1");
    const int h = x.length();
    if (h < 1) throw std::invalid_argument("text must be non-empty");
    const int k = retained_count(h, cfg.rho);
    const int classes = f.class_count();

    std::vector<int> labels(static_cast<std::size_t>(n_draws));
    std::vector<double> scores(static_cast<std::size_t>(n_draws) * static_cast<std::size_t>(classes));
    SampleFailure failure;

    #pragma omp parallel
    {
        MaskedText scratch;
        #pragma omp for schedule(static)
        for (long i = 0; i < n_draws; ++i) {
            try {
                classify_one(x, f, cfg, h, k, batch_index, i, scratch, labels, scores, classes);
            } catch (const TransportError& e) {
                #pragma omp critical(maskcert_sample_failure)
                record_failure(failure, i, 1, e.what());
            } catch (const ProtocolError& e) {
                #pragma omp critical(maskcert_sample_failure)
                record_failure(failure, i, 2, e.what());
            } catch (const std::exception& e) {
                #pragma omp critical(maskcert_sample_failure)
                record_failure(failure, i, 3, e.what());
            }
        }
    }
    if (failure.kind != 0) rethrow_failure(failure);
    return reduce_samples(labels, scores, classes, n_draws);
}

Prediction predict(const Text& x, const BaseClassifier& f, const SmoothingConfig& cfg,
                   std::uint64_t batch_index) {
    const ClassDistribution dist = classifier_g(x, f, cfg, cfg.n, batch_index);
    Prediction out;
    out.label = cfg.ensemble == EnsembleMode::Logit ? dist.argmax_mean() : dist.argmax_votes();
    out.p_hat = static_cast<double>(dist.counts[static_cast<std::size_t>(out.label)]) /
                static_cast<double>(dist.n);
    return out;
}

double distribution_entropy(const ClassDistribution& dist) {
    if (dist.n < 1) throw std::invalid_argument("entropy of an empty distribution");
    double entropy = 0.0;
    for (long c : dist.counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(dist.n);
        entropy -= p * std::log(p);
    }
    return entropy;
}

}  // namespace maskcert
