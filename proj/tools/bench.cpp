// Compares the OpenMP kernels against their serial reference
// implementations: same outputs, wall-clock speedup.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "maskcert/certification.hpp"
#include "maskcert/classifier.hpp"
#include "maskcert/pipeline.hpp"
#include "maskcert/smoothing.hpp"

namespace {

using namespace maskcert;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Text make_text(int h) {
    Text text;
    for (int i = 0; i < h; ++i) text.tokens.push_back("w" + std::to_string(i % 7));
    return text;
}

// Hash-scored classifier approximating the per-token table lookups of a
// real bag-of-words model.
class HashScoreClassifier : public BaseClassifier {
public:
    ClassScores classify(const MaskedText& masked) const override {
        double s0 = 0.0, s1 = 0.0;
        for (const auto& token : masked.tokens) {
            std::uint64_t key = 0x9e3779b97f4a7c15ULL;
            for (char c : token) {
                key ^= static_cast<std::uint64_t>(c);
                key *= 0xbf58476d1ce4e5b9ULL;
                key ^= key >> 29;
            }
            s0 += static_cast<double>(key & 0xffff) / 65536.0;
            s1 += static_cast<double>((key >> 16) & 0xffff) / 65536.0;
        }
        ClassScores scores;
        scores.scores = {s0, s1};
        return scores;
    }
    int class_count() const override { return 2; }
};

bool same(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    int workers = 0;
    if (argc > 1) workers = std::atoi(argv[1]);
    set_worker_count(workers);
    std::printf("workers: %d\n", worker_count());

    const HashScoreClassifier classifier;
    SmoothingConfig cfg;
    cfg.rho = 0.7;
    cfg.n = 1000;
    cfg.n_prime = 5000;
    cfg.sampler.master_seed = 7;

    {
        const Text text = make_text(60);
        const long draws = 40000;
        auto t0 = Clock::now();
        const auto serial = classifier_g_serial(text, classifier, cfg, draws, 0);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        const auto parallel = classifier_g(text, classifier, cfg, draws, 0);
        const double parallel_ms = ms_since(t0);
        const bool ok = serial.counts == parallel.counts &&
                        same(serial.mean_scores, parallel.mean_scores);
        std::printf("classifier_g      n=%ld      serial %8.1f ms  parallel %8.1f ms  x%.2f  %s\n",
                    draws, serial_ms, parallel_ms, serial_ms / parallel_ms,
                    ok ? "outputs identical" : "OUTPUT MISMATCH");
    }

    {
        const Text text = make_text(40);
        BetaEstimatorConfig est;
        est.n_r = 100;
        est.n_k = 4000;
        est.r = 4;
        auto t0 = Clock::now();
        const auto serial = estimate_beta_distribution_serial(text, classifier, cfg, est);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        const auto parallel = estimate_beta_distribution(text, classifier, cfg, est);
        const double parallel_ms = ms_since(t0);
        const bool ok = same(serial.per_class, parallel.per_class) &&
                        serial.zero_survivor_draws == parallel.zero_survivor_draws;
        std::printf("estimate_beta     nr=%-3ld nk=%ld serial %8.1f ms  parallel %8.1f ms  x%.2f  %s\n",
                    est.n_r, est.n_k, serial_ms, parallel_ms, serial_ms / parallel_ms,
                    ok ? "outputs identical" : "OUTPUT MISMATCH");
    }

    {
        const Text text = make_text(20);
        const int k = 10;  // C(20,10) = 184756 subsets
        auto t0 = Clock::now();
        const auto serial = exact_pc_serial(text, classifier, k);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        const auto parallel = exact_pc(text, classifier, k);
        const double parallel_ms = ms_since(t0);
        std::printf("exact_pc          C(20,10)   serial %8.1f ms  parallel %8.1f ms  x%.2f  %s\n",
                    serial_ms, parallel_ms, serial_ms / parallel_ms,
                    same(serial, parallel) ? "outputs identical" : "OUTPUT MISMATCH");
    }

    return 0;
}
