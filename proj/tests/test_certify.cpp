#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <unordered_map>

#include "maskcert/certification.hpp"
#include "maskcert/errors.hpp"
#include "maskcert/pipeline.hpp"
#include "maskcert/rng.hpp"

using namespace maskcert;

namespace {

Text make_text(std::initializer_list<const char*> tokens) {
    Text text;
    for (const char* token : tokens) text.tokens.emplace_back(token);
    return text;
}

Text make_sized_text(int h) {
    Text text;
    for (int i = 0; i < h; ++i) text.tokens.push_back("t" + std::to_string(i));
    return text;
}

class ConstantClassifier : public BaseClassifier {
public:
    explicit ConstantClassifier(int cls, int classes = 2) : cls_(cls), classes_(classes) {}
    ClassScores classify(const MaskedText&) const override {
        ClassScores scores;
        scores.scores.assign(static_cast<std::size_t>(classes_), 0.0);
        scores.scores[static_cast<std::size_t>(cls_)] = 1.0;
        return scores;
    }
    int class_count() const override { return classes_; }

private:
    int cls_;
    int classes_;
};

// Deterministic pseudo-random labeling of retention sets: class depends on
// a hash of the retained token multiset.
class LookupClassifier : public BaseClassifier {
public:
    LookupClassifier(std::uint64_t salt, int classes, int bias_class = -1,
                     double bias = 0.0)
        : salt_(salt), classes_(classes), bias_class_(bias_class), bias_(bias) {}

    ClassScores classify(const MaskedText& masked) const override {
        std::uint64_t key = salt_;
        for (const auto& token : masked.tokens)
            for (char c : token) key = splitmix64_mix(key ^ static_cast<std::uint64_t>(c));
        int cls;
        if (bias_class_ >= 0 &&
            static_cast<double>(splitmix64_mix(key) >> 11) * 0x1.0p-53 < bias_) {
            cls = bias_class_;
        } else {
            cls = static_cast<int>(key % static_cast<std::uint64_t>(classes_));
        }
        ClassScores scores;
        scores.scores.assign(static_cast<std::size_t>(classes_), 0.0);
        scores.scores[static_cast<std::size_t>(cls)] = 1.0;
        return scores;
    }
    int class_count() const override { return classes_; }

private:
    std::uint64_t salt_;
    int classes_;
    int bias_class_;
    double bias_;
};

SmoothingConfig config(double rho, long n, long n_prime, std::uint64_t seed) {
    SmoothingConfig cfg;
    cfg.rho = rho;
    cfg.n = n;
    cfg.n_prime = n_prime;
    cfg.sampler.master_seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("worked certification trace: constant classifier certifies radius 4") {
    // h = 10, rho = 0.9 -> k = 1; p_lower = 0.05^(1/5000); Delta(d) = d/10.
    const Text text = make_sized_text(10);
    const ConstantClassifier constant(1);
    const auto cfg = config(0.9, 1000, 5000, 12345);
    const Certificate cert = certify(text, 1, constant, cfg);

    REQUIRE(cert.label.has_value());
    CHECK(*cert.label == 1);
    CHECK(*cert.beta_hat == 1.0);
    CHECK(*cert.p_lower == doctest::Approx(std::pow(0.05, 1.0 / 5000.0)).epsilon(1e-9));
    REQUIRE(cert.radius.has_value());
    CHECK(*cert.radius == 4);
    CHECK(*cert.certified_rate == doctest::Approx(0.4).epsilon(1e-12));

    // deterministic under a fixed seed
    const Certificate again = certify(text, 1, constant, cfg);
    CHECK(again.p_lower == cert.p_lower);
    CHECK(again.radius == cert.radius);
}

TEST_CASE("the Monte Carlo beta mode matches the approximation for a constant classifier") {
    // both estimates are exactly 1 here, so the radii must agree
    Text text = make_sized_text(10);
    const ConstantClassifier constant(1);
    const auto cfg = config(0.9, 500, 2000, 8);
    BetaEstimatorConfig est;
    est.n_r = 10;
    est.n_k = 50;
    est.r = 1;
    const Certificate approx = certify(text, 1, constant, cfg, 0, BetaMode::Approximate);
    const Certificate mc = certify(text, 1, constant, cfg, 0, BetaMode::MonteCarlo, &est);
    REQUIRE(approx.radius.has_value());
    REQUIRE(mc.radius.has_value());
    CHECK(*approx.radius == *mc.radius);
    CHECK(*mc.beta_hat == 1.0);
}

TEST_CASE("misclassified texts yield an N/A certificate") {
    const Text text = make_sized_text(6);
    const ConstantClassifier constant(0);
    const Certificate cert = certify(text, 1, constant, config(0.5, 200, 400, 3));
    CHECK(!cert.label.has_value());
    CHECK(!cert.radius.has_value());
    CHECK(!cert.p_lower.has_value());
}

TEST_CASE("weighted samplers are rejected") {
    const Text text = make_sized_text(4);
    const ConstantClassifier constant(0);
    auto cfg = config(0.5, 100, 100, 1);
    cfg.sampler.mode = SamplerMode::Weighted;
    cfg.sampler.weights = {1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(certify(text, 0, constant, cfg), InvalidModeError);
}

TEST_CASE("a near-even vote keeps the label but grants no radius") {
    // ~52% of copies vote for the label: prediction is right but
    // p_lower <= 0.5, so even d = 0 fails.
    const Text text = make_sized_text(12);
    const LookupClassifier f(77, 2, 1, 0.04);
    const auto cfg = config(0.5, 2000, 4000, 5);
    const Certificate cert = certify(text, 1, f, cfg);
    if (cert.label) {  // prediction can still miss; only check the granted shape
        CHECK(*cert.p_lower <= 0.5);
        CHECK(!cert.radius.has_value());
        CHECK(!cert.certified_rate.has_value());
    }
}

TEST_CASE("estimate_beta on a constant classifier is exactly 1") {
    const Text text = make_sized_text(8);
    const ConstantClassifier constant(1);
    const auto cfg = config(0.5, 10, 10, 9);
    BetaEstimatorConfig est;
    est.n_r = 20;
    est.n_k = 200;
    est.r = 3;
    CHECK(estimate_beta(text, constant, cfg, est, 1) == 1.0);
    CHECK(estimate_beta(text, constant, cfg, est, 0) == 0.0);
}

TEST_CASE("with r = h the estimate equals the pooled vote fraction exactly") {
    const Text text = make_sized_text(9);
    const LookupClassifier f(31, 3);
    const auto cfg = config(0.6, 10, 10, 77);
    BetaEstimatorConfig est;
    est.n_r = 40;
    est.n_k = 500;
    est.r = text.length();
    est.compute_pooled = true;
    const BetaEstimate estimate = estimate_beta_distribution(text, f, cfg, est);
    REQUIRE(estimate.pooled_pc.size() == estimate.per_class.size());
    for (std::size_t c = 0; c < estimate.per_class.size(); ++c)
        CHECK(estimate.per_class[c] == estimate.pooled_pc[c]);
    CHECK(estimate.zero_survivor_draws == 0);
}

TEST_CASE("serial and parallel beta estimates are bitwise identical") {
    const Text text = make_sized_text(7);
    const LookupClassifier f(13, 2);
    const auto cfg = config(0.5, 10, 10, 3);
    BetaEstimatorConfig est;
    est.n_r = 30;
    est.n_k = 300;
    est.r = 2;
    for (int workers : {1, 4}) {
        set_worker_count(workers);
        const auto parallel = estimate_beta_distribution(text, f, cfg, est);
        const auto serial = estimate_beta_distribution_serial(text, f, cfg, est);
        CHECK(parallel.per_class == serial.per_class);
        CHECK(parallel.zero_survivor_draws == serial.zero_survivor_draws);
    }
    set_worker_count(0);
}

TEST_CASE("beta estimate matches exact conditioning on a small instance") {
    // h = 6, k = 3 (rho = 0.5), r = 2: exact conditional by enumeration
    const Text text = make_sized_text(6);
    const LookupClassifier f(401, 2);
    const auto cfg = config(0.5, 10, 10, 19);
    BetaEstimatorConfig est;
    est.n_r = 400;
    est.n_k = 2000;
    est.r = 2;
    const double estimate = estimate_beta(text, f, cfg, est, 1);

    // oracle: average the exact conditional over all C(6,2) perturbation sets
    double exact_average = 0.0;
    long sets = 0;
    for (int a = 0; a < 6; ++a) {
        for (int b = a + 1; b < 6; ++b) {
            DiffSet positions;
            positions.indices = {a, b};
            exact_average += exact_beta(text, positions, f, 3, 1);
            ++sets;
        }
    }
    exact_average /= static_cast<double>(sets);

    // within 3 sigma of the binomial error of the two-level estimate
    const double sigma =
        std::sqrt(0.25 / static_cast<double>(est.n_r * est.n_k / 4)) + 0.25 / std::sqrt(400.0);
    CHECK(std::fabs(estimate - exact_average) < 3.0 * sigma + 0.02);
}

TEST_CASE("exact_pc worked values") {
    const ConstantClassifier constant(1);
    const Text text = make_sized_text(5);
    CHECK(exact_pc(text, constant, 2) == std::vector<double>{0.0, 1.0});

    // keyword at position 0, h = 4, k = 2: p = C(3,1)/C(4,2) = 0.5
    const KeywordClassifier keyword({{"great", 1}}, 0, 2);
    const Text keyword_text = make_text({"great", "b", "c", "d"});
    const auto pc = exact_pc(keyword_text, keyword, 2);
    CHECK(pc[1] == doctest::Approx(0.5).epsilon(1e-15));

    // k = h: a single subset, one-hot of f(x)
    const auto full = exact_pc(keyword_text, keyword, 4);
    CHECK(full == std::vector<double>{0.0, 1.0});
}

TEST_CASE("exact_pc respects the enumeration cap") {
    const ConstantClassifier constant(0);
    const Text text = make_sized_text(40);
    CHECK_THROWS_AS(exact_pc(text, constant, 20, 1000), EnumerationCapError);
}

TEST_CASE("serial and parallel exact_pc agree") {
    const LookupClassifier f(5, 3);
    const Text text = make_sized_text(11);
    for (int k : {0, 3, 6, 11}) {
        CHECK(exact_pc(text, f, k) == exact_pc_serial(text, f, k));
    }
}

TEST_CASE("exact_beta conditions on overlap") {
    const KeywordClassifier keyword({{"great", 1}}, 0, 2);
    const Text text = make_text({"great", "b", "c", "d"});
    DiffSet positions;
    positions.indices = {0};
    // retention sets of size 2 touching {0} always retain the keyword
    CHECK(exact_beta(text, positions, keyword, 2, 1) == doctest::Approx(1.0));
    DiffSet elsewhere;
    elsewhere.indices = {2};
    // sets touching {2}: those containing 0 classify 1 -> 3 of 6 contain 2,
    // of which {0,2} is the only one containing the keyword
    CHECK(exact_beta(text, elsewhere, keyword, 2, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(exact_beta(text, DiffSet{}, keyword, 2, 1) == 0.0);  // empty condition
}

TEST_CASE("exact certification radius is sound against the exhaustive adversary") {
    // keyword spread across several positions keeps p_y high
    const KeywordClassifier keyword({{"great", 1}, {"fine", 1}, {"good", 1}}, 0, 2);
    const Text text = make_text({"great", "fine", "good", "x", "y", "z"});
    const int k = 2;
    const ExactCertificate cert = exact_certify_radius(text, 1, keyword, k);
    REQUIRE(cert.predicted_correct);
    REQUIRE(cert.radius.has_value());
    CHECK(cert.p_y == doctest::Approx(0.8).epsilon(1e-15));  // 1 - C(3,2)/C(6,2)

    std::vector<std::vector<std::string>> substitutes(
        6, std::vector<std::string>{"bad", "worse"});
    CHECK(exact_certify_check(text, 1, keyword, k, *cert.radius, substitutes));
}

TEST_CASE("an all-keyword text earns a positive exact radius") {
    const KeywordClassifier keyword(
        {{"k0", 1}, {"k1", 1}, {"k2", 1}, {"k3", 1}, {"k4", 1}, {"k5", 1}}, 0, 2);
    const Text text = make_text({"k0", "k1", "k2", "k3", "k4", "k5"});
    const ExactCertificate cert = exact_certify_radius(text, 1, keyword, 2);
    REQUIRE(cert.predicted_correct);
    CHECK(cert.p_y == 1.0);
    REQUIRE(cert.radius.has_value());
    CHECK(*cert.radius == 1);  // d=1: 1 - 1/3 > 0.5; d=2: 1 - 0.6 <= 0.5

    std::vector<std::vector<std::string>> substitutes(
        6, std::vector<std::string>{"bad", "worse"});
    CHECK(exact_certify_check(text, 1, keyword, 2, *cert.radius, substitutes));
}

TEST_CASE("exact_certify_check worked cases") {
    const KeywordClassifier keyword({{"great", 1}}, 0, 2);
    const Text text = make_text({"great", "b", "c"});
    const std::vector<std::vector<std::string>> empty_lists(3);

    // d = 0 equals the plain argmax check
    CHECK(exact_certify_check(text, 1, keyword, 3, 0, empty_lists));
    CHECK(!exact_certify_check(text, 0, keyword, 3, 0, empty_lists));

    // empty substitute lists are vacuously the d = 0 check
    CHECK(exact_certify_check(text, 1, keyword, 3, 2, empty_lists));

    // with k = h the adversary only needs to hit the keyword position
    std::vector<std::vector<std::string>> subs(3, std::vector<std::string>{"meh"});
    CHECK(!exact_certify_check(text, 1, keyword, 3, 1, subs));
}

TEST_CASE("sampled certificates backed by exact p_y survive the exhaustive adversary") {
    // all-keyword text: exact p_y = 1, so p_lower <= exact p_y holds and the
    // sampling-regime soundness invariant is non-vacuous
    const KeywordClassifier keyword(
        {{"k0", 1}, {"k1", 1}, {"k2", 1}, {"k3", 1}, {"k4", 1}, {"k5", 1}}, 0, 2);
    const Text text = make_text({"k0", "k1", "k2", "k3", "k4", "k5"});
    const int k = retained_count(6, 0.6);  // k = 2

    for (std::uint64_t seed : {1ULL, 22ULL, 333ULL}) {
        const auto cfg = config(0.6, 500, 2000, seed);
        const Certificate cert = certify(text, 1, keyword, cfg);
        REQUIRE(cert.label.has_value());
        REQUIRE(cert.radius.has_value());
        const auto pc = exact_pc(text, keyword, k);
        REQUIRE(*cert.p_lower <= pc[1]);
        const std::vector<std::vector<std::string>> substitutes(
            6, std::vector<std::string>{"bad", "zz"});
        CHECK(exact_certify_check(text, 1, keyword, k, *cert.radius, substitutes));
    }
}

TEST_CASE("the overlap bound holds with exact quantities on random instances") {
    SplitMix64 rng(808);
    for (int trial = 0; trial < 40; ++trial) {
        const int h = 3 + static_cast<int>(rng.next_below(4));  // 3..6
        const int k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(h)));
        const LookupClassifier f(rng.next(), 2);
        Text x;
        for (int i = 0; i < h; ++i)
            x.tokens.push_back(std::string(1, static_cast<char>('a' + rng.next_below(2))));

        const auto pc_x = exact_pc(x, f, k);
        // one random neighbor per trial
        Text x2 = x;
        const int flips = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(h)));
        for (int j = 0; j < flips; ++j) {
            const auto pos = static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(h)));
            x2.tokens[pos] = std::string(1, static_cast<char>('A' + rng.next_below(2)));
        }
        const DiffSet positions = diff(x, x2);
        if (positions.empty()) continue;
        const auto pc_x2 = exact_pc(x2, f, k);
        const int d = positions.size();
        for (int c = 0; c < 2; ++c) {
            const double beta = exact_beta(x, positions, f, k, c);
            const double lhs = pc_x[static_cast<std::size_t>(c)] -
                               pc_x2[static_cast<std::size_t>(c)];
            CHECK(lhs <= beta * delta(h, k, d) + 1e-12);
        }
    }
}
