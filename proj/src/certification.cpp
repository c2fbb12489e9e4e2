#include "maskcert/certification.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "maskcert/combinatorics.hpp"
#include "maskcert/errors.hpp"
#include "maskcert/rng.hpp"

namespace maskcert {

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

double delta(int h, int k, int d) {
    if (h < 0 || k < 0 || k > h) throw std::invalid_argument("delta: need 0 <= k <= h");
    if (d < 0 || d > h) throw std::invalid_argument("delta: need 0 <= d <= h");
    if (d == 0 || k == 0) return 0.0;
    if (k > h - d) return 1.0;
    const double value = 1.0 - choose_ratio(h - d, k, h, k);
    return std::clamp(value, 0.0, 1.0);
}

namespace {

// Continued fraction for I_x(a, b) (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("incomplete beta requires a, b > 0");
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("incomplete beta requires x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                               a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_continued_fraction(a, b, x) / a;
    return 1.0 - bt * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double beta_quantile(double alpha, double a, double b) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("beta_quantile requires alpha in (0, 1)");
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("beta_quantile requires a, b > 0");

    constexpr int kMaxIter = 200;
    constexpr double kTol = 1e-13;  // comfortably inside the 1e-10 contract
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < kMaxIter; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (regularized_incomplete_beta(a, b, mid) < alpha) lo = mid;
        else hi = mid;
        if (hi - lo < kTol) return 0.5 * (lo + hi);
    }
    throw NumericalError("beta_quantile bisection did not converge");
}

double clopper_pearson_lower(long n_c, long n, double alpha) {
    if (n < 1) throw std::invalid_argument("clopper_pearson_lower requires n >= 1");
    if (n_c < 0 || n_c > n)
        throw std::invalid_argument("clopper_pearson_lower requires 0 <= n_c <= n");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("clopper_pearson_lower requires alpha in (0, 1)");
    if (n_c == 0) return 0.0;  // Beta(0, .) is degenerate; 0 is the conservative limit
    return beta_quantile(alpha, static_cast<double>(n_c), static_cast<double>(n - n_c + 1));
}

double risk_probability(const RiskParams& p) {
    if (p.h < 1) throw std::invalid_argument("risk_probability requires h >= 1");
    if (!(p.rho >= 0.0 && p.rho <= 1.0) || !(p.gamma >= 0.0 && p.gamma <= 1.0))
        throw std::invalid_argument("risk_probability requires rho, gamma in [0, 1]");
    const int unperturbed = retained_count(p.h, p.gamma);
    const int masked = p.h - retained_count(p.h, p.rho);
    // C((1-gamma)h, (1-gamma-rho)h) / C(h, rho*h); zero when the masked set
    // cannot avoid the perturbed words.
    return choose_ratio(unperturbed, unperturbed - masked, p.h, masked);
}

double js_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size() || p.empty())
        throw std::invalid_argument("js_divergence requires equal non-empty supports");
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0) || !(q[i] >= 0.0))
            throw std::invalid_argument("js_divergence requires nonnegative entries");
        sp += p[i];
        sq += q[i];
    }
    if (std::fabs(sp - 1.0) > 1e-9 || std::fabs(sq - 1.0) > 1e-9)
        throw std::invalid_argument("js_divergence inputs must each sum to 1");
    double jsd = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) jsd += 0.5 * p[i] * std::log(p[i] / m);
        if (q[i] > 0.0) jsd += 0.5 * q[i] * std::log(q[i] / m);
    }
    return std::max(jsd, 0.0);
}

// ---------------------------------------------------------------------------
// Monte Carlo certification
// ---------------------------------------------------------------------------

Certificate certify(const Text& x, int y, const BaseClassifier& f,
                    const SmoothingConfig& cfg, std::uint64_t batch_base,
                    BetaMode beta_mode, const BetaEstimatorConfig* estimator) {
    cfg.validate();
    if (cfg.sampler.mode != SamplerMode::Uniform)
        throw InvalidModeError("certify requires the uniform sampler; weighted draws void the certificate");
    if (y < 0 || y >= f.class_count())
        throw std::invalid_argument("certify: label out of range");

    for (const auto& token : x.tokens)
        if (token == cfg.mask_sentinel)
            throw std::invalid_argument("certify: text token equals the mask sentinel");

    Certificate cert;
    const Prediction pred = predict(x, f, cfg, batch_base);
    if (pred.label != y) return cert;  // "N/A"

    const ClassDistribution dist = classifier_g(x, f, cfg, cfg.n_prime, batch_base + 1);
    const long n_y = dist.counts[static_cast<std::size_t>(y)];
    cert.label = y;
    cert.p_lower = clopper_pearson_lower(n_y, cfg.n_prime, cfg.alpha);

    double beta_hat;
    if (beta_mode == BetaMode::Approximate) {
        beta_hat = static_cast<double>(n_y) / static_cast<double>(cfg.n_prime);
    } else {
        BetaEstimatorConfig est = estimator ? *estimator : BetaEstimatorConfig{};
        est.r = std::clamp(est.r, 1, x.length());
        beta_hat = estimate_beta(x, f, cfg, est, y);
    }
    cert.beta_hat = beta_hat;

    const int h = x.length();
    const int k = retained_count(h, cfg.rho);
    std::optional<int> radius;
    for (int d = 0; d <= h; ++d) {
        // Delta is non-decreasing in d, so the first failure is final; the
        // last d that held is the maximum certified robustness.
        if (*cert.p_lower - beta_hat * delta(h, k, d) > 0.5) radius = d;
        else break;
    }
    cert.radius = radius;
    if (radius) cert.certified_rate = static_cast<double>(*radius) / static_cast<double>(h);
    return cert;
}

namespace {

struct BetaSlots {
    std::vector<std::vector<double>> per_outer;  // survivor class fractions
    std::vector<std::vector<double>> pooled;     // unconditioned fractions
    std::vector<long> zero_flags;
};

void beta_outer_draw(const Text& x, const BaseClassifier& f, const SmoothingConfig& cfg,
                     const BetaEstimatorConfig& est, int h, int k, int classes,
                     long j, MaskedText& scratch, BetaSlots& slots) {
    SamplerSpec uniform;
    uniform.mode = SamplerMode::Uniform;
    uniform.master_seed = cfg.sampler.master_seed;

    const auto a = sample_retention_set(h, est.r, uniform,
                                        mix_seed({seed_purpose::kBetaOuter}),
                                        static_cast<std::uint64_t>(j));
    DiffSet perturbed;
    perturbed.indices = a.indices;

    std::vector<long> survivor_counts(static_cast<std::size_t>(classes), 0);
    std::vector<long> all_counts(static_cast<std::size_t>(classes), 0);
    long survivors = 0;
    const std::uint64_t inner_batch = mix_seed({seed_purpose::kBetaInner, static_cast<std::uint64_t>(j)});
    for (long i = 0; i < est.n_k; ++i) {
        const auto b = sample_retention_set(h, k, uniform, inner_batch,
                                            static_cast<std::uint64_t>(i));
        const bool overlaps = intersects(b, perturbed);
        if (!overlaps && !est.compute_pooled) continue;  // discard disjoint retention sets
        mask_into(x, b, cfg.mask_sentinel, scratch);
        const int label = f.classify(scratch).argmax();
        if (est.compute_pooled) ++all_counts[static_cast<std::size_t>(label)];
        if (overlaps) {
            ++survivor_counts[static_cast<std::size_t>(label)];
            ++survivors;
        }
    }
    auto& slot = slots.per_outer[static_cast<std::size_t>(j)];
    slot.assign(static_cast<std::size_t>(classes), 0.0);
    if (survivors == 0) {
        slots.zero_flags[static_cast<std::size_t>(j)] = 1;
    } else {
        for (int c = 0; c < classes; ++c)
            slot[static_cast<std::size_t>(c)] =
                static_cast<double>(survivor_counts[static_cast<std::size_t>(c)]) /
                static_cast<double>(survivors);
    }
    if (est.compute_pooled) {
        auto& pooled = slots.pooled[static_cast<std::size_t>(j)];
        pooled.assign(static_cast<std::size_t>(classes), 0.0);
        for (int c = 0; c < classes; ++c)
            pooled[static_cast<std::size_t>(c)] =
                static_cast<double>(all_counts[static_cast<std::size_t>(c)]) /
                static_cast<double>(est.n_k);
    }
}

BetaEstimate reduce_beta_slots(const BetaSlots& slots, int classes, long n_r,
                               bool compute_pooled) {
    BetaEstimate out;
    out.n_r = n_r;
    out.per_class.assign(static_cast<std::size_t>(classes), 0.0);
    if (compute_pooled) out.pooled_pc.assign(static_cast<std::size_t>(classes), 0.0);
    for (long j = 0; j < n_r; ++j) {
        out.zero_survivor_draws += slots.zero_flags[static_cast<std::size_t>(j)];
        const auto& slot = slots.per_outer[static_cast<std::size_t>(j)];
        for (int c = 0; c < classes; ++c)
            out.per_class[static_cast<std::size_t>(c)] += slot[static_cast<std::size_t>(c)];
        if (compute_pooled) {
            const auto& pooled = slots.pooled[static_cast<std::size_t>(j)];
            for (int c = 0; c < classes; ++c)
                out.pooled_pc[static_cast<std::size_t>(c)] += pooled[static_cast<std::size_t>(c)];
        }
    }
    for (int c = 0; c < classes; ++c)
        out.per_class[static_cast<std::size_t>(c)] /= static_cast<double>(n_r);
    if (compute_pooled)
        for (int c = 0; c < classes; ++c)
            out.pooled_pc[static_cast<std::size_t>(c)] /= static_cast<double>(n_r);
    return out;
}

void keep_outer_slices(const BetaSlots& slots, const BetaEstimatorConfig& est,
                       BetaEstimate& out) {
    if (!est.keep_outer) return;
    out.outer_beta = slots.per_outer;
    if (est.compute_pooled) out.outer_pooled = slots.pooled;
}

void validate_beta_config(const Text& x, const BetaEstimatorConfig& est) {
    if (est.n_r < 1 || est.n_k < 1)
        throw std::invalid_argument("beta estimator requires n_r, n_k >= 1");
    if (est.r < 1 || est.r > x.length())
        throw std::invalid_argument("beta estimator requires 1 <= r <= h");
}

}  // namespace

BetaEstimate estimate_beta_distribution_serial(const Text& x, const BaseClassifier& f,
                                               const SmoothingConfig& cfg,
                                               const BetaEstimatorConfig& est) {
    cfg.validate();
    validate_beta_config(x, est);
    const int h = x.length();
    const int k = retained_count(h, cfg.rho);
    const int classes = f.class_count();

    BetaSlots slots;
    slots.per_outer.resize(static_cast<std::size_t>(est.n_r));
    slots.pooled.resize(static_cast<std::size_t>(est.n_r));
    slots.zero_flags.assign(static_cast<std::size_t>(est.n_r), 0);
    MaskedText scratch;
    for (long j = 0; j < est.n_r; ++j)
        beta_outer_draw(x, f, cfg, est, h, k, classes, j, scratch, slots);
    BetaEstimate out = reduce_beta_slots(slots, classes, est.n_r, est.compute_pooled);
    keep_outer_slices(slots, est, out);
    return out;
}

BetaEstimate estimate_beta_distribution(const Text& x, const BaseClassifier& f,
                                        const SmoothingConfig& cfg,
                                        const BetaEstimatorConfig& est) {
    cfg.validate();
    validate_beta_config(x, est);
    const int h = x.length();
    const int k = retained_count(h, cfg.rho);
    const int classes = f.class_count();

    BetaSlots slots;
    slots.per_outer.resize(static_cast<std::size_t>(est.n_r));
    slots.pooled.resize(static_cast<std::size_t>(est.n_r));
    slots.zero_flags.assign(static_cast<std::size_t>(est.n_r), 0);

    #pragma omp parallel
    {
        MaskedText scratch;
        #pragma omp for schedule(dynamic)
        for (long j = 0; j < est.n_r; ++j)
            beta_outer_draw(x, f, cfg, est, h, k, classes, j, scratch, slots);
    }
    BetaEstimate out = reduce_beta_slots(slots, classes, est.n_r, est.compute_pooled);
    keep_outer_slices(slots, est, out);
    return out;
}

double estimate_beta(const Text& x, const BaseClassifier& f, const SmoothingConfig& cfg,
                     const BetaEstimatorConfig& est, int target_class) {
    if (target_class < 0 || target_class >= f.class_count())
        throw std::invalid_argument("estimate_beta: class out of range");
    return estimate_beta_distribution(x, f, cfg, est)
        .per_class[static_cast<std::size_t>(target_class)];
}

// ---------------------------------------------------------------------------
// Exact enumeration oracles
// ---------------------------------------------------------------------------

namespace {

std::uint64_t checked_subset_count(int h, int k, std::int64_t enum_cap) {
    if (k < 0 || k > h) throw std::invalid_argument("need 0 <= k <= h");
    const auto count = choose_u64(h, k);
    if (!count || *count > static_cast<std::uint64_t>(enum_cap))
        throw EnumerationCapError("C(h, k) exceeds the enumeration cap");
    return *count;
}

}  // namespace

std::vector<double> exact_pc_serial(const Text& x, const BaseClassifier& f, int k,
                                    std::int64_t enum_cap, const std::string& sentinel) {
    const int h = x.length();
    if (h < 1) throw std::invalid_argument("text must be non-empty");
    const auto total = checked_subset_count(h, k, enum_cap);
    const int classes = f.class_count();

    std::vector<long> counts(static_cast<std::size_t>(classes), 0);
    std::vector<int> comb(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
    MaskedText scratch;
    RetentionSet set;
    set.universe = h;
    do {
        set.indices = comb;
        mask_into(x, set, sentinel, scratch);
        ++counts[static_cast<std::size_t>(f.classify(scratch).argmax())];
    } while (next_combination(comb, h));

    std::vector<double> pc(static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c)
        pc[static_cast<std::size_t>(c)] =
            static_cast<double>(counts[static_cast<std::size_t>(c)]) / static_cast<double>(total);
    return pc;
}

std::vector<double> exact_pc(const Text& x, const BaseClassifier& f, int k,
                             std::int64_t enum_cap, const std::string& sentinel) {
    const int h = x.length();
    if (h < 1) throw std::invalid_argument("text must be non-empty");
    const auto total = checked_subset_count(h, k, enum_cap);
    const int classes = f.class_count();
    const auto n = static_cast<long>(total);

    std::vector<std::vector<long>> local;
    std::string failure;
    #pragma omp parallel
    {
        int me = 0;
        int workers = 1;
        #ifdef _OPENMP
        me = omp_get_thread_num();
        workers = omp_get_num_threads();
        #endif
        #pragma omp single
        local.assign(static_cast<std::size_t>(workers),
                     std::vector<long>(static_cast<std::size_t>(classes), 0));

        // one unranking per worker, then lexicographic stepping: the rank
        // ranges partition [0, n) so tallies are worker-count independent
        const long begin = n * me / workers;
        const long end = n * (me + 1) / workers;
        if (begin < end) {
            try {
                MaskedText scratch;
                RetentionSet set;
                set.universe = h;
                std::vector<int> comb;
                unrank_combination(static_cast<std::uint64_t>(begin), h, k, comb);
                for (long rank = begin; rank < end; ++rank) {
                    set.indices = comb;
                    mask_into(x, set, sentinel, scratch);
                    ++local[static_cast<std::size_t>(me)]
                           [static_cast<std::size_t>(f.classify(scratch).argmax())];
                    next_combination(comb, h);
                }
            } catch (const std::exception& e) {
                #pragma omp critical(maskcert_exact_pc_failure)
                if (failure.empty()) failure = e.what();
            }
        }
    }
    if (!failure.empty()) throw std::runtime_error("exact_pc: " + failure);
    std::vector<long> counts(static_cast<std::size_t>(classes), 0);
    for (const auto& part : local)
        for (int c = 0; c < classes; ++c)
            counts[static_cast<std::size_t>(c)] += part[static_cast<std::size_t>(c)];

    std::vector<double> pc(static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c)
        pc[static_cast<std::size_t>(c)] =
            static_cast<double>(counts[static_cast<std::size_t>(c)]) / static_cast<double>(total);
    return pc;
}

double exact_beta(const Text& x, const DiffSet& positions, const BaseClassifier& f,
                  int k, int target_class, std::int64_t enum_cap,
                  const std::string& sentinel) {
    const int h = x.length();
    if (h < 1) throw std::invalid_argument("text must be non-empty");
    if (target_class < 0 || target_class >= f.class_count())
        throw std::invalid_argument("exact_beta: class out of range");
    checked_subset_count(h, k, enum_cap);

    long overlapping = 0;
    long labeled = 0;
    std::vector<int> comb(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
    MaskedText scratch;
    RetentionSet set;
    set.universe = h;
    if (k > 0) {
        do {
            set.indices = comb;
            if (!intersects(set, positions)) continue;
            ++overlapping;
            mask_into(x, set, sentinel, scratch);
            if (f.classify(scratch).argmax() == target_class) ++labeled;
        } while (next_combination(comb, h));
    }
    if (overlapping == 0) return 0.0;  // empty condition set
    return static_cast<double>(labeled) / static_cast<double>(overlapping);
}

ExactCertificate exact_certify_radius(const Text& x, int y, const BaseClassifier& f,
                                      int k, std::int64_t enum_cap,
                                      const std::string& sentinel) {
    const int h = x.length();
    if (h < 1 || h > 62)
        throw std::invalid_argument("exact_certify_radius supports 1 <= h <= 62");
    if (y < 0 || y >= f.class_count())
        throw std::invalid_argument("exact_certify_radius: label out of range");
    const auto total = checked_subset_count(h, k, enum_cap);
    const int classes = f.class_count();

    // One classification per retention set; everything else is bit math.
    std::vector<std::uint64_t> retention_bits;
    std::vector<char> labeled_y;
    retention_bits.reserve(total);
    labeled_y.reserve(total);
    std::vector<long> counts(static_cast<std::size_t>(classes), 0);

    std::vector<int> comb(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
    MaskedText scratch;
    RetentionSet set;
    set.universe = h;
    do {
        set.indices = comb;
        mask_into(x, set, sentinel, scratch);
        const int label = f.classify(scratch).argmax();
        ++counts[static_cast<std::size_t>(label)];
        std::uint64_t bits = 0;
        for (int i : comb) bits |= (1ULL << i);
        retention_bits.push_back(bits);
        labeled_y.push_back(label == y ? 1 : 0);
    } while (k > 0 && next_combination(comb, h));

    ExactCertificate cert;
    std::vector<double> pc(static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c)
        pc[static_cast<std::size_t>(c)] =
            static_cast<double>(counts[static_cast<std::size_t>(c)]) / static_cast<double>(total);
    cert.p_y = pc[static_cast<std::size_t>(y)];
    cert.predicted_correct = argmax_lowest(pc) == y;
    if (!cert.predicted_correct || !(cert.p_y > 0.5)) return cert;

    // Largest d with p_y - max_D P(f = y and H intersects D) > 0.5, the
    // exact worst case over all d-subsets D. The joint grows with D, so the
    // first failing d is final.
    cert.radius = 0;
    for (int d = 1; d <= h; ++d) {
        const auto d_count = choose_u64(h, d);
        if (!d_count ||
            *d_count * total > static_cast<std::uint64_t>(enum_cap) * 64ULL)
            throw EnumerationCapError("exact radius scan exceeds the enumeration cap");
        double worst = 0.0;
        std::vector<int> dcomb(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) dcomb[static_cast<std::size_t>(i)] = i;
        do {
            std::uint64_t dbits = 0;
            for (int i : dcomb) dbits |= (1ULL << i);
            long joint = 0;
            for (std::size_t s = 0; s < retention_bits.size(); ++s)
                if (labeled_y[s] && (retention_bits[s] & dbits)) ++joint;
            worst = std::max(worst,
                             static_cast<double>(joint) / static_cast<double>(total));
        } while (next_combination(dcomb, h));
        if (cert.p_y - worst > 0.5) cert.radius = d;
        else break;
    }
    return cert;
}

namespace {

double neighborhood_size(const std::vector<std::vector<std::string>>& substitutes, int d) {
    // coefficient sum of prod_i (1 + |subs_i| t) truncated at degree d
    std::vector<double> coeff(static_cast<std::size_t>(d) + 1, 0.0);
    coeff[0] = 1.0;
    for (const auto& subs : substitutes) {
        const auto m = static_cast<double>(subs.size());
        if (m == 0.0) continue;
        for (int j = d; j >= 1; --j)
            coeff[static_cast<std::size_t>(j)] += coeff[static_cast<std::size_t>(j - 1)] * m;
    }
    double total = 0.0;
    for (double c : coeff) total += c;
    return total;
}

bool adversary_search(Text& probe, const Text& original, int y, const BaseClassifier& f,
                      int k, int start, int changes_left,
                      const std::vector<std::vector<std::string>>& substitutes,
                      std::int64_t enum_cap, const std::string& sentinel) {
    // returns true if some neighbor flips the exact smoothed prediction
    if (argmax_lowest(exact_pc(probe, f, k, enum_cap, sentinel)) != y) return true;
    if (changes_left == 0) return false;
    for (int i = start; i < original.length(); ++i) {
        for (const auto& sub : substitutes[static_cast<std::size_t>(i)]) {
            if (sub == original.tokens[static_cast<std::size_t>(i)]) continue;  // not a change
            probe.tokens[static_cast<std::size_t>(i)] = sub;
            const bool flipped = adversary_search(probe, original, y, f, k, i + 1,
                                                  changes_left - 1, substitutes, enum_cap,
                                                  sentinel);
            probe.tokens[static_cast<std::size_t>(i)] =
                original.tokens[static_cast<std::size_t>(i)];
            if (flipped) return true;
        }
    }
    return false;
}

}  // namespace

bool exact_certify_check(const Text& x, int y, const BaseClassifier& f, int k, int d,
                         const std::vector<std::vector<std::string>>& substitutes,
                         std::int64_t enum_cap, const std::string& sentinel) {
    const int h = x.length();
    if (h < 1) throw std::invalid_argument("text must be non-empty");
    if (d < 0 || d > h) throw std::invalid_argument("need 0 <= d <= h");
    if (static_cast<int>(substitutes.size()) != h)
        throw std::invalid_argument("need one substitute list per position");
    const auto per_text = static_cast<double>(checked_subset_count(h, k, enum_cap));
    if (neighborhood_size(substitutes, d) * per_text > static_cast<double>(enum_cap))
        throw EnumerationCapError("adversarial neighborhood exceeds the enumeration cap");

    Text probe = x;
    return !adversary_search(probe, x, y, f, k, 0, d, substitutes, enum_cap, sentinel);
}

}  // namespace maskcert
