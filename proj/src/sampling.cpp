#include "maskcert/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "maskcert/rng.hpp"

namespace maskcert {

namespace {

void check_hk(int h, int k) {
    if (h < 0) throw std::invalid_argument("h must be >= 0");
    if (k < 0 || k > h) throw std::invalid_argument("k must lie in [0, h]");
}

std::uint64_t sample_seed(const SamplerSpec& spec, std::uint64_t batch_index,
                          std::uint64_t sample_index) {
    return mix_seed({spec.master_seed, seed_purpose::kSmoothingDraw, batch_index, sample_index});
}

// Partial Fisher-Yates: first k slots of a shuffled identity permutation.
RetentionSet draw_uniform(int h, int k, SplitMix64& rng) {
    std::vector<int> pool(static_cast<std::size_t>(h));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(h - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    RetentionSet set;
    set.indices = std::move(pool);
    set.universe = h;
    return set;
}

// Sequential weighted sampling without replacement over MASK positions;
// the retained set is the complement of the h-k masked draws.
RetentionSet draw_weighted(int h, int k, const std::vector<double>& weights, SplitMix64& rng) {
    std::vector<double> w = weights;
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<char> masked(static_cast<std::size_t>(h), 0);
    const int m = h - k;
    for (int draw = 0; draw < m; ++draw) {
        double u = rng.next_unit() * total;
        int chosen = -1;
        for (int i = 0; i < h; ++i) {
            if (masked[static_cast<std::size_t>(i)]) continue;
            u -= w[static_cast<std::size_t>(i)];
            if (u < 0.0) { chosen = i; break; }
        }
        if (chosen < 0) {
            // float round-off exhausted u; take the last unmasked index
            for (int i = h - 1; i >= 0; --i)
                if (!masked[static_cast<std::size_t>(i)]) { chosen = i; break; }
        }
        masked[static_cast<std::size_t>(chosen)] = 1;
        total -= w[static_cast<std::size_t>(chosen)];
    }
    RetentionSet set;
    set.universe = h;
    set.indices.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < h; ++i)
        if (!masked[static_cast<std::size_t>(i)]) set.indices.push_back(i);
    return set;
}

}  // namespace

void SamplerSpec::validate_for(int h) const {
    if (mode == SamplerMode::Weighted) {
        if (static_cast<int>(weights.size()) != h)
            throw std::invalid_argument("weighted sampler requires one weight per token");
        for (double w : weights)
            if (!(w > 0.0) || !std::isfinite(w))
                throw std::invalid_argument("masking weights must be positive and finite");
    }
}

RetentionSet sample_retention_set(int h, int k, const SamplerSpec& spec,
                                  std::uint64_t batch_index, std::uint64_t sample_index) {
    check_hk(h, k);
    spec.validate_for(h);
    SplitMix64 rng(sample_seed(spec, batch_index, sample_index));
    if (spec.mode == SamplerMode::Weighted) return draw_weighted(h, k, spec.weights, rng);
    return draw_uniform(h, k, rng);
}

SampleBatch sample_uniform(int h, int k, long n, const SamplerSpec& spec,
                           std::uint64_t batch_index) {
    if (spec.mode != SamplerMode::Uniform)
        throw std::invalid_argument("sample_uniform requires uniform sampler mode");
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");
    check_hk(h, k);
    SampleBatch batch;
    batch.spec = spec;
    batch.batch_index = batch_index;
    batch.sets.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        batch.sets.push_back(
            sample_retention_set(h, k, spec, batch_index, static_cast<std::uint64_t>(i)));
    return batch;
}

SampleBatch sample_weighted(int h, int k, long n, const SamplerSpec& spec,
                            std::uint64_t batch_index) {
    if (spec.mode != SamplerMode::Weighted)
        throw std::invalid_argument("sample_weighted requires weighted sampler mode");
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");
    check_hk(h, k);
    spec.validate_for(h);
    SampleBatch batch;
    batch.spec = spec;
    batch.batch_index = batch_index;
    batch.sets.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        batch.sets.push_back(
            sample_retention_set(h, k, spec, batch_index, static_cast<std::uint64_t>(i)));
    return batch;
}

SampleBatch sample_batch(int h, int k, long n, const SamplerSpec& spec,
                         std::uint64_t batch_index) {
    return spec.mode == SamplerMode::Weighted ? sample_weighted(h, k, n, spec, batch_index)
                                              : sample_uniform(h, k, n, spec, batch_index);
}

}  // namespace maskcert
