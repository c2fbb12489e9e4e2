#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "maskcert/combinatorics.hpp"
#include "maskcert/sampling.hpp"

using namespace maskcert;

namespace {

SamplerSpec uniform_spec(std::uint64_t seed) {
    SamplerSpec spec;
    spec.mode = SamplerMode::Uniform;
    spec.master_seed = seed;
    return spec;
}

SamplerSpec weighted_spec(std::uint64_t seed, std::vector<double> weights) {
    SamplerSpec spec;
    spec.mode = SamplerMode::Weighted;
    spec.master_seed = seed;
    spec.weights = std::move(weights);
    return spec;
}

long subset_key(const RetentionSet& set) {
    long key = 0;
    for (int i : set.indices) key |= 1L << i;
    return key;
}

}  // namespace

TEST_CASE("k = h returns the full set, k = 0 the empty set") {
    const auto spec = uniform_spec(1);
    for (long i = 0; i < 32; ++i) {
        const auto full = sample_retention_set(5, 5, spec, 0, static_cast<std::uint64_t>(i));
        CHECK(full.indices == std::vector<int>{0, 1, 2, 3, 4});
        const auto empty = sample_retention_set(5, 0, spec, 0, static_cast<std::uint64_t>(i));
        CHECK(empty.indices.empty());
    }
}

TEST_CASE("k > h is rejected") {
    CHECK_THROWS_AS(sample_uniform(3, 4, 1, uniform_spec(0)), std::invalid_argument);
}

TEST_CASE("per-index inclusion frequency approaches k/h") {
    const int h = 10, k = 3;
    const long n = 100000;
    const auto batch = sample_uniform(h, k, n, uniform_spec(42));
    std::vector<long> hits(h, 0);
    for (const auto& set : batch.sets)
        for (int i : set.indices) ++hits[static_cast<std::size_t>(i)];
    for (int i = 0; i < h; ++i) {
        const double freq = static_cast<double>(hits[static_cast<std::size_t>(i)]) / n;
        CHECK(std::fabs(freq - 0.3) < 0.01);  // exact inclusion probability is k/h
    }
}

TEST_CASE("uniform draws cover all C(h,k) subsets uniformly") {
    // million-draw check on one (h, k); a faster sweep covers the rest
    {
        const int h = 6, k = 3;
        const long n = 1000000;
        std::map<long, long> counts;
        const auto spec = uniform_spec(7);
        for (long i = 0; i < n; ++i)
            ++counts[subset_key(sample_retention_set(h, k, spec, 3, static_cast<std::uint64_t>(i)))];
        const double expected = 1.0 / static_cast<double>(*choose_u64(h, k));
        CHECK(counts.size() == *choose_u64(h, k));
        for (const auto& [key, count] : counts) {
            const double freq = static_cast<double>(count) / n;
            CHECK(std::fabs(freq - expected) < 0.01);
        }
    }
    for (int h = 1; h <= 6; ++h) {
        for (int k = 0; k <= h; ++k) {
            const long n = 1000000;
            std::map<long, long> counts;
            const auto spec = uniform_spec(100 + static_cast<std::uint64_t>(h * 8 + k));
            for (long i = 0; i < n; ++i)
                ++counts[subset_key(
                    sample_retention_set(h, k, spec, 0, static_cast<std::uint64_t>(i)))];
            const auto total = *choose_u64(h, k);
            CHECK(counts.size() == total);
            for (const auto& [key, count] : counts) {
                const double freq = static_cast<double>(count) / n;
                CHECK(std::fabs(freq - 1.0 / static_cast<double>(total)) < 0.01);
            }
        }
    }
}

TEST_CASE("identical spec and batch index regenerate identical sets") {
    const auto spec = uniform_spec(99);
    const auto first = sample_uniform(12, 5, 200, spec, 4);
    const auto second = sample_uniform(12, 5, 200, spec, 4);
    REQUIRE(first.sets.size() == second.sets.size());
    for (std::size_t i = 0; i < first.sets.size(); ++i)
        CHECK(first.sets[i].indices == second.sets[i].indices);

    // a different batch index yields a different stream
    const auto other = sample_uniform(12, 5, 200, spec, 5);
    bool any_different = false;
    for (std::size_t i = 0; i < first.sets.size(); ++i)
        if (first.sets[i].indices != other.sets[i].indices) any_different = true;
    CHECK(any_different);
}

TEST_CASE("every draw satisfies the retention invariants") {
    const auto spec = uniform_spec(3);
    for (int h : {1, 4, 9}) {
        for (int k = 0; k <= h; ++k) {
            const auto batch = sample_uniform(h, k, 50, spec, 0);
            for (const auto& set : batch.sets) {
                CHECK(set.size() == k);
                CHECK(set.universe == h);
                for (std::size_t i = 0; i < set.indices.size(); ++i) {
                    CHECK(set.indices[i] >= 0);
                    CHECK(set.indices[i] < h);
                    if (i > 0) CHECK(set.indices[i] > set.indices[i - 1]);
                }
            }
        }
    }
}

TEST_CASE("weighted sampling with equal weights matches the uniform distribution") {
    const int h = 4, k = 2;
    const long n = 120000;
    const auto wspec = weighted_spec(11, {1.0, 1.0, 1.0, 1.0});
    std::map<long, long> counts;
    for (long i = 0; i < n; ++i)
        ++counts[subset_key(sample_retention_set(h, k, wspec, 0, static_cast<std::uint64_t>(i)))];
    // chi-square against the uniform expectation over C(4,2) = 6 subsets
    const double expected = static_cast<double>(n) / 6.0;
    double chi2 = 0.0;
    CHECK(counts.size() == 6);
    for (const auto& [key, count] : counts) {
        const double dev = static_cast<double>(count) - expected;
        chi2 += dev * dev / expected;
    }
    CHECK(chi2 < 20.5);  // chi-square(5) 0.999 quantile
}

TEST_CASE("a dominating mask weight forces that index out of retention") {
    const auto wspec = weighted_spec(5, {1e9, 1.0, 1.0, 1.0});
    for (long i = 0; i < 2000; ++i) {
        const auto set = sample_retention_set(4, 3, wspec, 0, static_cast<std::uint64_t>(i));
        CHECK(!set.contains(0));  // retained sets stay inside {1,2,3}
    }
}

TEST_CASE("weighted draw with k = h returns the full set regardless of weights") {
    const auto wspec = weighted_spec(5, {1e9, 1.0, 1.0});
    const auto set = sample_retention_set(3, 3, wspec, 0, 0);
    CHECK(set.indices == std::vector<int>{0, 1, 2});
}

TEST_CASE("weighted draws are deterministic under a fixed seed") {
    const auto wspec = weighted_spec(21, {3.0, 1.0, 0.5, 2.0, 1.0});
    const auto first = sample_weighted(5, 2, 100, wspec, 9);
    const auto second = sample_weighted(5, 2, 100, wspec, 9);
    for (std::size_t i = 0; i < first.sets.size(); ++i)
        CHECK(first.sets[i].indices == second.sets[i].indices);
}

TEST_CASE("weighted mode validates its weights") {
    CHECK_THROWS_AS(sample_retention_set(3, 1, weighted_spec(0, {1.0, 0.0, 1.0}), 0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_retention_set(3, 1, weighted_spec(0, {1.0, -2.0, 1.0}), 0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_retention_set(3, 1, weighted_spec(0, {1.0, 1.0}), 0, 0),
                    std::invalid_argument);
}
