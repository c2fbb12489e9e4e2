#pragma once

#include <cstdint>
#include <vector>

#include "maskcert/text.hpp"

namespace maskcert {

enum class SamplerMode { Uniform, Weighted };

// How retention sets are drawn. Weighted mode takes per-token MASKING
// weights: a higher weight means that position is masked more often.
struct SamplerSpec {
    SamplerMode mode = SamplerMode::Uniform;
    std::uint64_t master_seed = 0;
    std::vector<double> weights;  // weighted mode only, |weights| = h, all > 0

    void validate_for(int h) const;
};

// A reproducible collection of retention sets. Regenerating with the same
// (spec, batch_index, h, k, n) yields identical sets regardless of worker
// count or call interleaving.
struct SampleBatch {
    std::vector<RetentionSet> sets;
    SamplerSpec spec;
    std::uint64_t batch_index = 0;
};

// Single draw; sample_index selects the per-sample seed stream, so
// batch generation can be sharded arbitrarily across workers.
RetentionSet sample_retention_set(int h, int k, const SamplerSpec& spec,
                                  std::uint64_t batch_index, std::uint64_t sample_index);

SampleBatch sample_uniform(int h, int k, long n, const SamplerSpec& spec,
                           std::uint64_t batch_index = 0);
SampleBatch sample_weighted(int h, int k, long n, const SamplerSpec& spec,
                            std::uint64_t batch_index = 0);

// Dispatch on spec.mode.
SampleBatch sample_batch(int h, int k, long n, const SamplerSpec& spec,
                         std::uint64_t batch_index = 0);

}  // namespace maskcert
