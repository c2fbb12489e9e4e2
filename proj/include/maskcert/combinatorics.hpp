#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace maskcert {

// ln C(n, k); returns -inf for k < 0 or k > n.
double log_choose(int n, int k);

// Exact C(n, k) when it fits in 64 bits, nullopt otherwise.
std::optional<std::uint64_t> choose_u64(int n, int k);

// C(n, k) as a double (possibly +inf for huge n).
double choose_double(int n, int k);

// C(n1, k1) / C(n2, k2). Exact integer arithmetic when both values fit in
// 64 bits (always true for n <= 64), log-gamma otherwise. A numerator with
// k1 > n1 counts as 0; the denominator must be a valid positive binomial.
double choose_ratio(int n1, int k1, int n2, int k2);

// The rank-th k-combination of {0..n-1} in lexicographic order.
// rank must be < C(n, k); out is overwritten with k sorted values.
void unrank_combination(std::uint64_t rank, int n, int k, std::vector<int>& out);

// Advance comb (sorted k-subset of {0..n-1}) to its lexicographic
// successor; returns false when comb was the last combination.
bool next_combination(std::vector<int>& comb, int n);

}  // namespace maskcert
