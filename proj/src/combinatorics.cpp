#include "maskcert/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace maskcert {

double log_choose(int n, int k) {
    if (k < 0 || k > n || n < 0) return -std::numeric_limits<double>::infinity();
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

std::optional<std::uint64_t> choose_u64(int n, int k) {
    if (k < 0 || k > n || n < 0) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 result = 1;
    for (int i = 0; i < k; ++i) {
        result *= static_cast<unsigned>(n - i);
        result /= static_cast<unsigned>(i + 1);  // exact: prefix products are binomials
        if (result > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    }
    return static_cast<std::uint64_t>(result);
}

double choose_double(int n, int k) {
    if (k < 0 || k > n || n < 0) return 0.0;
    if (auto exact = choose_u64(n, k)) return static_cast<double>(*exact);
    return std::exp(log_choose(n, k));
}

double choose_ratio(int n1, int k1, int n2, int k2) {
    if (k2 < 0 || k2 > n2 || n2 < 0)
        throw std::invalid_argument("choose_ratio: invalid denominator binomial");
    if (k1 < 0 || k1 > n1 || n1 < 0) return 0.0;

    const auto num = choose_u64(n1, k1);
    const auto den = choose_u64(n2, k2);
    if (num && den && *den != 0)
        return static_cast<double>(*num) / static_cast<double>(*den);
    return std::exp(log_choose(n1, k1) - log_choose(n2, k2));
}

void unrank_combination(std::uint64_t rank, int n, int k, std::vector<int>& out) {
    out.clear();
    out.reserve(static_cast<std::size_t>(k));
    int v = 0;
    for (int i = 0; i < k; ++i) {
        for (;; ++v) {
            const auto below = choose_u64(n - 1 - v, k - 1 - i);
            if (!below)
                throw std::overflow_error("unrank_combination: count overflow");
            if (rank < *below) break;
            rank -= *below;
        }
        out.push_back(v);
        ++v;
    }
}

bool next_combination(std::vector<int>& comb, int n) {
    const int k = static_cast<int>(comb.size());
    for (int i = k - 1; i >= 0; --i) {
        if (comb[static_cast<std::size_t>(i)] < n - k + i) {
            ++comb[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace maskcert
