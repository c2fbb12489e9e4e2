#include "maskcert/text.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maskcert {

RetentionSet RetentionSet::create(std::vector<int> indices, int universe) {
    if (universe < 0) throw std::invalid_argument("retention universe must be >= 0");
    std::sort(indices.begin(), indices.end());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 0 || indices[i] >= universe)
            throw std::invalid_argument("retention index out of range [0, h)");
        if (i > 0 && indices[i] == indices[i - 1])
            throw std::invalid_argument("duplicate retention index");
    }
    RetentionSet set;
    set.indices = std::move(indices);
    set.universe = universe;
    return set;
}

RetentionSet RetentionSet::full(int universe) {
    RetentionSet set;
    set.universe = universe;
    set.indices.resize(static_cast<std::size_t>(universe));
    for (int i = 0; i < universe; ++i) set.indices[static_cast<std::size_t>(i)] = i;
    return set;
}

bool RetentionSet::contains(int position) const {
    return std::binary_search(indices.begin(), indices.end(), position);
}

bool DiffSet::contains(int position) const {
    return std::binary_search(indices.begin(), indices.end(), position);
}

// Hot path: no sentinel validation here. Classifiers treat the sentinel as
// an ordinary vocabulary token, so attack probes may legitimately carry it;
// the strict Text invariant is enforced by mask() and the certification
// entry points instead.
void mask_into(const Text& text, const RetentionSet& retained,
               const std::string& sentinel, MaskedText& out) {
    const int h = text.length();
    if (h < 1) throw std::invalid_argument("cannot mask an empty text");
    if (retained.universe != h)
        throw std::invalid_argument("retention universe does not match text length");

    out.tokens.assign(static_cast<std::size_t>(h), sentinel);
    for (int i : retained.indices)
        out.tokens[static_cast<std::size_t>(i)] = text.tokens[static_cast<std::size_t>(i)];
    out.retained = retained;
}

MaskedText mask(const Text& text, const RetentionSet& retained, const std::string& sentinel) {
    for (const auto& tok : text.tokens)
        if (tok == sentinel)
            throw std::invalid_argument("text token equals the mask sentinel");
    MaskedText out;
    mask_into(text, retained, sentinel, out);
    return out;
}

DiffSet diff(const Text& a, const Text& b) {
    if (a.length() != b.length())
        throw std::invalid_argument(
            "diff requires equal-length texts (no insert/delete edits)");
    DiffSet d;
    for (int i = 0; i < a.length(); ++i) {
        if (a.tokens[static_cast<std::size_t>(i)] != b.tokens[static_cast<std::size_t>(i)])
            d.indices.push_back(i);
    }
    return d;
}

int retained_count(int h, double rho) {
    if (h < 1) throw std::invalid_argument("text length must be >= 1");
    if (!(rho >= 0.0 && rho <= 1.0))
        throw std::invalid_argument("masking rate must lie in [0, 1]");
    const long long k = std::llround(static_cast<double>(h) - rho * static_cast<double>(h));
    return static_cast<int>(std::clamp<long long>(k, 0, h));
}

bool intersects(const RetentionSet& retained, const DiffSet& positions) {
    auto r = retained.indices.begin();
    auto p = positions.indices.begin();
    while (r != retained.indices.end() && p != positions.indices.end()) {
        if (*r == *p) return true;
        if (*r < *p) ++r; else ++p;
    }
    return false;
}

}  // namespace maskcert
