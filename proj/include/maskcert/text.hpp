#pragma once

#include <optional>
#include <string>
#include <vector>

namespace maskcert {

inline constexpr const char* kMaskSentinel = "[MASK]";

// A pre-tokenized word sequence. Tokenization happens exactly once at
// ingestion (whitespace split); every length and Hamming quantity
// downstream is counted in these tokens.
struct Text {
    std::vector<std::string> tokens;
    std::optional<int> label;

    int length() const { return static_cast<int>(tokens.size()); }
};

// The k retained (unmasked) 0-based positions of a length-h text.
// Indices are strictly increasing and live in [0, universe).
struct RetentionSet {
    std::vector<int> indices;
    int universe = 0;

    // Validates and sorts; throws std::invalid_argument on duplicates or
    // out-of-range positions.
    static RetentionSet create(std::vector<int> indices, int universe);
    static RetentionSet full(int universe);

    int size() const { return static_cast<int>(indices.size()); }
    bool contains(int position) const;
};

// A text with every position outside `retained` replaced by the sentinel.
struct MaskedText {
    std::vector<std::string> tokens;
    RetentionSet retained;

    int length() const { return static_cast<int>(tokens.size()); }
};

// Positions at which two equal-length texts differ; |DiffSet| is the
// word-level Hamming distance.
struct DiffSet {
    std::vector<int> indices;  // sorted ascending

    int size() const { return static_cast<int>(indices.size()); }
    bool contains(int position) const;
    bool empty() const { return indices.empty(); }
};

MaskedText mask(const Text& text, const RetentionSet& retained,
                const std::string& sentinel = kMaskSentinel);

// Same as mask() but reuses the capacity of `out` (hot loops build
// thousands of masked copies).
void mask_into(const Text& text, const RetentionSet& retained,
               const std::string& sentinel, MaskedText& out);

DiffSet diff(const Text& a, const Text& b);

// k = round_half_away_from_zero(h - rho*h), clamped to [0, h].
int retained_count(int h, double rho);

// True iff a retention set and a diff set share at least one position.
bool intersects(const RetentionSet& retained, const DiffSet& positions);

}  // namespace maskcert
