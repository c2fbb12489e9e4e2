#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "maskcert/classifier.hpp"
#include "maskcert/smoothing.hpp"
#include "maskcert/text.hpp"

namespace maskcert {

// The attacker's substitution table: token -> ordered candidate substitutes.
// Lookups for absent tokens return the empty list.
struct SynonymTable {
    std::unordered_map<std::string, std::vector<std::string>> entries;

    static SynonymTable create(std::unordered_map<std::string, std::vector<std::string>> entries);
    const std::vector<std::string>& substitutes(const std::string& token) const;
};

struct AttackBudget {
    int max_positions = 1;                      // words that may be perturbed
    long queries_cap = 1'000'000;               // victim queries allowed
};

// Black-box score access to the victim: one (label, per-class score) pair
// per query.
struct VictimResponse {
    int label = 0;
    std::vector<double> scores;
};
using Victim = std::function<VictimResponse(const Text&)>;

struct AttackOutcome {
    bool success = false;
    Text adversarial_text;
    DiffSet positions_changed;
    long queries_used = 0;
    bool hit_query_cap = false;
};

// Greedy score-based synonym substitution: rank positions by the class-y
// score drop when each is masked (leave-one-out importance), then commit
// the lowest-scoring substitute position by position until the label
// flips or the budget runs out.
AttackOutcome attack_substitution(const Text& x, int y, const Victim& victim,
                                  const SynonymTable& table, const AttackBudget& budget,
                                  const std::string& sentinel = kMaskSentinel);

struct CharEditOps {
    bool homoglyph = true;
    bool swap_adjacent = true;
    bool erase = true;
    bool insert = true;
};

// Character-level variant of the same greedy loop; candidates are
// single-token character edits (homoglyph substitutions, adjacent swaps,
// deletions, duplicated-character insertions).
AttackOutcome attack_chars(const Text& x, int y, const Victim& victim,
                           const AttackBudget& budget, const CharEditOps& ops,
                           const std::unordered_map<std::string, std::vector<std::string>>*
                               homoglyphs = nullptr,
                           const std::string& sentinel = kMaskSentinel);

// Homoglyph rewrites of a token: every single substitution plus every pair
// of substitutions at distinct positions ("football" -> "fo0tba1l").
std::vector<std::string> homoglyph_variants(
    const std::string& token,
    const std::unordered_map<std::string, std::vector<std::string>>& map);

std::vector<std::string> char_edit_candidates(
    const std::string& token, const CharEditOps& ops,
    const std::unordered_map<std::string, std::vector<std::string>>& homoglyphs);

// The shipped fixed homoglyph table (o->0, l->1, ...).
const std::unordered_map<std::string, std::vector<std::string>>& default_homoglyph_map();

// Direct score access to the base classifier (full retention, no masking).
Victim make_base_victim(const BaseClassifier& f);

// Smoothed victim: predict with a fresh seeded batch per query; scores are
// vote fractions (vote mode) or mean scores (logit mode).
Victim make_smoothed_victim(const BaseClassifier& f, const SmoothingConfig& cfg,
                            std::uint64_t batch_base);

}  // namespace maskcert
