#include "maskcert/attack.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace maskcert {

SynonymTable SynonymTable::create(
    std::unordered_map<std::string, std::vector<std::string>> entries) {
    for (const auto& [token, subs] : entries)
        for (const auto& sub : subs)
            if (sub == token)
                throw std::invalid_argument("synonym table lists token as its own substitute: " +
                                            token);
    SynonymTable table;
    table.entries = std::move(entries);
    return table;
}

const std::vector<std::string>& SynonymTable::substitutes(const std::string& token) const {
    static const std::vector<std::string> kEmpty;
    const auto it = entries.find(token);
    return it == entries.end() ? kEmpty : it->second;
}

namespace {

// Shared greedy loop; candidate generation is the only difference between
// the word-level and character-level attacks.
using CandidateFn = std::function<std::vector<std::string>(const std::string&)>;

struct QueryCounter {
    const Victim& victim;
    long cap;
    long used = 0;
    bool exhausted = false;

    bool can_query() const { return used < cap; }
    VictimResponse query(const Text& text) {
        ++used;
        return victim(text);
    }
};

AttackOutcome greedy_attack(const Text& x, int y, const Victim& victim,
                            const CandidateFn& candidates_for, const AttackBudget& budget,
                            const std::string& sentinel) {
    if (budget.max_positions < 0 || budget.queries_cap < 0)
        throw std::invalid_argument("attack budget fields must be >= 0");
    if (x.length() < 1) throw std::invalid_argument("cannot attack an empty text");

    AttackOutcome outcome;
    outcome.adversarial_text = x;

    const int h = x.length();
    std::vector<std::vector<std::string>> candidates(static_cast<std::size_t>(h));
    std::vector<int> attackable;
    for (int i = 0; i < h; ++i) {
        auto cands = candidates_for(x.tokens[static_cast<std::size_t>(i)]);
        // a candidate must be a real change and must not collide with the sentinel
        cands.erase(std::remove_if(cands.begin(), cands.end(),
                                   [&](const std::string& c) {
                                       return c == x.tokens[static_cast<std::size_t>(i)] ||
                                              c == sentinel;
                                   }),
                    cands.end());
        if (!cands.empty()) {
            candidates[static_cast<std::size_t>(i)] = std::move(cands);
            attackable.push_back(i);
        }
    }
    if (attackable.empty() || budget.max_positions == 0) return outcome;

    QueryCounter queries{victim, budget.queries_cap};
    const auto capped = [&](AttackOutcome& out) {
        out.hit_query_cap = true;
        out.queries_used = queries.used;
        out.positions_changed = diff(x, out.adversarial_text);
        return out;
    };

    if (!queries.can_query()) return capped(outcome);
    const VictimResponse original = queries.query(x);
    if (y < 0 || static_cast<std::size_t>(y) >= original.scores.size())
        throw std::invalid_argument("attack target class outside the victim's score vector");
    const int original_label = original.label;

    // Leave-one-out importance: score drop of class y when the position is
    // masked. Masking (not deleting) keeps the text length constant.
    std::vector<std::pair<double, int>> importance;
    importance.reserve(attackable.size());
    for (int i : attackable) {
        if (!queries.can_query()) return capped(outcome);
        Text probe = x;
        probe.tokens[static_cast<std::size_t>(i)] = sentinel;
        const VictimResponse response = queries.query(probe);
        const double drop = original.scores[static_cast<std::size_t>(y)] -
                            response.scores[static_cast<std::size_t>(y)];
        importance.emplace_back(drop, i);
    }
    std::stable_sort(importance.begin(), importance.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    Text current = x;
    double current_y_score = original.scores[static_cast<std::size_t>(y)];
    int changed = 0;
    for (const auto& [drop, position] : importance) {
        if (changed >= budget.max_positions) break;
        const std::string original_token = current.tokens[static_cast<std::size_t>(position)];

        std::string best_token;
        std::vector<double> best_scores;
        double best_y_score = 0.0;
        bool have_best = false;
        for (const auto& sub : candidates[static_cast<std::size_t>(position)]) {
            if (!queries.can_query()) {
                outcome.adversarial_text = current;
                return capped(outcome);
            }
            current.tokens[static_cast<std::size_t>(position)] = sub;
            const VictimResponse response = queries.query(current);
            if (response.label != original_label) {
                outcome.success = true;
                outcome.adversarial_text = current;
                outcome.positions_changed = diff(x, current);
                outcome.queries_used = queries.used;
                return outcome;
            }
            const double y_score = response.scores[static_cast<std::size_t>(y)];
            if (!have_best || y_score < best_y_score) {
                have_best = true;
                best_token = sub;
                best_scores = response.scores;
                best_y_score = y_score;
            }
        }
        if (have_best && best_y_score <= current_y_score) {
            current.tokens[static_cast<std::size_t>(position)] = best_token;
            current_y_score = best_y_score;
            ++changed;
        } else {
            current.tokens[static_cast<std::size_t>(position)] = original_token;
        }
    }

    outcome.adversarial_text = current;
    outcome.positions_changed = diff(x, current);
    outcome.queries_used = queries.used;
    return outcome;
}

}  // namespace

AttackOutcome attack_substitution(const Text& x, int y, const Victim& victim,
                                  const SynonymTable& table, const AttackBudget& budget,
                                  const std::string& sentinel) {
    return greedy_attack(
        x, y, victim,
        [&table](const std::string& token) { return table.substitutes(token); }, budget,
        sentinel);
}

AttackOutcome attack_chars(const Text& x, int y, const Victim& victim,
                           const AttackBudget& budget, const CharEditOps& ops,
                           const std::unordered_map<std::string, std::vector<std::string>>*
                               homoglyphs,
                           const std::string& sentinel) {
    const auto& map = homoglyphs ? *homoglyphs : default_homoglyph_map();
    return greedy_attack(
        x, y, victim,
        [&](const std::string& token) { return char_edit_candidates(token, ops, map); },
        budget, sentinel);
}

std::vector<std::string> homoglyph_variants(
    const std::string& token,
    const std::unordered_map<std::string, std::vector<std::string>>& map) {
    // positions with at least one glyph replacement
    std::vector<std::pair<std::size_t, const std::vector<std::string>*>> spots;
    for (std::size_t i = 0; i < token.size(); ++i) {
        const auto it = map.find(std::string(1, token[i]));
        if (it != map.end() && !it->second.empty()) spots.emplace_back(i, &it->second);
    }
    std::vector<std::string> out;
    for (const auto& [i, subs] : spots) {
        for (const auto& glyph : *subs) {
            std::string variant = token;
            variant.replace(i, 1, glyph);
            out.push_back(std::move(variant));
        }
    }
    // pairs of substitutions at distinct positions, e.g. "fo0tba1l"
    for (std::size_t a = 0; a < spots.size(); ++a) {
        for (std::size_t b = a + 1; b < spots.size(); ++b) {
            for (const auto& ga : *spots[a].second) {
                for (const auto& gb : *spots[b].second) {
                    std::string variant = token;
                    // replace the later position first so offsets stay valid
                    variant.replace(spots[b].first, 1, gb);
                    variant.replace(spots[a].first, 1, ga);
                    out.push_back(std::move(variant));
                }
            }
        }
    }
    return out;
}

std::vector<std::string> char_edit_candidates(
    const std::string& token, const CharEditOps& ops,
    const std::unordered_map<std::string, std::vector<std::string>>& homoglyphs) {
    std::vector<std::string> out;
    if (ops.homoglyph) {
        auto variants = homoglyph_variants(token, homoglyphs);
        out.insert(out.end(), variants.begin(), variants.end());
    }
    if (ops.swap_adjacent && token.size() >= 2) {
        for (std::size_t i = 0; i + 1 < token.size(); ++i) {
            std::string variant = token;
            std::swap(variant[i], variant[i + 1]);
            if (variant != token) out.push_back(std::move(variant));
        }
    }
    if (ops.erase && token.size() >= 2) {  // never leave an empty token
        for (std::size_t i = 0; i < token.size(); ++i) {
            std::string variant = token;
            variant.erase(i, 1);
            out.push_back(std::move(variant));
        }
    }
    if (ops.insert) {
        for (std::size_t i = 0; i < token.size(); ++i) {
            std::string variant = token;
            variant.insert(i, 1, token[i]);
            out.push_back(std::move(variant));
        }
    }
    // dedicate order: first occurrence wins
    std::vector<std::string> deduped;
    deduped.reserve(out.size());
    for (auto& candidate : out)
        if (std::find(deduped.begin(), deduped.end(), candidate) == deduped.end())
            deduped.push_back(std::move(candidate));
    return deduped;
}

const std::unordered_map<std::string, std::vector<std::string>>& default_homoglyph_map() {
    static const std::unordered_map<std::string, std::vector<std::string>> kMap = {
        {"o", {"0"}}, {"O", {"0"}}, {"l", {"1"}}, {"i", {"1"}}, {"I", {"1"}},
        {"e", {"3"}}, {"E", {"3"}}, {"a", {"@"}}, {"A", {"@"}}, {"s", {"$", "5"}},
        {"S", {"$", "5"}}, {"t", {"7"}}, {"b", {"8"}}, {"g", {"9"}}, {"z", {"2"}},
    };
    return kMap;
}

Victim make_base_victim(const BaseClassifier& f) {
    return [&f](const Text& text) {
        // Probe texts may carry the sentinel at leave-one-out positions;
        // those count as masked, everything else is retained.
        MaskedText masked;
        masked.tokens = text.tokens;
        std::vector<int> retained;
        for (int i = 0; i < text.length(); ++i)
            if (text.tokens[static_cast<std::size_t>(i)] != kMaskSentinel) retained.push_back(i);
        masked.retained = RetentionSet::create(std::move(retained), text.length());
        const ClassScores scores = f.classify(masked);
        return VictimResponse{scores.argmax(), scores.scores};
    };
}

Victim make_smoothed_victim(const BaseClassifier& f, const SmoothingConfig& cfg,
                            std::uint64_t batch_base) {
    cfg.validate();
    auto query_index = std::make_shared<std::uint64_t>(0);
    return [&f, cfg, batch_base, query_index](const Text& text) {
        const std::uint64_t batch = batch_base + (*query_index)++;
        const ClassDistribution dist = classifier_g(text, f, cfg, cfg.n, batch);
        VictimResponse response;
        if (cfg.ensemble == EnsembleMode::Logit) {
            response.label = dist.argmax_mean();
            response.scores = dist.mean_scores;
        } else {
            response.label = dist.argmax_votes();
            response.scores.reserve(dist.counts.size());
            for (long c : dist.counts)
                response.scores.push_back(static_cast<double>(c) /
                                          static_cast<double>(dist.n));
        }
        return response;
    };
}

}  // namespace maskcert
