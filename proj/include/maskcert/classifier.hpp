#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "maskcert/sampling.hpp"
#include "maskcert/text.hpp"

namespace maskcert {

// Per-class scores from one base-classifier call. Built-in classifiers emit
// probabilities; external models may emit arbitrary finite reals (logits).
struct ClassScores {
    std::vector<double> scores;

    // Ties break toward the lowest class id.
    int argmax() const;
};

int argmax_lowest(const std::vector<double>& values);

// The base classifier f: masked text -> class scores. Implementations must
// be pure functions of the masked token sequence and safe to call from
// concurrent workers (the external-process client serializes internally).
class BaseClassifier {
public:
    virtual ~BaseClassifier() = default;
    virtual ClassScores classify(const MaskedText& masked) const = 0;
    virtual int class_count() const = 0;
};

// Deterministic rule classifier: one-hot for the class of the first token
// (in position order) that matches a keyword, else the default class.
class KeywordClassifier : public BaseClassifier {
public:
    KeywordClassifier(std::map<std::string, int> rules, int default_class, int classes);

    ClassScores classify(const MaskedText& masked) const override;
    int class_count() const override { return classes_; }

    const std::map<std::string, int>& rules() const { return rules_; }
    int default_class() const { return default_class_; }

private:
    std::map<std::string, int> rules_;
    int default_class_;
    int classes_;
};

ClassScores classify_keyword(const MaskedText& masked,
                             const std::map<std::string, int>& rules,
                             int default_class, int classes);

// Multinomial naive-Bayes bag of words fitted on masked copies. The mask
// sentinel is counted like any other vocabulary token.
class BowModel : public BaseClassifier {
public:
    ClassScores classify(const MaskedText& masked) const override;
    int class_count() const override { return static_cast<int>(class_example_counts.size()); }

    // Fitted state; counts are the persisted form, log tables are derived.
    std::vector<long> class_example_counts;
    std::vector<long> class_token_totals;
    std::map<std::string, std::vector<long>> token_counts;
    double smoothing = 1.0;

    // Recompute log_prior / likelihood tables from the counts above.
    void finalize();

    const std::vector<double>& log_prior() const { return log_prior_; }

private:
    std::vector<double> log_prior_;
    std::vector<double> log_unseen_;  // per-class fallback for unknown tokens
    std::unordered_map<std::string, std::vector<double>> log_likelihood_;
};

// Mask-augmented training: each epoch draws one fresh retention set per
// example (k = retained_count(h, rho)) and accumulates token counts on the
// masked copy. Deterministic given (data, rho, epochs, spec.master_seed).
BowModel train_bow(const std::vector<Text>& data, int class_count, double rho,
                   int epochs, const SamplerSpec& spec, double smoothing = 1.0,
                   const std::string& sentinel = kMaskSentinel);

}  // namespace maskcert
