#include "maskcert/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "maskcert/rng.hpp"

namespace maskcert {

int argmax_lowest(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("argmax of empty score vector");
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i)
        if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(best)]) best = i;
    return best;
}

int ClassScores::argmax() const { return argmax_lowest(scores); }

KeywordClassifier::KeywordClassifier(std::map<std::string, int> rules, int default_class,
                                     int classes)
    : rules_(std::move(rules)), default_class_(default_class), classes_(classes) {
    if (rules_.empty()) throw std::invalid_argument("keyword rules must be non-empty");
    if (classes_ < 2) throw std::invalid_argument("need at least two classes");
    if (default_class_ < 0 || default_class_ >= classes_)
        throw std::invalid_argument("default class out of range");
    for (const auto& [token, cls] : rules_)
        if (cls < 0 || cls >= classes_)
            throw std::invalid_argument("rule class out of range: " + token);
}

ClassScores classify_keyword(const MaskedText& masked,
                             const std::map<std::string, int>& rules,
                             int default_class, int classes) {
    if (rules.empty()) throw std::invalid_argument("keyword rules must be non-empty");
    int cls = default_class;
    for (const auto& token : masked.tokens) {
        auto it = rules.find(token);
        if (it != rules.end()) { cls = it->second; break; }
    }
    ClassScores out;
    out.scores.assign(static_cast<std::size_t>(classes), 0.0);
    out.scores[static_cast<std::size_t>(cls)] = 1.0;
    return out;
}

ClassScores KeywordClassifier::classify(const MaskedText& masked) const {
    return classify_keyword(masked, rules_, default_class_, classes_);
}

void BowModel::finalize() {
    const int classes = class_count();
    if (classes < 2) throw std::invalid_argument("bag-of-words model needs >= 2 classes");
    const double vocab = static_cast<double>(token_counts.size());

    long total_examples = 0;
    for (long c : class_example_counts) total_examples += c;

    log_prior_.assign(static_cast<std::size_t>(classes), 0.0);
    log_unseen_.assign(static_cast<std::size_t>(classes), 0.0);
    for (int c = 0; c < classes; ++c) {
        const auto cc = static_cast<double>(class_example_counts[static_cast<std::size_t>(c)]);
        log_prior_[static_cast<std::size_t>(c)] =
            std::log((cc + smoothing) /
                     (static_cast<double>(total_examples) + smoothing * classes));
        const auto denom =
            static_cast<double>(class_token_totals[static_cast<std::size_t>(c)]) +
            smoothing * vocab;
        log_unseen_[static_cast<std::size_t>(c)] = std::log(smoothing / denom);
    }

    log_likelihood_.clear();
    log_likelihood_.reserve(token_counts.size());
    for (const auto& [token, counts] : token_counts) {
        std::vector<double> ll(static_cast<std::size_t>(classes));
        for (int c = 0; c < classes; ++c) {
            const auto denom =
                static_cast<double>(class_token_totals[static_cast<std::size_t>(c)]) +
                smoothing * vocab;
            ll[static_cast<std::size_t>(c)] =
                std::log((static_cast<double>(counts[static_cast<std::size_t>(c)]) + smoothing) /
                         denom);
        }
        log_likelihood_.emplace(token, std::move(ll));
    }
}

ClassScores BowModel::classify(const MaskedText& masked) const {
    const int classes = class_count();
    std::vector<double> logp = log_prior_;
    for (const auto& token : masked.tokens) {
        auto it = log_likelihood_.find(token);
        const std::vector<double>* ll = it != log_likelihood_.end() ? &it->second : &log_unseen_;
        for (int c = 0; c < classes; ++c)
            logp[static_cast<std::size_t>(c)] += (*ll)[static_cast<std::size_t>(c)];
    }
    // normalize to probabilities via log-sum-exp
    const double mx = *std::max_element(logp.begin(), logp.end());
    double z = 0.0;
    for (double v : logp) z += std::exp(v - mx);
    ClassScores out;
    out.scores.resize(logp.size());
    for (std::size_t c = 0; c < logp.size(); ++c)
        out.scores[c] = std::exp(logp[c] - mx) / z;
    return out;
}

BowModel train_bow(const std::vector<Text>& data, int class_count, double rho,
                   int epochs, const SamplerSpec& spec, double smoothing,
                   const std::string& sentinel) {
    if (data.empty()) throw std::invalid_argument("training data must be non-empty");
    if (class_count < 2) throw std::invalid_argument("need at least two classes");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    for (const auto& text : data) {
        if (!text.label || *text.label < 0 || *text.label >= class_count)
            throw std::invalid_argument("training label out of range");
        if (text.length() < 1) throw std::invalid_argument("empty training text");
        for (const auto& token : text.tokens)
            if (token == sentinel)
                throw std::invalid_argument("training token equals the mask sentinel");
    }

    BowModel model;
    model.smoothing = smoothing;
    model.class_example_counts.assign(static_cast<std::size_t>(class_count), 0);
    model.class_token_totals.assign(static_cast<std::size_t>(class_count), 0);

    const auto n = static_cast<long>(data.size());
    SamplerSpec uniform;
    uniform.mode = SamplerMode::Uniform;
    uniform.master_seed = mix_seed({spec.master_seed, seed_purpose::kTrainMask});

    // Integer counts merge order-independently, so the epoch loop can run on
    // any number of workers without changing the fitted tables.
    std::vector<std::map<std::string, std::vector<long>>> local_counts;
    #pragma omp parallel
    {
        #pragma omp single
        {
            int workers = 1;
            #ifdef _OPENMP
            workers = omp_get_num_threads();
            #endif
            local_counts.assign(static_cast<std::size_t>(workers), {});
        }
        int me = 0;
        #ifdef _OPENMP
        me = omp_get_thread_num();
        #endif
        MaskedText scratch;
        #pragma omp for collapse(2) schedule(static)
        for (int epoch = 0; epoch < epochs; ++epoch) {
            for (long i = 0; i < n; ++i) {
                const Text& text = data[static_cast<std::size_t>(i)];
                const int h = text.length();
                const int k = retained_count(h, rho);
                const auto set = sample_retention_set(
                    h, k, uniform, static_cast<std::uint64_t>(epoch),
                    static_cast<std::uint64_t>(i));
                mask_into(text, set, sentinel, scratch);
                auto& mine = local_counts[static_cast<std::size_t>(me)];
                for (const auto& token : scratch.tokens) {
                    auto it = mine.try_emplace(
                        token, static_cast<std::size_t>(class_count), 0L).first;
                    ++it->second[static_cast<std::size_t>(*text.label)];
                }
            }
        }
    }
    for (auto& partial : local_counts) {
        for (auto& [token, counts] : partial) {
            auto it = model.token_counts
                          .try_emplace(token, static_cast<std::size_t>(class_count), 0L)
                          .first;
            for (int c = 0; c < class_count; ++c)
                it->second[static_cast<std::size_t>(c)] += counts[static_cast<std::size_t>(c)];
        }
    }
    for (const auto& text : data)
        model.class_example_counts[static_cast<std::size_t>(*text.label)] += epochs;
    for (const auto& [token, counts] : model.token_counts)
        for (int c = 0; c < class_count; ++c)
            model.class_token_totals[static_cast<std::size_t>(c)] +=
                counts[static_cast<std::size_t>(c)];

    model.finalize();
    return model;
}

}  // namespace maskcert
