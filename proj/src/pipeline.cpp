#include "maskcert/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "maskcert/external_classifier.hpp"
#include "maskcert/rng.hpp"

namespace maskcert {

using nlohmann::json;

namespace {

// Seed stream distance between consecutive examples; every per-example
// operation (predict batch, certify batch, victim queries) stays inside
// its example's window.
constexpr std::uint64_t kBatchStride = 1ULL << 20;

std::string format_fixed(double value, int digits = 4) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
    return buffer;
}

SmoothingConfig base_config(const EngineOptions& options) {
    SmoothingConfig cfg;
    cfg.rho = options.rho;
    cfg.n = options.n;
    cfg.n_prime = options.n_prime;
    cfg.alpha = options.alpha;
    cfg.ensemble = options.ensemble;
    cfg.sampler.mode = options.sampler_mode;
    cfg.sampler.master_seed = options.seed;
    cfg.mask_sentinel = options.sentinel;
    return cfg;
}

// Weighted mode takes per-example weights from the weight file, or a flat
// default when no file was given.
SmoothingConfig config_for_example(
    const SmoothingConfig& base, const DatasetExample& example,
    const std::unordered_map<std::string, std::vector<double>>& weights) {
    SmoothingConfig cfg = base;
    if (cfg.sampler.mode == SamplerMode::Weighted) {
        const auto it = weights.find(example.id);
        if (it != weights.end()) {
            if (static_cast<int>(it->second.size()) != example.text.length())
                throw std::invalid_argument("weight count mismatch for example " + example.id);
            cfg.sampler.weights = it->second;
        } else {
            cfg.sampler.weights.assign(static_cast<std::size_t>(example.text.length()), 1.0);
        }
    }
    return cfg;
}

std::unique_ptr<BaseClassifier> load_classifier(const EngineOptions& options) {
    if (!options.external_command.empty())
        return std::make_unique<ExternalClassifier>(options.external_command);
    if (options.model_path.empty())
        throw std::invalid_argument("no model file or external command given");
    return load_model(options.model_path);
}

void maybe_write(const std::string& out_dir, const std::string& name,
                 const std::string& content) {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    write_file((std::filesystem::path(out_dir) / name).string(), content);
}

json summary_to_json(const CertifiedSummary& summary) {
    json out;
    out["accuracy"] = summary.accuracy;
    out["mcb"] = summary.mcb ? json(*summary.mcb) : json(nullptr);
    out["mcr"] = summary.mcr ? json(*summary.mcr) : json(nullptr);
    return out;
}

json summary_to_json(const EmpiricalSummary& summary) {
    json out;
    out["cln"] = summary.cln;
    out["boa"] = summary.boa;
    out["succ"] = summary.succ;
    return out;
}

}  // namespace

void set_worker_count(int workers) {
#ifdef _OPENMP
    if (workers > 0) omp_set_num_threads(workers);
#else
    (void)workers;
#endif
}

int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::string certificate_to_json(const std::string& id, const Certificate& cert) {
    json out;
    out["id"] = id;
    out["label"] = cert.label ? json(*cert.label) : json(nullptr);
    out["p_lower"] = cert.p_lower ? json(*cert.p_lower) : json(nullptr);
    out["beta"] = cert.beta_hat ? json(*cert.beta_hat) : json(nullptr);
    out["radius"] = cert.radius ? json(*cert.radius) : json(nullptr);
    out["certified_rate"] = cert.certified_rate ? json(*cert.certified_rate) : json(nullptr);
    return out.dump();
}

Certificate certificate_from_json(const std::string& line, std::string* id) {
    const json record = json::parse(line);
    Certificate cert;
    if (id) *id = record.at("id").get<std::string>();
    if (!record.at("label").is_null()) cert.label = record["label"].get<int>();
    if (!record.at("p_lower").is_null()) cert.p_lower = record["p_lower"].get<double>();
    if (!record.at("beta").is_null()) cert.beta_hat = record["beta"].get<double>();
    if (!record.at("radius").is_null()) cert.radius = record["radius"].get<int>();
    if (!record.at("certified_rate").is_null())
        cert.certified_rate = record["certified_rate"].get<double>();
    return cert;
}

std::string run_train(const TrainOptions& options) {
    const Dataset dataset = load_dataset_jsonl(options.data_path);
    std::vector<Text> texts;
    texts.reserve(dataset.examples.size());
    for (const auto& example : dataset.examples) texts.push_back(example.text);

    SamplerSpec spec;
    spec.master_seed = options.seed;
    const BowModel model = train_bow(texts, dataset.class_count, options.rho, options.epochs,
                                     spec, options.smoothing, options.sentinel);
    const std::string serialized = model_to_json(model);
    if (!options.out_model_path.empty()) write_file(options.out_model_path, serialized);
    return serialized;
}

PredictResult run_predict(const EngineOptions& options) {
    const Dataset dataset = load_dataset_jsonl(options.data_path);
    const auto classifier = load_classifier(options);
    const SmoothingConfig base = base_config(options);
    const auto weights = options.weights_path.empty()
                             ? std::unordered_map<std::string, std::vector<double>>{}
                             : load_weights_jsonl(options.weights_path);

    PredictResult result;
    std::string lines;
    long correct = 0;
    for (std::size_t index = 0; index < dataset.examples.size(); ++index) {
        const auto& example = dataset.examples[index];
        const SmoothingConfig cfg = config_for_example(base, example, weights);
        const Prediction pred =
            predict(example.text, *classifier, cfg, index * kBatchStride);
        if (pred.label == example.label()) ++correct;
        json record;
        record["id"] = example.id;
        record["predicted"] = pred.label;
        record["p_hat"] = pred.p_hat;
        record["gold"] = example.label();
        lines += record.dump();
        lines += '\n';
        result.records.push_back({example.id, example.label(), pred.label});
    }
    result.predictions_jsonl = std::move(lines);

    json summary;
    summary["accuracy"] =
        static_cast<double>(correct) / static_cast<double>(dataset.examples.size());
    result.summary_json = summary.dump();

    maybe_write(options.out_dir, "predictions.jsonl", result.predictions_jsonl);
    maybe_write(options.out_dir, "summary.json", result.summary_json);
    return result;
}

CertifyResult run_certify(const CertifyOptions& options) {
    const EngineOptions& engine = options.engine;
    const Dataset dataset = load_dataset_jsonl(engine.data_path);
    const auto classifier = load_classifier(engine);
    const SmoothingConfig base = base_config(engine);

    CertifyResult result;
    std::string lines;
    for (std::size_t index = 0; index < dataset.examples.size(); ++index) {
        const auto& example = dataset.examples[index];
        Certificate cert;
        if (options.exact) {
            const int k = retained_count(example.text.length(), engine.rho);
            const ExactCertificate exact = exact_certify_radius(
                example.text, example.label(), *classifier, k, engine.enum_cap,
                engine.sentinel);
            if (exact.predicted_correct) {
                cert.label = example.label();
                cert.p_lower = exact.p_y;
                cert.radius = exact.radius;
                if (exact.radius)
                    cert.certified_rate = static_cast<double>(*exact.radius) /
                                          static_cast<double>(example.text.length());
            }
        } else {
            cert = certify(example.text, example.label(), *classifier, base,
                           index * kBatchStride, options.beta_mode,
                           options.beta_mode == BetaMode::MonteCarlo ? &options.estimator
                                                                     : nullptr);
        }
        lines += certificate_to_json(example.id, cert);
        lines += '\n';
        result.certificates.push_back(cert);
    }
    result.certificates_jsonl = std::move(lines);

    const CertifiedSummary summary = median_certified(result.certificates);
    result.summary_json = summary_to_json(summary).dump();

    std::string csv = "run,rho,accuracy,mcb,mcr\n";
    csv += options.run_label + "," + format_fixed(engine.rho, 2) + "," +
           format_fixed(summary.accuracy) + "," +
           (summary.mcb ? std::to_string(*summary.mcb) : std::string("N/A")) + "," +
           (summary.mcr ? format_fixed(*summary.mcr) : std::string("N/A")) + "\n";
    result.table_csv = std::move(csv);

    maybe_write(engine.out_dir, "certificates.jsonl", result.certificates_jsonl);
    maybe_write(engine.out_dir, "summary.json", result.summary_json);
    maybe_write(engine.out_dir, "table.csv", result.table_csv);
    return result;
}

AttackResult run_attack(const AttackOptions& options) {
    const EngineOptions& engine = options.engine;
    const Dataset dataset = load_dataset_jsonl(engine.data_path);
    const auto classifier = load_classifier(engine);
    const SmoothingConfig base = base_config(engine);
    const auto weights = engine.weights_path.empty()
                             ? std::unordered_map<std::string, std::vector<double>>{}
                             : load_weights_jsonl(engine.weights_path);

    SynonymTable synonyms;
    if (options.kind == AttackKind::Substitution) {
        if (options.synonyms_path.empty())
            throw std::invalid_argument("substitution attack needs a synonym table");
        synonyms = load_synonym_table(options.synonyms_path);
    }
    std::unordered_map<std::string, std::vector<std::string>> homoglyphs;
    const bool custom_homoglyphs = !options.homoglyphs_path.empty();
    if (custom_homoglyphs) homoglyphs = load_substitution_map(options.homoglyphs_path);

    std::vector<PredictionRecord> clean;
    std::vector<AttackRecord> attacked;
    std::string lines;
    for (std::size_t index = 0; index < dataset.examples.size(); ++index) {
        const auto& example = dataset.examples[index];
        const SmoothingConfig cfg = config_for_example(base, example, weights);
        const std::uint64_t batch_base = index * kBatchStride;

        const Victim victim = options.victim == VictimKind::Base
                                  ? make_base_victim(*classifier)
                                  : make_smoothed_victim(*classifier, cfg, batch_base);

        const VictimResponse clean_response = victim(example.text);
        clean.push_back({example.id, example.label(), clean_response.label});
        if (clean_response.label != example.label()) continue;  // attack clean-correct only

        AttackOutcome outcome;
        if (options.kind == AttackKind::Substitution) {
            outcome = attack_substitution(example.text, example.label(), victim, synonyms,
                                          options.budget, engine.sentinel);
        } else {
            outcome = attack_chars(example.text, example.label(), victim, options.budget,
                                   options.char_ops,
                                   custom_homoglyphs ? &homoglyphs : nullptr, engine.sentinel);
        }
        attacked.push_back({example.id, outcome.success});

        json record;
        record["id"] = example.id;
        record["success"] = outcome.success;
        record["queries"] = outcome.queries_used;
        record["hit_query_cap"] = outcome.hit_query_cap;
        record["changed_positions"] = outcome.positions_changed.indices;
        record["adversarial_tokens"] = outcome.adversarial_text.tokens;
        lines += record.dump();
        lines += '\n';
    }

    AttackResult result;
    result.outcomes_jsonl = std::move(lines);
    result.summary = empirical_summary(clean, attacked);
    result.summary_json = summary_to_json(result.summary).dump();

    std::string csv = "run,cln,boa,succ\n";
    csv += options.run_label + "," + format_fixed(result.summary.cln) + "," +
           format_fixed(result.summary.boa) + "," + format_fixed(result.summary.succ) + "\n";
    result.table_csv = std::move(csv);

    maybe_write(engine.out_dir, "attacks.jsonl", result.outcomes_jsonl);
    maybe_write(engine.out_dir, "summary.json", result.summary_json);
    maybe_write(engine.out_dir, "table.csv", result.table_csv);
    return result;
}

BetaResult run_beta(const BetaOptions& options) {
    const EngineOptions& engine = options.engine;
    const Dataset dataset = load_dataset_jsonl(engine.data_path);
    const auto classifier = load_classifier(engine);
    SmoothingConfig base = base_config(engine);
    base.sampler.mode = SamplerMode::Uniform;  // the estimator samples from U

    BetaEstimatorConfig est = options.estimator;
    est.compute_pooled = true;

    std::string lines;
    long done = 0;
    for (const auto& example : dataset.examples) {
        if (options.max_examples > 0 && done >= options.max_examples) break;
        ++done;
        BetaEstimatorConfig per_example = est;
        per_example.r = std::clamp(per_example.r, 1, example.text.length());
        const BetaEstimate estimate =
            estimate_beta_distribution(example.text, *classifier, base, per_example);

        json record;
        record["id"] = example.id;
        record["r"] = per_example.r;
        record["beta"] = estimate.per_class;
        record["p_hat"] = estimate.pooled_pc;
        record["jsd"] = js_divergence(estimate.per_class, estimate.pooled_pc);
        record["zero_survivor_draws"] = estimate.zero_survivor_draws;
        lines += record.dump();
        lines += '\n';
        if (estimate.zero_survivor_draws > 0)
            std::fprintf(stderr, "beta: %ld outer draws with zero survivors on %s\n",
                         estimate.zero_survivor_draws, example.id.c_str());
    }

    BetaResult result;
    result.report_jsonl = std::move(lines);
    maybe_write(engine.out_dir, "beta.jsonl", result.report_jsonl);
    return result;
}

ReportResult run_report(const ReportOptions& options) {
    ReportResult result;
    json summary;

    if (!options.certificates_path.empty()) {
        std::vector<Certificate> certificates;
        std::istringstream stream(read_file(options.certificates_path));
        std::string line;
        while (std::getline(stream, line)) {
            if (line.empty()) continue;
            certificates.push_back(certificate_from_json(line));
        }
        const CertifiedSummary certified = median_certified(certificates);
        summary = summary_to_json(certified);

        result.table_csv = "run,accuracy,mcb,mcr\n";
        result.table_csv += "certificates," + format_fixed(certified.accuracy) + "," +
                            (certified.mcb ? std::to_string(*certified.mcb) : std::string("N/A")) +
                            "," +
                            (certified.mcr ? format_fixed(*certified.mcr) : std::string("N/A")) +
                            "\n";
    } else if (!options.summary_paths.empty()) {
        // merge per-run summaries into one table
        bool empirical = false;
        json rows = json::array();
        for (const auto& path : options.summary_paths) {
            json row = json::parse(read_file(path));
            row["source"] = path;
            if (row.contains("cln")) empirical = true;
            rows.push_back(std::move(row));
        }
        summary["runs"] = rows;
        result.table_csv = empirical ? "source,cln,boa,succ\n" : "source,accuracy,mcb,mcr\n";
        for (const auto& row : summary["runs"]) {
            const std::string source = row["source"].get<std::string>();
            if (empirical) {
                result.table_csv += source + "," + format_fixed(row["cln"].get<double>()) + "," +
                                    format_fixed(row["boa"].get<double>()) + "," +
                                    format_fixed(row["succ"].get<double>()) + "\n";
            } else {
                result.table_csv +=
                    source + "," + format_fixed(row["accuracy"].get<double>()) + "," +
                    (row["mcb"].is_null() ? std::string("N/A")
                                          : std::to_string(row["mcb"].get<int>())) +
                    "," +
                    (row["mcr"].is_null() ? std::string("N/A")
                                          : format_fixed(row["mcr"].get<double>())) +
                    "\n";
            }
        }
    } else {
        throw std::invalid_argument("report needs certificates or summaries to aggregate");
    }

    result.summary_json = summary.dump();
    maybe_write(options.out_dir, "report.json", result.summary_json);
    maybe_write(options.out_dir, "report.csv", result.table_csv);
    return result;
}

}  // namespace maskcert
