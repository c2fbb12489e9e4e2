#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maskcert/attack.hpp"
#include "maskcert/certification.hpp"
#include "maskcert/dataset.hpp"
#include "maskcert/metrics.hpp"
#include "maskcert/smoothing.hpp"

namespace maskcert {

// Everything the CLI subcommands do lives here so tests can run the exact
// pipeline in-process and compare artifacts byte for byte.

void set_worker_count(int workers);  // 0 keeps the library default
int worker_count();

struct EngineOptions {
    std::string data_path;
    std::string model_path;
    std::vector<std::string> external_command;  // overrides model_path when set
    double rho = 0.0;
    long n = 1000;
    long n_prime = 5000;
    double alpha = 0.05;
    EnsembleMode ensemble = EnsembleMode::Vote;
    SamplerMode sampler_mode = SamplerMode::Uniform;
    std::string weights_path;  // per-example masking weights (weighted mode)
    std::uint64_t seed = 0;
    std::string out_dir;  // empty: no files written
    std::int64_t enum_cap = kDefaultEnumerationCap;
    std::string sentinel = kMaskSentinel;
};

struct TrainOptions {
    std::string data_path;
    double rho = 0.3;
    int epochs = 5;
    std::uint64_t seed = 0;
    double smoothing = 1.0;
    std::string sentinel = kMaskSentinel;
    std::string out_model_path;
};

std::string run_train(const TrainOptions& options);  // returns the model JSON

struct PredictResult {
    std::string predictions_jsonl;
    std::string summary_json;  // {"accuracy": ...}
    std::vector<PredictionRecord> records;
};
PredictResult run_predict(const EngineOptions& options);

struct CertifyResult {
    std::string certificates_jsonl;
    std::string summary_json;  // {"accuracy", "mcb", "mcr"}
    std::string table_csv;
    std::vector<Certificate> certificates;
};
struct CertifyOptions {
    EngineOptions engine;
    BetaMode beta_mode = BetaMode::Approximate;
    BetaEstimatorConfig estimator;  // used when beta_mode = MonteCarlo
    // Exact mode: enumerate all C(h, k) retention sets per example instead
    // of sampling, and grant the worst-case-sound radius. Costs are bounded
    // by engine.enum_cap; p_lower is the exact p_y and beta is not reported.
    bool exact = false;
    std::string run_label = "run";
};
CertifyResult run_certify(const CertifyOptions& options);

enum class AttackKind { Substitution, Chars };
enum class VictimKind { Base, Smoothed };

struct AttackOptions {
    EngineOptions engine;       // engine.n defaults to 1000; attacks usually pass 100
    AttackKind kind = AttackKind::Substitution;
    VictimKind victim = VictimKind::Smoothed;
    std::string synonyms_path;  // substitution attack
    std::string homoglyphs_path;  // chars attack; empty = shipped table
    AttackBudget budget;
    CharEditOps char_ops;
    std::string run_label = "run";
};
struct AttackResult {
    std::string outcomes_jsonl;
    std::string summary_json;  // {"cln", "boa", "succ"}
    std::string table_csv;
    EmpiricalSummary summary;
};
AttackResult run_attack(const AttackOptions& options);

struct BetaOptions {
    EngineOptions engine;
    BetaEstimatorConfig estimator;
    long max_examples = 0;  // 0 = all
};
struct BetaResult {
    std::string report_jsonl;  // per example: beta, pooled p_c, jsd
};
BetaResult run_beta(const BetaOptions& options);

struct ReportOptions {
    std::string certificates_path;            // recompute certified summary
    std::vector<std::string> summary_paths;   // merge existing summaries
    std::string out_dir;
};
struct ReportResult {
    std::string summary_json;
    std::string table_csv;
};
ReportResult run_report(const ReportOptions& options);

// JSONL encoding of one certificate ("N/A" encodes as null label/radius).
std::string certificate_to_json(const std::string& id, const Certificate& cert);
Certificate certificate_from_json(const std::string& line, std::string* id = nullptr);

}  // namespace maskcert
