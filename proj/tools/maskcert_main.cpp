// Command-line front end: train, predict, certify, attack, beta, risk, report.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maskcert/pipeline.hpp"

namespace {

using namespace maskcert;

struct CommonFlags {
    EngineOptions engine;
    std::string ensemble = "vote";
    std::string sampler = "uniform";
    std::string external;
    int threads = 0;
};

void add_engine_flags(CLI::App* cmd, CommonFlags& flags, bool needs_model = true) {
    cmd->add_option("--data", flags.engine.data_path, "dataset JSONL file")->required();
    auto* model = cmd->add_option("--model", flags.engine.model_path, "model JSON file");
    cmd->add_option("--external", flags.external,
                    "external classifier command (overrides --model)");
    if (needs_model) model->check(CLI::ExistingFile);
    cmd->add_option("--rho", flags.engine.rho, "masking rate in [0,1]");
    cmd->add_option("--n", flags.engine.n, "prediction sample count");
    cmd->add_option("--nprime", flags.engine.n_prime, "certification sample count");
    cmd->add_option("--alpha", flags.engine.alpha, "confidence complement");
    cmd->add_option("--ensemble", flags.ensemble, "vote|logit")
        ->check(CLI::IsMember({"vote", "logit"}));
    cmd->add_option("--sampler", flags.sampler, "uniform|weighted")
        ->check(CLI::IsMember({"uniform", "weighted"}));
    cmd->add_option("--weights", flags.engine.weights_path, "per-example weight JSONL");
    cmd->add_option("--seed", flags.engine.seed, "master seed");
    cmd->add_option("--out", flags.engine.out_dir, "output directory");
    cmd->add_option("--enum-cap", flags.engine.enum_cap, "exact enumeration cap");
    cmd->add_option("--sentinel", flags.engine.sentinel, "mask sentinel token");
    cmd->add_option("--threads", flags.threads, "worker count (0 = default)");
}

void finish_engine_flags(CommonFlags& flags) {
    flags.engine.ensemble =
        flags.ensemble == "logit" ? EnsembleMode::Logit : EnsembleMode::Vote;
    flags.engine.sampler_mode =
        flags.sampler == "weighted" ? SamplerMode::Weighted : SamplerMode::Uniform;
    if (!flags.external.empty()) {
        std::string current;
        for (char c : flags.external) {
            if (c == ' ') {
                if (!current.empty()) flags.engine.external_command.push_back(current);
                current.clear();
            } else {
                current += c;
            }
        }
        if (!current.empty()) flags.engine.external_command.push_back(current);
    }
    set_worker_count(flags.threads);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smoothed classification and certified robustness via random word masking"};
    app.require_subcommand(1);

    // train
    TrainOptions train_options;
    auto* train_cmd = app.add_subcommand("train", "fit a mask-augmented bag-of-words model");
    train_cmd->add_option("--data", train_options.data_path, "dataset JSONL")->required();
    train_cmd->add_option("--rho", train_options.rho, "training masking rate");
    train_cmd->add_option("--epochs", train_options.epochs, "masked passes over the data");
    train_cmd->add_option("--seed", train_options.seed, "master seed");
    train_cmd->add_option("--smoothing", train_options.smoothing, "additive smoothing constant");
    train_cmd->add_option("--sentinel", train_options.sentinel, "mask sentinel token");
    train_cmd->add_option("--out-model", train_options.out_model_path, "model output path")
        ->required();

    // predict
    CommonFlags predict_flags;
    auto* predict_cmd = app.add_subcommand("predict", "smoothed predictions for a dataset");
    add_engine_flags(predict_cmd, predict_flags);

    // certify
    CommonFlags certify_flags;
    CertifyOptions certify_options;
    std::string beta_mode = "approx";
    auto* certify_cmd = app.add_subcommand("certify", "certified robustness radii");
    add_engine_flags(certify_cmd, certify_flags);
    certify_cmd->add_option("--beta-mode", beta_mode, "approx|montecarlo")
        ->check(CLI::IsMember({"approx", "montecarlo"}));
    certify_cmd->add_option("--nr", certify_options.estimator.n_r, "outer draws (montecarlo)");
    certify_cmd->add_option("--nk", certify_options.estimator.n_k, "inner draws (montecarlo)");
    certify_cmd->add_option("--r", certify_options.estimator.r, "perturbation size (montecarlo)");
    certify_cmd->add_flag("--exact", certify_options.exact,
                          "enumerate retention sets exactly (small texts, worst-case beta)");
    certify_cmd->add_option("--run-label", certify_options.run_label, "label in the CSV table");

    // attack
    CommonFlags attack_flags;
    AttackOptions attack_options;
    std::string attack_kind = "subst";
    std::string victim_kind = "smoothed";
    auto* attack_cmd = app.add_subcommand("attack", "empirical robustness under greedy attacks");
    add_engine_flags(attack_cmd, attack_flags);
    attack_flags.engine.n = 100;  // attack-time prediction default
    attack_cmd->add_option("--mode", attack_kind, "subst|chars")
        ->check(CLI::IsMember({"subst", "chars"}));
    attack_cmd->add_option("--victim", victim_kind, "base|smoothed")
        ->check(CLI::IsMember({"base", "smoothed"}));
    attack_cmd->add_option("--synonyms", attack_options.synonyms_path, "synonym table JSON");
    attack_cmd->add_option("--homoglyphs", attack_options.homoglyphs_path,
                           "homoglyph map JSON (default: shipped table)");
    attack_cmd->add_option("--budget", attack_options.budget.max_positions,
                           "max positions perturbed");
    attack_cmd->add_option("--queries-cap", attack_options.budget.queries_cap,
                           "max victim queries per example");
    attack_cmd->add_option("--run-label", attack_options.run_label, "label in the CSV table");

    // beta
    CommonFlags beta_flags;
    BetaOptions beta_options;
    auto* beta_cmd = app.add_subcommand("beta", "Monte Carlo conditional-probability estimate");
    add_engine_flags(beta_cmd, beta_flags);
    beta_cmd->add_option("--nr", beta_options.estimator.n_r, "outer draws");
    beta_cmd->add_option("--nk", beta_options.estimator.n_k, "inner draws");
    beta_cmd->add_option("--r", beta_options.estimator.r, "assumed perturbation size");
    beta_cmd->add_option("--max-examples", beta_options.max_examples, "limit examples (0 = all)");

    // risk
    RiskParams risk_params;
    auto* risk_cmd = app.add_subcommand("risk", "probability that no perturbed word is masked");
    risk_cmd->set_help_flag("--help", "print help");  // frees -h for the length flag
    risk_cmd->add_option("--h,--length", risk_params.h, "text length")->required();
    risk_cmd->add_option("--rho", risk_params.rho, "masking rate")->required();
    risk_cmd->add_option("--gamma", risk_params.gamma, "perturbed fraction")->required();

    // report
    ReportOptions report_options;
    auto* report_cmd = app.add_subcommand("report", "aggregate certificates or summaries");
    report_cmd->add_option("--certificates", report_options.certificates_path,
                           "certificates JSONL to summarize");
    report_cmd->add_option("--summaries", report_options.summary_paths,
                           "summary JSON files to merge");
    report_cmd->add_option("--out", report_options.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) {
            run_train(train_options);
            std::printf("model written to %s\n", train_options.out_model_path.c_str());
        } else if (predict_cmd->parsed()) {
            finish_engine_flags(predict_flags);
            const PredictResult result = run_predict(predict_flags.engine);
            std::printf("%s\n", result.summary_json.c_str());
        } else if (certify_cmd->parsed()) {
            finish_engine_flags(certify_flags);
            certify_options.engine = certify_flags.engine;
            certify_options.beta_mode =
                beta_mode == "montecarlo" ? BetaMode::MonteCarlo : BetaMode::Approximate;
            const CertifyResult result = run_certify(certify_options);
            std::printf("%s\n", result.summary_json.c_str());
        } else if (attack_cmd->parsed()) {
            finish_engine_flags(attack_flags);
            attack_options.engine = attack_flags.engine;
            attack_options.kind =
                attack_kind == "chars" ? AttackKind::Chars : AttackKind::Substitution;
            attack_options.victim =
                victim_kind == "base" ? VictimKind::Base : VictimKind::Smoothed;
            const AttackResult result = run_attack(attack_options);
            std::printf("%s\n", result.summary_json.c_str());
        } else if (beta_cmd->parsed()) {
            finish_engine_flags(beta_flags);
            beta_options.engine = beta_flags.engine;
            const BetaResult result = run_beta(beta_options);
            std::printf("%s", result.report_jsonl.c_str());
        } else if (risk_cmd->parsed()) {
            std::printf("%.10g\n", risk_probability(risk_params));
        } else if (report_cmd->parsed()) {
            const ReportResult result = run_report(report_options);
            std::printf("%s\n", result.table_csv.c_str());
        }
    } catch (const std::exception& error) {
        std::fprintf(stderr, "error: %s\n", error.what());
        return 1;
    }
    return 0;
}
