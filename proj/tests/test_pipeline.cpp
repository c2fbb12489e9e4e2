#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include <unistd.h>

#include <json.hpp>

#include "maskcert/errors.hpp"
#include "maskcert/pipeline.hpp"
#include "maskcert/rng.hpp"

using namespace maskcert;
using nlohmann::json;

namespace {

// Self-cleaning scratch directory for file-based pipeline runs.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("maskcert_test_" + std::to_string(splitmix64_mix(
                                       static_cast<std::uint64_t>(::getpid()) ^
                                       reinterpret_cast<std::uintptr_t>(this))));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string toy_dataset_jsonl() {
    // five examples, one keyword class each
    std::string lines;
    for (int i = 0; i < 5; ++i) {
        json record;
        record["id"] = "ex" + std::to_string(i);
        record["tokens"] = {"the", "movie", "was", "great", "tonight",
                            "w" + std::to_string(i)};
        record["label"] = 1;
        lines += record.dump();
        lines += '\n';
    }
    return lines;
}

std::string keyword_model_json() {
    json model;
    model["type"] = "keyword";
    model["classes"] = 2;
    model["default"] = 0;
    model["rules"] = {{"great", 1}, {"awful", 0}};
    return model.dump();
}

}  // namespace

TEST_CASE("dataset ingestion validates records") {
    CHECK_THROWS_AS(parse_dataset_jsonl("{\"id\": \"a\"}\n"), std::invalid_argument);
    CHECK_THROWS_AS(
        parse_dataset_jsonl("{\"id\": \"a\", \"tokens\": [\"x\"], \"label\": 0}\n"
                            "{\"id\": \"a\", \"tokens\": [\"y\"], \"label\": 1}\n"),
        std::invalid_argument);
    CHECK_THROWS_AS(
        parse_dataset_jsonl("{\"id\": \"a\", \"tokens\": [], \"label\": 0}\n"),
        std::invalid_argument);
    CHECK_THROWS_AS(
        parse_dataset_jsonl("{\"id\": \"a\", \"tokens\": [\"x\"], \"label\": -2}\n"),
        std::invalid_argument);
    const auto ok = parse_dataset_jsonl(toy_dataset_jsonl());
    CHECK(ok.examples.size() == 5);
    CHECK(ok.class_count == 2);
}

TEST_CASE("weight files validate records") {
    CHECK_THROWS_AS(parse_weights_jsonl("{\"id\": \"a\", \"weights\": [0.0]}\n"),
                    std::invalid_argument);
    const auto ok = parse_weights_jsonl("{\"id\": \"a\", \"weights\": [0.5, 2.0]}\n");
    CHECK(ok.at("a") == std::vector<double>{0.5, 2.0});
}

TEST_CASE("certify pipeline on a constant-correct toy dataset") {
    TempDir dir;
    write_file(dir.file("data.jsonl"), toy_dataset_jsonl());
    write_file(dir.file("model.json"), keyword_model_json());

    CertifyOptions options;
    options.engine.data_path = dir.file("data.jsonl");
    options.engine.model_path = dir.file("model.json");
    options.engine.rho = 0.0;  // keyword always visible: constant-correct
    options.engine.n = 200;
    options.engine.n_prime = 500;
    options.engine.seed = 5;
    options.engine.out_dir = dir.file("out");

    const CertifyResult result = run_certify(options);
    CHECK(result.certificates.size() == 5);
    const json summary = json::parse(result.summary_json);
    CHECK(summary["accuracy"] == 1.0);
    CHECK(summary["mcb"].is_number_integer());

    // five JSONL certificate lines, files written
    int lines = 0;
    for (char c : result.certificates_jsonl)
        if (c == '\n') ++lines;
    CHECK(lines == 5);
    CHECK(std::filesystem::exists(dir.file("out") + "/certificates.jsonl"));
    CHECK(std::filesystem::exists(dir.file("out") + "/summary.json"));
    CHECK(std::filesystem::exists(dir.file("out") + "/table.csv"));

    // certificates round-trip through their JSONL encoding
    std::string id;
    const Certificate parsed =
        certificate_from_json(result.certificates_jsonl.substr(
                                  0, result.certificates_jsonl.find('\n')),
                              &id);
    CHECK(id == "ex0");
    CHECK(parsed.label == result.certificates[0].label);
    CHECK(parsed.radius == result.certificates[0].radius);
}

TEST_CASE("exact certify mode grants sound radii and respects the cap") {
    TempDir dir;
    write_file(dir.file("data.jsonl"), toy_dataset_jsonl());
    write_file(dir.file("model.json"), keyword_model_json());

    CertifyOptions options;
    options.engine.data_path = dir.file("data.jsonl");
    options.engine.model_path = dir.file("model.json");
    options.engine.rho = 0.3;  // h = 6 -> k = 4: keyword retained 2/3 of the time
    options.exact = true;

    const CertifyResult result = run_certify(options);
    CHECK(result.certificates.size() == 5);
    for (const auto& cert : result.certificates) {
        REQUIRE(cert.label.has_value());
        REQUIRE(cert.p_lower.has_value());
        CHECK(!cert.beta_hat.has_value());  // exact mode reports no estimate
        CHECK(*cert.p_lower == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }

    options.engine.enum_cap = 4;  // below C(6,4)
    CHECK_THROWS_AS(run_certify(options), EnumerationCapError);
}

TEST_CASE("predict with rho = 0 reproduces the base classifier exactly") {
    TempDir dir;
    write_file(dir.file("data.jsonl"), toy_dataset_jsonl());
    write_file(dir.file("model.json"), keyword_model_json());

    EngineOptions options;
    options.data_path = dir.file("data.jsonl");
    options.model_path = dir.file("model.json");
    options.rho = 0.0;
    options.n = 50;
    options.n_prime = 50;
    const PredictResult result = run_predict(options);
    const json summary = json::parse(result.summary_json);
    CHECK(summary["accuracy"] == 1.0);
    for (const auto& record : result.records) CHECK(record.predicted == 1);
}

TEST_CASE("pipeline outputs are byte-identical across worker counts and reruns") {
    TempDir dir;
    write_file(dir.file("data.jsonl"), toy_dataset_jsonl());
    write_file(dir.file("model.json"), keyword_model_json());

    CertifyOptions options;
    options.engine.data_path = dir.file("data.jsonl");
    options.engine.model_path = dir.file("model.json");
    options.engine.rho = 0.5;
    options.engine.n = 300;
    options.engine.n_prime = 600;
    options.engine.seed = 99;

    std::string reference_certs;
    std::string reference_summary;
    for (int workers : {1, 4, 8}) {
        set_worker_count(workers);
        const CertifyResult result = run_certify(options);
        if (reference_certs.empty()) {
            reference_certs = result.certificates_jsonl;
            reference_summary = result.summary_json;
        } else {
            CHECK(result.certificates_jsonl == reference_certs);
            CHECK(result.summary_json == reference_summary);
        }
        // rerun at the same worker count too
        const CertifyResult again = run_certify(options);
        CHECK(again.certificates_jsonl == reference_certs);
    }
    set_worker_count(0);
}

TEST_CASE("weighted predict consumes per-example weight files") {
    TempDir dir;
    // one example; masking weights force position 3 ("great") to survive:
    // everything else gets a huge masking weight
    json record;
    record["id"] = "w0";
    record["tokens"] = {"the", "movie", "was", "great"};
    record["label"] = 1;
    write_file(dir.file("data.jsonl"), record.dump() + "\n");
    write_file(dir.file("model.json"), keyword_model_json());
    json weights;
    weights["id"] = "w0";
    weights["weights"] = {1e9, 1e9, 1e9, 1e-9};
    write_file(dir.file("weights.jsonl"), weights.dump() + "\n");

    EngineOptions options;
    options.data_path = dir.file("data.jsonl");
    options.model_path = dir.file("model.json");
    options.rho = 0.75;  // k = 1: exactly one retained token
    options.n = 200;
    options.n_prime = 200;
    options.sampler_mode = SamplerMode::Weighted;
    options.weights_path = dir.file("weights.jsonl");
    const PredictResult result = run_predict(options);
    const json summary = json::parse(result.summary_json);
    // "great" is never masked, so the keyword classifier stays correct
    CHECK(summary["accuracy"] == 1.0);
}

TEST_CASE("attack pipeline emits a consistent empirical summary") {
    TempDir dir;
    write_file(dir.file("data.jsonl"), toy_dataset_jsonl());
    write_file(dir.file("model.json"), keyword_model_json());
    json synonyms;
    synonyms["great"] = {"grand"};
    write_file(dir.file("synonyms.json"), synonyms.dump());

    AttackOptions options;
    options.engine.data_path = dir.file("data.jsonl");
    options.engine.model_path = dir.file("model.json");
    options.engine.rho = 0.0;
    options.engine.n = 50;
    options.engine.n_prime = 50;
    options.kind = AttackKind::Substitution;
    options.victim = VictimKind::Base;
    options.synonyms_path = dir.file("synonyms.json");
    options.budget.max_positions = 2;
    options.budget.queries_cap = 10000;

    const AttackResult result = run_attack(options);
    CHECK(result.summary.cln == 1.0);
    CHECK(result.summary.boa == 0.0);  // one substitution defeats the keyword rule
    CHECK(result.summary.succ == 1.0);
    const double identity =
        (result.summary.cln - result.summary.boa) / result.summary.cln;
    CHECK(std::fabs(result.summary.succ - identity) < 1e-9);
}

TEST_CASE("risk command arithmetic") {
    CHECK(risk_probability({0.1, 0.3, 10}) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("beta pipeline reports JSD between beta and pooled p_c") {
    TempDir dir;
    write_file(dir.file("data.jsonl"), toy_dataset_jsonl());
    write_file(dir.file("model.json"), keyword_model_json());

    BetaOptions options;
    options.engine.data_path = dir.file("data.jsonl");
    options.engine.model_path = dir.file("model.json");
    options.engine.rho = 0.5;
    options.engine.n = 50;
    options.engine.n_prime = 50;
    options.estimator.n_r = 20;
    options.estimator.n_k = 100;
    options.estimator.r = 6;  // r = h: JSD must vanish
    options.max_examples = 2;

    const BetaResult result = run_beta(options);
    std::istringstream stream(result.report_jsonl);
    std::string line;
    int records = 0;
    while (std::getline(stream, line)) {
        if (line.empty()) continue;
        const json record = json::parse(line);
        CHECK(record["jsd"].get<double>() == 0.0);
        ++records;
    }
    CHECK(records == 2);
}

TEST_CASE("report merges certificate files into a summary table") {
    TempDir dir;
    write_file(dir.file("data.jsonl"), toy_dataset_jsonl());
    write_file(dir.file("model.json"), keyword_model_json());

    CertifyOptions certify_options;
    certify_options.engine.data_path = dir.file("data.jsonl");
    certify_options.engine.model_path = dir.file("model.json");
    certify_options.engine.rho = 0.0;
    certify_options.engine.n = 100;
    certify_options.engine.n_prime = 200;
    certify_options.engine.out_dir = dir.file("out");
    run_certify(certify_options);

    ReportOptions report_options;
    report_options.certificates_path = dir.file("out") + "/certificates.jsonl";
    const ReportResult report = run_report(report_options);
    const json summary = json::parse(report.summary_json);
    CHECK(summary["accuracy"] == 1.0);
    CHECK(report.table_csv.find("accuracy,mcb,mcr") != std::string::npos);
}
