#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "maskcert/attack.hpp"
#include "maskcert/classifier.hpp"
#include "maskcert/text.hpp"

namespace maskcert {

// One ingested example; text.label always holds the gold label.
struct DatasetExample {
    std::string id;
    Text text;

    int label() const { return *text.label; }
};

struct Dataset {
    std::vector<DatasetExample> examples;
    int class_count = 0;
};

// JSON-lines ingestion: {"id": str, "tokens": [str, ...], "label": int}
// per line. Ids must be unique, tokens pre-split, labels nonnegative.
Dataset load_dataset_jsonl(const std::string& path);
Dataset parse_dataset_jsonl(const std::string& content);

// Per-example masking weights: {"id": str, "weights": [positive, ...]}.
std::unordered_map<std::string, std::vector<double>> load_weights_jsonl(const std::string& path);
std::unordered_map<std::string, std::vector<double>> parse_weights_jsonl(const std::string& content);

// token -> array of substitutes (synonym tables and homoglyph maps share
// the shape).
SynonymTable load_synonym_table(const std::string& path);
std::unordered_map<std::string, std::vector<std::string>> load_substitution_map(
    const std::string& path);

// Model persistence. Bag-of-words models round-trip through their integer
// counts so reloaded tables are bit-identical; keyword models store their
// rules directly.
std::string model_to_json(const BowModel& model);
std::string model_to_json(const KeywordClassifier& model);
std::unique_ptr<BaseClassifier> load_model(const std::string& path);
std::unique_ptr<BaseClassifier> parse_model_json(const std::string& content);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace maskcert
