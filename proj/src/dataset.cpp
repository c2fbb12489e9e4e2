#include "maskcert/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace maskcert {

using nlohmann::json;

namespace {

json parse_line(const std::string& line, const char* what, std::size_t line_no) {
    json value = json::parse(line, nullptr, false);
    if (value.is_discarded() || !value.is_object())
        throw std::invalid_argument(std::string("bad ") + what + " record at line " +
                                    std::to_string(line_no));
    return value;
}

template <typename Fn>
void for_each_line(const std::string& content, Fn&& fn) {
    std::istringstream stream(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        fn(line, line_no);
    }
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset parse_dataset_jsonl(const std::string& content) {
    Dataset dataset;
    std::unordered_set<std::string> seen_ids;
    for_each_line(content, [&](const std::string& line, std::size_t line_no) {
        const json record = parse_line(line, "dataset", line_no);
        if (!record.contains("id") || !record["id"].is_string() ||
            !record.contains("tokens") || !record["tokens"].is_array() ||
            !record.contains("label") || !record["label"].is_number_integer())
            throw std::invalid_argument("dataset record needs id/tokens/label at line " +
                                        std::to_string(line_no));
        DatasetExample example;
        example.id = record["id"].get<std::string>();
        if (!seen_ids.insert(example.id).second)
            throw std::invalid_argument("duplicate dataset id: " + example.id);
        for (const auto& token : record["tokens"]) {
            if (!token.is_string())
                throw std::invalid_argument("non-string token at line " + std::to_string(line_no));
            example.text.tokens.push_back(token.get<std::string>());
        }
        if (example.text.tokens.empty())
            throw std::invalid_argument("empty token list at line " + std::to_string(line_no));
        const int label = record["label"].get<int>();
        if (label < 0) throw std::invalid_argument("negative label at line " + std::to_string(line_no));
        example.text.label = label;
        dataset.class_count = std::max(dataset.class_count, label + 1);
        dataset.examples.push_back(std::move(example));
    });
    dataset.class_count = std::max(dataset.class_count, 2);
    return dataset;
}

Dataset load_dataset_jsonl(const std::string& path) {
    return parse_dataset_jsonl(read_file(path));
}

std::unordered_map<std::string, std::vector<double>> parse_weights_jsonl(
    const std::string& content) {
    std::unordered_map<std::string, std::vector<double>> weights;
    for_each_line(content, [&](const std::string& line, std::size_t line_no) {
        const json record = parse_line(line, "weight", line_no);
        if (!record.contains("id") || !record["id"].is_string() ||
            !record.contains("weights") || !record["weights"].is_array())
            throw std::invalid_argument("weight record needs id/weights at line " +
                                        std::to_string(line_no));
        std::vector<double> values;
        for (const auto& value : record["weights"]) {
            if (!value.is_number() || !(value.get<double>() > 0.0))
                throw std::invalid_argument("weights must be positive numbers at line " +
                                            std::to_string(line_no));
            values.push_back(value.get<double>());
        }
        const auto id = record["id"].get<std::string>();
        if (!weights.emplace(id, std::move(values)).second)
            throw std::invalid_argument("duplicate weight id: " + id);
    });
    return weights;
}

std::unordered_map<std::string, std::vector<double>> load_weights_jsonl(const std::string& path) {
    return parse_weights_jsonl(read_file(path));
}

std::unordered_map<std::string, std::vector<std::string>> load_substitution_map(
    const std::string& path) {
    const json table = json::parse(read_file(path), nullptr, false);
    if (table.is_discarded() || !table.is_object())
        throw std::invalid_argument("substitution table must be a JSON object: " + path);
    std::unordered_map<std::string, std::vector<std::string>> map;
    for (const auto& [token, subs] : table.items()) {
        if (!subs.is_array())
            throw std::invalid_argument("substitutes for '" + token + "' must be an array");
        std::vector<std::string> list;
        for (const auto& sub : subs) {
            if (!sub.is_string())
                throw std::invalid_argument("non-string substitute for '" + token + "'");
            list.push_back(sub.get<std::string>());
        }
        map.emplace(token, std::move(list));
    }
    return map;
}

SynonymTable load_synonym_table(const std::string& path) {
    return SynonymTable::create(load_substitution_map(path));
}

std::string model_to_json(const BowModel& model) {
    json root;
    root["type"] = "bow";
    root["smoothing"] = model.smoothing;
    root["class_example_counts"] = model.class_example_counts;
    root["class_token_totals"] = model.class_token_totals;
    json tokens = json::object();
    for (const auto& [token, counts] : model.token_counts) tokens[token] = counts;
    root["token_counts"] = std::move(tokens);
    return root.dump();
}

std::string model_to_json(const KeywordClassifier& model) {
    json root;
    root["type"] = "keyword";
    root["classes"] = model.class_count();
    root["default"] = model.default_class();
    json rules = json::object();
    for (const auto& [token, cls] : model.rules()) rules[token] = cls;
    root["rules"] = std::move(rules);
    return root.dump();
}

std::unique_ptr<BaseClassifier> parse_model_json(const std::string& content) {
    const json root = json::parse(content, nullptr, false);
    if (root.is_discarded() || !root.is_object() || !root.contains("type"))
        throw std::invalid_argument("model file must be a JSON object with a type field");
    const auto type = root["type"].get<std::string>();
    if (type == "bow") {
        auto model = std::make_unique<BowModel>();
        model->smoothing = root.at("smoothing").get<double>();
        model->class_example_counts = root.at("class_example_counts").get<std::vector<long>>();
        model->class_token_totals = root.at("class_token_totals").get<std::vector<long>>();
        for (const auto& [token, counts] : root.at("token_counts").items())
            model->token_counts.emplace(token, counts.get<std::vector<long>>());
        model->finalize();
        return model;
    }
    if (type == "keyword") {
        std::map<std::string, int> rules;
        for (const auto& [token, cls] : root.at("rules").items())
            rules.emplace(token, cls.get<int>());
        return std::make_unique<KeywordClassifier>(std::move(rules),
                                                   root.at("default").get<int>(),
                                                   root.at("classes").get<int>());
    }
    throw std::invalid_argument("unknown model type: " + type);
}

std::unique_ptr<BaseClassifier> load_model(const std::string& path) {
    return parse_model_json(read_file(path));
}

}  // namespace maskcert
