#include "genap/dataset.hpp"

#include <fstream>
#include <sstream>

#include "genap/errors.hpp"

#include <nlohmann/json.hpp>

namespace genap {

namespace {

std::vector<nlohmann::json> parse_jsonl(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<nlohmann::json> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": invalid JSON record: " + e.what());
    }
  }
  return records;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

std::vector<ClassificationExample> load_classification_dataset(
    const std::string& path) {
  std::vector<ClassificationExample> out;
  for (const auto& rec : parse_jsonl(path)) {
    ClassificationExample ex;
    ex.code = rec.at("code").get<std::string>();
    const std::string label = rec.at("label").get<std::string>();
    if (label == "positive") {
      ex.label = ClassLabel::Positive;
    } else if (label == "negative") {
      ex.label = ClassLabel::Negative;
    } else {
      throw ConfigError(path + ": label must be positive or negative, got '" +
                        label + "'");
    }
    if (ex.code.empty()) throw ConfigError(path + ": empty code field");
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<GenerationExample> load_generation_dataset(const std::string& path) {
  std::vector<GenerationExample> out;
  for (const auto& rec : parse_jsonl(path)) {
    GenerationExample ex;
    ex.code = rec.at("code").get<std::string>();
    ex.reference = rec.at("reference").get<std::string>();
    if (ex.code.empty() || ex.reference.empty())
      throw ConfigError(path + ": code and reference must be non-empty");
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<WordList> load_template_pool(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<WordList> entries;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    WordList entry;
    std::string w;
    while (words >> w) entry.push_back(w);
    if (!entry.empty()) entries.push_back(std::move(entry));
  }
  return entries;
}

WordList load_word_list(const std::string& path) {
  WordList out;
  for (const auto& entry : load_template_pool(path)) {
    if (entry.size() != 1)
      throw ConfigError(path + ": expected one word per line");
    out.push_back(entry[0]);
  }
  return out;
}

}  // namespace genap
