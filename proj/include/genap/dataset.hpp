#pragma once

#include <string>
#include <vector>

#include "genap/metrics.hpp"
#include "genap/prompt.hpp"

namespace genap {

/// JSONL, one {"code": ..., "label": "positive"|"negative"} object per line.
std::vector<ClassificationExample> load_classification_dataset(
    const std::string& path);

/// JSONL, one {"code": ..., "reference": ...} object per line.
std::vector<GenerationExample> load_generation_dataset(const std::string& path);

/// Plain text, one pool entry per line; entries may contain spaces and are
/// split into word groups.
std::vector<WordList> load_template_pool(const std::string& path);

/// Plain text, one word per line.
WordList load_word_list(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace genap
