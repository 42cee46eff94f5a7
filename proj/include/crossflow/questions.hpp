#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace crossflow {

/// One benchmark question with its reference answer.
struct QuestionItem {
    std::string question_id;
    std::string domain;
    std::string question;
    std::string expected_answer;  ///< non-empty; the scoring reference
};

/// Loads a JSON-lines question set: one object per line with exactly the four
/// QuestionItem fields. Duplicate ids, empty ids, or empty expected answers are
/// rejected; errors carry "<path>:<line>".
std::vector<QuestionItem> load_questions(const std::filesystem::path& path);

}  // namespace crossflow
