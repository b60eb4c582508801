#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace causal {

enum class Category { IT, CIT, MULTCIT, CAUSE, COLLIDER, CONF, TOTAL, PARTIAL, ATE };

inline constexpr Category kAllCategories[] = {Category::IT,    Category::CIT,      Category::MULTCIT,
                                              Category::CAUSE, Category::COLLIDER, Category::CONF,
                                              Category::TOTAL, Category::PARTIAL,  Category::ATE};

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view text);

enum class AnswerKind { verdict, graph, number };
AnswerKind answer_kind(Category c);
/// Variable, edge, graph or effect.
std::string_view level_of(Category c);

enum class Domain { medical, market };
std::string_view to_string(Domain d);
std::optional<Domain> parse_domain(std::string_view text);

/// One question pattern. Positional "{}" placeholders; patterns ending in
/// " : " take a trailing comma-separated list.
struct QuestionTemplate {
    Category category;
    std::string pattern;
    std::size_t arity;

    bool takes_list() const;
};

const std::vector<QuestionTemplate>& question_templates(Category c);

/// Fills the placeholders in order and appends `trailing` after the colon.
/// Throws std::invalid_argument on an arity mismatch.
std::string instantiate_question(const QuestionTemplate& t, std::span<const std::string> slots,
                                 std::span<const std::string> trailing = {});

/// Scenario wrapper around a template sentence: element list, a seeded
/// domain intro, the data file, the sentence and the output-format line.
std::string compose_question(std::string_view sentence, Category category, Domain domain,
                             std::span<const std::string> elements, std::string_view filename,
                             std::span<const std::string> covariates, std::uint64_t seed);

const std::vector<std::string>& keywords(Domain d);

}  // namespace causal
