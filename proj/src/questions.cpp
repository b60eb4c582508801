#include "causal/questions.hpp"

#include "causal/resources.hpp"

#include <random>
#include <stdexcept>

namespace causal {

std::string_view to_string(Category c) {
    switch (c) {
        case Category::IT: return "IT";
        case Category::CIT: return "CIT";
        case Category::MULTCIT: return "MULTCIT";
        case Category::CAUSE: return "CAUSE";
        case Category::COLLIDER: return "COLLIDER";
        case Category::CONF: return "CONF";
        case Category::TOTAL: return "TOTAL";
        case Category::PARTIAL: return "PARTIAL";
        case Category::ATE: return "ATE";
    }
    return "?";
}

std::optional<Category> parse_category(std::string_view text) {
    for (Category c : kAllCategories)
        if (to_string(c) == text) return c;
    return std::nullopt;
}

AnswerKind answer_kind(Category c) {
    switch (c) {
        case Category::TOTAL:
        case Category::PARTIAL: return AnswerKind::graph;
        case Category::ATE: return AnswerKind::number;
        default: return AnswerKind::verdict;
    }
}

std::string_view level_of(Category c) {
    switch (c) {
        case Category::IT:
        case Category::CIT:
        case Category::MULTCIT: return "variable";
        case Category::CAUSE:
        case Category::COLLIDER:
        case Category::CONF: return "edge";
        case Category::TOTAL:
        case Category::PARTIAL: return "graph";
        case Category::ATE: return "effect";
    }
    return "?";
}

std::string_view to_string(Domain d) { return d == Domain::medical ? "medical" : "market"; }

std::optional<Domain> parse_domain(std::string_view text) {
    if (text == "medical") return Domain::medical;
    if (text == "market") return Domain::market;
    return std::nullopt;
}

bool QuestionTemplate::takes_list() const {
    return pattern.size() >= 3 && pattern.compare(pattern.size() - 3, 3, " : ") == 0;
}

namespace {

std::size_t count_slots(std::string_view pattern) {
    std::size_t n = 0;
    for (auto pos = pattern.find("{}"); pos != std::string_view::npos; pos = pattern.find("{}", pos + 2)) ++n;
    return n;
}

std::vector<QuestionTemplate> make(Category c, std::initializer_list<const char*> patterns) {
    std::vector<QuestionTemplate> out;
    for (const char* p : patterns) out.push_back({c, p, count_slots(p)});
    return out;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
        if (!line.empty()) out.emplace_back(line);
        start = end + 1;
    }
    return out;
}

std::string join(std::span<const std::string> parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
    return out;
}

}  // namespace

const std::vector<QuestionTemplate>& question_templates(Category c) {
    static const std::vector<QuestionTemplate> it = make(Category::IT, {
        "whether {} and {} is independent.",
        "Is {} independent of {}?",
        "Are {} and {} statistically independent?",
        "Does the occurrence of {} independent on {}, or vice versa?",
        "Can we assert {} and {} are independent, or are they related?",
        "Can we consider {} and {} as independent events?",
        "Do {} and {} independent and don't have any influence on each other?",
        "Is there no statistically correlation between {} and {}?",
        "test whether Are {} and {} statistically unrelated or dependent?",
        "Test the independence of {} and {}.",
    });
    static const std::vector<QuestionTemplate> cit = make(Category::CIT, {
        "whether {} and {} is independent under condition {}?",
        "Is {} independent of {} given condition {}?",
        "Are {} and {} statistically independent given the condition {}?",
        "Does the independence of {} and {} hold true under condition {}?",
        "Can we consider {} and {} as conditionally independent with respect to {}?",
        "Is the independence between {} and {} maintained given the condition {}?",
        "Are {} and {} conditionally independent with the presence of condition {}?",
        "Can we assume that {} and {} are independent given the condition {}?",
        "Is the independence of {} and {} upheld in the presence of condition {}?",
        "Does the independence between {} and {} persist under the condition {}?",
    });
    static const std::vector<QuestionTemplate> multcit = make(Category::MULTCIT, {
        "whether {} and {} is independent under conditions : ",
        "Determine the independence of {} and {} given the following conditions : ",
        "Examine if {} and {} are independent under the specified conditions : ",
        "Assess the independence between {} and {} with the provided conditions : ",
        "Investigate whether {} and {} exhibit independence given the outlined conditions : ",
        "Explore the independence of {} and {} under the given circumstances : ",
        "Ascertain if there is independence between {} and {} given the stated conditions : ",
        "Check for independence between {} and {} based on the conditions described : ",
        "Verify the independence status of {} and {} under the listed conditions : ",
        "Evaluate the independence of {} and {} under the mentioned conditions : ",
        "Examine whether {} and {} are independent, considering the provided conditions : ",
    });
    static const std::vector<QuestionTemplate> cause = make(Category::CAUSE, {
        "whether {} directly cause {}.",
        "Assess if {} has a direct causal impact on {}.",
        "Examine the direct causation relationship.if {} directly cause {}?",
        "Investigate whether {} directly influences {}.",
        "Evaluate if there exists the direct causal connection from {} to {}.",
        "Scrutinize if {} leads to a direct causation of {}.",
        "Determine whether {} is a direct cause of {}.",
        "Assess if there is the direct causal link of {} to {}.",
        "Verify if {} directly results in the causation of {}.",
    });
    static const std::vector<QuestionTemplate> collider = make(Category::COLLIDER, {
        "Whether there exists at least one collider (i.e., common effect) of {} and {}",
        "Determine if there is at least one common effect (collider) of both {} and {}.",
        "Assess the presence of a shared outcome, serving as a collider, for variables {} and {}.",
        "Examine the potential existence of a shared consequence as a collider for {} and {}.",
        "Evaluate if {} and {} share a common effect (collider).",
        "Analyze the presence of a common outcome serving as a collider for {} and {}.",
        "Verify if there exists a shared effect, acting as a collider, for both {} and {}.",
        "Explore whether a common consequence is a collider for variables {} and {}.",
        "Assess the existence of at least one common effect (collider) between {} and {}.",
    });
    static const std::vector<QuestionTemplate> conf = make(Category::CONF, {
        "There exists at least one confounder (i.e., common cause) of {} and {}.",
        "Confirm the presence of at least one common cause (confounder) influencing both {} and {}.",
        "Verify whether there exists a shared factor, acting as a confounder, for variables {} and {}.",
        "Examine the potential existence of a common cause (confounder) impacting both {} and {}.",
        "Assess if {} and {} share at least one confounding factor (common cause).",
        "Scrutinize the presence of a shared influencing factor, serving as a confounder, for {} and {}.",
        "Investigate whether there is at least one confounder affecting both {} and {}.",
        "Analyze the potential impact of a common cause (confounder) on variables {} and {}.",
        "Verify the presence of a shared influencing factor, acting as a confounder, for {} and {}.",
        "Explore whether a common factor is a confounder for variables {} and {}.",
        "Evaluate the existence of at least one confounder (common cause) between {} and {}.",
    });
    static const std::vector<QuestionTemplate> total = make(Category::TOTAL, {
        "please generate causal graph of the input tabular data.",
        "Produce a causal graph representing the relationships within the given tabular data.",
        "Generate a directed graph that illustrates the causal connections inherent in the provided tabular dataset.",
        "Create a graphical model depicting the causality among variables in the input tabular data.",
        "Construct a causal diagram illustrating the interdependencies among the variables in the tabular dataset.",
        "Formulate a graph that visually represents the cause-and-effect relationships present in the input tabular information.",
        "Develop a graphical representation outlining the causal structure of the tabular data.",
        "Build a directed acyclic graph (DAG) that reflects the causal influences within the input tabular dataset.",
        "Establish a graphical model showcasing the causal links between variables derived from the tabular data.",
        "Design a causal graph that visually captures the cause-and-effect relationships inherent in the tabular information.",
        "Construct a directed graph that visually displays the causal pathways within the given tabular dataset.",
    });
    static const std::vector<QuestionTemplate> partial = make(Category::PARTIAL, {
        "Please generate a partial causal diagram for some of the following variables that interest me : ",
        "Generate a subset of a causal diagram for the variables of interest : ",
        "Create a partial graphical model illustrating causal relationships among selected variables : ",
        "Develop a restricted causal graph focusing on specific variables from the given set : ",
        "Formulate a partial directed acyclic graph (DAG) depicting causal connections for chosen variables : ",
        "Construct a limited causal diagram featuring only the variables of interest : ",
        "Produce a subsection of a graphical model, emphasizing the causal links within the selected variables : ",
        "Build a causal graph subset, emphasizing relationships among the variables you find intriguing : ",
        "Develop a focused causal diagram, highlighting causal connections for the specified variables : ",
        "Form a segment of a directed graph that visually represents causal relationships among chosen variables : ",
        "Create a restricted causal network, showcasing the partial causal influences among the variables of interest : ",
    });
    static const std::vector<QuestionTemplate> ate = make(Category::ATE, {
        "calculate the Average Treatment Effect (ATE) of a continuous treatment variable {} on an outcome variable {}, "
        "given that the treatment {} changes from {} to {}.",
    });
    switch (c) {
        case Category::IT: return it;
        case Category::CIT: return cit;
        case Category::MULTCIT: return multcit;
        case Category::CAUSE: return cause;
        case Category::COLLIDER: return collider;
        case Category::CONF: return conf;
        case Category::TOTAL: return total;
        case Category::PARTIAL: return partial;
        case Category::ATE: return ate;
    }
    return it;
}

std::string instantiate_question(const QuestionTemplate& t, std::span<const std::string> slots,
                                 std::span<const std::string> trailing) {
    if (slots.size() != t.arity) {
        throw std::invalid_argument(std::string(to_string(t.category)) + " template takes " + std::to_string(t.arity) +
                                    " values, got " + std::to_string(slots.size()));
    }
    if (!trailing.empty() && !t.takes_list()) {
        throw std::invalid_argument("template does not take a trailing list: " + t.pattern);
    }
    std::string out;
    std::size_t next = 0;
    std::size_t start = 0;
    for (auto pos = t.pattern.find("{}"); pos != std::string::npos; pos = t.pattern.find("{}", start)) {
        out.append(t.pattern, start, pos - start);
        out += slots[next++];
        start = pos + 2;
    }
    out.append(t.pattern, start);
    if (t.takes_list()) {
        if (trailing.empty()) throw std::invalid_argument("template needs a trailing list: " + t.pattern);
        out += join(trailing);
    }
    return out;
}

std::string compose_question(std::string_view sentence, Category category, Domain domain,
                             std::span<const std::string> elements, std::string_view filename,
                             std::span<const std::string> covariates, std::uint64_t seed) {
    static const char* medical_intro[] = {
        "Doctors are very interested in the relationship between these variables, and therefore, they have chosen to "
        "collect a set of data through experiments.",
        "A hospital research team recorded these measurements for a group of patients to study how they relate.",
        "A clinical study collected these indicators from volunteers in order to understand their relationships.",
    };
    static const char* market_intro[] = {
        "A marketing team is very interested in the relationship between these variables, and therefore, they have "
        "collected a set of data from recent campaigns.",
        "An analyst at a retail company gathered these business indicators to understand how they influence each other.",
        "A market research firm recorded these metrics across many stores to study their relationships.",
    };
    std::mt19937_64 rng(seed);
    const auto& intros = domain == Domain::medical ? medical_intro : market_intro;
    const char* intro = intros[rng() % 3];

    std::string q = "Consider " + std::to_string(elements.size()) + " elements : " + join(elements) + ". " + intro +
                    " Please assist them in answering the following question: " + std::string(sentence);
    if (!covariates.empty()) q += " Use " + join(covariates) + " as covariates.";
    q += " csv data store in '" + std::string(filename) + "'.";
    switch (answer_kind(category)) {
        case AnswerKind::verdict:
            q += " The output is just formatted as a json string, such as {\"answer\":\"yes\"}, with the answer being "
                 "\"yes\", \"no\" or \"uncertain\".";
            break;
        case AnswerKind::graph:
            q += " The output is just formatted as a json string holding the name of the generated causal graph, such "
                 "as {\"answer\":\"graph name\"}.";
            break;
        case AnswerKind::number:
            q += " The output is just formatted as a json string holding the ATE value, such as {\"answer\":0.5}.";
            break;
    }
    return q;
}

const std::vector<std::string>& keywords(Domain d) {
    static const std::vector<std::string> medical = split_lines(resources::medical_keywords_text());
    static const std::vector<std::string> market = split_lines(resources::market_keywords_text());
    return d == Domain::medical ? medical : market;
}

}  // namespace causal
