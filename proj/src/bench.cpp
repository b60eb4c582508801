#include "causal/bench.hpp"

#include "causal/error.hpp"
#include "causal/pc.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace causal {

namespace {

using ojson = nlohmann::ordered_json;

std::string join(std::span<const std::string> parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v == 0.0 ? 0.0 : v);
    return std::string(buf, res.ptr);
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

double quantile(std::span<const double> values, double q) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

const TablePoolEntry& find_entry(const TablePool& pool, std::string_view id) {
    for (const auto& e : pool)
        if (e.id == id) return e;
    throw DataError("pool has no table '" + std::string(id) + "'");
}

CausalGraph renamed_dag(const CausalGraph& dag, const std::vector<std::string>& names) {
    CausalGraph out(names);
    for (const auto& [a, b] : dag.directed_edges()) out.add_directed(a, b);
    return out;
}

std::vector<std::size_t> sample_distinct(std::mt19937_64& rng, std::size_t universe, std::size_t count) {
    std::vector<std::size_t> idx(universe);
    for (std::size_t i = 0; i < universe; ++i) idx[i] = i;
    for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng() % (universe - i)]);
    idx.resize(count);
    return idx;
}

Verdict verdict_of(bool b) { return b ? Verdict::yes : Verdict::no; }

ojson graph_json(const CausalGraph& g) { return ojson::parse(serialize_graph(g)); }

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string percent(const Tally& t) {
    if (t.total == 0) return "-";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f", 100.0 * t.accuracy());
    return buf;
}

}  // namespace

bool cell_feasible(Category c, std::size_t node_count) {
    switch (c) {
        case Category::CIT: return node_count >= 3;
        case Category::MULTCIT: return node_count >= 4;
        case Category::PARTIAL:
        case Category::ATE:
        default: return node_count >= 2;
    }
}

std::vector<BenchItem> build_benchmark(const TablePool& pool, const BenchPlan& plan) {
    std::vector<BenchItem> items;
    for (std::size_t ci = 0; ci < plan.categories.size(); ++ci) {
        const Category cat = plan.categories[ci];
        for (std::size_t nodes : plan.node_counts) {
            if (!cell_feasible(cat, nodes)) continue;
            const auto family = cat == Category::ATE ? MechanismFamily::linear : MechanismFamily::nonlinear;
            std::vector<const TablePoolEntry*> candidates;
            for (const auto& e : pool)
                if (e.node_count() == nodes && e.scm.family == family) candidates.push_back(&e);
            if (candidates.empty()) {
                throw Error("unsatisfiable plan: no " + std::string(to_string(family)) + " pool table with " +
                            std::to_string(nodes) + " nodes for " + std::string(to_string(cat)));
            }

            for (std::size_t k = 0; k < plan.items_per_cell; ++k) {
                const auto stream = (static_cast<std::uint64_t>(cat) << 40) | (std::uint64_t{nodes} << 20) | k;
                std::mt19937_64 rng(derive_seed(plan.seed, stream));

                const auto& entry = *candidates[rng() % candidates.size()];
                BenchItem item;
                char id[48];
                std::snprintf(id, sizeof id, "%s-n%02zu-%03zu", std::string(to_string(cat)).c_str(), nodes, k);
                item.id = id;
                item.table_ref = entry.id;
                item.category = cat;
                item.node_count = nodes;
                item.domain = (rng() & 1U) ? Domain::market : Domain::medical;
                const auto& words = keywords(item.domain);
                for (std::size_t i : sample_distinct(rng, words.size(), nodes)) item.keywords.push_back(words[i]);
                item.filename = item.id + ".csv";

                const auto dag = renamed_dag(entry.scm.dag, item.keywords);
                const auto perm = sample_distinct(rng, nodes, nodes);
                const auto& templates = question_templates(cat);
                const auto& tmpl = templates[rng() % templates.size()];
                const std::string& x = item.keywords[perm[0]];
                const std::string& y = item.keywords[perm[1]];
                std::string sentence;

                switch (cat) {
                    case Category::IT:
                    case Category::CIT:
                    case Category::MULTCIT: {
                        std::size_t m = 0;
                        if (cat == Category::CIT) m = 1;
                        if (cat == Category::MULTCIT) m = 2 + rng() % (nodes - 3);
                        item.variables = {x, y};
                        for (std::size_t i = 0; i < m; ++i) item.conditions.push_back(item.keywords[perm[2 + i]]);
                        item.truth = verdict_of(d_separated(dag, x, y, item.conditions));
                        if (cat == Category::MULTCIT) {
                            sentence = instantiate_question(tmpl, item.variables, item.conditions);
                        } else {
                            std::vector<std::string> slots = item.variables;
                            slots.insert(slots.end(), item.conditions.begin(), item.conditions.end());
                            sentence = instantiate_question(tmpl, slots);
                        }
                        break;
                    }
                    case Category::CAUSE:
                    case Category::COLLIDER:
                    case Category::CONF: {
                        item.variables = {x, y};
                        const auto cpdag = cpdag_of_dag(dag);
                        EdgeVerdict v;
                        if (cat == Category::CAUSE) v = determine_direct_cause(cpdag, x, y);
                        else if (cat == Category::COLLIDER) v = determine_collider(cpdag, x, y);
                        else v = determine_confounder(cpdag, x, y);
                        item.truth = v.verdict;
                        sentence = instantiate_question(tmpl, item.variables);
                        break;
                    }
                    case Category::TOTAL: {
                        item.variables = item.keywords;
                        item.truth = cpdag_of_dag(dag);
                        sentence = instantiate_question(tmpl, {});
                        break;
                    }
                    case Category::PARTIAL: {
                        const std::size_t size = 2 + rng() % (nodes - 2);
                        std::vector<std::size_t> mapping(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(size));
                        std::sort(mapping.begin(), mapping.end());
                        for (std::size_t i : mapping) item.variables.push_back(item.keywords[i]);
                        item.truth = pc_search(item.variables, d_separation_oracle(dag, mapping), Execution::serial).graph;
                        sentence = instantiate_question(tmpl, {}, item.variables);
                        break;
                    }
                    case Category::ATE: {
                        const auto order = entry.scm.topological_order();
                        std::vector<std::size_t> position(nodes);
                        for (std::size_t i = 0; i < nodes; ++i) position[order[i]] = i;
                        std::size_t t = perm[0], o = perm[1];
                        if (position[t] > position[o]) std::swap(t, o);
                        const auto table = entry.table.renamed(item.filename, item.keywords);
                        item.variables = {item.keywords[t], item.keywords[o]};
                        for (std::size_t p : entry.scm.dag.parents(t)) item.conditions.push_back(item.keywords[p]);
                        const auto col = table.column(t);
                        item.t0 = round2(quantile(col, 0.25));
                        item.t1 = round2(quantile(col, 0.75));
                        if (item.t0 == item.t1) item.t1 = round2(item.t0 + 0.01);
                        DmlConfig cfg;
                        cfg.treatment = item.variables[0];
                        cfg.outcome = item.variables[1];
                        cfg.covariates = item.conditions;
                        cfg.t0 = item.t0;
                        cfg.t1 = item.t1;
                        item.truth = estimate_ate(table, cfg).ate;
                        const std::vector<std::string> slots{cfg.treatment, cfg.outcome, cfg.treatment,
                                                             shortest(item.t0), shortest(item.t1)};
                        sentence = instantiate_question(tmpl, slots);
                        break;
                    }
                }
                const std::vector<std::string> covariates =
                    cat == Category::ATE ? item.conditions : std::vector<std::string>{};
                item.question = compose_question(sentence, cat, item.domain, item.keywords, item.filename, covariates,
                                                 rng());
                items.push_back(std::move(item));
            }
        }
    }
    return items;
}

DataTable item_table(const BenchItem& item, const TablePool& pool) {
    return find_entry(pool, item.table_ref).table.renamed(item.filename, item.keywords);
}

std::string truth_label(const GroundTruth& truth) {
    if (const auto* v = std::get_if<Verdict>(&truth)) return std::string(to_string(*v));
    if (std::holds_alternative<CausalGraph>(truth)) return "graph";
    return shortest(std::get<double>(truth));
}

void write_benchmark(const std::vector<BenchItem>& items, const std::filesystem::path& json_path,
                     const std::filesystem::path& csv_path) {
    ojson doc;
    doc["items"] = ojson::array();
    for (const auto& it : items) {
        ojson j;
        j["id"] = it.id;
        j["table"] = it.table_ref;
        j["category"] = to_string(it.category);
        j["domain"] = to_string(it.domain);
        j["node_count"] = it.node_count;
        j["keywords"] = it.keywords;
        j["variables"] = it.variables;
        j["conditions"] = it.conditions;
        if (it.category == Category::ATE) {
            j["t0"] = it.t0;
            j["t1"] = it.t1;
        }
        j["filename"] = it.filename;
        j["question"] = it.question;
        if (const auto* v = std::get_if<Verdict>(&it.truth)) {
            j["truth"] = {{"kind", "verdict"}, {"value", to_string(*v)}};
        } else if (const auto* g = std::get_if<CausalGraph>(&it.truth)) {
            j["truth"] = {{"kind", "graph"}, {"value", graph_json(*g)}};
        } else {
            j["truth"] = {{"kind", "number"}, {"value", std::get<double>(it.truth)}};
        }
        doc["items"].push_back(std::move(j));
    }
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + json_path.string() + "'");
    out << doc.dump(2) << '\n';

    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw DataError("cannot write '" + csv_path.string() + "'");
    csv << "id,category,level,node_count,domain,table,variables,conditions,truth\n";
    for (const auto& it : items) {
        csv << it.id << ',' << to_string(it.category) << ',' << level_of(it.category) << ',' << it.node_count << ','
            << to_string(it.domain) << ',' << it.table_ref << ',' << csv_field(join(it.variables, ";")) << ','
            << csv_field(join(it.conditions, ";")) << ',' << truth_label(it.truth) << '\n';
    }
}

std::vector<BenchItem> read_benchmark(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw DataError("cannot open benchmark manifest '" + json_path.string() + "'");
    std::vector<BenchItem> items;
    try {
        const auto doc = nlohmann::json::parse(in);
        for (const auto& j : doc.at("items")) {
            BenchItem it;
            it.id = j.at("id").get<std::string>();
            it.table_ref = j.at("table").get<std::string>();
            const auto cat = parse_category(j.at("category").get<std::string>());
            const auto dom = parse_domain(j.at("domain").get<std::string>());
            if (!cat || !dom) throw DataError("item '" + it.id + "' has an unknown category or domain");
            it.category = *cat;
            it.domain = *dom;
            it.node_count = j.at("node_count").get<std::size_t>();
            it.keywords = j.at("keywords").get<std::vector<std::string>>();
            it.variables = j.at("variables").get<std::vector<std::string>>();
            it.conditions = j.at("conditions").get<std::vector<std::string>>();
            if (j.contains("t0")) it.t0 = j.at("t0").get<double>();
            if (j.contains("t1")) it.t1 = j.at("t1").get<double>();
            it.filename = j.at("filename").get<std::string>();
            it.question = j.at("question").get<std::string>();
            const auto& truth = j.at("truth");
            const auto kind = truth.at("kind").get<std::string>();
            if (kind == "verdict") {
                const auto v = truth.at("value").get<std::string>();
                it.truth = v == "yes" ? Verdict::yes : v == "no" ? Verdict::no : Verdict::uncertain;
            } else if (kind == "graph") {
                it.truth = parse_graph(truth.at("value").dump());
            } else {
                it.truth = truth.at("value").get<double>();
            }
            items.push_back(std::move(it));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(std::string("malformed benchmark manifest: ") + ex.what());
    }
    return items;
}

ParsedAnswer parse_final_answer(std::string_view text, Category category) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
        return FormatViolation{"not a JSON object"};
    }
    if (!doc.is_object() || !doc.contains("answer")) return FormatViolation{"missing \"answer\" key"};
    const auto& a = doc.at("answer");
    switch (answer_kind(category)) {
        case AnswerKind::verdict: {
            if (!a.is_string()) return FormatViolation{"answer is not a string"};
            const auto v = lower(a.get<std::string>());
            if (v == "yes") return Verdict::yes;
            if (v == "no") return Verdict::no;
            if (v == "uncertain") return Verdict::uncertain;
            return FormatViolation{"answer must be yes, no or uncertain"};
        }
        case AnswerKind::graph: {
            if (!a.is_string() || a.get<std::string>().empty()) return FormatViolation{"answer is not a graph name"};
            return a.get<std::string>();
        }
        case AnswerKind::number: {
            if (a.is_number()) return a.get<double>();
            if (a.is_string()) {
                const auto s = a.get<std::string>();
                double v = 0.0;
                const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
                if (res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(v)) return v;
            }
            return FormatViolation{"answer is not a number"};
        }
    }
    return FormatViolation{"unknown category"};
}

bool same_graph(const CausalGraph& a, const CausalGraph& b) {
    if (a.size() != b.size()) return false;
    for (const auto& n : a.nodes())
        if (!b.find(n)) return false;
    return structural_hamming_distance(a, b.induced(a.nodes())) == 0;
}

BenchReport score(const std::vector<BenchItem>& items, const std::vector<ItemOutcome>& outcomes,
                  const ScoreOptions& options) {
    std::unordered_map<std::string, const ItemOutcome*> by_id;
    for (const auto& o : outcomes) by_id[o.id] = &o;

    BenchReport report;
    for (const auto& item : items) {
        ItemScore s;
        s.id = item.id;
        s.category = item.category;
        s.node_count = item.node_count;
        s.domain = item.domain;
        s.truth = truth_label(item.truth);
        const auto it = by_id.find(item.id);
        if (it == by_id.end() || !it->second->final_answer) {
            s.format_violation = it != by_id.end();
            report.items.push_back(std::move(s));
            continue;
        }
        const ItemOutcome& out = *it->second;
        s.answer = *out.final_answer;
        const auto parsed = parse_final_answer(*out.final_answer, item.category);
        if (std::holds_alternative<FormatViolation>(parsed)) {
            s.format_violation = true;
        } else if (const auto* v = std::get_if<Verdict>(&parsed)) {
            s.correct = *v == std::get<Verdict>(item.truth);
        } else if (std::holds_alternative<std::string>(parsed)) {
            const auto& truth = std::get<CausalGraph>(item.truth);
            if (out.answered_graph) {
                s.correct = same_graph(truth, *out.answered_graph);
                if (out.answered_graph->size() == truth.size() &&
                    std::all_of(truth.nodes().begin(), truth.nodes().end(),
                                [&](const std::string& n) { return out.answered_graph->find(n).has_value(); })) {
                    s.shd = structural_hamming_distance(truth, out.answered_graph->induced(truth.nodes()));
                }
            }
        } else {
            const double answer = std::get<double>(parsed);
            const double truth = std::get<double>(item.truth);
            s.correct = std::abs(answer - truth) <= std::max(options.ate_relative_tolerance * std::abs(truth), 1e-12);
        }
        report.items.push_back(std::move(s));
    }
    return report;
}

std::map<std::pair<Category, std::size_t>, Tally> BenchReport::by_cell() const {
    std::map<std::pair<Category, std::size_t>, Tally> out;
    for (const auto& s : items) {
        auto& t = out[{s.category, s.node_count}];
        ++t.total;
        t.correct += s.correct ? 1 : 0;
    }
    return out;
}

std::map<Category, Tally> BenchReport::by_category() const {
    std::map<Category, Tally> out;
    for (const auto& s : items) {
        auto& t = out[s.category];
        ++t.total;
        t.correct += s.correct ? 1 : 0;
    }
    return out;
}

std::map<std::string, Tally> BenchReport::by_level() const {
    std::map<std::string, Tally> out;
    for (const auto& s : items) {
        auto& t = out[std::string(level_of(s.category))];
        ++t.total;
        t.correct += s.correct ? 1 : 0;
    }
    return out;
}

std::map<std::tuple<Category, std::string, Domain>, Tally> BenchReport::by_answer_domain() const {
    std::map<std::tuple<Category, std::string, Domain>, Tally> out;
    for (const auto& s : items) {
        if (answer_kind(s.category) != AnswerKind::verdict) continue;
        auto& t = out[{s.category, s.truth, s.domain}];
        ++t.total;
        t.correct += s.correct ? 1 : 0;
    }
    return out;
}

void write_report_csv(const BenchReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << "id,category,level,node_count,domain,truth,answer,correct,format_violation,shd\n";
    for (const auto& s : report.items) {
        out << s.id << ',' << to_string(s.category) << ',' << level_of(s.category) << ',' << s.node_count << ','
            << to_string(s.domain) << ',' << csv_field(s.truth) << ',' << csv_field(s.answer) << ','
            << (s.correct ? 1 : 0) << ',' << (s.format_violation ? 1 : 0) << ',';
        if (s.shd) out << *s.shd;
        out << '\n';
    }
}

std::string render_report_markdown(const BenchReport& report, bool stratify) {
    const auto cells = report.by_cell();
    const auto cats = report.by_category();
    std::set<std::size_t> node_counts;
    for (const auto& s : report.items) node_counts.insert(s.node_count);

    std::ostringstream md;
    md << "# Benchmark report\n\n";
    std::size_t correct = 0, violations = 0;
    for (const auto& s : report.items) {
        correct += s.correct ? 1 : 0;
        violations += s.format_violation ? 1 : 0;
    }
    md << "Items: " << report.items.size() << ", correct: " << correct << ", format violations: " << violations
       << "\n\n";

    struct Section {
        const char* title;
        std::vector<Category> columns;
    };
    const Section sections[] = {
        {"Variable level", {Category::IT, Category::CIT, Category::MULTCIT}},
        {"Edge level", {Category::CAUSE, Category::COLLIDER, Category::CONF}},
        {"Causal graph level", {Category::TOTAL, Category::PARTIAL}},
        {"Causal effect level", {Category::ATE}},
    };
    for (const auto& sec : sections) {
        bool any = false;
        for (Category c : sec.columns) any = any || cats.count(c);
        if (!any) continue;
        md << "## " << sec.title << "\n\n| #node |";
        for (Category c : sec.columns) md << ' ' << to_string(c) << " |";
        md << "\n|---|";
        for (std::size_t i = 0; i < sec.columns.size(); ++i) md << "---|";
        md << '\n';
        for (std::size_t n : node_counts) {
            md << "| " << n << " |";
            for (Category c : sec.columns) {
                const auto it = cells.find({c, n});
                md << ' ' << (it == cells.end() ? std::string("-") : percent(it->second)) << " |";
            }
            md << '\n';
        }
        md << "| average |";
        for (Category c : sec.columns) {
            const auto it = cats.find(c);
            md << ' ' << (it == cats.end() ? std::string("-") : percent(it->second)) << " |";
        }
        md << "\n\n";
    }

    std::size_t graph_items = 0, shd_sum = 0;
    for (const auto& s : report.items) {
        if (s.shd) {
            ++graph_items;
            shd_sum += *s.shd;
        }
    }
    if (graph_items) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", static_cast<double>(shd_sum) / static_cast<double>(graph_items));
        md << "Mean structural hamming distance over " << graph_items << " graph answers: " << buf << "\n\n";
    }

    if (stratify) {
        const Category cols[] = {Category::IT,    Category::CIT,  Category::MULTCIT,
                                 Category::CAUSE, Category::CONF, Category::COLLIDER};
        const auto strat = report.by_answer_domain();
        md << "## Accuracy by ground-truth answer and domain\n\n| answer | domain |";
        for (Category c : cols) md << ' ' << to_string(c) << " |";
        md << "\n|---|---|";
        for (std::size_t i = 0; i < std::size(cols); ++i) md << "---|";
        md << '\n';
        for (const char* answer : {"yes", "no", "uncertain", "average"}) {
            for (Domain d : {Domain::market, Domain::medical}) {
                md << "| " << answer << " | " << to_string(d) << " |";
                for (Category c : cols) {
                    Tally t;
                    for (const auto& [key, tally] : strat) {
                        const auto& [kc, ka, kd] = key;
                        if (kc == c && kd == d && (std::string_view(answer) == "average" || ka == answer)) {
                            t.correct += tally.correct;
                            t.total += tally.total;
                        }
                    }
                    md << ' ' << percent(t) << " |";
                }
                md << '\n';
            }
        }
        md << '\n';
    }
    return md.str();
}

}  // namespace causal
