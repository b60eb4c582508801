#include "causal/edge_tools.hpp"

#include "causal/error.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace causal {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::yes: return "yes";
        case Verdict::no: return "no";
        case Verdict::uncertain: return "uncertain";
    }
    return "uncertain";
}

namespace {

void check_query(const CausalGraph& g, std::string_view x, std::string_view y) {
    g.index_of(x);
    g.index_of(y);
    if (x == y) throw GraphError("edge query needs two distinct variables, got '" + std::string(x) + "' twice");
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
    return out;
}

// Extensions of g, or just g itself when it is already fully directed.
DagExtensions resolve(const CausalGraph& g, std::size_t cap) {
    if (g.is_fully_directed()) return DagExtensions{{g}, false};
    return enumerate_dag_extensions(g, cap);
}

}  // namespace

std::vector<BackdoorPath> common_cause_paths(const CausalGraph& dag, std::string_view x, std::string_view y) {
    const auto yi = dag.index_of(y);
    std::vector<BackdoorPath> out;
    for (auto& p : find_backdoor_paths(dag, x, y)) {
        const auto before_y = dag.index_of(p.nodes[p.nodes.size() - 2]);
        if (dag.has_directed(before_y, yi)) out.push_back(std::move(p));
    }
    std::stable_sort(out.begin(), out.end(), [](const BackdoorPath& a, const BackdoorPath& b) {
        return a.nodes.size() < b.nodes.size();
    });
    return out;
}

EdgeVerdict determine_direct_cause(const CausalGraph& g, std::string_view x, std::string_view y, std::size_t cap) {
    check_query(g, x, y);
    const auto xi = g.index_of(x);
    const auto yi = g.index_of(y);
    const std::string xs(x), ys(y);
    EdgeVerdict out;

    auto forward = [&] {
        out.verdict = Verdict::yes;
        out.witnesses = {xs + " -> " + ys};
        out.narrative = "yes, " + xs + " is a direct cause of " + ys + " (edge " + xs + " -> " + ys + ")";
    };
    auto backward = [&] {
        out.verdict = Verdict::no;
        out.narrative = "no, " + xs + " is an effect of " + ys + " (edge " + ys + " -> " + xs + ")";
    };

    if (!g.adjacent(xi, yi)) {
        out.verdict = Verdict::no;
        out.narrative = "no, There is no direct edge linking " + xs + " and " + ys;
        return out;
    }
    if (g.has_directed(xi, yi)) {
        forward();
        return out;
    }
    if (g.has_directed(yi, xi)) {
        backward();
        return out;
    }

    const auto ext = enumerate_dag_extensions(g, cap);
    bool any_forward = false;
    bool any_backward = false;
    for (const auto& dag : ext.dags) {
        (dag.has_directed(xi, yi) ? any_forward : any_backward) = true;
    }
    if (!ext.truncated && any_forward != any_backward) {
        any_forward ? forward() : backward();
        return out;
    }
    out.verdict = Verdict::uncertain;
    out.narrative = "uncertain, the edge between " + xs + " and " + ys +
                    " is undirected and its direction cannot be determined from the Markov equivalence class";
    return out;
}

EdgeVerdict determine_collider(const CausalGraph& g, std::string_view x, std::string_view y, std::size_t cap) {
    check_query(g, x, y);
    const std::string xs(x), ys(y);
    const auto ext = resolve(g, cap);

    std::size_t with_collider = 0;
    std::set<std::string> common;
    std::set<std::string> all;
    bool first = true;
    for (const auto& dag : ext.dags) {
        const auto colliders = v_structure_colliders(dag, x, y);
        if (!colliders.empty()) ++with_collider;
        std::set<std::string> here(colliders.begin(), colliders.end());
        all.insert(here.begin(), here.end());
        if (first) {
            common = here;
            first = false;
        } else {
            std::set<std::string> keep;
            std::set_intersection(common.begin(), common.end(), here.begin(), here.end(),
                                  std::inserter(keep, keep.end()));
            common = std::move(keep);
        }
    }

    EdgeVerdict out;
    if (!ext.truncated && with_collider == ext.dags.size()) {
        out.verdict = Verdict::yes;
        const auto& chosen = common.empty() ? all : common;
        out.witnesses.assign(chosen.begin(), chosen.end());
        out.narrative = "yes, There exists at least one collider " + out.witnesses.front() + " of " + xs + " and " + ys;
        if (out.witnesses.size() > 1) out.narrative += " (colliders: " + join(out.witnesses) + ")";
    } else if (!ext.truncated && with_collider == 0) {
        out.verdict = Verdict::no;
        out.narrative = "no, There don't exists collider of " + xs + " and " + ys;
    } else {
        out.verdict = Verdict::uncertain;
        out.narrative = "uncertain, a collider of " + xs + " and " + ys +
                        " exists only for some orientations of the undirected edges";
        if (ext.truncated) out.narrative = "uncertain, too many orientations of the undirected edges to decide";
    }
    return out;
}

EdgeVerdict determine_confounder(const CausalGraph& g, std::string_view x, std::string_view y, std::size_t cap) {
    check_query(g, x, y);
    const std::string xs(x), ys(y);
    const auto ext = resolve(g, cap);

    std::size_t confounded = 0;
    std::optional<BackdoorPath> best;
    auto shorter = [](const BackdoorPath& a, const BackdoorPath& b) {
        if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
        return a < b;
    };
    for (const auto& dag : ext.dags) {
        const auto paths = common_cause_paths(dag, x, y);
        if (paths.empty()) continue;
        ++confounded;
        if (!best || shorter(paths.front(), *best)) best = paths.front();
    }

    EdgeVerdict out;
    if (!ext.truncated && confounded == ext.dags.size()) {
        out.verdict = Verdict::yes;
        out.witnesses = {join(best->nodes)};
        out.narrative = "yes, There is an unblocked backdoor path between " + xs + " and " + ys +
                        " so confounder exists. Backdoor path: " + out.witnesses.front();
    } else if (!ext.truncated && confounded == 0) {
        out.verdict = Verdict::no;
        out.narrative = "no, There is no unblocked backdoor path between " + xs + " and " + ys +
                        " so confounder does not exist";
    } else {
        out.verdict = Verdict::uncertain;
        out.narrative = "uncertain, an unblocked backdoor path between " + xs + " and " + ys +
                        " exists only for some orientations of the undirected edges";
        if (ext.truncated) out.narrative = "uncertain, too many orientations of the undirected edges to decide";
    }
    return out;
}

}  // namespace causal
