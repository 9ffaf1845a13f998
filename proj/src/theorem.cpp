#include "cqkit/theorem.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cqkit {

const ImplicationGraph& implication_graph() {
    static const ImplicationGraph g = [] {
        ImplicationGraph out;
        out.equivalences = {{Node::A2, Node::A6}, {Node::A6, Node::MfcqNoEq}};
        out.implications = {
            {{Node::MfcqNoEq}, Node::A3},
            {{Node::A3}, Node::ACQ},
            {{Node::A5, Node::ACQ}, Node::A7},
            {{Node::A7}, Node::A5},
            {{Node::A7}, Node::SpanD},
            {{Node::A7}, Node::LICQ, true},
            {{Node::A7}, Node::A4},
            {{Node::LICQ}, Node::MFCQ},
        };
        return out;
    }();
    return g;
}

namespace {

std::optional<Status> lookup(const NodeStatus& r, Node n) {
    const auto it = r.find(n);
    if (it == r.end() || it->second == Status::Inconclusive) {
        return std::nullopt;
    }
    return it->second;
}

std::string join(const std::vector<Node>& ns, std::string_view sep) {
    std::string s;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (i > 0) {
            s += sep;
        }
        s += to_string(ns[i]);
    }
    return s;
}

}  // namespace

std::vector<Violation> audit(const NodeStatus& report, const AuditContext& ctx) {
    std::vector<Violation> out;
    const ImplicationGraph& g = implication_graph();
    for (const auto& [a, b] : g.equivalences) {
        const auto sa = lookup(report, a), sb = lookup(report, b);
        if (sa && sb && *sa != *sb) {
            out.push_back({std::string(to_string(a)) + " <=> " + std::string(to_string(b)), {a}, b});
        }
    }
    for (const Implication& imp : g.implications) {
        if (imp.requires_full_active &&
            !(ctx.active_count && ctx.dimension && *ctx.active_count == *ctx.dimension)) {
            continue;
        }
        const bool fire = std::all_of(imp.antecedents.begin(), imp.antecedents.end(),
                                      [&](Node n) { return lookup(report, n) == Status::Holds; });
        if (fire && lookup(report, imp.consequent) == Status::Fails) {
            out.push_back({join(imp.antecedents, " & ") + " => " + std::string(to_string(imp.consequent)),
                           imp.antecedents, imp.consequent});
        }
    }
    return out;
}

const std::vector<NonImplication>& nonimplication_matrix() {
    static const std::vector<NonImplication> m = {
        {{Node::A5}, Node::A7, "cx1"},   {{Node::A5}, Node::ACQ, "cx1"},  {{Node::A4}, Node::A7, "cx1"},
        {{Node::A4}, Node::ACQ, "cx1"},  {{Node::A3}, Node::MFCQ, "cx2"}, {{Node::ACQ}, Node::A3, "cx3"},
        {{Node::A7}, Node::ACQ, "cx4"},  {{Node::A4}, Node::A7, "cx5"},   {{Node::A4}, Node::A5, "cx5"},
    };
    return m;
}

std::string graph_dot() {
    const ImplicationGraph& g = implication_graph();
    std::ostringstream os;
    os << "digraph theorem {\n  rankdir=TB;\n  node [shape=box];\n";
    for (Node n : kAllNodes) {
        os << "  \"" << to_string(n) << "\";\n";
    }
    for (const auto& [a, b] : g.equivalences) {
        os << "  \"" << to_string(a) << "\" -> \"" << to_string(b) << "\" [dir=both];\n";
    }
    for (const Implication& imp : g.implications) {
        std::string from;
        if (imp.antecedents.size() == 1) {
            from = std::string(to_string(imp.antecedents[0]));
        } else {
            from = join(imp.antecedents, " & ");
            os << "  \"" << from << "\" [shape=point];\n";
            for (Node a : imp.antecedents) {
                os << "  \"" << to_string(a) << "\" -> \"" << from << "\" [arrowhead=none];\n";
            }
        }
        os << "  \"" << from << "\" -> \"" << to_string(imp.consequent) << "\"";
        if (imp.requires_full_active) {
            os << " [style=dashed, label=\"|J*| = d\"]";
        }
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

bool graph_is_acyclic(const ImplicationGraph& g) {
    // vertices: nodes by class representative, then one per conjunction
    std::vector<int> rep(kAllNodes.size());
    for (std::size_t i = 0; i < rep.size(); ++i) {
        rep[i] = static_cast<int>(i);
    }
    std::function<int(int)> find = [&](int n) { return rep[n] == n ? n : rep[n] = find(rep[n]); };
    for (const auto& [a, b] : g.equivalences) {
        rep[find(static_cast<int>(a))] = find(static_cast<int>(b));
    }
    int next = static_cast<int>(kAllNodes.size());
    std::map<int, std::set<int>> adj;
    for (const Implication& imp : g.implications) {
        const int to = find(static_cast<int>(imp.consequent));
        int from = find(static_cast<int>(imp.antecedents.front()));
        if (imp.antecedents.size() > 1) {
            // a conjunction is its own proposition implying each part
            from = next++;
            for (Node a : imp.antecedents) {
                adj[from].insert(find(static_cast<int>(a)));
            }
        }
        if (from == to) {
            return false;
        }
        adj[from].insert(to);
    }
    std::map<int, int> state;  // 1 on stack, 2 done
    std::function<bool(int)> dfs = [&](int n) {
        state[n] = 1;
        for (int m : adj[n]) {
            if (state[m] == 1 || (state[m] == 0 && !dfs(m))) {
                return false;
            }
        }
        state[n] = 2;
        return true;
    };
    for (int n = 0; n < next; ++n) {
        if (state[n] == 0 && !dfs(n)) {
            return false;
        }
    }
    return true;
}

}  // namespace cqkit
