#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqkit/verdict.hpp"

namespace cqkit {

/// antecedents (conjunction) -> consequent. The LICQ edge from A7 applies
/// only when exactly d constraints are active.
struct Implication {
    std::vector<Node> antecedents;
    Node consequent;
    bool requires_full_active = false;
};

struct ImplicationGraph {
    std::vector<Implication> implications;
    std::vector<std::pair<Node, Node>> equivalences;
};

const ImplicationGraph& implication_graph();

struct AuditContext {
    /// |J*(theta*)| and d; the conditional edge is skipped when unknown.
    std::optional<std::size_t> active_count;
    std::optional<std::size_t> dimension;
};

struct Violation {
    std::string rule;
    std::vector<Node> antecedents;
    Node consequent;
};

/// Every definite contradiction of the graph; inconclusive or missing
/// nodes never trigger a violation.
std::vector<Violation> audit(const NodeStatus& report, const AuditContext& ctx = {});

struct NonImplication {
    std::vector<Node> antecedents;
    Node consequent;
    std::string witness;
};

const std::vector<NonImplication>& nonimplication_matrix();

/// Graphviz rendering of the implication graph.
std::string graph_dot();

/// True when no directed cycle survives after merging equivalence classes.
bool graph_is_acyclic(const ImplicationGraph& g);

}  // namespace cqkit
