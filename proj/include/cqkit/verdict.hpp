#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace cqkit {

enum class Status { Holds, Fails, Inconclusive };

/// Verdict nodes of the implication graph. MfcqNoEq is MFCQ together with
/// the absence of equality constraints; SpanD says the active gradients
/// span R^d.
enum class Node { A2, A3, A4, A5, A6, A7, LICQ, MfcqNoEq, MFCQ, ACQ, SpanD };

inline constexpr std::array<Node, 11> kAllNodes = {Node::A2,   Node::A3,       Node::A4,   Node::A5,
                                                   Node::A6,   Node::A7,       Node::LICQ, Node::MfcqNoEq,
                                                   Node::MFCQ, Node::ACQ,      Node::SpanD};

std::string_view to_string(Status s);
std::string_view to_string(Node n);
std::optional<Status> status_from_string(std::string_view s);
std::optional<Node> node_from_string(std::string_view s);

using NodeStatus = std::map<Node, Status>;

}  // namespace cqkit
