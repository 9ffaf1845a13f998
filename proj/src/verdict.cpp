#include "cqkit/verdict.hpp"

namespace cqkit {

std::string_view to_string(Status s) {
    switch (s) {
        case Status::Holds: return "holds";
        case Status::Fails: return "fails";
        case Status::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::string_view to_string(Node n) {
    switch (n) {
        case Node::A2: return "A2";
        case Node::A3: return "A3";
        case Node::A4: return "A4";
        case Node::A5: return "A5";
        case Node::A6: return "A6";
        case Node::A7: return "A7";
        case Node::LICQ: return "LICQ";
        case Node::MfcqNoEq: return "MFCQ_noeq";
        case Node::MFCQ: return "MFCQ";
        case Node::ACQ: return "ACQ";
        case Node::SpanD: return "SPAN_d";
    }
    return "?";
}

std::optional<Status> status_from_string(std::string_view s) {
    for (Status v : {Status::Holds, Status::Fails, Status::Inconclusive}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    return std::nullopt;
}

std::optional<Node> node_from_string(std::string_view s) {
    for (Node n : kAllNodes) {
        if (to_string(n) == s) {
            return n;
        }
    }
    return std::nullopt;
}

}  // namespace cqkit
