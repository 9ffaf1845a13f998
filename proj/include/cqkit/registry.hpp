#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqkit/model.hpp"
#include "cqkit/verdict.hpp"

namespace cqkit {

struct RegistryEntry {
    std::string name;
    MomentModel model;
    Vec direction;
    std::optional<Vec> known_support_point;
    /// Only verdicts stated for the example in its source.
    NodeStatus expected;
    std::string source;
};

const std::vector<std::string>& registry_names();

/// Throws ValidationError for unknown names.
RegistryEntry registry_get(const std::string& name);

}  // namespace cqkit
