#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dsom/error.hpp"

namespace dsom {

/// classes[j] lists the individuals assigned to node j in ascending order.
using Classes = std::vector<std::vector<std::size_t>>;

inline Classes classes_from_assignment(std::span<const std::size_t> assignment,
                                       std::size_t m) {
  Classes classes(m);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= m) throw InvalidInput("assignment refers to unknown node");
    classes[assignment[i]].push_back(i);
  }
  return classes;
}

}  // namespace dsom
