#pragma once

#include <span>
#include <string>

namespace scc {

/// Shortest %g text that reads back to exactly `v`. Used for every number
/// written to CSV so reruns are byte-identical.
std::string shortest(double v);

/// "a;b;c" style list.
std::string join_ints(std::span<const int> values, char sep = ';');

}  // namespace scc
