#pragma once

#include <map>
#include <string>

#include "rgi/dfa.hpp"

namespace rgi {

// Graphviz rendering. Accepting states are double circles, the start state
// has an incoming edge from a point node, and parallel edges are merged into
// one edge labelled with the comma-separated tokens. Output is deterministic.
std::string export_dot(const Dfa& dfa, const std::map<int, std::string>& labels = {},
                       const std::string& name = "dfa");

}  // namespace rgi
