#include "rgi/dot.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace rgi {
namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string export_dot(const Dfa& dfa, const std::map<int, std::string>& labels, const std::string& name) {
  std::ostringstream os;
  os << "digraph " << quote(name) << " {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=circle];\n";
  os << "  __start [shape=point];\n";
  for (int q = 0; q < dfa.size(); ++q) {
    auto it = labels.find(q);
    const std::string label = it == labels.end() ? std::to_string(q) : it->second;
    os << "  " << q << " [label=" << quote(label);
    if (dfa.accepting(q)) os << ", shape=doublecircle";
    os << "];\n";
  }
  if (dfa.size() > 0) os << "  __start -> " << dfa.start() << ";\n";
  const auto k = static_cast<Symbol>(dfa.alphabet().size());
  for (int q = 0; q < dfa.size(); ++q) {
    // Targets in order of first appearance over the alphabet.
    std::vector<std::pair<int, std::string>> merged;
    for (Symbol a = 0; a < k; ++a) {
      const int t = dfa.next(q, a);
      if (t == Dfa::kNone) continue;
      auto it = std::find_if(merged.begin(), merged.end(), [t](const auto& e) { return e.first == t; });
      if (it == merged.end()) {
        merged.emplace_back(t, dfa.alphabet().token(a));
      } else {
        it->second += "," + dfa.alphabet().token(a);
      }
    }
    for (const auto& [t, label] : merged) os << "  " << q << " -> " << t << " [label=" << quote(label) << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace rgi
