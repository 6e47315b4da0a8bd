#include "rgi/regex.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "rgi/error.hpp"

namespace rgi {
namespace {

bool is_operator(char c) { return c == '|' || c == '*' || c == '?' || c == '(' || c == ')'; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

class Parser {
 public:
  Parser(std::string_view pattern, const Alphabet& alphabet)
      : text_(pattern), alphabet_(alphabet), char_mode_(alphabet.single_char()) {}

  RegexNode parse() {
    RegexNode node = alternation();
    skip_space();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t offset) const {
    throw RegexSyntaxError(msg, offset);
  }

  // Errors at end of input point at the last character of the pattern.
  [[noreturn]] void fail_at_end(const std::string& msg) const {
    fail(msg, text_.empty() ? 0 : text_.size() - 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  bool at(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  RegexNode alternation() {
    std::vector<RegexNode> branches;
    branches.push_back(concatenation());
    while (at('|')) {
      ++pos_;
      branches.push_back(concatenation());
    }
    if (branches.size() == 1) return std::move(branches.front());
    return {RegexNode::Kind::Alt, -1, std::move(branches)};
  }

  RegexNode concatenation() {
    std::vector<RegexNode> items;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] == '|' || text_[pos_] == ')') break;
      items.push_back(postfix());
    }
    if (items.size() == 1) return std::move(items.front());
    return {RegexNode::Kind::Concat, -1, std::move(items)};
  }

  RegexNode postfix() {
    RegexNode node = atom();
    for (;;) {
      if (at('*')) {
        ++pos_;
        node = RegexNode{RegexNode::Kind::Star, -1, {std::move(node)}};
      } else if (at('?')) {
        ++pos_;
        node = RegexNode{RegexNode::Kind::Optional, -1, {std::move(node)}};
      } else {
        return node;
      }
    }
  }

  RegexNode atom() {
    skip_space();
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      RegexNode inner = alternation();
      if (!at(')')) {
        if (pos_ >= text_.size()) fail_at_end("missing ')'");
        fail("expected ')'", pos_);
      }
      ++pos_;
      return inner;
    }
    if (c == '*' || c == '?') fail(std::string("'") + c + "' has nothing to repeat", pos_);
    return literal();
  }

  RegexNode literal() {
    if (char_mode_) {
      const std::string_view tok = text_.substr(pos_, 1);
      ++pos_;
      return RegexNode::literal(alphabet_.index_of(tok));
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) && !is_operator(text_[pos_])) ++pos_;
    return RegexNode::literal(alphabet_.index_of(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  const Alphabet& alphabet_;
  bool char_mode_;
  std::size_t pos_ = 0;
};

void render(const RegexNode& n, const Alphabet& a, std::string& out) {
  using K = RegexNode::Kind;
  switch (n.kind) {
    case K::Literal:
      out += a.token(n.symbol);
      return;
    case K::Concat:
      if (n.children.empty()) {
        out += "eps";
        return;
      }
      out += "concat(";
      break;
    case K::Alt:
      out += "alt(";
      break;
    case K::Star:
      out += "star(";
      break;
    case K::Optional:
      out += "opt(";
      break;
  }
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i) out += ',';
    render(n.children[i], a, out);
  }
  out += ')';
}

}  // namespace

RegexAst parse_regex(std::string_view pattern, const Alphabet& alphabet) {
  if (alphabet.empty()) throw Error("empty alphabet");
  Parser parser(pattern, alphabet);
  return RegexAst{alphabet, parser.parse()};
}

Alphabet infer_alphabet(std::string_view pattern) {
  std::set<std::string> words;
  bool multi = false;
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (is_space(pattern[i]) || is_operator(pattern[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < pattern.size() && !is_space(pattern[j]) && !is_operator(pattern[j])) ++j;
    words.emplace(pattern.substr(i, j - i));
    multi = multi || j - i > 1;
    i = j;
  }
  std::vector<std::string> tokens;
  // Unseparated runs like "100" are character sequences unless some literal
  // is clearly a word, e.g. "Det? Noun".
  const bool word_mode = multi && std::any_of(words.begin(), words.end(), [](const std::string& w) {
                           return std::any_of(w.begin(), w.end(),
                                              [](unsigned char c) { return std::isalpha(c); });
                         });
  if (word_mode) {
    tokens.assign(words.begin(), words.end());
  } else {
    std::set<std::string> chars;
    for (const auto& w : words)
      for (char c : w) chars.emplace(1, c);
    tokens.assign(chars.begin(), chars.end());
  }
  return Alphabet(std::move(tokens));
}

std::string to_string(const RegexNode& node, const Alphabet& alphabet) {
  std::string out;
  render(node, alphabet, out);
  return out;
}

std::size_t node_count(const RegexNode& node) {
  std::size_t n = 1;
  for (const auto& c : node.children) n += node_count(c);
  return n;
}

}  // namespace rgi
