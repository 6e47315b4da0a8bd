#include "rgi/alphabet.hpp"

#include <algorithm>
#include <cctype>

#include "rgi/error.hpp"

namespace rgi {

Alphabet::Alphabet(std::vector<std::string> tokens) {
  for (auto& t : tokens) {
    if (t.empty()) throw Error("alphabet tokens must be non-empty");
    if (std::any_of(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }))
      throw Error("alphabet token '" + t + "' contains whitespace");
    if (index_.count(t)) continue;
    index_.emplace(t, static_cast<Symbol>(tokens_.size()));
    tokens_.push_back(std::move(t));
  }
}

std::optional<Symbol> Alphabet::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Symbol Alphabet::index_of(std::string_view token) const {
  if (auto s = find(token)) return *s;
  throw UnknownTokenError(std::string(token));
}

bool Alphabet::single_char() const noexcept {
  return std::all_of(tokens_.begin(), tokens_.end(), [](const std::string& t) { return t.size() == 1; });
}

Word Alphabet::encode(std::span<const std::string> tokens) const {
  Word w;
  w.reserve(tokens.size());
  for (const auto& t : tokens) w.push_back(index_of(t));
  return w;
}

std::vector<std::string> Alphabet::decode(const Word& word) const {
  std::vector<std::string> out;
  out.reserve(word.size());
  for (Symbol s : word) out.push_back(token(s));
  return out;
}

std::string Alphabet::format(const Word& word) const {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += ' ';
    out += token(word[i]);
  }
  return out;
}

Word Alphabet::parse(std::string_view text) const {
  Word w;
  for (const auto& piece : split_words(text)) {
    if (auto s = find(piece)) {
      w.push_back(*s);
    } else if (single_char()) {
      for (char c : piece) w.push_back(index_of(std::string_view(&c, 1)));
    } else {
      throw UnknownTokenError(piece);
    }
  }
  return w;
}

std::string Alphabet::join(char sep) const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i) out += sep;
    out += tokens_[i];
  }
  return out;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace rgi
