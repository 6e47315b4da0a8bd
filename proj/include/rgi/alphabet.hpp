#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rgi {

using Symbol = int;
// A string over an alphabet, as symbol indices into that alphabet.
using Word = std::vector<Symbol>;

// Ordered set of text tokens. Symbol i is tokens()[i]; the order defines the
// lexicographic order used for enumeration and counterexample tie-breaking.
class Alphabet {
 public:
  Alphabet() = default;
  // Duplicates are dropped, keeping the first occurrence. Tokens must be
  // non-empty and free of whitespace.
  explicit Alphabet(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& token(Symbol s) const { return tokens_.at(static_cast<std::size_t>(s)); }

  std::optional<Symbol> find(std::string_view token) const;
  // Throws UnknownTokenError.
  Symbol index_of(std::string_view token) const;

  // True when every token is a single character, in which case patterns and
  // words may be written without separators ("0110").
  bool single_char() const noexcept;

  Word encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(const Word& word) const;

  // Space-separated tokens; the empty word renders as "".
  std::string format(const Word& word) const;
  // Inverse of format(). For single-character alphabets an unseparated run
  // such as "0110" is also accepted.
  Word parse(std::string_view text) const;

  // Comma-separated list used in file headers.
  std::string join(char sep = ',') const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Symbol> index_;
};

// Splits on whitespace.
std::vector<std::string> split_words(std::string_view text);

}  // namespace rgi
