#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "uller/error.hpp"
#include "uller/syntax.hpp"

namespace uller {

enum class TokenKind { Keyword, Ident, IntLit, RealLit, StringLit, Operator, Punct, End };

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;  // Unicode aliases are normalised to their ASCII spelling
  Span span;
};

/// Splits UTF-8 source into tokens. `#` starts a comment running to end of
/// line. A '-' directly followed by a digit becomes part of a numeric literal
/// unless the previous token ends a term.
std::vector<Token> tokenize(std::string_view source);

/// Parses one or more `;`-separated formulas, without desugaring.
/// Identifiers bound by an enclosing quantifier or statement become variables,
/// all others constants.
std::vector<Sugared> parse_sugared(std::string_view source);

/// Each `;`-separated formula of a program file, desugared.
std::vector<Formula> parse_formulas(std::string_view source);

/// The whole program as one desugared formula; multiple formulas conjoin.
Formula parse_program(std::string_view source);

/// Parses a standalone term. Identifiers in `bound` become variables; when
/// `bound` is absent every identifier is read as a variable.
Term parse_term(std::string_view source,
                const std::optional<std::set<std::string>>& bound = std::nullopt);

}  // namespace uller
