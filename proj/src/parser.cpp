#include "uller/parser.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <utility>

namespace uller {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Ident: return "identifier";
    case TokenKind::IntLit: return "integer";
    case TokenKind::RealLit: return "real";
    case TokenKind::StringLit: return "string";
    case TokenKind::Operator: return "operator";
    case TokenKind::Punct: return "punctuation";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

namespace {

constexpr std::array<std::string_view, 8> kKeywords = {
    "forall", "exists", "in", "and", "or", "not", "true", "false"};

struct Alias {
  std::string_view utf8;
  std::string_view ascii;
  TokenKind kind;
};

// clang-format off
constexpr std::array<Alias, 12> kAliases = {{
    {"∀", "forall", TokenKind::Keyword},
    {"∃", "exists", TokenKind::Keyword},
    {"∧", "and", TokenKind::Keyword},
    {"∨", "or", TokenKind::Keyword},
    {"¬", "not", TokenKind::Keyword},
    {"∈", "in", TokenKind::Keyword},
    {"⇒", "=>", TokenKind::Operator},
    {"⇔", "<=>", TokenKind::Operator},
    {"≠", "!=", TokenKind::Operator},
    {"≤", "<=", TokenKind::Operator},
    {"≥", ">=", TokenKind::Operator},
    {"≔", ":=", TokenKind::Operator},
}};

// Longest first so maximal munch works by scanning in order.
constexpr std::array<std::string_view, 16> kOperators = {
    "<=>", ":=", "=>", "!=", "<=", ">=", "=", "<", ">", "+", "-", "*", ".", ",", "(", ")"};
// clang-format on

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '\''; }

bool ends_term(const std::vector<Token>& tokens) {
  if (tokens.empty()) return false;
  const Token& t = tokens.back();
  switch (t.kind) {
    case TokenKind::Ident:
    case TokenKind::IntLit:
    case TokenKind::RealLit:
    case TokenKind::StringLit:
      return true;
    case TokenKind::Keyword:
      return t.text == "true" || t.text == "false";
    case TokenKind::Punct:
      return t.text == ")";
    default:
      return false;
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      if (pos_ >= src_.size()) break;
      const Span span{line_, col_};
      const unsigned char c = static_cast<unsigned char>(src_[pos_]);

      if (c >= 0x80) {
        bool matched = false;
        for (const auto& alias : kAliases) {
          if (src_.substr(pos_).starts_with(alias.utf8)) {
            advance(alias.utf8.size());
            out.push_back({alias.kind, std::string(alias.ascii), span});
            matched = true;
            break;
          }
        }
        if (!matched) throw ParseError("unexpected character", span);
        continue;
      }
      if (is_ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) {
          advance(1);
        }
        std::string text(src_.substr(start, pos_ - start));
        bool keyword = false;
        for (auto k : kKeywords) keyword = keyword || k == text;
        out.push_back({keyword ? TokenKind::Keyword : TokenKind::Ident, std::move(text), span});
        continue;
      }
      const bool negative_literal = c == '-' && pos_ + 1 < src_.size() &&
                                    std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) &&
                                    !ends_term(out);
      if (std::isdigit(c) || negative_literal) {
        out.push_back(number(span));
        continue;
      }
      if (c == '"') {
        out.push_back(string_literal(span));
        continue;
      }
      if (c == ';') {
        advance(1);
        out.push_back({TokenKind::Punct, ";", span});
        continue;
      }
      bool matched = false;
      for (auto op : kOperators) {
        if (src_.substr(pos_).starts_with(op)) {
          advance(op.size());
          const bool punct = op == "(" || op == ")" || op == "," || op == ".";
          out.push_back({punct ? TokenKind::Punct : TokenKind::Operator, std::string(op), span});
          matched = true;
          break;
        }
      }
      if (!matched) throw ParseError("unexpected character '" + std::string(1, c) + "'", span);
    }
    out.push_back({TokenKind::End, "", Span{line_, col_}});
    return out;
  }

 private:
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i, ++pos_) {
      const unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (c == '\n') {
        ++line_;
        col_ = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++col_;
      }
    }
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (std::isspace(c)) {
        advance(1);
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
      } else {
        break;
      }
    }
  }

  Token number(Span span) {
    std::size_t start = pos_;
    if (src_[pos_] == '-') advance(1);
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance(1);
    };
    digits();
    bool real = false;
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      real = true;
      advance(1);
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      int save_col = col_;
      advance(1);
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance(1);
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        real = true;
        digits();
      } else {
        pos_ = save;
        col_ = save_col;
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    if (real) {
      double v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || !std::isfinite(v)) {
        throw ParseError("real literal out of range: " + text, span);
      }
      return {TokenKind::RealLit, std::move(text), span};
    }
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc()) throw ParseError("integer literal out of range: " + text, span);
    return {TokenKind::IntLit, std::move(text), span};
  }

  Token string_literal(Span span) {
    advance(1);
    std::string text;
    while (true) {
      if (pos_ >= src_.size()) throw ParseError("unterminated string literal", span);
      char c = src_[pos_];
      if (c == '"') {
        advance(1);
        break;
      }
      if (c == '\\') {
        advance(1);
        if (pos_ >= src_.size()) throw ParseError("unterminated string literal", span);
        c = src_[pos_];
      }
      text += c;
      advance(1);
    }
    return {TokenKind::StringLit, std::move(text), span};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

constexpr int kMaxDepth = 400;

class Parser {
 public:
  Parser(std::vector<Token> tokens, bool unbound_are_vars)
      : tokens_(std::move(tokens)), unbound_are_vars_(unbound_are_vars) {}

  void bind_all(const std::set<std::string>& names) {
    for (const auto& n : names) scope_.push_back(n);
  }

  std::vector<Sugared> program() {
    std::vector<Sugared> out;
    if (peek().kind == TokenKind::End) fail("expected formula", {"formula"});
    out.push_back(formula());
    while (accept(";")) {
      if (peek().kind == TokenKind::End) break;
      out.push_back(formula());
    }
    if (peek().kind != TokenKind::End) {
      if (peek().text == ":=") fail("':=' outside binder position", {});
      if (peek().text == ")") fail("unbalanced ')'", {});
      fail("unexpected '" + peek().text + "' after formula", {"';'", "end of input"});
    }
    return out;
  }

  Term standalone_term() {
    if (peek().kind == TokenKind::End) fail("expected term", {"term"});
    Term t = term();
    if (peek().kind != TokenKind::End) {
      fail("unexpected '" + peek().text + "' after term", {"end of input"});
    }
    return t;
  }

 private:
  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.depth_ > kMaxDepth) p.fail("nesting too deep", {});
    }
    ~DepthGuard() { --p.depth_; }
    Parser& p;
  };

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool is(std::string_view text) const {
    const Token& t = peek();
    return t.kind != TokenKind::StringLit && t.kind != TokenKind::End && t.text == text;
  }
  bool accept(std::string_view text) {
    if (!is(text)) return false;
    next();
    return true;
  }
  void expect(std::string_view text) {
    if (!accept(text)) {
      const Token& t = peek();
      if (text == ")" && t.kind == TokenKind::End) fail("unbalanced '(': missing ')'", {"')'"});
      fail("expected '" + std::string(text) + "' but found " + describe(t),
           {"'" + std::string(text) + "'"});
    }
  }
  std::string ident(const char* what) {
    if (peek().kind != TokenKind::Ident) {
      fail(std::string("expected ") + what + " but found " + describe(peek()), {"identifier"});
    }
    return next().text;
  }

  static std::string describe(const Token& t) {
    if (t.kind == TokenKind::End) return "end of input";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail(std::string message, std::vector<std::string> expected) const {
    throw ParseError(std::move(message), peek().span, std::move(expected));
  }

  bool bound(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (*it == name) return true;
    }
    return false;
  }

  static Sugared node(decltype(SugaredNode::node) n, Span span) {
    return std::make_shared<const SugaredNode>(SugaredNode{std::move(n), span});
  }
  static Term term_node(decltype(TermNode::node) n, Span span) {
    return std::make_shared<const TermNode>(TermNode{std::move(n), span});
  }

  // formula := implication ('<=>' implication)*
  Sugared formula() {
    DepthGuard guard(*this);
    Sugared left = implication();
    while (is("<=>")) {
      Span span = next().span;
      Sugared right = implication();
      left = node(SConnective{Connective::Iff, left, right}, span);
    }
    return left;
  }

  Sugared implication() {
    Sugared left = disjunction();
    if (is("=>")) {
      Span span = next().span;
      DepthGuard guard(*this);
      Sugared right = implication();
      return node(SConnective{Connective::Implies, left, right}, span);
    }
    return left;
  }

  Sugared disjunction() {
    Sugared left = conjunction();
    while (is("or")) {
      Span span = next().span;
      left = node(SConnective{Connective::Or, left, conjunction()}, span);
    }
    return left;
  }

  Sugared conjunction() {
    Sugared left = unary();
    while (is("and")) {
      Span span = next().span;
      left = node(SConnective{Connective::And, left, unary()}, span);
    }
    return left;
  }

  Sugared unary() {
    DepthGuard guard(*this);
    if (is("not")) {
      Span span = next().span;
      return node(SNot{unary()}, span);
    }
    return atom();
  }

  Sugared atom() {
    const Token& t = peek();
    if (t.kind == TokenKind::End) fail("expected formula", {"formula"});
    if (is("forall") || is("exists")) return quantifier();
    if (t.kind == TokenKind::Ident && peek(1).kind == TokenKind::Operator && peek(1).text == ":=") {
      return statements();
    }
    if (is(":=")) fail("':=' outside binder position", {});
    if ((t.kind == TokenKind::Ident || is("true")) && peek(1).kind == TokenKind::Punct &&
        peek(1).text == "(") {
      return predicate();
    }
    if (is("(")) return parenthesized();
    return comparison();
  }

  Sugared quantifier() {
    const Token& kw = next();
    const bool universal = kw.text == "forall";
    std::vector<Binder> binders;
    do {
      Span span = peek().span;
      std::string var = ident("variable name");
      expect("in");
      std::string domain = ident("domain name");
      binders.push_back({std::move(var), std::move(domain), span});
    } while (accept(","));
    for (const auto& b : binders) scope_.push_back(b.var);
    expect("(");
    Sugared body = formula();
    expect(")");
    scope_.resize(scope_.size() - binders.size());
    return node(SQuantifier{universal, std::move(binders), body}, kw.span);
  }

  Sugared statements() {
    Span group_span = peek().span;
    std::vector<Binding> bindings;
    do {
      Span span = peek().span;
      std::string var = ident("variable name");
      expect(":=");
      std::string func = ident("function name");
      std::vector<Term> args = arguments();
      bindings.push_back({var, std::move(func), std::move(args), span});
      scope_.push_back(std::move(var));
    } while (accept(","));
    if (!is("(")) fail("expected '(' to open the statement body", {"'('", "','"});
    next();
    Sugared body = formula();
    expect(")");
    scope_.resize(scope_.size() - bindings.size());
    return node(SStatements{std::move(bindings), body}, group_span);
  }

  Sugared predicate() {
    const Token& name = next();
    std::vector<Term> args = arguments();
    return node(SPred{name.text, std::move(args)}, name.span);
  }

  std::vector<Term> arguments() {
    expect("(");
    std::vector<Term> args;
    if (accept(")")) return args;
    do {
      args.push_back(term());
    } while (accept(","));
    expect(")");
    return args;
  }

  // '(' may open a parenthesized formula or a parenthesized term on the left
  // of a comparison; try the formula first and fall back to the term.
  Sugared parenthesized() {
    const std::size_t start = pos_;
    std::optional<ParseError> formula_error;
    std::size_t formula_reach = start;
    try {
      Span span = next().span;
      Sugared inner = formula();
      expect(")");
      if (!continues_term()) return node(SParen{inner}, span);
    } catch (const ParseError& e) {
      formula_error = e;
      formula_reach = pos_;
    }
    pos_ = start;
    try {
      return comparison();
    } catch (const ParseError&) {
      if (formula_error && formula_reach >= pos_) throw *formula_error;
      throw;
    }
  }

  bool continues_term() const {
    static constexpr std::array<std::string_view, 10> ops = {"=", "!=", "<", "<=", ">",
                                                             ">=", "+", "-", "*", "."};
    for (auto op : ops) {
      if (is(op)) return true;
    }
    return false;
  }

  Sugared comparison() {
    Span span = peek().span;
    Term left = term();
    static constexpr std::array<std::pair<std::string_view, CompareOp>, 6> ops = {{
        {"=", CompareOp::Eq},
        {"!=", CompareOp::Neq},
        {"<=", CompareOp::Leq},
        {">=", CompareOp::Geq},
        {"<", CompareOp::Lt},
        {">", CompareOp::Gt},
    }};
    for (auto [text, op] : ops) {
      if (is(text)) {
        next();
        Term right = term();
        return node(SCompare{op, left, right}, span);
      }
    }
    if (is(":=")) fail("':=' outside binder position", {});
    fail("expected comparison operator after term but found " + describe(peek()),
         {"'='", "'!='", "'<'", "'<='", "'>'", "'>='"});
  }

  // term := product (('+' | '-') product)*
  Term term() {
    DepthGuard guard(*this);
    Term left = product();
    while (true) {
      if (is("+") || is("-")) {
        const Token& op = next();
        ArithOp kind = op.text == "+" ? ArithOp::Add : ArithOp::Sub;
        left = term_node(ArithTerm{kind, left, product()}, op.span);
      } else {
        return left;
      }
    }
  }

  Term product() {
    Term left = postfix();
    while (is("*")) {
      const Token& op = next();
      left = term_node(ArithTerm{ArithOp::Mul, left, postfix()}, op.span);
    }
    return left;
  }

  Term postfix() {
    Term base = primary();
    while (is(".")) {
      next();
      Span span = peek().span;
      std::string prop = ident("property name");
      base = term_node(PropAccess{base, std::move(prop)}, span);
    }
    return base;
  }

  Term literal_from(const Token& t, std::string_view text) {
    if (t.kind == TokenKind::IntLit) {
      std::int64_t v = 0;
      std::from_chars(text.data(), text.data() + text.size(), v);
      return term_node(LiteralTerm{Value::integer(v)}, t.span);
    }
    double v = 0;
    std::from_chars(text.data(), text.data() + text.size(), v);
    return term_node(LiteralTerm{Value::real(v)}, t.span);
  }

  Term primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Ident: {
        next();
        if (is("(")) fail("functions may only be applied in statements", {});
        if (bound(t.text) || unbound_are_vars_) return term_node(VarTerm{t.text}, t.span);
        return term_node(ConstTerm{t.text}, t.span);
      }
      case TokenKind::IntLit:
      case TokenKind::RealLit:
        next();
        return literal_from(t, t.text);
      case TokenKind::StringLit:
        next();
        return term_node(LiteralTerm{Value::symbol(t.text)}, t.span);
      case TokenKind::Keyword:
        if (t.text == "true" || t.text == "false") {
          next();
          return term_node(LiteralTerm{Value::boolean(t.text == "true")}, t.span);
        }
        break;
      case TokenKind::Punct:
        if (t.text == "(") {
          next();
          Term inner = term();
          expect(")");
          return inner;
        }
        break;
      default:
        break;
    }
    if (t.kind == TokenKind::End) fail("expected term but found end of input", {"term"});
    fail("expected term but found " + describe(t), {"identifier", "literal", "'('"});
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::vector<std::string> scope_;
  bool unbound_are_vars_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::vector<Sugared> parse_sugared(std::string_view source) {
  Parser parser(tokenize(source), false);
  return parser.program();
}

std::vector<Formula> parse_formulas(std::string_view source) {
  std::vector<Formula> out;
  for (const auto& s : parse_sugared(source)) out.push_back(desugar(s));
  return out;
}

Formula parse_program(std::string_view source) { return build::conj_all(parse_formulas(source)); }

Term parse_term(std::string_view source, const std::optional<std::set<std::string>>& bound) {
  Parser parser(tokenize(source), !bound.has_value());
  if (bound) parser.bind_all(*bound);
  return parser.standalone_term();
}

}  // namespace uller
