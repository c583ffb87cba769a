#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "uller/error.hpp"
#include "uller/value.hpp"

namespace uller {

// ---------------------------------------------------------------------------
// Terms

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

enum class ArithOp { Add, Sub, Mul };

struct VarTerm {
  std::string name;
};
struct ConstTerm {
  std::string name;
};
struct PropAccess {
  Term base;
  std::string prop;
};
struct ArithTerm {
  ArithOp op;
  Term left;
  Term right;
};
struct LiteralTerm {
  Value value;
};

struct TermNode {
  std::variant<VarTerm, ConstTerm, PropAccess, ArithTerm, LiteralTerm> node;
  Span span;
};

// ---------------------------------------------------------------------------
// Formulas (desugared core)

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

struct ForAll {
  std::string var;
  std::string domain;
  Formula body;
};
struct Exists {
  std::string var;
  std::string domain;
  Formula body;
};
struct And {
  Formula left;
  Formula right;
};
struct Or {
  Formula left;
  Formula right;
};
struct Implies {
  Formula left;
  Formula right;
};
struct Not {
  Formula operand;
};
struct Pred {
  std::string name;
  std::vector<Term> args;
};
/// `var := func(args) (body)`: binds the (possibly random) output of `func`
/// to `var` inside `body` only.
struct Statement {
  std::string var;
  std::string func;
  std::vector<Term> args;
  Formula body;
};

struct FormulaNode {
  std::variant<ForAll, Exists, And, Or, Implies, Not, Pred, Statement> node;
  Span span;
};

/// Structural equality; spans are ignored.
bool equal(const Term& a, const Term& b);
bool equal(const Formula& a, const Formula& b);

std::set<std::string> free_variables(const Term& t);
std::set<std::string> free_variables(const Formula& f);

/// Number of nodes, used for budget estimates and generator bounds.
std::size_t size(const Formula& f);

// ---------------------------------------------------------------------------
// Sugared forms produced by the parser

struct SugaredNode;
using Sugared = std::shared_ptr<const SugaredNode>;

enum class CompareOp { Eq, Neq, Lt, Leq, Gt, Geq };
enum class Connective { And, Or, Implies, Iff };

struct Binder {
  std::string var;
  std::string domain;
  Span span;
};
struct Binding {
  std::string var;
  std::string func;
  std::vector<Term> args;
  Span span;
};

struct SQuantifier {
  bool universal;
  std::vector<Binder> binders;
  Sugared body;
};
struct SConnective {
  Connective op;
  Sugared left;
  Sugared right;
};
struct SNot {
  Sugared operand;
};
struct SPred {
  std::string name;
  std::vector<Term> args;
};
struct SCompare {
  CompareOp op;
  Term left;
  Term right;
};
struct SStatements {
  std::vector<Binding> bindings;
  Sugared body;
};
struct SParen {
  Sugared inner;
};

struct SugaredNode {
  std::variant<SQuantifier, SConnective, SNot, SPred, SCompare, SStatements, SParen> node;
  Span span;
};

/// Predicate name a comparison operator lowers to (`eq`, `neq`, ...).
std::string_view predicate_name(CompareOp op);

/// Lowers sugar to the core grammar: multi-binder quantifiers and statement
/// groups nest, infix comparisons become named predicates, `A <=> B` becomes
/// `(A => B) and (B => A)`, parentheses vanish.
/// Throws Error{DuplicateBinder} when one group binds a name twice.
Formula desugar(const Sugared& s);

/// Trivial embedding of a core formula into the sugared tree.
Sugared embed(const Formula& f);

// ---------------------------------------------------------------------------
// Canonical printing

/// Deterministic concrete syntax; `parse_program(to_source(f))` yields `f`
/// back for well-scoped trees.
std::string to_source(const Formula& f);
std::string to_source(const Term& t);

// ---------------------------------------------------------------------------
// Builders

namespace build {

Term var(std::string name);
Term constant(std::string name);
Term literal(Value v);
Term integer(std::int64_t v);
Term prop(Term base, std::string name);
Term arith(ArithOp op, Term l, Term r);

Formula forall(std::string var, std::string domain, Formula body);
Formula exists(std::string var, std::string domain, Formula body);
Formula conj(Formula l, Formula r);
Formula disj(Formula l, Formula r);
Formula implies(Formula l, Formula r);
Formula negate(Formula f);
Formula pred(std::string name, std::vector<Term> args);
Formula statement(std::string var, std::string func, std::vector<Term> args, Formula body);

/// Left-nested conjunction of a nonempty list.
Formula conj_all(const std::vector<Formula>& fs);

}  // namespace build

}  // namespace uller
