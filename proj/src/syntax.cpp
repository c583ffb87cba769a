#include "uller/syntax.hpp"

#include <algorithm>

namespace uller {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool equal_args(const std::vector<Term>& a, const std::vector<Term>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!equal(a[i], b[i])) return false;
  }
  return true;
}

Term make_term(decltype(TermNode::node) n, Span span = {}) {
  return std::make_shared<const TermNode>(TermNode{std::move(n), span});
}

Formula make_formula(decltype(FormulaNode::node) n, Span span = {}) {
  return std::make_shared<const FormulaNode>(FormulaNode{std::move(n), span});
}

Sugared make_sugared(decltype(SugaredNode::node) n, Span span = {}) {
  return std::make_shared<const SugaredNode>(SugaredNode{std::move(n), span});
}

}  // namespace

bool equal(const Term& a, const Term& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const VarTerm& x) { return x.name == std::get<VarTerm>(b->node).name; },
          [&](const ConstTerm& x) { return x.name == std::get<ConstTerm>(b->node).name; },
          [&](const PropAccess& x) {
            const auto& y = std::get<PropAccess>(b->node);
            return x.prop == y.prop && equal(x.base, y.base);
          },
          [&](const ArithTerm& x) {
            const auto& y = std::get<ArithTerm>(b->node);
            return x.op == y.op && equal(x.left, y.left) && equal(x.right, y.right);
          },
          [&](const LiteralTerm& x) { return x.value == std::get<LiteralTerm>(b->node).value; },
      },
      a->node);
}

bool equal(const Formula& a, const Formula& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const ForAll& x) {
            const auto& y = std::get<ForAll>(b->node);
            return x.var == y.var && x.domain == y.domain && equal(x.body, y.body);
          },
          [&](const Exists& x) {
            const auto& y = std::get<Exists>(b->node);
            return x.var == y.var && x.domain == y.domain && equal(x.body, y.body);
          },
          [&](const And& x) {
            const auto& y = std::get<And>(b->node);
            return equal(x.left, y.left) && equal(x.right, y.right);
          },
          [&](const Or& x) {
            const auto& y = std::get<Or>(b->node);
            return equal(x.left, y.left) && equal(x.right, y.right);
          },
          [&](const Implies& x) {
            const auto& y = std::get<Implies>(b->node);
            return equal(x.left, y.left) && equal(x.right, y.right);
          },
          [&](const Not& x) { return equal(x.operand, std::get<Not>(b->node).operand); },
          [&](const Pred& x) {
            const auto& y = std::get<Pred>(b->node);
            return x.name == y.name && equal_args(x.args, y.args);
          },
          [&](const Statement& x) {
            const auto& y = std::get<Statement>(b->node);
            return x.var == y.var && x.func == y.func && equal_args(x.args, y.args) &&
                   equal(x.body, y.body);
          },
      },
      a->node);
}

// ---------------------------------------------------------------------------

namespace {

void collect_free(const Term& t, std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const VarTerm& x) { out.insert(x.name); },
                 [&](const ConstTerm&) {},
                 [&](const PropAccess& x) { collect_free(x.base, out); },
                 [&](const ArithTerm& x) {
                   collect_free(x.left, out);
                   collect_free(x.right, out);
                 },
                 [&](const LiteralTerm&) {},
             },
             t->node);
}

std::set<std::string> without(std::set<std::string> s, const std::string& name) {
  s.erase(name);
  return s;
}

}  // namespace

std::set<std::string> free_variables(const Term& t) {
  std::set<std::string> out;
  collect_free(t, out);
  return out;
}

std::set<std::string> free_variables(const Formula& f) {
  return std::visit(
      overloaded{
          [](const ForAll& x) { return without(free_variables(x.body), x.var); },
          [](const Exists& x) { return without(free_variables(x.body), x.var); },
          [](const auto& x) -> std::set<std::string>
            requires requires { x.left; x.right; }
          {
            auto out = free_variables(x.left);
            out.merge(free_variables(x.right));
            return out;
          },
          [](const Not& x) { return free_variables(x.operand); },
          [](const Pred& x) {
            std::set<std::string> out;
            for (const auto& a : x.args) collect_free(a, out);
            return out;
          },
          [](const Statement& x) {
            auto out = without(free_variables(x.body), x.var);
            for (const auto& a : x.args) collect_free(a, out);
            return out;
          },
      },
      f->node);
}

std::size_t size(const Formula& f) {
  return std::visit(overloaded{
                        [](const ForAll& x) { return 1 + size(x.body); },
                        [](const Exists& x) { return 1 + size(x.body); },
                        [](const Not& x) { return 1 + size(x.operand); },
                        [](const Pred&) -> std::size_t { return 1; },
                        [](const Statement& x) { return 1 + size(x.body); },
                        [](const auto& x) { return 1 + size(x.left) + size(x.right); },
                    },
                    f->node);
}

// ---------------------------------------------------------------------------

std::string_view predicate_name(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "eq";
    case CompareOp::Neq: return "neq";
    case CompareOp::Lt: return "lt";
    case CompareOp::Leq: return "leq";
    case CompareOp::Gt: return "gt";
    case CompareOp::Geq: return "geq";
  }
  return "eq";
}

Formula desugar(const Sugared& s) {
  return std::visit(
      overloaded{
          [&](const SQuantifier& q) {
            std::set<std::string> seen;
            for (const auto& b : q.binders) {
              if (!seen.insert(b.var).second) {
                throw Error(ErrorKind::DuplicateBinder,
                            "variable '" + b.var + "' bound twice in one quantifier", b.span);
              }
            }
            Formula body = desugar(q.body);
            for (auto it = q.binders.rbegin(); it != q.binders.rend(); ++it) {
              body = q.universal ? make_formula(ForAll{it->var, it->domain, body}, it->span)
                                 : make_formula(Exists{it->var, it->domain, body}, it->span);
            }
            return body;
          },
          [&](const SConnective& c) {
            Formula l = desugar(c.left);
            Formula r = desugar(c.right);
            switch (c.op) {
              case Connective::And: return make_formula(And{l, r}, s->span);
              case Connective::Or: return make_formula(Or{l, r}, s->span);
              case Connective::Implies: return make_formula(Implies{l, r}, s->span);
              case Connective::Iff:
                return make_formula(And{make_formula(Implies{l, r}, s->span),
                                        make_formula(Implies{r, l}, s->span)},
                                    s->span);
            }
            return Formula{};
          },
          [&](const SNot& n) { return make_formula(Not{desugar(n.operand)}, s->span); },
          [&](const SPred& p) { return make_formula(Pred{p.name, p.args}, s->span); },
          [&](const SCompare& c) {
            return make_formula(Pred{std::string(predicate_name(c.op)), {c.left, c.right}},
                                s->span);
          },
          [&](const SStatements& st) {
            std::set<std::string> seen;
            for (const auto& b : st.bindings) {
              if (!seen.insert(b.var).second) {
                throw Error(ErrorKind::DuplicateBinder,
                            "variable '" + b.var + "' bound twice in one statement group", b.span);
              }
            }
            Formula body = desugar(st.body);
            for (auto it = st.bindings.rbegin(); it != st.bindings.rend(); ++it) {
              body = make_formula(Statement{it->var, it->func, it->args, body}, it->span);
            }
            return body;
          },
          [&](const SParen& p) { return desugar(p.inner); },
      },
      s->node);
}

Sugared embed(const Formula& f) {
  return std::visit(
      overloaded{
          [&](const ForAll& x) {
            return make_sugared(SQuantifier{true, {{x.var, x.domain, f->span}}, embed(x.body)},
                                f->span);
          },
          [&](const Exists& x) {
            return make_sugared(SQuantifier{false, {{x.var, x.domain, f->span}}, embed(x.body)},
                                f->span);
          },
          [&](const And& x) {
            return make_sugared(SConnective{Connective::And, embed(x.left), embed(x.right)},
                                f->span);
          },
          [&](const Or& x) {
            return make_sugared(SConnective{Connective::Or, embed(x.left), embed(x.right)},
                                f->span);
          },
          [&](const Implies& x) {
            return make_sugared(SConnective{Connective::Implies, embed(x.left), embed(x.right)},
                                f->span);
          },
          [&](const Not& x) { return make_sugared(SNot{embed(x.operand)}, f->span); },
          [&](const Pred& x) { return make_sugared(SPred{x.name, x.args}, f->span); },
          [&](const Statement& x) {
            return make_sugared(SStatements{{{x.var, x.func, x.args, f->span}}, embed(x.body)},
                                f->span);
          },
      },
      f->node);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

enum TermPrec { kAdditive = 1, kMultiplicative = 2, kTermAtom = 3 };
enum FormulaPrec { kTop = 0, kImplies = 1, kOr = 2, kAnd = 3, kNot = 4, kAtom = 5 };

int term_prec(const Term& t) {
  if (const auto* a = std::get_if<ArithTerm>(&t->node)) {
    return a->op == ArithOp::Mul ? kMultiplicative : kAdditive;
  }
  return kTermAtom;
}

void print_term(const Term& t, int context, std::string& out);

void print_args(const std::vector<Term>& args, std::string& out) {
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    print_term(args[i], kAdditive, out);
  }
  out += ')';
}

void print_term(const Term& t, int context, std::string& out) {
  const bool parens = term_prec(t) < context;
  if (parens) out += '(';
  std::visit(overloaded{
                 [&](const VarTerm& x) { out += x.name; },
                 [&](const ConstTerm& x) { out += x.name; },
                 [&](const PropAccess& x) {
                   const bool simple = std::holds_alternative<VarTerm>(x.base->node) ||
                                       std::holds_alternative<ConstTerm>(x.base->node) ||
                                       std::holds_alternative<PropAccess>(x.base->node);
                   if (simple) {
                     print_term(x.base, kTermAtom, out);
                   } else {
                     out += '(';
                     print_term(x.base, kAdditive, out);
                     out += ')';
                   }
                   out += '.';
                   out += x.prop;
                 },
                 [&](const ArithTerm& x) {
                   const int own = x.op == ArithOp::Mul ? kMultiplicative : kAdditive;
                   print_term(x.left, own, out);
                   out += x.op == ArithOp::Add ? " + " : x.op == ArithOp::Sub ? " - " : " * ";
                   print_term(x.right, own + 1, out);
                 },
                 [&](const LiteralTerm& x) { out += to_string(x.value); },
             },
             t->node);
  if (parens) out += ')';
}

const char* infix_symbol(const std::string& name) {
  if (name == "eq") return " = ";
  if (name == "neq") return " != ";
  if (name == "lt") return " < ";
  if (name == "leq") return " <= ";
  if (name == "gt") return " > ";
  if (name == "geq") return " >= ";
  return nullptr;
}

int formula_prec(const Formula& f) {
  return std::visit(overloaded{
                        [](const Implies&) { return int(kImplies); },
                        [](const Or&) { return int(kOr); },
                        [](const And&) { return int(kAnd); },
                        [](const Not&) { return int(kNot); },
                        [](const auto&) { return int(kAtom); },
                    },
                    f->node);
}

void print_formula(const Formula& f, int context, std::string& out) {
  const bool parens = formula_prec(f) < context;
  if (parens) out += '(';
  std::visit(overloaded{
                 [&](const ForAll& x) {
                   out += "forall " + x.var + " in " + x.domain + " (";
                   print_formula(x.body, kTop, out);
                   out += ')';
                 },
                 [&](const Exists& x) {
                   out += "exists " + x.var + " in " + x.domain + " (";
                   print_formula(x.body, kTop, out);
                   out += ')';
                 },
                 [&](const And& x) {
                   print_formula(x.left, kAnd, out);
                   out += " and ";
                   print_formula(x.right, kNot, out);
                 },
                 [&](const Or& x) {
                   print_formula(x.left, kOr, out);
                   out += " or ";
                   print_formula(x.right, kAnd, out);
                 },
                 [&](const Implies& x) {
                   print_formula(x.left, kOr, out);
                   out += " => ";
                   print_formula(x.right, kImplies, out);
                 },
                 [&](const Not& x) {
                   out += "not ";
                   print_formula(x.operand, kNot, out);
                 },
                 [&](const Pred& x) {
                   if (const char* sym = infix_symbol(x.name); sym && x.args.size() == 2) {
                     print_term(x.args[0], kAdditive, out);
                     out += sym;
                     print_term(x.args[1], kAdditive, out);
                   } else {
                     out += x.name;
                     print_args(x.args, out);
                   }
                 },
                 [&](const Statement& x) {
                   out += x.var + " := " + x.func;
                   print_args(x.args, out);
                   out += " (";
                   print_formula(x.body, kTop, out);
                   out += ')';
                 },
             },
             f->node);
  if (parens) out += ')';
}

}  // namespace

std::string to_source(const Formula& f) {
  std::string out;
  print_formula(f, kTop, out);
  return out;
}

std::string to_source(const Term& t) {
  std::string out;
  print_term(t, kAdditive, out);
  return out;
}

// ---------------------------------------------------------------------------

namespace build {

Term var(std::string name) { return make_term(VarTerm{std::move(name)}); }
Term constant(std::string name) { return make_term(ConstTerm{std::move(name)}); }
Term literal(Value v) { return make_term(LiteralTerm{std::move(v)}); }
Term integer(std::int64_t v) { return literal(Value::integer(v)); }
Term prop(Term base, std::string name) {
  return make_term(PropAccess{std::move(base), std::move(name)});
}
Term arith(ArithOp op, Term l, Term r) {
  return make_term(ArithTerm{op, std::move(l), std::move(r)});
}

Formula forall(std::string var, std::string domain, Formula body) {
  return make_formula(ForAll{std::move(var), std::move(domain), std::move(body)});
}
Formula exists(std::string var, std::string domain, Formula body) {
  return make_formula(Exists{std::move(var), std::move(domain), std::move(body)});
}
Formula conj(Formula l, Formula r) { return make_formula(And{std::move(l), std::move(r)}); }
Formula disj(Formula l, Formula r) { return make_formula(Or{std::move(l), std::move(r)}); }
Formula implies(Formula l, Formula r) {
  return make_formula(Implies{std::move(l), std::move(r)});
}
Formula negate(Formula f) { return make_formula(Not{std::move(f)}); }
Formula pred(std::string name, std::vector<Term> args) {
  return make_formula(Pred{std::move(name), std::move(args)});
}
Formula statement(std::string var, std::string func, std::vector<Term> args, Formula body) {
  return make_formula(Statement{std::move(var), std::move(func), std::move(args), std::move(body)});
}

Formula conj_all(const std::vector<Formula>& fs) {
  Formula out = fs.at(0);
  for (std::size_t i = 1; i < fs.size(); ++i) out = conj(out, fs[i]);
  return out;
}

}  // namespace build

}  // namespace uller
