#include "uller/interpretation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace uller {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

// ---------------------------------------------------------------------------
// Domains and distributions

std::optional<std::size_t> DomainDef::index_of(const Value& v) const {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i] == v) return i;
  }
  return std::nullopt;
}

Distribution::Distribution(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
  if (outcomes_.empty()) throw Error(ErrorKind::InvalidDistribution, "empty support");
  double total = 0.0;
  std::set<Value> seen;
  for (const auto& o : outcomes_) {
    if (!std::isfinite(o.prob) || o.prob < -kMassTolerance || o.prob > 1.0 + kMassTolerance) {
      throw Error(ErrorKind::InvalidDistribution,
                  "probability of " + to_string(o.value) + " outside [0, 1]");
    }
    if (!seen.insert(o.value).second) {
      throw Error(ErrorKind::InvalidDistribution,
                  "outcome " + to_string(o.value) + " listed twice");
    }
    total += o.prob;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw Error(ErrorKind::InvalidDistribution,
                "probabilities sum to " + format_real(total) + ", expected 1");
  }
}

Distribution Distribution::point(Value v) {
  return Distribution(std::vector<Outcome>{{std::move(v), 1.0, Fraction{1, 1}}});
}

double Distribution::prob_of(const Value& v) const {
  for (const auto& o : outcomes_) {
    if (o.value == v) return o.prob;
  }
  return 0.0;
}

std::size_t Distribution::mode_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes_.size(); ++i) {
    if (outcomes_[i].prob > outcomes_[best].prob) best = i;
  }
  return best;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double shift = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - shift);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

bool is_boolean_domain(const DomainDef& d) {
  if (d.elements.size() != 2) return false;
  const bool ints = d.contains(Value::integer(0)) && d.contains(Value::integer(1));
  const bool bools = d.contains(Value::boolean(false)) && d.contains(Value::boolean(true));
  return ints || bools;
}

Value boolean_one(const DomainDef& d) {
  return d.contains(Value::boolean(true)) ? Value::boolean(true) : Value::integer(1);
}

// ---------------------------------------------------------------------------
// Builtins

namespace {

[[noreturn]] void pred_type_error(std::string_view name, std::span<const Value> args) {
  throw Error(ErrorKind::PredTypeError,
              "predicate '" + std::string(name) + "' cannot be applied to " +
                  to_string(ValueTuple(args.begin(), args.end())));
}

int compare_ordered(std::string_view name, std::span<const Value> args) {
  const Value& a = args[0];
  const Value& b = args[1];
  if (a.is_numeric() && b.is_numeric()) {
    const double x = a.numeric();
    const double y = b.numeric();
    return x < y ? -1 : (y < x ? 1 : 0);
  }
  if (a.is_symbol() && b.is_symbol()) return a.as_symbol().compare(b.as_symbol());
  pred_type_error(name, args);
}

PredicateDef builtin(std::string name, std::size_t arity, NativePredicate rule) {
  return PredicateDef{std::move(name), arity, std::move(rule), std::nullopt, {}};
}

std::map<std::string, PredicateDef> builtin_predicates() {
  std::map<std::string, PredicateDef> out;
  auto add = [&](PredicateDef d) { out.emplace(d.name, std::move(d)); };
  add(builtin("true", 1, [](std::span<const Value> a) {
    auto degree = a[0].unit_degree();
    if (!degree || (*degree != 0.0 && *degree != 1.0)) {
      throw Error(ErrorKind::TrueOnNonUnit,
                  "true() expects a value in {0, 1}, got " + to_string(a[0]));
    }
    return *degree == 1.0;
  }));
  add(builtin("eq", 2, [](std::span<const Value> a) { return a[0] == a[1]; }));
  add(builtin("neq", 2, [](std::span<const Value> a) { return a[0] != a[1]; }));
  add(builtin("lt", 2, [](std::span<const Value> a) { return compare_ordered("lt", a) < 0; }));
  add(builtin("leq", 2, [](std::span<const Value> a) { return compare_ordered("leq", a) <= 0; }));
  add(builtin("gt", 2, [](std::span<const Value> a) { return compare_ordered("gt", a) > 0; }));
  add(builtin("geq", 2, [](std::span<const Value> a) { return compare_ordered("geq", a) >= 0; }));
  add(builtin("even", 1, [](std::span<const Value> a) {
    if (!a[0].is_int()) pred_type_error("even", a);
    return a[0].as_int() % 2 == 0;
  }));
  add(builtin("odd", 1, [](std::span<const Value> a) {
    if (!a[0].is_int()) pred_type_error("odd", a);
    return a[0].as_int() % 2 != 0;
  }));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Interpretation

Interpretation::Interpretation()
    : domains_(std::make_shared<std::map<std::string, DomainDef>>()),
      constants_(std::make_shared<std::map<std::string, Value>>()),
      predicates_(std::make_shared<std::map<std::string, PredicateDef>>(builtin_predicates())),
      functions_(std::make_shared<std::map<std::string, FunctionDef>>()),
      theta_(std::make_shared<std::vector<double>>()),
      datasets_(std::make_shared<std::set<std::string>>()) {}

template <class T>
T& Interpretation::unshare(std::shared_ptr<T>& p) {
  if (p.use_count() != 1) p = std::make_shared<T>(*p);
  return *p;
}

const DomainDef& Interpretation::domain(const std::string& name) const {
  auto it = domains_->find(name);
  if (it == domains_->end()) throw Error(ErrorKind::UnknownDomain, "unknown domain '" + name + "'");
  return it->second;
}

const FunctionDef& Interpretation::function(const std::string& name) const {
  auto it = functions_->find(name);
  if (it == functions_->end()) {
    throw Error(ErrorKind::UnknownFunction, "unknown function '" + name + "'");
  }
  return it->second;
}

const PredicateDef& Interpretation::predicate(const std::string& name) const {
  auto it = predicates_->find(name);
  if (it == predicates_->end()) {
    throw Error(ErrorKind::UnknownPredicate, "unknown predicate '" + name + "'");
  }
  return it->second;
}

void Interpretation::set_domain(std::string name, std::vector<Value> elements) {
  std::set<Value> seen;
  for (const auto& e : elements) {
    if (!seen.insert(e).second) {
      throw Error(ErrorKind::Schema,
                  "domain '" + name + "' lists " + to_string(e) + " more than once");
    }
  }
  auto& domains = unshare(domains_);
  DomainDef def{name, std::move(elements)};
  domains.insert_or_assign(std::move(name), std::move(def));
}

void Interpretation::set_infinite_domain(std::string name) {
  DomainDef def{name, {}, false};
  unshare(domains_).insert_or_assign(std::move(name), std::move(def));
}

void Interpretation::mark_dataset(const std::string& name) { unshare(datasets_).insert(name); }

void Interpretation::set_constant(std::string name, Value v) {
  unshare(constants_).insert_or_assign(std::move(name), std::move(v));
}

void Interpretation::set_predicate(PredicateDef def) {
  std::string name = def.name;
  unshare(predicates_).insert_or_assign(std::move(name), std::move(def));
}

void Interpretation::set_function(FunctionDef def) {
  std::string name = def.name;
  unshare(functions_).insert_or_assign(std::move(name), std::move(def));
}

void Interpretation::set_theta(std::vector<double> theta) {
  if (theta.size() != theta_->size()) {
    throw Error(ErrorKind::InvalidConfig, "parameter vector has length " +
                                              std::to_string(theta.size()) + ", expected " +
                                              std::to_string(theta_->size()));
  }
  theta_ = std::make_shared<std::vector<double>>(std::move(theta));
}

void Interpretation::add_parameterised(std::string name, std::vector<std::string> arg_domains,
                                       std::string codomain,
                                       const std::vector<ValueTuple>& inputs,
                                       const std::vector<std::vector<double>>& init) {
  const std::size_t width = domain(codomain).elements.size();
  auto& theta = unshare(theta_);
  FunctionDef::Parameterised kind;
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    if (inputs[r].size() != arg_domains.size()) {
      throw Error(ErrorKind::ArityMismatch, "row " + to_string(inputs[r]) + " of '" + name +
                                                "' does not match its arity");
    }
    const std::size_t offset = theta.size();
    if (!kind.rows.emplace(inputs[r], offset).second) {
      throw Error(ErrorKind::Schema, "duplicate row " + to_string(inputs[r]) + " in '" + name + "'");
    }
    if (r < init.size()) {
      if (init[r].size() != width) {
        throw Error(ErrorKind::Schema, "logit row of '" + name + "' has " +
                                           std::to_string(init[r].size()) + " entries, expected " +
                                           std::to_string(width));
      }
      theta.insert(theta.end(), init[r].begin(), init[r].end());
    } else {
      theta.insert(theta.end(), width, 0.0);
    }
  }
  set_function(FunctionDef{std::move(name), std::move(arg_domains), std::move(codomain),
                           std::move(kind)});
}

bool Interpretation::has_parameters() const {
  return std::any_of(functions_->begin(), functions_->end(),
                     [](const auto& kv) { return kv.second.is_parameterised(); });
}

// ---------------------------------------------------------------------------
// Environments and terms

Env Env::bind(std::string name, Value v) const {
  Env out;
  out.head_ = std::make_shared<const Node>(Node{std::move(name), std::move(v), head_});
  return out;
}

const Value* Env::lookup(std::string_view name) const {
  for (const Node* n = head_.get(); n; n = n->next.get()) {
    if (n->name == name) return &n->value;
  }
  return nullptr;
}

namespace {

Value arith(ArithOp op, const Value& a, const Value& b, Span span) {
  if (!a.is_numeric() || !b.is_numeric()) {
    const char* sym = op == ArithOp::Add ? "+" : op == ArithOp::Sub ? "-" : "*";
    throw Error(ErrorKind::ArithTypeError,
                "cannot apply '" + std::string(sym) + "' to " + to_string(a) + " and " +
                    to_string(b),
                span);
  }
  if (a.is_int() && b.is_int()) {
    std::int64_t out = 0;
    bool overflow = false;
    switch (op) {
      case ArithOp::Add: overflow = __builtin_add_overflow(a.as_int(), b.as_int(), &out); break;
      case ArithOp::Sub: overflow = __builtin_sub_overflow(a.as_int(), b.as_int(), &out); break;
      case ArithOp::Mul: overflow = __builtin_mul_overflow(a.as_int(), b.as_int(), &out); break;
    }
    if (overflow) throw Error(ErrorKind::ArithTypeError, "integer overflow", span);
    return Value::integer(out);
  }
  const double x = a.numeric();
  const double y = b.numeric();
  switch (op) {
    case ArithOp::Add: return Value::real(x + y);
    case ArithOp::Sub: return Value::real(x - y);
    case ArithOp::Mul: return Value::real(x * y);
  }
  return Value{};
}

}  // namespace

Value eval_term(const Term& t, const Interpretation& interp, const Env& env) {
  return std::visit(
      overloaded{
          [&](const VarTerm& x) -> Value {
            if (const Value* v = env.lookup(x.name)) return *v;
            throw Error(ErrorKind::UnboundVariable, "variable '" + x.name + "' is not bound",
                        t->span);
          },
          [&](const ConstTerm& x) -> Value {
            auto it = interp.constants().find(x.name);
            if (it == interp.constants().end()) {
              throw Error(ErrorKind::UnknownConstant, "unknown constant '" + x.name + "'",
                          t->span);
            }
            return it->second;
          },
          [&](const PropAccess& x) -> Value {
            Value base = eval_term(x.base, interp, env);
            if (!base.is_record()) {
              throw Error(ErrorKind::PropertyOnNonRecord,
                          "property '" + x.prop + "' read from non-record " + to_string(base),
                          t->span);
            }
            if (const Value* v = base.field(x.prop)) return *v;
            throw Error(ErrorKind::MissingProperty,
                        "record " + to_string(base) + " has no property '" + x.prop + "'",
                        t->span);
          },
          [&](const ArithTerm& x) -> Value {
            return arith(x.op, eval_term(x.left, interp, env), eval_term(x.right, interp, env),
                         t->span);
          },
          [&](const LiteralTerm& x) -> Value { return x.value; },
      },
      t->node);
}

// ---------------------------------------------------------------------------
// Distributions of functions

Query query(const std::string& f, std::span<const Value> args, const Interpretation& interp,
            Span span) {
  auto it = interp.functions().find(f);
  if (it == interp.functions().end()) {
    throw Error(ErrorKind::UnknownFunction, "unknown function '" + f + "'", span);
  }
  const FunctionDef& def = it->second;
  if (args.size() != def.arity()) {
    throw Error(ErrorKind::ArityMismatch,
                "function '" + f + "' takes " + std::to_string(def.arity()) + " argument(s), got " +
                    std::to_string(args.size()),
                span);
  }
  const ValueTuple key(args.begin(), args.end());
  auto missing = [&]() {
    return Error(ErrorKind::MissingTableRow,
                 "function '" + f + "' has no entry for input " + to_string(key), span);
  };
  return std::visit(
      overloaded{
          [&](const FunctionDef::Builtin& b) { return Query{b.rule(args), std::nullopt}; },
          [&](const FunctionDef::Table& table) {
            auto row = table.rows.find(key);
            if (row == table.rows.end()) throw missing();
            return Query{row->second, std::nullopt};
          },
          [&](const FunctionDef::Parameterised& p) {
            auto row = p.rows.find(key);
            if (row == p.rows.end()) throw missing();
            const DomainDef& codomain = interp.domain(def.codomain);
            const std::size_t width = codomain.elements.size();
            const auto& theta = interp.theta();
            auto probs = softmax(std::span<const double>(theta.data() + row->second, width));
            std::vector<Outcome> outcomes;
            outcomes.reserve(width);
            for (std::size_t i = 0; i < width; ++i) {
              outcomes.push_back({codomain.elements[i], probs[i], std::nullopt});
            }
            return Query{Distribution(std::move(outcomes)), row->second};
          },
          [&](const FunctionDef::Deterministic& d) {
            if (d.table) {
              auto row = d.table->find(key);
              if (row == d.table->end()) throw missing();
              return Query{Distribution::point(row->second), std::nullopt};
            }
            return Query{Distribution::point(d.rule(args)), std::nullopt};
          },
      },
      def.kind);
}

Distribution query_distribution(const std::string& f, std::span<const Value> args,
                                const Interpretation& interp) {
  return query(f, args, interp).dist;
}

bool apply_predicate(const std::string& name, std::span<const Value> args,
                     const Interpretation& interp, Span span) {
  auto it = interp.predicates().find(name);
  if (it == interp.predicates().end()) {
    throw Error(ErrorKind::UnknownPredicate, "unknown predicate '" + name + "'", span);
  }
  const PredicateDef& def = it->second;
  if (def.arity && *def.arity != args.size()) {
    throw Error(ErrorKind::ArityMismatch,
                "predicate '" + name + "' takes " + std::to_string(*def.arity) +
                    " argument(s), got " + std::to_string(args.size()),
                span);
  }
  try {
    return def.rule(args);
  } catch (const Error& e) {
    if (e.span().valid() || !span.valid()) throw;
    throw Error(e.kind(), e.detail(), span);
  }
}

Interpretation mode_interpretation(const Interpretation& interp) {
  Interpretation out = interp;
  for (const auto& [name, def] : interp.functions()) {
    if (std::holds_alternative<FunctionDef::Deterministic>(def.kind)) continue;
    FunctionDef::Deterministic det;
    if (const auto* table = std::get_if<FunctionDef::Table>(&def.kind)) {
      std::map<ValueTuple, Value> modes;
      for (const auto& [key, dist] : table->rows) modes.emplace(key, dist.mode());
      det.table = std::move(modes);
    } else if (std::holds_alternative<FunctionDef::Parameterised>(def.kind)) {
      std::map<ValueTuple, Value> modes;
      for (const auto& [key, offset] : std::get<FunctionDef::Parameterised>(def.kind).rows) {
        modes.emplace(key, query(name, key, interp).dist.mode());
      }
      det.table = std::move(modes);
    } else {
      det.rule = [rule = std::get<FunctionDef::Builtin>(def.kind).rule](std::span<const Value> a) {
        return rule(a).mode();
      };
    }
    out.set_function(FunctionDef{def.name, def.arg_domains, def.codomain, std::move(det)});
  }
  return out;
}

Interpretation restrict_domain(const Interpretation& interp, const std::string& name,
                               const std::vector<Value>& subset) {
  const DomainDef& d = interp.domain(name);
  for (const auto& v : subset) {
    if (!d.contains(v)) {
      throw Error(ErrorKind::UnknownDomainElement,
                  to_string(v) + " is not an element of domain '" + name + "'");
    }
  }
  Interpretation out = interp;
  out.set_domain(name, subset);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::Schema, (path.empty() ? std::string("/") : path) + ": " + message);
}

std::string child(const std::string& path, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') escaped += "~0";
    else if (c == '/') escaped += "~1";
    else escaped += c;
  }
  return path + "/" + escaped;
}

const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) schema_error(path, std::string("missing key '") + key + "'");
  return j.at(key);
}

std::optional<Fraction> parse_fraction(const std::string& text) {
  auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) return std::nullopt;
    Fraction f{std::stoll(text.substr(0, slash), &used), std::stoll(text.substr(slash + 1))};
    if (used != slash || f.den <= 0 || f.num < 0) return std::nullopt;
    return f;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

Outcome probability_from_json(const nlohmann::json& j, Value value, const std::string& path) {
  if (j.is_number()) {
    const double p = j.get<double>();
    std::optional<Fraction> exact;
    if (j.is_number_integer()) exact = Fraction{j.get<std::int64_t>(), 1};
    return {std::move(value), p, exact};
  }
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    if (auto f = parse_fraction(text)) {
      return {std::move(value), static_cast<double>(f->num) / static_cast<double>(f->den), f};
    }
    try {
      std::size_t used = 0;
      double p = std::stod(text, &used);
      if (used == text.size()) return {std::move(value), p, std::nullopt};
    } catch (const std::exception&) {
    }
  }
  schema_error(path, "expected a probability (number or \"p/q\")");
}

ValueTuple tuple_from_key(const std::string& key, std::size_t arity, const std::string& path) {
  nlohmann::json parsed = nlohmann::json::parse(key, nullptr, false);
  if (!parsed.is_discarded() && parsed.is_array()) {
    ValueTuple out;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      out.push_back(value_from_json(parsed[i], path + "[" + std::to_string(i) + "]"));
    }
    if (out.size() != arity) {
      schema_error(path, "row key has " + std::to_string(out.size()) + " argument(s), expected " +
                             std::to_string(arity));
    }
    return out;
  }
  if (arity == 0 && key.empty()) return {};
  if (arity != 1) schema_error(path, "row key must be a JSON array of " + std::to_string(arity) + " values");
  if (parsed.is_discarded()) return {Value::symbol(key)};
  return {value_from_json(parsed, path)};
}

std::string key_from_tuple(const ValueTuple& t) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : t) arr.push_back(value_to_json(v));
  return arr.dump();
}

Distribution distribution_from_json(const nlohmann::json& j, const DomainDef& codomain,
                                    const std::string& path) {
  std::vector<Outcome> outcomes;
  for (const auto& e : codomain.elements) outcomes.push_back({e, 0.0, Fraction{0, 1}});
  if (j.is_array()) {
    if (j.size() != codomain.elements.size()) {
      schema_error(path, "expected " + std::to_string(codomain.elements.size()) +
                             " probabilities (one per element of '" + codomain.name + "')");
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      auto o = probability_from_json(j[i], codomain.elements[i], path + "/" + std::to_string(i));
      outcomes[i] = std::move(o);
    }
  } else if (j.is_object()) {
    for (const auto& [key, prob] : j.items()) {
      Value v = tuple_from_key(key, 1, child(path, key)).front();
      auto idx = codomain.index_of(v);
      if (!idx) schema_error(child(path, key), to_string(v) + " is not in codomain '" + codomain.name + "'");
      outcomes[*idx] = probability_from_json(prob, v, child(path, key));
    }
  } else {
    schema_error(path, "expected an array or object of probabilities");
  }
  try {
    return Distribution(std::move(outcomes));
  } catch (const Error& e) {
    schema_error(path, e.detail());
  }
}

std::vector<ValueTuple> all_inputs(const Interpretation& interp,
                                   const std::vector<std::string>& arg_domains) {
  std::vector<ValueTuple> out{{}};
  for (const auto& name : arg_domains) {
    std::vector<ValueTuple> next;
    for (const auto& prefix : out) {
      for (const auto& e : interp.domain(name).elements) {
        auto t = prefix;
        t.push_back(e);
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<std::string> string_list(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of domain names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) schema_error(path + "/" + std::to_string(i), "expected a domain name");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

void load_function(Interpretation& interp, const std::string& name, const nlohmann::json& j,
                   const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  std::vector<std::string> args;
  if (j.contains("args")) args = string_list(j.at("args"), child(path, "args"));
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!interp.domains().count(args[i])) {
      schema_error(child(path, "args") + "/" + std::to_string(i), "unknown domain '" + args[i] + "'");
    }
  }
  const auto& codomain_json = require(j, "codomain", path);
  if (!codomain_json.is_string()) schema_error(child(path, "codomain"), "expected a domain name");
  const std::string codomain_name = codomain_json.get<std::string>();
  if (!interp.domains().count(codomain_name)) {
    schema_error(child(path, "codomain"), "unknown domain '" + codomain_name + "'");
  }
  const DomainDef& codomain = interp.domain(codomain_name);
  const auto& kind_json = require(j, "kind", path);
  const std::string kind = kind_json.is_string() ? kind_json.get<std::string>() : "";
  const std::string rows_path = child(path, "rows");
  if (!codomain.enumerable) {
    schema_error(child(path, "codomain"), "codomain '" + codomain_name + "' is not enumerable");
  }
  const nlohmann::json empty = nlohmann::json::object();
  const nlohmann::json& rows = j.contains("rows") ? j.at("rows") : empty;
  if (!rows.is_object()) schema_error(rows_path, "expected an object keyed by argument tuples");

  auto check_inputs = [&](const ValueTuple& t, const std::string& p) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!interp.domain(args[i]).contains(t[i])) {
        schema_error(p, to_string(t[i]) + " is not an element of domain '" + args[i] + "'");
      }
    }
  };

  if (kind == "table") {
    FunctionDef::Table table;
    for (const auto& [key, row] : rows.items()) {
      const std::string p = child(rows_path, key);
      ValueTuple t = tuple_from_key(key, args.size(), p);
      check_inputs(t, p);
      table.rows.insert_or_assign(std::move(t), distribution_from_json(row, codomain, p));
    }
    interp.set_function(FunctionDef{name, args, codomain_name, std::move(table)});
  } else if (kind == "parameterised") {
    std::vector<ValueTuple> inputs;
    std::vector<std::vector<double>> init;
    if (!j.contains("rows")) {
      inputs = all_inputs(interp, args);
    }
    for (const auto& [key, row] : rows.items()) {
      const std::string p = child(rows_path, key);
      ValueTuple t = tuple_from_key(key, args.size(), p);
      check_inputs(t, p);
      if (!row.is_array() || row.size() != codomain.elements.size()) {
        schema_error(p, "expected " + std::to_string(codomain.elements.size()) + " logits");
      }
      std::vector<double> logits;
      for (const auto& x : row) {
        if (!x.is_number()) schema_error(p, "logits must be numbers");
        logits.push_back(x.get<double>());
      }
      inputs.push_back(std::move(t));
      init.push_back(std::move(logits));
    }
    try {
      interp.add_parameterised(name, args, codomain_name, inputs, init);
    } catch (const Error& e) {
      schema_error(rows_path, e.detail());
    }
  } else if (kind == "deterministic_table") {
    std::map<ValueTuple, Value> table;
    for (const auto& [key, row] : rows.items()) {
      const std::string p = child(rows_path, key);
      ValueTuple t = tuple_from_key(key, args.size(), p);
      check_inputs(t, p);
      Value out = value_from_json(row, p);
      if (!codomain.contains(out)) {
        schema_error(p, to_string(out) + " is not in codomain '" + codomain_name + "'");
      }
      table.insert_or_assign(std::move(t), std::move(out));
    }
    interp.set_function(FunctionDef{name, args, codomain_name,
                                    FunctionDef::Deterministic{nullptr, std::move(table)}});
  } else {
    schema_error(child(path, "kind"),
                 "expected \"table\", \"parameterised\" or \"deterministic_table\"");
  }
}

void load_predicate(Interpretation& interp, const std::string& name, const nlohmann::json& j,
                    const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  std::vector<std::string> args;
  if (j.contains("args")) args = string_list(j.at("args"), child(path, "args"));
  const auto& truths = require(j, "true", path);
  if (!truths.is_array()) schema_error(child(path, "true"), "expected an array of argument tuples");
  std::set<ValueTuple> tuples;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const std::string p = child(path, "true") + "/" + std::to_string(i);
    const auto& t = truths[i];
    ValueTuple tuple;
    if (t.is_array()) {
      for (std::size_t k = 0; k < t.size(); ++k) tuple.push_back(value_from_json(t[k], p));
    } else {
      tuple.push_back(value_from_json(t, p));
    }
    if (tuple.size() != args.size()) schema_error(p, "tuple arity does not match 'args'");
    tuples.insert(std::move(tuple));
  }
  auto shared = std::make_shared<const std::set<ValueTuple>>(tuples);
  interp.set_predicate(PredicateDef{
      name, args.size(),
      [shared](std::span<const Value> a) { return shared->count(ValueTuple(a.begin(), a.end())) > 0; },
      std::move(tuples), std::move(args)});
}

}  // namespace

Value value_from_json(const nlohmann::json& j, const std::string& path) {
  switch (j.type()) {
    case nlohmann::json::value_t::boolean: return Value::boolean(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
    case nlohmann::json::value_t::number_unsigned: return Value::integer(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_float: return Value::real(j.get<double>());
    case nlohmann::json::value_t::string: return Value::symbol(j.get<std::string>());
    case nlohmann::json::value_t::object: {
      RecordFields fields;
      for (const auto& [k, v] : j.items()) fields.emplace(k, value_from_json(v, child(path, k)));
      return Value::record(std::move(fields));
    }
    default: schema_error(path, "expected a number, boolean, string or object");
  }
}

nlohmann::json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int: return v.as_int();
    case Value::Kind::Real: return v.as_real();
    case Value::Kind::Bool: return v.as_bool();
    case Value::Kind::Symbol: return v.as_symbol();
    case Value::Kind::Record: {
      nlohmann::json out = nlohmann::json::object();
      for (const auto& [k, field] : v.as_record()) out[k] = value_to_json(field);
      return out;
    }
  }
  return nullptr;
}

Interpretation interpretation_from_json(const nlohmann::json& j) {
  if (!j.is_object()) schema_error("", "expected a JSON object");
  static const std::set<std::string> known = {"domains", "constants", "predicates", "functions",
                                              "datasets"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) schema_error(child("", key), "unknown key");
  }
  Interpretation interp;
  auto section = [&](const char* key) -> const nlohmann::json* {
    if (!j.contains(key)) return nullptr;
    if (!j.at(key).is_object()) schema_error(child("", key), "expected an object");
    return &j.at(key);
  };
  auto load_domains = [&](const nlohmann::json& items, const std::string& base, bool dataset) {
    for (const auto& [name, elems] : items.items()) {
      const std::string p = child(base, name);
      if (!dataset && elems.is_string() && elems.get<std::string>() == "infinite") {
        interp.set_infinite_domain(name);
        continue;
      }
      if (!elems.is_array()) schema_error(p, "expected an array of values");
      std::vector<Value> values;
      for (std::size_t i = 0; i < elems.size(); ++i) {
        values.push_back(value_from_json(elems[i], p + "/" + std::to_string(i)));
      }
      try {
        interp.set_domain(name, std::move(values));
      } catch (const Error& e) {
        schema_error(p, e.detail());
      }
      if (dataset) interp.mark_dataset(name);
    }
  };
  if (const auto* d = section("domains")) load_domains(*d, "/domains", false);
  if (const auto* d = section("datasets")) load_domains(*d, "/datasets", true);
  if (const auto* c = section("constants")) {
    for (const auto& [name, v] : c->items()) {
      interp.set_constant(name, value_from_json(v, child("/constants", name)));
    }
  }
  if (const auto* p = section("predicates")) {
    for (const auto& [name, def] : p->items()) {
      load_predicate(interp, name, def, child("/predicates", name));
    }
  }
  if (const auto* f = section("functions")) {
    for (const auto& [name, def] : f->items()) {
      load_function(interp, name, def, child("/functions", name));
    }
  }
  return interp;
}

Interpretation load_interpretation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open interpretation file '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorKind::Schema, path + ": malformed JSON");
  }
  return interpretation_from_json(j);
}

Interpretation with_datasets(const Interpretation& interp, const nlohmann::json& data) {
  if (!data.is_object()) schema_error("", "expected a JSON object");
  const nlohmann::json& sets = data.contains("datasets") ? data.at("datasets") : data;
  const std::string base = data.contains("datasets") ? "/datasets" : "";
  if (!sets.is_object()) schema_error(base, "expected an object of datasets");
  Interpretation out = interp;
  for (const auto& [name, elems] : sets.items()) {
    const std::string p = child(base, name);
    if (!elems.is_array()) schema_error(p, "expected an array of records");
    std::vector<Value> values;
    for (std::size_t i = 0; i < elems.size(); ++i) {
      values.push_back(value_from_json(elems[i], p + "/" + std::to_string(i)));
    }
    try {
      out.set_domain(name, std::move(values));
    } catch (const Error& e) {
      schema_error(p, e.detail());
    }
    out.mark_dataset(name);
  }
  return out;
}

nlohmann::json interpretation_to_json(const Interpretation& interp) {
  nlohmann::json out = nlohmann::json::object();
  nlohmann::json domains = nlohmann::json::object();
  nlohmann::json datasets = nlohmann::json::object();
  for (const auto& [name, d] : interp.domains()) {
    if (!d.enumerable) {
      domains[name] = "infinite";
      continue;
    }
    nlohmann::json elems = nlohmann::json::array();
    for (const auto& e : d.elements) elems.push_back(value_to_json(e));
    (interp.dataset_names().count(name) ? datasets : domains)[name] = std::move(elems);
  }
  out["domains"] = std::move(domains);
  if (!datasets.empty()) out["datasets"] = std::move(datasets);
  if (!interp.constants().empty()) {
    nlohmann::json constants = nlohmann::json::object();
    for (const auto& [name, v] : interp.constants()) constants[name] = value_to_json(v);
    out["constants"] = std::move(constants);
  }
  nlohmann::json predicates = nlohmann::json::object();
  for (const auto& [name, p] : interp.predicates()) {
    if (!p.true_tuples) continue;
    nlohmann::json truths = nlohmann::json::array();
    for (const auto& t : *p.true_tuples) {
      nlohmann::json tuple = nlohmann::json::array();
      for (const auto& v : t) tuple.push_back(value_to_json(v));
      truths.push_back(std::move(tuple));
    }
    predicates[name] = {{"args", p.arg_domains}, {"true", std::move(truths)}};
  }
  if (!predicates.empty()) out["predicates"] = std::move(predicates);
  nlohmann::json functions = nlohmann::json::object();
  for (const auto& [name, f] : interp.functions()) {
    nlohmann::json def = {{"args", f.arg_domains}, {"codomain", f.codomain}};
    nlohmann::json rows = nlohmann::json::object();
    bool serialisable = true;
    std::visit(overloaded{
                   [&](const FunctionDef::Builtin&) { serialisable = false; },
                   [&](const FunctionDef::Table& t) {
                     def["kind"] = "table";
                     for (const auto& [key, dist] : t.rows) {
                       nlohmann::json probs = nlohmann::json::array();
                       for (const auto& o : dist.outcomes()) {
                         if (o.exact && o.exact->den != 1) {
                           probs.push_back(std::to_string(o.exact->num) + "/" +
                                           std::to_string(o.exact->den));
                         } else {
                           probs.push_back(o.prob);
                         }
                       }
                       rows[key_from_tuple(key)] = std::move(probs);
                     }
                   },
                   [&](const FunctionDef::Parameterised& p) {
                     def["kind"] = "parameterised";
                     const std::size_t width = interp.domain(f.codomain).elements.size();
                     for (const auto& [key, offset] : p.rows) {
                       rows[key_from_tuple(key)] =
                           std::vector<double>(interp.theta().begin() + offset,
                                               interp.theta().begin() + offset + width);
                     }
                   },
                   [&](const FunctionDef::Deterministic& d) {
                     if (!d.table) {
                       serialisable = false;
                       return;
                     }
                     def["kind"] = "deterministic_table";
                     for (const auto& [key, v] : *d.table) rows[key_from_tuple(key)] = value_to_json(v);
                   },
               },
               f.kind);
    if (!serialisable) continue;
    def["rows"] = std::move(rows);
    functions[name] = std::move(def);
  }
  out["functions"] = std::move(functions);
  return out;
}

// ---------------------------------------------------------------------------
// Static checks

namespace {

void check_term(const Term& t, const Interpretation& interp, std::vector<Error>& out) {
  std::visit(overloaded{
                 [&](const ConstTerm& c) {
                   if (!interp.constants().count(c.name)) {
                     out.emplace_back(ErrorKind::UnknownConstant,
                                      "unknown constant '" + c.name + "'", t->span);
                   }
                 },
                 [&](const PropAccess& p) { check_term(p.base, interp, out); },
                 [&](const ArithTerm& a) {
                   check_term(a.left, interp, out);
                   check_term(a.right, interp, out);
                 },
                 [&](const auto&) {},
             },
             t->node);
}

void check_formula(const Formula& f, const Interpretation& interp, std::vector<Error>& out) {
  auto domain = [&](const std::string& name) {
    if (!interp.domains().count(name)) {
      out.emplace_back(ErrorKind::UnknownDomain, "unknown domain '" + name + "'", f->span);
    }
  };
  std::visit(overloaded{
                 [&](const ForAll& q) {
                   domain(q.domain);
                   check_formula(q.body, interp, out);
                 },
                 [&](const Exists& q) {
                   domain(q.domain);
                   check_formula(q.body, interp, out);
                 },
                 [&](const Not& n) { check_formula(n.operand, interp, out); },
                 [&](const Pred& p) {
                   for (const auto& a : p.args) check_term(a, interp, out);
                   auto it = interp.predicates().find(p.name);
                   if (it == interp.predicates().end()) {
                     out.emplace_back(ErrorKind::UnknownPredicate,
                                      "unknown predicate '" + p.name + "'", f->span);
                   } else if (it->second.arity && *it->second.arity != p.args.size()) {
                     out.emplace_back(ErrorKind::ArityMismatch,
                                      "predicate '" + p.name + "' takes " +
                                          std::to_string(*it->second.arity) + " argument(s), got " +
                                          std::to_string(p.args.size()),
                                      f->span);
                   }
                 },
                 [&](const Statement& s) {
                   for (const auto& a : s.args) check_term(a, interp, out);
                   auto it = interp.functions().find(s.func);
                   if (it == interp.functions().end()) {
                     out.emplace_back(ErrorKind::UnknownFunction,
                                      "unknown function '" + s.func + "'", f->span);
                   } else if (it->second.arity() != s.args.size()) {
                     out.emplace_back(ErrorKind::ArityMismatch,
                                      "function '" + s.func + "' takes " +
                                          std::to_string(it->second.arity()) +
                                          " argument(s), got " + std::to_string(s.args.size()),
                                      f->span);
                   }
                   check_formula(s.body, interp, out);
                 },
                 [&](const auto& b) {
                   check_formula(b.left, interp, out);
                   check_formula(b.right, interp, out);
                 },
             },
             f->node);
}

}  // namespace

std::vector<Error> check_program(const Formula& f, const Interpretation& interp) {
  std::vector<Error> out;
  check_formula(f, interp, out);
  for (const auto& v : free_variables(f)) {
    out.emplace_back(ErrorKind::UnboundVariable, "free variable '" + v + "'");
  }
  return out;
}

}  // namespace uller
