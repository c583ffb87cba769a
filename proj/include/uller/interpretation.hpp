#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "uller/error.hpp"
#include "uller/syntax.hpp"
#include "uller/value.hpp"

namespace uller {

/// Tolerance on the total mass of a distribution.
inline constexpr double kMassTolerance = 1e-9;

/// Exact probability when the source supplied one (e.g. "1/6" in JSON).
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

struct DomainDef {
  std::string name;
  std::vector<Value> elements;  // declared order drives argmax tie-breaking
  /// False for declared-but-infinite domains (e.g. the reals); such domains
  /// cannot be quantified over or used as a random codomain.
  bool enumerable = true;

  std::optional<std::size_t> index_of(const Value& v) const;
  bool contains(const Value& v) const { return index_of(v).has_value(); }
};

struct Outcome {
  Value value;
  double prob = 0.0;
  std::optional<Fraction> exact;
};

/// Finite-support distribution. Outcomes follow codomain order; the mass
/// invariant is checked on construction.
class Distribution {
 public:
  Distribution() = default;
  /// Throws Error{InvalidDistribution} on negative mass, duplicates, or a
  /// total differing from 1 by more than kMassTolerance.
  explicit Distribution(std::vector<Outcome> outcomes);

  static Distribution point(Value v);

  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  std::size_t size() const { return outcomes_.size(); }
  double prob_of(const Value& v) const;
  /// Index of the most probable outcome, lowest index on ties.
  std::size_t mode_index() const;
  const Value& mode() const { return outcomes_.at(mode_index()).value; }

 private:
  std::vector<Outcome> outcomes_;
};

using NativePredicate = std::function<bool(std::span<const Value>)>;
using NativeDistribution = std::function<Distribution(std::span<const Value>)>;
using NativeRule = std::function<Value(std::span<const Value>)>;

struct PredicateDef {
  std::string name;
  std::optional<std::size_t> arity;  // nullopt: variadic
  NativePredicate rule;
  /// Extensional definition when loaded from JSON (for round-tripping).
  std::optional<std::set<ValueTuple>> true_tuples;
  std::vector<std::string> arg_domains;
};

struct FunctionDef {
  struct Builtin {
    NativeDistribution rule;
  };
  struct Table {
    std::map<ValueTuple, Distribution> rows;
  };
  /// Softmax over a row of logits stored in the interpretation's parameter
  /// vector; `rows` maps an input tuple to the offset of its row.
  struct Parameterised {
    std::map<ValueTuple, std::size_t> rows;
  };
  struct Deterministic {
    NativeRule rule;
    std::optional<std::map<ValueTuple, Value>> table;
  };

  std::string name;
  std::vector<std::string> arg_domains;
  std::string codomain;
  std::variant<Builtin, Table, Parameterised, Deterministic> kind;

  std::size_t arity() const { return arg_domains.size(); }
  bool is_parameterised() const { return std::holds_alternative<Parameterised>(kind); }
};

/// Result of asking an interpretation for p_f(. | args): the distribution,
/// plus where its logits live in theta when the function is parameterised.
struct Query {
  Distribution dist;
  std::optional<std::size_t> theta_offset;
};

/// Meaning of every domain, constant, predicate and function symbol, plus the
/// parameter vector of parameterised functions. Cheap to copy: parts are
/// shared and copied only when modified.
class Interpretation {
 public:
  /// Starts with the builtin predicates `true`, `eq`, `neq`, `lt`, `leq`,
  /// `gt`, `geq`, `even`, `odd`.
  Interpretation();

  const std::map<std::string, DomainDef>& domains() const { return *domains_; }
  const std::map<std::string, Value>& constants() const { return *constants_; }
  const std::map<std::string, PredicateDef>& predicates() const { return *predicates_; }
  const std::map<std::string, FunctionDef>& functions() const { return *functions_; }
  const std::vector<double>& theta() const { return *theta_; }
  const std::set<std::string>& dataset_names() const { return *datasets_; }

  const DomainDef& domain(const std::string& name) const;
  const FunctionDef& function(const std::string& name) const;
  const PredicateDef& predicate(const std::string& name) const;

  void set_domain(std::string name, std::vector<Value> elements);
  void set_infinite_domain(std::string name);
  void mark_dataset(const std::string& name);
  void set_constant(std::string name, Value v);
  void set_predicate(PredicateDef def);
  void set_function(FunctionDef def);
  void set_theta(std::vector<double> theta);

  /// Registers a parameterised function with one logit row per input tuple;
  /// rows are appended to theta (initialised to `init` if given, else 0).
  void add_parameterised(std::string name, std::vector<std::string> arg_domains,
                         std::string codomain, const std::vector<ValueTuple>& inputs,
                         const std::vector<std::vector<double>>& init = {});

  bool has_parameters() const;

 private:
  // Copies share parts; a part is cloned before its first mutation.
  template <class T>
  static T& unshare(std::shared_ptr<T>& p);

  std::shared_ptr<std::map<std::string, DomainDef>> domains_;
  std::shared_ptr<std::map<std::string, Value>> constants_;
  std::shared_ptr<std::map<std::string, PredicateDef>> predicates_;
  std::shared_ptr<std::map<std::string, FunctionDef>> functions_;
  std::shared_ptr<std::vector<double>> theta_;
  std::shared_ptr<std::set<std::string>> datasets_;
};

/// Variable assignment eta. Binding returns a new environment and leaves the
/// original untouched.
class Env {
 public:
  Env() = default;
  [[nodiscard]] Env bind(std::string name, Value v) const;
  const Value* lookup(std::string_view name) const;

 private:
  struct Node {
    std::string name;
    Value value;
    std::shared_ptr<const Node> next;
  };
  std::shared_ptr<const Node> head_;
};

Value eval_term(const Term& t, const Interpretation& interp, const Env& env);

/// p_f(. | args). Throws UnknownFunction, ArityMismatch, MissingTableRow.
Distribution query_distribution(const std::string& f, std::span<const Value> args,
                                const Interpretation& interp);
Query query(const std::string& f, std::span<const Value> args, const Interpretation& interp,
            Span span = {});

/// Softmax with the max-shift for stability.
std::vector<double> softmax(std::span<const double> logits);

/// Applies a predicate symbol to evaluated arguments.
bool apply_predicate(const std::string& name, std::span<const Value> args,
                     const Interpretation& interp, Span span = {});

/// Every function replaced by the point mass on its mode (lowest codomain
/// index on ties). Parameterised functions are frozen at the current theta.
Interpretation mode_interpretation(const Interpretation& interp);

/// Replaces the elements of one domain with a subset of them.
/// Throws UnknownDomain, UnknownDomainElement.
Interpretation restrict_domain(const Interpretation& interp, const std::string& name,
                               const std::vector<Value>& subset);

/// True when the domain is {0, 1} (as Int) or {false, true}.
bool is_boolean_domain(const DomainDef& d);
/// The element read as "1" in a boolean domain.
Value boolean_one(const DomainDef& d);

// JSON interchange -----------------------------------------------------------

Value value_from_json(const nlohmann::json& j, const std::string& path = "");
nlohmann::json value_to_json(const Value& v);

/// Throws Error{Schema} naming the offending JSON path. A domain given as the
/// string "infinite" is declared without elements.
Interpretation interpretation_from_json(const nlohmann::json& j);
Interpretation load_interpretation(const std::string& path);
/// Serialises everything expressible in the schema; native rules are skipped.
nlohmann::json interpretation_to_json(const Interpretation& interp);

/// Adds `{"datasets": {...}}` (or a bare `{name: [records]}` object) from a
/// data file as domains of `interp`.
Interpretation with_datasets(const Interpretation& interp, const nlohmann::json& data);

/// Static cross-check of a program against an interpretation: referenced
/// domains, constants, predicates and functions exist with matching arity.
/// Returns one Error per problem; empty when consistent.
std::vector<Error> check_program(const Formula& f, const Interpretation& interp);

}  // namespace uller
