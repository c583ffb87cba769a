#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace uller {

class Value;

struct Symbol {
  std::string name;
  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

using RecordFields = std::map<std::string, Value, std::less<>>;

/// Runtime domain element. Values are immutable; records share their field
/// map. Equality is structural and never coerces between Int and Real.
class Value {
 public:
  enum class Kind { Int, Real, Bool, Symbol, Record };

  Value() : data_(std::int64_t{0}) {}
  static Value integer(std::int64_t v) { return Value(Data(v)); }
  static Value real(double v) { return Value(Data(v)); }
  static Value boolean(bool v) { return Value(Data(v)); }
  static Value symbol(std::string name) { return Value(Data(Symbol{std::move(name)})); }
  static Value record(RecordFields fields);

  Kind kind() const { return static_cast<Kind>(data_.index()); }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_real() const { return kind() == Kind::Real; }
  bool is_bool() const { return kind() == Kind::Bool; }
  bool is_symbol() const { return kind() == Kind::Symbol; }
  bool is_record() const { return kind() == Kind::Record; }
  bool is_numeric() const { return is_int() || is_real(); }

  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  double as_real() const { return std::get<double>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  const std::string& as_symbol() const { return std::get<Symbol>(data_).name; }
  const RecordFields& as_record() const { return *std::get<RecordPtr>(data_); }

  /// Int or Real widened to double.
  double numeric() const { return is_int() ? static_cast<double>(as_int()) : as_real(); }

  /// Field lookup on records; nullptr when absent.
  const Value* field(std::string_view name) const;

  /// Truth reading used by `true`: Bool, Int 0/1 and Real in [0,1].
  std::optional<double> unit_degree() const;

  friend bool operator==(const Value& a, const Value& b);
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

 private:
  using RecordPtr = std::shared_ptr<const RecordFields>;
  using Data = std::variant<std::int64_t, double, bool, Symbol, RecordPtr>;

  explicit Value(Data d) : data_(std::move(d)) {}

  Data data_;
};

using ValueTuple = std::vector<Value>;

/// Human-readable rendering, also the concrete-syntax form of literals.
std::string to_string(const Value& v);
std::string to_string(const ValueTuple& values);

/// Shortest decimal text that reads back to exactly `v`, always containing a
/// '.' or exponent so it lexes as a real.
std::string format_real(double v);

}  // namespace uller
