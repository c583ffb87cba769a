#include "uller/value.hpp"

#include <charconv>
#include <cmath>

namespace uller {

Value Value::record(RecordFields fields) {
  return Value(Data(std::make_shared<const RecordFields>(std::move(fields))));
}

const Value* Value::field(std::string_view name) const {
  if (!is_record()) return nullptr;
  const auto& fields = as_record();
  auto it = fields.find(name);
  return it == fields.end() ? nullptr : &it->second;
}

std::optional<double> Value::unit_degree() const {
  switch (kind()) {
    case Kind::Bool:
      return as_bool() ? 1.0 : 0.0;
    case Kind::Int:
      if (as_int() == 0 || as_int() == 1) return static_cast<double>(as_int());
      return std::nullopt;
    case Kind::Real:
      if (as_real() >= 0.0 && as_real() <= 1.0) return as_real();
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

namespace {

std::strong_ordering compare_real(double a, double b) {
  // Total order; NaN never occurs in validated domains but must not break maps.
  if (std::isnan(a) || std::isnan(b)) {
    return std::isnan(a) == std::isnan(b) ? std::strong_ordering::equal
           : std::isnan(a)                ? std::strong_ordering::greater
                                          : std::strong_ordering::less;
  }
  if (a < b) return std::strong_ordering::less;
  if (b < a) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return a.data_.index() <=> b.data_.index();
  switch (a.kind()) {
    case Value::Kind::Int: return a.as_int() <=> b.as_int();
    case Value::Kind::Real: return compare_real(a.as_real(), b.as_real());
    case Value::Kind::Bool: return a.as_bool() <=> b.as_bool();
    case Value::Kind::Symbol: return a.as_symbol() <=> b.as_symbol();
    case Value::Kind::Record: {
      const auto& fa = a.as_record();
      const auto& fb = b.as_record();
      auto ia = fa.begin();
      auto ib = fb.begin();
      for (; ia != fa.end() && ib != fb.end(); ++ia, ++ib) {
        if (auto c = ia->first <=> ib->first; c != 0) return c;
        if (auto c = ia->second <=> ib->second; c != 0) return c;
      }
      return fa.size() <=> fb.size();
    }
  }
  return std::strong_ordering::equal;
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string out(buf, end);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string to_string(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int: return std::to_string(v.as_int());
    case Value::Kind::Real: return format_real(v.as_real());
    case Value::Kind::Bool: return v.as_bool() ? "true" : "false";
    case Value::Kind::Symbol: return quote(v.as_symbol());
    case Value::Kind::Record: {
      std::string out = "{";
      bool first = true;
      for (const auto& [k, field] : v.as_record()) {
        if (!first) out += ", ";
        first = false;
        out += k + ": " + to_string(field);
      }
      return out + "}";
    }
  }
  return "?";
}

std::string to_string(const ValueTuple& values) {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += to_string(values[i]);
  }
  return out + ")";
}

}  // namespace uller
