#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace uller {

/// Sparse gradient vector: (parameter index, partial derivative) pairs sorted
/// by index. Programs touch few logit rows per statement, so tangents stay
/// short even when theta is large.
class Tangent {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  Tangent() = default;
  explicit Tangent(std::vector<Entry> sorted_entries) : entries_(std::move(sorted_entries)) {}

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  /// alpha * a + beta * b
  static Tangent combine(double alpha, const Tangent& a, double beta, const Tangent& b);
  Tangent scaled(double s) const;

  /// Adds `scale * this` into a dense vector.
  void accumulate(std::vector<double>& dense, double scale = 1.0) const;
  std::vector<double> to_dense(std::size_t n) const;

 private:
  std::vector<Entry> entries_;
};

/// value + tangent * epsilon, epsilon^2 = 0.
struct Dual {
  double value = 0.0;
  Tangent grad;

  Dual() = default;
  Dual(double v) : value(v) {}  // NOLINT: constants promote implicitly
  Dual(double v, Tangent g) : value(v), grad(std::move(g)) {}
};

inline Dual operator+(const Dual& a, const Dual& b) {
  return {a.value + b.value, Tangent::combine(1.0, a.grad, 1.0, b.grad)};
}
inline Dual operator-(const Dual& a, const Dual& b) {
  return {a.value - b.value, Tangent::combine(1.0, a.grad, -1.0, b.grad)};
}
inline Dual operator*(const Dual& a, const Dual& b) {
  return {a.value * b.value, Tangent::combine(b.value, a.grad, a.value, b.grad)};
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.value; }

}  // namespace uller
