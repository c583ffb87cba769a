#include "uller/dual.hpp"

namespace uller {

Tangent Tangent::combine(double alpha, const Tangent& a, double beta, const Tangent& b) {
  std::vector<Entry> out;
  out.reserve(a.entries_.size() + b.entries_.size());
  auto ia = a.entries_.begin();
  auto ib = b.entries_.begin();
  while (ia != a.entries_.end() || ib != b.entries_.end()) {
    if (ib == b.entries_.end() || (ia != a.entries_.end() && ia->first < ib->first)) {
      if (alpha != 0.0) out.emplace_back(ia->first, alpha * ia->second);
      ++ia;
    } else if (ia == a.entries_.end() || ib->first < ia->first) {
      if (beta != 0.0) out.emplace_back(ib->first, beta * ib->second);
      ++ib;
    } else {
      out.emplace_back(ia->first, alpha * ia->second + beta * ib->second);
      ++ia;
      ++ib;
    }
  }
  return Tangent(std::move(out));
}

Tangent Tangent::scaled(double s) const {
  if (s == 0.0) return {};
  std::vector<Entry> out = entries_;
  for (auto& e : out) e.second *= s;
  return Tangent(std::move(out));
}

void Tangent::accumulate(std::vector<double>& dense, double scale) const {
  for (const auto& [i, d] : entries_) dense.at(i) += scale * d;
}

std::vector<double> Tangent::to_dense(std::size_t n) const {
  std::vector<double> out(n, 0.0);
  accumulate(out);
  return out;
}

}  // namespace uller
