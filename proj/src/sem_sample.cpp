#include "uller/sem_sample.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "classical_walker.hpp"
#include "uller/dual.hpp"

namespace uller {

std::uint64_t RngStream::mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t RngStream::next() {
  std::uint64_t out = mix(state_);
  state_ += 0x9e3779b97f4a7c15ULL;
  return out;
}

double RngStream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

RngStream RngStream::child(std::uint64_t key) const {
  return RngStream(mix(state_ ^ mix(key + 0x632be59bd9b4e019ULL)));
}

std::size_t sample_index(const Distribution& d, double u) {
  const auto& outcomes = d.outcomes();
  double cum = 0.0;
  std::size_t last = outcomes.size();
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (outcomes[k].prob <= 0.0) continue;
    cum += outcomes[k].prob;
    last = k;
    if (u < cum) return k;
  }
  if (last == outcomes.size()) {
    throw Error(ErrorKind::InvalidDistribution, "cannot sample from an empty distribution");
  }
  return last;  // u beyond a total slightly below 1
}

namespace {

using NodeIds = std::unordered_map<const FormulaNode*, std::uint32_t>;

void number_statements(const Formula& f, NodeIds& ids) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ForAll> || std::is_same_v<N, Exists>) {
          number_statements(n.body, ids);
        } else if constexpr (std::is_same_v<N, And> || std::is_same_v<N, Or> ||
                             std::is_same_v<N, Implies>) {
          number_statements(n.left, ids);
          number_statements(n.right, ids);
        } else if constexpr (std::is_same_v<N, Not>) {
          number_statements(n.operand, ids);
        } else if constexpr (std::is_same_v<N, Statement>) {
          ids.emplace(f.get(), static_cast<std::uint32_t>(ids.size()));
          number_statements(n.body, ids);
        }
      },
      f->node);
}

struct SampleChooser {
  const NodeIds& ids;
  RngStream rng;
  std::vector<std::uint64_t> visits;
  // Score accumulation (only when `collect` is set).
  bool collect = false;
  std::vector<Tangent::Entry> score;

  SampleChooser(const NodeIds& node_ids, RngStream r)
      : ids(node_ids), rng(r), visits(node_ids.size(), 0) {}

  void reset(RngStream r) {
    rng = r;
    std::fill(visits.begin(), visits.end(), 0);
    score.clear();
  }

  Value choose(const Statement&, const FormulaNode& node, const Query& q) {
    const std::uint32_t id = ids.at(&node);
    RngStream draw = rng.child(id).child(visits[id]++);
    const std::size_t k = sample_index(q.dist, draw.uniform());
    if (collect && q.theta_offset) {
      // grad log softmax_k = e_k - p
      const auto& outcomes = q.dist.outcomes();
      for (std::size_t j = 0; j < outcomes.size(); ++j) {
        score.emplace_back(static_cast<std::uint32_t>(*q.theta_offset + j),
                           (j == k ? 1.0 : 0.0) - outcomes[j].prob);
      }
    }
    return q.dist.outcomes()[k].value;
  }
};

constexpr std::size_t kChunk = 4096;

// Runs `body(chunk_index, begin, end)` for each chunk of [0, n) on up to
// `threads` workers. Chunk results are reduced by the caller in order.
template <class Body>
void for_chunks(std::size_t n, std::size_t threads, Body body) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(chunks, 1));
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c, c * kChunk, std::min(n, (c + 1) * kChunk));
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t c = t; c < chunks; c += threads) {
          body(c, c * kChunk, std::min(n, (c + 1) * kChunk));
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void require_samples(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidSampleCount, "number of samples must be at least 1");
}

}  // namespace

bool eval_sample(const Formula& f, const Interpretation& interp, const RngStream& rng,
                 const Env& env, const EvalOptions& options) {
  NodeIds ids;
  number_statements(f, ids);
  SampleChooser chooser(ids, rng);
  return detail::BoolWalker<SampleChooser>(interp, chooser, options).eval(f, env);
}

Estimate estimate_prob(const Formula& f, const Interpretation& interp, std::size_t n,
                       std::uint64_t seed, const SampleOptions& options) {
  require_samples(n);
  NodeIds ids;
  number_statements(f, ids);
  const RngStream master(seed);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::size_t> hits(chunks, 0);
  for_chunks(n, options.threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    SampleChooser chooser(ids, master);
    detail::BoolWalker<SampleChooser> walker(interp, chooser, options.eval);
    std::size_t h = 0;
    for (std::size_t i = begin; i < end; ++i) {
      chooser.reset(master.child(i));
      h += walker.eval(f, Env{}) ? 1 : 0;
    }
    hits[c] = h;
  });
  std::size_t total = 0;
  for (auto h : hits) total += h;
  const double dn = static_cast<double>(n);
  const double mean = static_cast<double>(total) / dn;
  double se = 0.0;
  if (n > 1) {
    const double var = (static_cast<double>(total) - dn * mean * mean) / (dn - 1.0);
    se = std::sqrt(std::max(var, 0.0) / dn);
  }
  return {mean, se};
}

GradEstimate grad_score(const Formula& f, const Interpretation& interp, std::size_t n,
                        std::uint64_t seed, LossTransform transform,
                        const SampleOptions& options) {
  require_samples(n);
  NodeIds ids;
  number_statements(f, ids);
  const RngStream master(seed);
  const std::size_t dim = interp.theta().size();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;

  // Per chunk: sum of truth and per coordinate sums of g and g^2, where g is
  // the rollout's surrogate tangent (zero whenever its truth is 0).
  struct Partial {
    double truth = 0.0;
    std::vector<double> g, g2;
  };
  std::vector<Partial> parts(chunks);
  for_chunks(n, options.threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    Partial p;
    p.g.assign(dim, 0.0);
    p.g2.assign(dim, 0.0);
    SampleChooser chooser(ids, master);
    chooser.collect = true;
    detail::BoolWalker<SampleChooser> walker(interp, chooser, options.eval);
    std::vector<double> g(dim, 0.0);
    std::vector<char> seen(dim, 0);
    std::vector<std::uint32_t> touched;
    for (std::size_t i = begin; i < end; ++i) {
      chooser.reset(master.child(i));
      if (!walker.eval(f, Env{})) continue;  // truth 0: zero contribution
      p.truth += 1.0;
      touched.clear();
      for (const auto& [j, d] : chooser.score) {
        if (!seen[j]) {
          seen[j] = 1;
          touched.push_back(j);
        }
        g[j] += d;
      }
      for (auto j : touched) {
        p.g[j] += g[j];
        p.g2[j] += g[j] * g[j];
        g[j] = 0.0;
        seen[j] = 0;
      }
    }
    parts[c] = std::move(p);
  });

  Partial sum;
  sum.g.assign(dim, 0.0);
  sum.g2.assign(dim, 0.0);
  for (const auto& p : parts) {
    sum.truth += p.truth;
    for (std::size_t j = 0; j < dim; ++j) {
      sum.g[j] += p.g[j];
      sum.g2[j] += p.g2[j];
    }
  }

  const double dn = static_cast<double>(n);
  GradEstimate out;
  out.value = sum.truth / dn;
  out.mean.assign(dim, 0.0);
  out.std_error.assign(dim, 0.0);
  auto sample_var = [&](double s, double s2) {
    if (n < 2) return 0.0;
    return std::max((s2 - s * s / dn) / (dn - 1.0), 0.0);
  };
  switch (transform) {
    case LossTransform::Neg:
      for (std::size_t j = 0; j < dim; ++j) {
        out.mean[j] = -sum.g[j] / dn;
        out.std_error[j] = std::sqrt(sample_var(sum.g[j], sum.g2[j]) / dn);
      }
      break;
    case LossTransform::NegLog: {
      apply_loss(transform, out.value, "sampled formula");
      const double tbar = out.value;
      for (std::size_t j = 0; j < dim; ++j) {
        const double gbar = sum.g[j] / dn;
        const double r = gbar / tbar;
        out.mean[j] = -r;
        // residual e_i = g_i - r t_i, with t_i in {0,1} and g_i t_i = g_i
        const double se2 = sum.g2[j] - 2.0 * r * sum.g[j] + r * r * sum.truth;
        const double var = n < 2 ? 0.0 : std::max(se2 / (dn - 1.0), 0.0);
        out.std_error[j] = std::sqrt(var / dn) / tbar;
      }
      break;
    }
  }
  return out;
}

}  // namespace uller
