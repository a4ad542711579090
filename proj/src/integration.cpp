#include "nesy/integration.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "nesy/error.hpp"

namespace nesy {
namespace {

constexpr std::uint64_t kChunk = 1024;

std::atomic<unsigned> g_default_threads{0};

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class Scheme { Counting, Quadrature, MonteCarlo };

struct Plan {
  Scheme scheme;
  std::vector<std::size_t> finite;
  std::vector<std::size_t> continuous;
  std::size_t grid = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t outer = 1;
  std::uint64_t inner = 1;
  double cell = 1.0;    // quadrature cell volume
  double volume = 1.0;  // Lebesgue volume of the continuous box
};

std::uint64_t checked_product(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b)
    throw InputError("integration domain too large");
  return a * b;
}

Plan make_plan(const SymbolTable& table, std::span<const std::size_t> dims, const MeasureSpec& m) {
  check_measure(m);
  Plan p;
  for (auto i : dims) (table[i].domain.is_finite() ? p.finite : p.continuous).push_back(i);
  std::sort(p.finite.begin(), p.finite.end());
  std::sort(p.continuous.begin(), p.continuous.end());

  auto borel_of = [&](const auto& b) {
    using B = std::decay_t<decltype(b)>;
    if constexpr (std::is_same_v<B, BorelQuadrature>) {
      p.scheme = Scheme::Quadrature;
      p.grid = b.points;
    } else {
      p.scheme = Scheme::MonteCarlo;
      p.samples = b.samples;
      p.seed = b.seed;
    }
  };
  std::visit(
      [&](const auto& spec) {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, Counting>) {
          p.scheme = Scheme::Counting;
          if (!p.continuous.empty())
            throw InputError("counting measure over continuous symbol '" + table[p.continuous.front()].name +
                             "'; use a quadrature, montecarlo or mixed measure");
        } else if constexpr (std::is_same_v<S, ProductMixed>) {
          std::visit(borel_of, spec.borel);
        } else {
          borel_of(spec);
          if (!p.finite.empty())
            throw InputError("Borel measure over finite symbol '" + table[p.finite.front()].name +
                             "'; use mixed(...) to count finite symbols");
        }
      },
      m);

  for (auto i : p.finite) {
    if (p.scheme == Scheme::Counting)
      p.outer = checked_product(p.outer, table[i].domain.size());
    else
      p.inner = checked_product(p.inner, table[i].domain.size());
  }
  for (auto i : p.continuous) p.volume *= table[i].domain.length();
  if (p.scheme == Scheme::Quadrature) {
    if (p.continuous.size() > kMaxQuadratureDims)
      throw InputError("quadrature over " + std::to_string(p.continuous.size()) + " dimensions exceeds the limit of " +
                       std::to_string(kMaxQuadratureDims) + "; use montecarlo");
    for (std::size_t d = 0; d < p.continuous.size(); ++d) {
      p.outer = checked_product(p.outer, p.grid);
      p.cell *= table[p.continuous[d]].domain.length() / static_cast<double>(p.grid);
    }
  } else if (p.scheme == Scheme::MonteCarlo) {
    p.outer = p.samples;
  }
  return p;
}

struct ChunkResult {
  std::vector<CompensatedSum> sums;  // exact and quadrature schemes
  std::uint64_t count = 0;           // Monte Carlo: Welford state
  std::vector<double> mean;
  std::vector<double> m2;  // k×k
  std::uint64_t evaluations = 0;
};

class Worker {
 public:
  Worker(const Plan& plan, const Interpretation& base, std::size_t k, const Integrand& f)
      : plan_(plan), w_(base), k_(k), f_(f), out_(k), inner_(k) {}

  ChunkResult run(std::uint64_t begin, std::uint64_t end) {
    ChunkResult r;
    if (plan_.scheme == Scheme::MonteCarlo) {
      r.mean.assign(k_, 0.0);
      r.m2.assign(k_ * k_, 0.0);
    } else {
      r.sums.resize(k_);
    }
    if (plan_.scheme == Scheme::Counting) {
      seek_counting(begin);
      for (std::uint64_t i = begin; i < end; ++i) {
        std::fill(out_.begin(), out_.end(), 0.0);
        f_(w_, out_);
        for (std::size_t c = 0; c < k_; ++c) r.sums[c].add(out_[c]);
        ++r.evaluations;
        next_interpretation(w_, plan_.finite);
      }
      return r;
    }
    std::vector<double> delta(k_);
    for (std::uint64_t i = begin; i < end; ++i) {
      place_continuous(i);
      inner_sum(r.evaluations);
      if (plan_.scheme == Scheme::Quadrature) {
        for (std::size_t c = 0; c < k_; ++c) r.sums[c].add(plan_.cell * inner_[c]);
      } else {
        ++r.count;
        double n = static_cast<double>(r.count);
        for (std::size_t c = 0; c < k_; ++c) delta[c] = plan_.volume * inner_[c] - r.mean[c];
        for (std::size_t c = 0; c < k_; ++c) r.mean[c] += delta[c] / n;
        for (std::size_t a = 0; a < k_; ++a)
          for (std::size_t b = 0; b < k_; ++b)
            r.m2[a * k_ + b] += delta[a] * (plan_.volume * inner_[b] - r.mean[b]);
      }
    }
    return r;
  }

 private:
  void seek_counting(std::uint64_t index) {
    for (std::size_t d = plan_.finite.size(); d-- > 0;) {
      std::size_t s = plan_.finite[d];
      std::uint64_t size = w_.symbols()[s].domain.size();
      w_.set_choice(s, static_cast<std::size_t>(index % size));
      index /= size;
    }
  }

  void place_continuous(std::uint64_t index) {
    const auto& table = w_.symbols();
    if (plan_.scheme == Scheme::Quadrature) {
      for (std::size_t d = plan_.continuous.size(); d-- > 0;) {
        std::size_t s = plan_.continuous[d];
        const auto& dom = table[s].domain;
        std::uint64_t j = index % plan_.grid;
        index /= plan_.grid;
        double h = dom.length() / static_cast<double>(plan_.grid);
        w_.set_unchecked(s, dom.lo() + (static_cast<double>(j) + 0.5) * h);
      }
    } else {
      for (std::size_t d = 0; d < plan_.continuous.size(); ++d) {
        std::size_t s = plan_.continuous[d];
        const auto& dom = table[s].domain;
        w_.set_unchecked(s, dom.lo() + counter_uniform(plan_.seed, index, d) * dom.length());
      }
    }
  }

  void inner_sum(std::uint64_t& evaluations) {
    if (plan_.finite.empty()) {
      std::fill(out_.begin(), out_.end(), 0.0);
      f_(w_, out_);
      std::copy(out_.begin(), out_.end(), inner_.begin());
      ++evaluations;
      return;
    }
    std::vector<CompensatedSum> acc(k_);
    reset_to_first(w_, plan_.finite);
    do {
      std::fill(out_.begin(), out_.end(), 0.0);
      f_(w_, out_);
      for (std::size_t c = 0; c < k_; ++c) acc[c].add(out_[c]);
      ++evaluations;
    } while (next_interpretation(w_, plan_.finite));
    for (std::size_t c = 0; c < k_; ++c) inner_[c] = acc[c].value();
  }

  const Plan& plan_;
  Interpretation w_;
  std::size_t k_;
  const Integrand& f_;
  std::vector<double> out_;
  std::vector<double> inner_;
};

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t dim) {
  std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
  h = mix64(h ^ sample);
  h = mix64(h + dim * 0x9e3779b97f4a7c15ULL);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double Estimate::std_error(std::size_t i) const {
  if (covariance.empty()) return 0.0;
  return std::sqrt(std::max(0.0, covariance[i * value.size() + i]));
}

void set_default_threads(unsigned n) { g_default_threads = n; }

unsigned default_threads() {
  unsigned n = g_default_threads.load();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

Estimate integrate(const Interpretation& base, std::span<const std::size_t> dims, const MeasureSpec& m,
                   std::size_t k, const Integrand& f, unsigned threads) {
  const Plan plan = make_plan(base.symbols(), dims, m);
  const std::uint64_t chunks = plan.outer == 0 ? 0 : (plan.outer + kChunk - 1) / kChunk;
  std::vector<ChunkResult> results(chunks);

  unsigned workers = threads == 0 ? default_threads() : threads;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(chunks, 1)));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    try {
      Worker worker(plan, base, k, f);
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        std::uint64_t begin = c * kChunk;
        results[c] = worker.run(begin, std::min(plan.outer, begin + kChunk));
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = chunks;
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  Estimate e;
  e.value.assign(k, 0.0);
  for (const auto& r : results) e.evaluations += r.evaluations;
  if (plan.scheme != Scheme::MonteCarlo) {
    for (std::size_t c = 0; c < k; ++c) {
      CompensatedSum total;
      for (const auto& r : results) total.add(r.sums[c].value());
      e.value[c] = total.value();
    }
    return e;
  }

  // Chan et al. pairwise merge of the per-chunk Welford states, in chunk order.
  e.stochastic = true;
  std::uint64_t n = 0;
  std::vector<double> mean(k, 0.0), m2(k * k, 0.0), delta(k);
  for (const auto& r : results) {
    if (r.count == 0) continue;
    double na = static_cast<double>(n), nb = static_cast<double>(r.count), nt = na + nb;
    for (std::size_t c = 0; c < k; ++c) delta[c] = r.mean[c] - mean[c];
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) m2[a * k + b] += r.m2[a * k + b] + delta[a] * delta[b] * na * nb / nt;
    for (std::size_t c = 0; c < k; ++c) mean[c] += delta[c] * nb / nt;
    n += r.count;
  }
  e.value = mean;
  e.covariance.assign(k * k, 0.0);
  if (n > 1) {
    double denom = static_cast<double>(n - 1) * static_cast<double>(n);
    for (std::size_t i = 0; i < k * k; ++i) e.covariance[i] = m2[i] / denom;
  }
  return e;
}

double delta_std_error(const Estimate& e, std::span<const double> gradient) {
  if (e.covariance.empty()) return 0.0;
  std::size_t k = e.value.size();
  double var = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) var += gradient[a] * e.covariance[a * k + b] * gradient[b];
  return std::sqrt(std::max(0.0, var));
}

void check_measure(const MeasureSpec& m) {
  auto check_borel = [](const auto& b) {
    using B = std::decay_t<decltype(b)>;
    if constexpr (std::is_same_v<B, BorelQuadrature>) {
      if (b.points < 2) throw InputError("quadrature needs at least 2 grid points per dimension");
    } else if constexpr (std::is_same_v<B, BorelMonteCarlo>) {
      if (b.samples < 1) throw InputError("montecarlo needs at least 1 sample");
    }
  };
  std::visit(
      [&](const auto& spec) {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, ProductMixed>)
          std::visit(check_borel, spec.borel);
        else
          check_borel(spec);
      },
      m);
}

std::string describe(const MeasureSpec& m) {
  auto borel = [](const auto& b) -> std::string {
    using B = std::decay_t<decltype(b)>;
    if constexpr (std::is_same_v<B, BorelQuadrature>)
      return "quadrature(g=" + std::to_string(b.points) + ")";
    else
      return "montecarlo(n=" + std::to_string(b.samples) + ", seed=" + std::to_string(b.seed) + ")";
  };
  return std::visit(
      [&](const auto& spec) -> std::string {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, Counting>)
          return "counting";
        else if constexpr (std::is_same_v<S, ProductMixed>)
          return "mixed(" + std::visit(borel, spec.borel) + ")";
        else
          return borel(spec);
      },
      m);
}

bool is_stochastic(const MeasureSpec& m) {
  if (std::holds_alternative<BorelMonteCarlo>(m)) return true;
  if (auto* mixed = std::get_if<ProductMixed>(&m)) return std::holds_alternative<BorelMonteCarlo>(mixed->borel);
  return false;
}

}  // namespace nesy
