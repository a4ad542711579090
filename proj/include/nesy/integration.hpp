#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nesy/measure.hpp"
#include "nesy/symbols.hpp"

namespace nesy {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Uniform double in [0, 1) determined by (seed, sample, dim) alone.
double counter_uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t dim);

/// Vector-valued integrand: writes k values for the interpretation.
using Integrand = std::function<void(const Interpretation&, std::span<double>)>;

struct Estimate {
  /// Integral of each component.
  std::vector<double> value;
  /// Row-major k×k covariance of the estimates (Monte Carlo only; empty otherwise).
  std::vector<double> covariance;
  /// Integrand evaluations.
  std::uint64_t evaluations = 0;
  bool stochastic = false;

  double std_error(std::size_t i) const;
};

/// Integrates `f` over the symbols `dims`, holding every other symbol at its
/// value in `base`. Finite symbols are summed (counting measure); continuous
/// ones use the Borel scheme of `m`. Counting rejects continuous symbols, the
/// plain Borel variants reject finite ones; ProductMixed takes both.
///
/// Work is split into fixed chunks and merged in chunk order, so results do
/// not depend on `threads` (0 = hardware concurrency).
Estimate integrate(const Interpretation& base, std::span<const std::size_t> dims, const MeasureSpec& m,
                   std::size_t k, const Integrand& f, unsigned threads = 0);

/// Default worker count for integrate() when 0 is passed.
void set_default_threads(unsigned n);
unsigned default_threads();

/// First-order (delta method) standard error of g(estimate), given the
/// gradient of g with respect to the estimate components.
double delta_std_error(const Estimate& e, std::span<const double> gradient);

}  // namespace nesy
