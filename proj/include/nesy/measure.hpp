#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>

namespace nesy {

/// Counting measure over a finite product of domains.
struct Counting {};

/// Lebesgue measure on a box, integrated with the midpoint rule on a
/// uniform grid of `points` per dimension.
struct BorelQuadrature {
  std::size_t points = 200;
};

/// Lebesgue measure on a box, estimated from `samples` uniform draws. Draw
/// i depends only on (seed, i).
struct BorelMonteCarlo {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 42;
};

/// Counting over the finite symbols times Lebesgue over the continuous ones.
struct ProductMixed {
  std::variant<BorelQuadrature, BorelMonteCarlo> borel;
};

using MeasureSpec = std::variant<Counting, BorelQuadrature, BorelMonteCarlo, ProductMixed>;

/// Throws InputError on g < 2 or n < 1.
void check_measure(const MeasureSpec& m);

/// `counting`, `quadrature(g=200)`, `montecarlo(n=100000, seed=42)`,
/// `mixed(quadrature(g=200))`.
std::string describe(const MeasureSpec& m);

bool is_stochastic(const MeasureSpec& m);

/// Largest number of continuous dimensions the tensor-grid rule accepts.
inline constexpr std::size_t kMaxQuadratureDims = 8;

}  // namespace nesy
