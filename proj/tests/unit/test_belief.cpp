#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nesy/belief.hpp"
#include "nesy/error.hpp"
#include "nesy/integration.hpp"
#include "nesy/parser.hpp"
#include "support/oracle.hpp"

using namespace nesy;

namespace {

SymbolTablePtr hcp() {
  return SymbolTable::make({{"h", Domain::boolean()}, {"c", Domain::boolean()}, {"p", Domain::boolean()}});
}

IndependentBernoulli bern(const SymbolTablePtr& t, const std::vector<double>& p) {
  std::vector<std::pair<std::size_t, double>> v;
  for (std::size_t i = 0; i < p.size(); ++i) v.push_back({i, p[i]});
  return IndependentBernoulli(t, v);
}

// Σ_ω b(ω) over the Boolean cube, summed by a plain loop.
double cube_sum(const IndependentBernoulli& b, int n) {
  CompensatedSum s;
  for (std::uint64_t bits = 0; bits < (1ull << n); ++bits) s.add(b.weight(oracle::from_bits(b.table(), bits)));
  return s.value();
}

}  // namespace

TEST_CASE("bernoulli weights") {
  auto t = hcp();
  auto b = bern(t, {0.8, 0.5, 0.5});
  // ω = (h:1, c:0, p:0); bit 0 is h.
  CHECK(b.weight(oracle::from_bits(t, 0b001)) == doctest::Approx(0.8 * 0.5 * 0.5).epsilon(1e-15));
  auto ones = bern(t, {1.0, 1.0, 1.0});
  CHECK(ones.weight(oracle::from_bits(t, 0b111)) == 1.0);
  CHECK(ones.weight(oracle::from_bits(t, 0b011)) == 0.0);
  CHECK(b.prob(1) == 0.5);
  Formula any = constant(true);
  CHECK(belief_weight(Belief(b), any, oracle::from_bits(t, 0b001)) == b.weight(oracle::from_bits(t, 0b001)));
}

TEST_CASE("bernoulli validation") {
  auto t = hcp();
  CHECK_THROWS_AS(bern(t, {1.2, 0.5, 0.5}), InputError);
  CHECK_THROWS_AS(IndependentBernoulli(t, {{0, 0.5}, {0, 0.5}}), InputError);
  auto partial = IndependentBernoulli(t, {{0, 0.5}});
  CHECK_THROWS_WITH_AS(partial.check_complete(), doctest::Contains("missing a probability"), InputError);
  CHECK_THROWS_WITH_AS(belief_weight(Belief(partial), constant(true), oracle::from_bits(t, 0)),
                       doctest::Contains("missing a probability"), InputError);
  auto u = SymbolTable::make({{"a", Domain::unit_interval()}});
  CHECK_THROWS_AS(IndependentBernoulli(u, {{0, 0.5}}), InputError);
}

TEST_CASE("bernoulli mass is one and marginals recover p") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {1, 5, 12, 20}) {
    auto t = oracle::atoms(n);
    std::vector<double> p(n);
    for (auto& x : p) x = u(rng);
    auto b = bern(t, p);
    CHECK(std::abs(cube_sum(b, n) - 1.0) <= 1e-12);
    if (n <= 12) {
      for (int s = 0; s < n; ++s) {
        CompensatedSum m;
        for (std::uint64_t bits = 0; bits < (1ull << n); ++bits)
          if ((bits >> s) & 1u) m.add(b.weight(oracle::from_bits(t, bits)));
        CHECK(std::abs(m.value() - p[s]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("loglinear normalization over the boolean cube") {
  auto t = hcp();
  Formula rule = parse_formula("h -> (c | p)", *t);
  LogLinear b(t, Theory({rule}), {1.0}, Semantics::boolean(), Counting{});
  CHECK(b.unnormalized(oracle::from_bits(t, 0b001)) == 1.0);
  CHECK(b.unnormalized(oracle::from_bits(t, 0b000)) == doctest::Approx(std::exp(1.0)));
  CHECK_FALSE(b.normalization().has_value());
  LogLinear nb = normalize(b);
  REQUIRE(nb.normalization().has_value());
  CHECK(nb.normalization()->z == doctest::Approx(7 * std::exp(1.0) + 1).epsilon(1e-14));
  CHECK_FALSE(nb.normalization()->std_error.has_value());

  LogLinear flat(t, Theory({rule}), {0.0}, Semantics::boolean(), Counting{});
  CHECK(flat.unnormalized(oracle::from_bits(t, 0b101)) == 1.0);
  CHECK(normalize(flat).normalization()->z == 8.0);

  double total = 0.0;
  for (std::uint64_t bits = 0; bits < 8; ++bits) total += nb.weight(oracle::from_bits(t, bits));
  CHECK(std::abs(total - 1.0) <= 1e-9);
  CHECK_THROWS_AS(LogLinear(t, Theory({rule}), {1.0, 2.0}, Semantics::boolean(), Counting{}), InputError);
}

TEST_CASE("loglinear over the unit interval") {
  auto t = SymbolTable::make({{"a", Domain::unit_interval()}});
  Semantics luk = Semantics::fuzzy(TNorm::Lukasiewicz);
  LogLinear flat(t, Theory({atom(0)}), {0.0}, luk, BorelQuadrature{200});
  CHECK(normalize(flat).normalization()->z == doctest::Approx(1.0).epsilon(1e-12));

  // ∫ exp(2x) dx = (e² − 1)/2.
  LogLinear b(t, Theory({atom(0)}), {2.0}, luk, BorelQuadrature{2000});
  double z = normalize(b).normalization()->z;
  CHECK(z == doctest::Approx((std::exp(2.0) - 1) / 2).epsilon(1e-6));

  LogLinear mc(t, Theory({atom(0)}), {2.0}, luk, BorelMonteCarlo{20000, 5});
  auto nz = normalize(mc).normalization();
  REQUIRE(nz->std_error.has_value());
  CHECK(std::abs(nz->z - (std::exp(2.0) - 1) / 2) <= 4 * *nz->std_error);
}

TEST_CASE("loglinear positivity and scale invariance") {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g(0.0, 1.5);
  auto t = oracle::atoms(5);
  for (int i = 0; i < 30; ++i) {
    std::vector<Formula> th;
    std::vector<double> w;
    for (int k = 0; k < 3; ++k) {
      th.push_back(oracle::to_formula(oracle::random_tree(rng, 5, 3)));
      w.push_back(g(rng));
    }
    LogLinear b = normalize(LogLinear(t, Theory(th), w, Semantics::boolean(), Counting{}));
    // Adding the tautology `true` with weight log k multiplies every weight by k.
    auto th2 = th;
    th2.push_back(constant(true));
    auto w2 = w;
    w2.push_back(std::log(3.7));
    LogLinear b2 = normalize(LogLinear(t, Theory(th2), w2, Semantics::boolean(), Counting{}));
    double total = 0.0;
    for (std::uint64_t bits = 0; bits < 32; ++bits) {
      auto x = oracle::from_bits(t, bits);
      CHECK(b.unnormalized(x) > 0.0);
      CHECK(std::abs(b.weight(x) - b2.weight(x)) <= 1e-12);
      total += b.weight(x);
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("dirac points have no density") {
  auto t = SymbolTable::make({{"a", Domain::unit_interval()}});
  Interpretation w(t);
  CHECK_THROWS_AS(DiracPoint{w}, InputError);
  w.set(0, 0.3);
  Belief b = DiracPoint(w);
  CHECK_THROWS_WITH_AS(belief_weight(b, atom(0), w), doctest::Contains("no density"), InputError);
  CHECK(family_name(b) == "dirac");
  CHECK(parameters(b) == std::vector<double>{0.3});
}

TEST_CASE("fuzzy membership curves") {
  auto t = SymbolTable::make({{"a", Domain::unit_interval()}, {"b", Domain::unit_interval()}});
  MembershipCurve ramp{0, {{0.0, 0.0}, {1.0, 1.0}}};
  MembershipCurve tent{1, {{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.0}}, 2.0};
  FuzzyMembership fm(t, {ramp, tent});
  CHECK(ramp(0.25) == 0.25);
  CHECK(tent(0.25) == 0.5);
  CHECK(fm.weight(oracle::from_values(t, {0.5, 0.25})) == doctest::Approx(0.5 * 0.25));
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    double w = fm.weight(oracle::from_values(t, {u(rng), u(rng)}));
    CHECK(w >= 0.0);
    CHECK(w <= 1.0);
  }
  CHECK_THROWS_AS(FuzzyMembership(t, {{0, {{0.0, 0.0}}}}), InputError);
  CHECK_THROWS_AS(FuzzyMembership(t, {{0, {{0.0, 0.0}, {0.5, 1.0}}}}), InputError);
  CHECK_THROWS_AS(FuzzyMembership(t, {{0, {{0.0, 0.0}, {0.5, 1.5}, {1.0, 1.0}}}}), InputError);
  CHECK_THROWS_AS(FuzzyMembership(t, {{0, {{0.0, 0.0}, {0.6, 1.0}, {0.6, 0.5}, {1.0, 1.0}}}}), InputError);
  CHECK_THROWS_AS(FuzzyMembership(t, {{0, {{0.0, 0.0}, {1.0, 1.0}}, -1.0}}), InputError);
  auto bt = hcp();
  CHECK_THROWS_AS(FuzzyMembership(bt, {{0, {{0.0, 0.0}, {1.0, 1.0}}}}), InputError);
  Belief b = fm;
  CHECK_THROWS_AS(with_parameters(b, std::vector<double>{}), InputError);
}

TEST_CASE("parameter replacement and clamping") {
  auto t = hcp();
  Belief b = bern(t, {0.8, 0.5, 0.5});
  CHECK(parameters(b) == std::vector<double>{0.8, 0.5, 0.5});
  std::vector<double> theta{0.3, 0.2, 0.1};
  auto up = with_parameters(b, theta);
  CHECK_FALSE(up.clamped);
  CHECK(parameters(up.belief) == theta);
  std::vector<double> wild{1.5, -0.2, 0.5};
  auto cl = with_parameters(b, wild);
  CHECK(cl.clamped);
  CHECK(parameters(cl.belief) == std::vector<double>{1.0 - 1e-7, 1e-7, 0.5});
  std::vector<double> short_theta{0.1};
  CHECK_THROWS_AS(with_parameters(b, short_theta), InputError);

  Formula rule = parse_formula("h -> (c | p)", *t);
  Belief ll = LogLinear(t, Theory({rule}), {1.0}, Semantics::boolean(), Counting{});
  std::vector<double> lw{2.5};
  auto ul = with_parameters(ll, lw);
  CHECK_FALSE(ul.clamped);
  CHECK(parameters(ul.belief) == lw);
  CHECK(support(ll) == std::vector<std::size_t>{0, 1, 2});
}
