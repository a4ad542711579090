#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nesy/circuit.hpp"
#include "nesy/error.hpp"
#include "nesy/integration.hpp"
#include "nesy/integrator.hpp"
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

Model bool_model(const SymbolTablePtr& t, const std::vector<double>& p) {
  return Model{t, Semantics::boolean(), bern(t, p)};
}

std::vector<double> random_probs(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  for (auto& x : p) x = u(rng);
  return p;
}

// Appendix-style oracle: one singleton set per model with coefficient b(ω).
double simple_oracle(const oracle::Tree& tree, const SymbolTablePtr& t, const std::vector<double>& p) {
  const int n = static_cast<int>(p.size());
  std::vector<Interpretation> carrier;
  std::vector<SimpleTerm> terms;
  for (std::uint64_t bits = 0; bits < (1ull << n); ++bits) {
    carrier.push_back(oracle::from_bits(t, bits));
    if (!oracle::eval_bool(tree, bits)) continue;
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= ((bits >> i) & 1u) ? p[i] : 1.0 - p[i];
    terms.push_back({w, [bits, n](const Interpretation& x) {
                       for (int i = 0; i < n; ++i)
                         if ((x.value(i) != 0.0) != bool((bits >> i) & 1u)) return false;
                       return true;
                     }});
  }
  return lebesgue_simple(terms, carrier, Counting{});
}

}  // namespace

TEST_CASE("coffee rule under independent beliefs") {
  auto t = hcp();
  Model m = bool_model(t, {0.8, 0.5, 0.5});
  Formula f = parse_formula("h -> (c | p)", *t);
  auto r = infer(m, LogicFn::direct(), f, Counting{});
  double expect = 0.0;
  auto tree = oracle::binary(oracle::Node::Implies, oracle::leaf(0),
                             oracle::binary(oracle::Node::Or, oracle::leaf(1), oracle::leaf(2)));
  expect = oracle::wmc_brute(tree, {0.8, 0.5, 0.5});
  CHECK(std::abs(r.value - expect) <= 1e-15);
  CHECK(r.value == doctest::Approx(0.8));
  CHECK(r.backend == "enumeration");
  CHECK(r.models_visited == 8u);
  CHECK_FALSE(r.std_error.has_value());

  InferOptions circ;
  circ.use_circuit = true;
  auto rc = infer(m, LogicFn::direct(), f, Counting{}, circ);
  CHECK(rc.backend == "circuit");
  CHECK(std::abs(rc.value - expect) <= 1e-15);
}

TEST_CASE("dirac collapse ignores the measure") {
  auto t = SymbolTable::make({{"h", Domain::unit_interval()}, {"c", Domain::unit_interval()}, {"p", Domain::unit_interval()}});
  Formula f = parse_formula("h -> (c | p)", *t);
  Model m{t, Semantics::fuzzy(TNorm::Lukasiewicz), DiracPoint(oracle::from_values(t, {1.0, 0.5, 0.5}))};
  for (MeasureSpec ms : {MeasureSpec(Counting{}), MeasureSpec(BorelQuadrature{10}), MeasureSpec(BorelMonteCarlo{10, 1})}) {
    auto r = infer(m, LogicFn::direct(), f, ms);
    CHECK(r.value == 1.0);
    CHECK(r.backend == "dirac");
    CHECK_FALSE(r.std_error.has_value());
  }
}

TEST_CASE("uniform single-atom expectation by quadrature") {
  auto t = SymbolTable::make({{"a", Domain::unit_interval()}});
  Semantics luk = Semantics::fuzzy(TNorm::Lukasiewicz);
  Model m{t, luk, LogLinear(t, Theory({atom(0)}), {0.0}, luk, BorelQuadrature{1000})};
  auto r = infer(m, LogicFn::direct(), atom(0), BorelQuadrature{1000});
  CHECK(std::abs(r.value - 0.5) <= 1e-6);
  CHECK(r.backend == "quadrature");
}

TEST_CASE("models of a formula") {
  auto t = hcp();
  auto ms = enumerate_models(parse_formula("h -> (c | p)", *t), t, {0, 1, 2});
  CHECK(ms.size() == 7);
  for (const auto& w : ms) CHECK_FALSE((w.value(0) == 1.0 && w.value(1) == 0.0 && w.value(2) == 0.0));
  CHECK(enumerate_models(constant(false), t, {0, 1, 2}).empty());
  CHECK(enumerate_models(constant(true), t, {0, 1}).size() == 4);
  auto u = SymbolTable::make({{"a", Domain::unit_interval()}});
  CHECK_THROWS_AS(enumerate_models(constant(true), u, {0}), InputError);

  // F with Direct and Counting is Σ over the models.
  Model m = bool_model(t, {0.8, 0.5, 0.5});
  double sum = 0.0;
  const auto& b = std::get<IndependentBernoulli>(m.belief);
  for (auto w : ms) sum += b.weight(w);
  CHECK(sum == doctest::Approx(infer(m, LogicFn::direct(), parse_formula("h -> (c | p)", *t), Counting{}).value));
}

TEST_CASE("compiled circuits") {
  auto t = hcp();
  auto single = compile(atom(0), *t);
  CHECK(single.well_formed());
  const auto& root = single.nodes()[single.root()];
  CHECK(root.kind == CompiledCircuit::Kind::Decision);
  CHECK(root.symbol == 0u);
  CHECK(single.nodes()[root.low].kind == CompiledCircuit::Kind::False);
  CHECK(single.nodes()[root.high].kind == CompiledCircuit::Kind::True);

  auto rule = compile(parse_formula("h -> (c | p)", *t), *t);
  std::vector<double> half{0.5, 0.5, 0.5};
  CHECK(wmc(rule, half) == 0.875);

  auto taut = compile(constant(true), *t);
  CHECK(taut.nodes()[taut.root()].kind == CompiledCircuit::Kind::True);
  CHECK(wmc(taut, half) == 1.0);

  auto ct = compile(parse_formula("(h & c) | !h", *t), *t);
  CHECK(ct.well_formed());
  std::vector<double> nan_for_p{0.3, 0.6, std::nan("")};
  CHECK(wmc(ct, nan_for_p) == doctest::Approx(0.3 * 0.6 + 0.7));

  auto u = SymbolTable::make({{"a", Domain::unit_interval()}});
  CHECK_THROWS_AS(compile(atom(0), *u), InputError);
  CHECK(condition(parse_formula("h -> (c | p)", *t), 0, false) == constant(true));
}

TEST_CASE("backends agree with brute force and the simple-function oracle") {
  std::mt19937_64 rng(31);
  InferOptions circ;
  circ.use_circuit = true;
  for (int i = 0; i < 150; ++i) {
    int n = 1 + static_cast<int>(rng() % 10);
    auto t = oracle::atoms(n);
    auto tree = oracle::random_tree(rng, n, 1 + static_cast<int>(rng() % 7));
    Formula f = oracle::to_formula(tree);
    auto p = random_probs(rng, n);
    Model m = bool_model(t, p);
    double brute = oracle::wmc_brute(tree, p);
    double simple = simple_oracle(tree, t, p);
    auto e = infer(m, LogicFn::direct(), f, Counting{});
    auto c = infer(m, LogicFn::direct(), f, Counting{}, circ);
    CHECK(std::abs(e.value - brute) <= 1e-12);
    CHECK(std::abs(c.value - brute) <= 1e-12);
    CHECK(std::abs(simple - brute) <= 1e-12);
    CHECK(compile(f, *t).well_formed());
  }
}

TEST_CASE("probability bounds and complement") {
  std::mt19937_64 rng(32);
  auto t = oracle::atoms(7);
  InferOptions circ;
  circ.use_circuit = true;
  for (int i = 0; i < 100; ++i) {
    auto p = random_probs(rng, 7);
    Model m = bool_model(t, p);
    Formula f = oracle::to_formula(oracle::random_tree(rng, 7, 6));
    double a = infer(m, LogicFn::direct(), f, Counting{}).value;
    double b = infer(m, LogicFn::direct(), negation(f), Counting{}).value;
    CHECK(a >= 0.0);
    CHECK(a <= 1.0 + 1e-15);
    CHECK(std::abs(a + b - 1.0) <= 1e-12);
    double ac = infer(m, LogicFn::direct(), f, Counting{}, circ).value;
    double bc = infer(m, LogicFn::direct(), negation(f), Counting{}, circ).value;
    CHECK(std::abs(ac + bc - 1.0) <= 1e-12);
  }
  Model m = bool_model(t, random_probs(rng, 7));
  CHECK(infer(m, LogicFn::direct(), constant(true), Counting{}).value == 1.0);
  CHECK(infer(m, LogicFn::direct(), constant(false), Counting{}).value == 0.0);
  CHECK(infer(m, LogicFn::direct(), constant(true), Counting{}, circ).value == 1.0);
  CHECK(infer(m, LogicFn::direct(), constant(false), Counting{}, circ).value == 0.0);
}

TEST_CASE("raising a probability never lowers a positive formula") {
  std::mt19937_64 rng(33);
  auto t = oracle::atoms(6);
  for (int i = 0; i < 100; ++i) {
    // Negation-free trees built from and/or only are monotone in every atom.
    std::function<oracle::Tree(int)> pos = [&](int d) -> oracle::Tree {
      if (d == 0 || rng() % 3 == 0) return oracle::leaf(static_cast<int>(rng() % 6));
      return oracle::binary(rng() % 2 ? oracle::Node::And : oracle::Node::Or, pos(d - 1), pos(d - 1));
    };
    Formula f = oracle::to_formula(pos(4));
    auto p = random_probs(rng, 6);
    double base = infer(bool_model(t, p), LogicFn::direct(), f, Counting{}).value;
    int s = static_cast<int>(rng() % 6);
    p[s] = p[s] + (1.0 - p[s]) * 0.5;
    double up = infer(bool_model(t, p), LogicFn::direct(), f, Counting{}).value;
    CHECK(up >= base - 1e-15);
  }
}

TEST_CASE("conditioning on evidence gives the joint mass") {
  auto t = hcp();
  Model m = bool_model(t, {0.8, 0.5, 0.5});
  Formula happy = atom(0);
  Interpretation ev(t);
  ev.set(1, 1.0);
  InferOptions opts;
  opts.evidence = ev;
  auto r = infer(m, LogicFn::direct(), happy, Counting{}, opts);
  CHECK(r.value == doctest::Approx(0.8 * 0.5).epsilon(1e-15));
  CHECK(r.models_visited == 4u);
  opts.use_circuit = true;
  CHECK(infer(m, LogicFn::direct(), happy, Counting{}, opts).value == doctest::Approx(0.4).epsilon(1e-15));

  std::mt19937_64 rng(34);
  auto t6 = oracle::atoms(6);
  for (int i = 0; i < 50; ++i) {
    auto tree = oracle::random_tree(rng, 6, 5);
    Formula f = oracle::to_formula(tree);
    auto p = random_probs(rng, 6);
    std::uint64_t ebits = rng() & 0x3F;
    std::uint64_t emask = rng() & 0x3F;
    Interpretation e(t6);
    for (int s = 0; s < 6; ++s)
      if ((emask >> s) & 1u) e.set(s, static_cast<double>((ebits >> s) & 1u));
    // Joint mass of f with the evidence, by brute force.
    double joint = 0.0;
    for (std::uint64_t bits = 0; bits < 64; ++bits) {
      if ((bits & emask) != (ebits & emask) || !oracle::eval_bool(tree, bits)) continue;
      double w = 1.0;
      for (int s = 0; s < 6; ++s) w *= ((bits >> s) & 1u) ? p[s] : 1.0 - p[s];
      joint += w;
    }
    InferOptions o;
    o.evidence = e;
    CHECK(std::abs(infer(bool_model(t6, p), LogicFn::direct(), f, Counting{}, o).value - joint) <= 1e-12);
    o.use_circuit = true;
    CHECK(std::abs(infer(bool_model(t6, p), LogicFn::direct(), f, Counting{}, o).value - joint) <= 1e-12);
  }
}

TEST_CASE("explicit subspace") {
  auto t = hcp();
  Model m = bool_model(t, {0.8, 0.5, 0.5});
  Interpretation ev(t);
  ev.set(0, 1.0);
  InferOptions o;
  o.evidence = ev;
  o.subspace = std::vector<std::size_t>{1, 2};
  // Sum over c, p of [c | p]·b(h=1, c, p) = 0.8·0.75.
  CHECK(infer(m, LogicFn::direct(), parse_formula("h -> (c | p)", *t), Counting{}, o).value ==
        doctest::Approx(0.6).epsilon(1e-15));
  InferOptions bad;
  bad.subspace = std::vector<std::size_t>{7};
  CHECK_THROWS_AS(infer(m, LogicFn::direct(), atom(0), Counting{}, bad), InputError);
}

TEST_CASE("measure errors") {
  auto u = SymbolTable::make({{"a", Domain::unit_interval()}});
  Semantics luk = Semantics::fuzzy(TNorm::Lukasiewicz);
  Model m{u, luk, LogLinear(u, Theory({atom(0)}), {0.0}, luk, BorelQuadrature{10})};
  CHECK_THROWS_AS(infer(m, LogicFn::direct(), atom(0), Counting{}), InputError);
  CHECK_THROWS_AS(check_measure(BorelQuadrature{1}), InputError);
  CHECK_THROWS_AS(check_measure(BorelMonteCarlo{0, 1}), InputError);

  auto nine = oracle::atoms(9, true);
  Model m9{nine, luk, LogLinear(nine, Theory({atom(0)}), {0.0}, luk, BorelQuadrature{2})};
  CHECK_THROWS_WITH_AS(infer(m9, LogicFn::direct(), atom(0), BorelQuadrature{2}), doctest::Contains("montecarlo"),
                       InputError);
  CHECK_NOTHROW(infer(m9, LogicFn::direct(), atom(0), BorelMonteCarlo{100, 1}));

  auto b = hcp();
  Model mb = bool_model(b, {0.5, 0.5, 0.5});
  CHECK_THROWS_AS(infer(mb, LogicFn::direct(), atom(0), BorelQuadrature{10}), InputError);
  CHECK(describe(MeasureSpec(BorelMonteCarlo{100, 7})) == "montecarlo(n=100, seed=7)");
  CHECK(describe(MeasureSpec(ProductMixed{BorelQuadrature{50}})) == "mixed(quadrature(g=50))");
}

TEST_CASE("monte carlo agrees with quadrature") {
  std::mt19937_64 rng(35);
  std::normal_distribution<double> g(0.0, 1.0);
  int within = 0;
  const int trials = 50;
  for (int i = 0; i < trials; ++i) {
    int n = 1 + static_cast<int>(rng() % 3);
    auto t = oracle::atoms(n, true);
    auto fam = static_cast<oracle::Family>(rng() % 3);
    if (fam == oracle::Family::Goedel) fam = oracle::Family::Lukasiewicz;
    Semantics sem = Semantics::fuzzy(oracle::to_tnorm(fam));
    Formula f = oracle::to_formula(oracle::random_tree(rng, n, 3, false));
    Formula th = oracle::to_formula(oracle::random_tree(rng, n, 2, false));
    Model mq{t, sem, LogLinear(t, Theory({th}), {g(rng)}, sem, BorelQuadrature{200})};
    auto q = infer(mq, LogicFn::direct(), f, BorelQuadrature{200});
    Model mm{t, sem, LogLinear(t, Theory({th}), std::get<LogLinear>(mq.belief).weights(), sem, BorelMonteCarlo{20000, 100u + i})};
    auto mc = infer(mm, LogicFn::direct(), f, BorelMonteCarlo{20000, 100u + i});
    REQUIRE(mc.std_error.has_value());
    if (std::abs(mc.value - q.value) <= 4 * *mc.std_error + 1e-12) ++within;
  }
  CHECK(within >= 48);
}

TEST_CASE("results do not depend on the thread count") {
  std::mt19937_64 rng(36);
  auto t = oracle::atoms(3, true);
  Semantics luk = Semantics::fuzzy(TNorm::Lukasiewicz);
  Formula f = oracle::to_formula(oracle::random_tree(rng, 3, 4, false));
  Model m{t, luk, LogLinear(t, Theory({atom(0), atom(1)}), {0.7, -1.2}, luk, BorelMonteCarlo{50000, 9})};
  InferOptions one, many;
  one.threads = 1;
  many.threads = 7;
  auto a = infer(m, LogicFn::direct(), f, BorelMonteCarlo{50000, 9}, one);
  auto b = infer(m, LogicFn::direct(), f, BorelMonteCarlo{50000, 9}, many);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  auto qa = infer(m, LogicFn::direct(), f, BorelQuadrature{60}, one);
  auto qb = infer(m, LogicFn::direct(), f, BorelQuadrature{60}, many);
  CHECK(qa.value == qb.value);

  auto bt = oracle::atoms(14);
  Formula g = oracle::to_formula(oracle::random_tree(rng, 14, 7));
  Model mb = bool_model(bt, random_probs(rng, 14));
  CHECK(infer(mb, LogicFn::direct(), g, Counting{}, one).value == infer(mb, LogicFn::direct(), g, Counting{}, many).value);
}

TEST_CASE("map inference") {
  auto t = hcp();
  Model m = bool_model(t, {0.8, 0.5, 0.5});
  Formula f = parse_formula("h -> (c | p)", *t);
  // Brute-force argmax with first-wins ties in enumeration order (h most significant).
  double best = -1.0;
  std::vector<double> arg;
  for (int h = 0; h <= 1; ++h)
    for (int c = 0; c <= 1; ++c)
      for (int p = 0; p <= 1; ++p) {
        bool sat = !h || c || p;
        double w = (h ? 0.8 : 0.2) * 0.25 * (sat ? 1.0 : 0.0);
        if (w > best) {
          best = w;
          arg = {double(h), double(c), double(p)};
        }
      }
  auto r = map_inference(m, LogicFn::direct(), f);
  CHECK(r.score == doctest::Approx(best).epsilon(1e-15));
  CHECK(r.score == doctest::Approx(0.2));
  for (std::size_t i = 0; i < 3; ++i) CHECK(r.interpretation.value(i) == arg[i]);
  CHECK(arg == std::vector<double>{1, 0, 1});

  auto z = map_inference(m, LogicFn::direct(), constant(false));
  CHECK(z.score == 0.0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(z.interpretation.value(i) == 0.0);

  auto u = SymbolTable::make({{"a", Domain::unit_interval()}});
  auto pt = oracle::from_values(u, {0.4});
  Model md{u, Semantics::fuzzy(TNorm::Product), DiracPoint(pt)};
  auto d = map_inference(md, LogicFn::direct(), atom(0));
  CHECK(d.interpretation == pt);
  CHECK(d.score == 0.4);
  Semantics luk = Semantics::fuzzy(TNorm::Lukasiewicz);
  Model mc{u, luk, LogLinear(u, Theory({atom(0)}), {0.0}, luk, BorelQuadrature{10})};
  CHECK_THROWS_AS(map_inference(mc, LogicFn::direct(), atom(0)), InputError);
}

TEST_CASE("lebesgue integral of simple functions") {
  auto t = hcp();
  std::vector<Interpretation> carrier;
  for (std::uint64_t b = 0; b < 8; ++b) carrier.push_back(oracle::from_bits(t, b));
  auto is_model = [](const Interpretation& w) { return !(w.value(0) == 1.0 && w.value(1) == 0.0 && w.value(2) == 0.0); };
  std::vector<SimpleTerm> seven{{0.125, is_model}};
  CHECK(lebesgue_simple(seven, carrier, Counting{}) == 0.875);
  CHECK(lebesgue_simple({}, carrier, Counting{}) == 0.0);
  std::vector<SimpleTerm> two{{1.0, [&](const Interpretation& w) { return w == carrier[0]; }},
                              {1.0, [&](const Interpretation& w) { return w == carrier[5]; }}};
  CHECK(lebesgue_simple(two, carrier, Counting{}) == 2.0);
  std::vector<SimpleTerm> overlap{{1.0, is_model}, {1.0, [&](const Interpretation& w) { return w == carrier[0]; }}};
  CHECK_THROWS_AS(lebesgue_simple(overlap, carrier, Counting{}), InputError);
  CHECK_THROWS_AS(lebesgue_simple(seven, carrier, BorelQuadrature{10}), InputError);
}

TEST_CASE("integration primitives") {
  auto t = SymbolTable::make({{"a", Domain::unit_interval()}, {"b", Domain::unit_interval()}});
  Interpretation base(t);
  std::vector<std::size_t> dims{0, 1};
  auto e = integrate(base, dims, BorelQuadrature{100}, 2,
                     [](const Interpretation& w, std::span<double> out) {
                       out[0] = w.value(0) * w.value(1);
                       out[1] = 1.0;
                     });
  CHECK(e.value[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(e.value[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.evaluations == 10000u);
  CHECK_FALSE(e.stochastic);

  CHECK(counter_uniform(1, 2, 3) == counter_uniform(1, 2, 3));
  CHECK(counter_uniform(1, 2, 3) != counter_uniform(1, 3, 3));
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double u = counter_uniform(5, i, 0);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    mean += u;
  }
  CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));

  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-6));
}
