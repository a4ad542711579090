#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "nesy/emulators.hpp"
#include "nesy/error.hpp"
#include "nesy/parser.hpp"
#include "support/oracle.hpp"

using namespace nesy;

namespace {

IndependentBernoulli bern(const SymbolTablePtr& t, const std::vector<double>& p) {
  std::vector<std::pair<std::size_t, double>> v;
  for (std::size_t i = 0; i < p.size(); ++i) v.push_back({i, p[i]});
  return IndependentBernoulli(t, v);
}

// Table rows as (semantics class, belief column, logic function column).
struct Row {
  std::string semantics, belief, logic;
};
const std::map<std::string, Row> kTable = {
    {"semantic_loss", {"B", "D + P", "Boolean satisfaction"}},
    {"deepproblog_prop", {"B", "D + P", "Boolean satisfaction"}},
    {"neurasp_prop", {"B", "D + P", "Boolean satisfaction"}},
    {"nmln", {"B", "D + P", "Boolean satisfaction"}},
    {"ltn", {"F", "D", "Fuzzy satisfaction"}},
    {"sbr", {"F", "D", "Fuzzy satisfaction"}},
    {"neupsl", {"F:lukasiewicz", "D + P", "Fuzzy satisfaction"}},
};

Row classify(const Quadruple& q) {
  Row r;
  r.semantics = q.semantics == "boolean" ? "B" : "F";
  r.belief = q.belief == "dirac" ? "D" : (q.belief == "bernoulli" || q.belief == "loglinear") ? "D + P" : "?";
  if (q.logic_fn == "direct") r.logic = r.semantics == "B" ? "Boolean satisfaction" : "Fuzzy satisfaction";
  return r;
}

bool row_matches(const std::string& preset, const Quadruple& q) {
  Row want = kTable.at(preset);
  Row got = classify(q);
  if (want.semantics.rfind("F:", 0) == 0) {
    if (q.semantics != want.semantics.substr(2)) return false;
    want.semantics = "F";
  }
  return got.semantics == want.semantics && got.belief == want.belief && got.logic == want.logic;
}

}  // namespace

TEST_CASE("preset names") {
  CHECK(all_presets().size() == 7);
  for (Preset p : all_presets()) CHECK(preset_from_name(preset_name(p)) == p);
  CHECK_THROWS_WITH_AS(preset_from_name("dpl"), doctest::Contains("semantic_loss"), InputError);
}

TEST_CASE("probabilistic presets on the coffee rule") {
  auto t = SymbolTable::make({{"h", Domain::boolean()}, {"c", Domain::boolean()}, {"p", Domain::boolean()}});
  Formula rule = parse_formula("h -> (c | p)", *t);
  Model m{t, Semantics::boolean(), bern(t, {0.8, 0.5, 0.5})};
  auto tree = oracle::binary(oracle::Node::Implies, oracle::leaf(0),
                             oracle::binary(oracle::Node::Or, oracle::leaf(1), oracle::leaf(2)));
  double expect = oracle::wmc_brute(tree, {0.8, 0.5, 0.5});
  auto d = run_preset(Preset::DeepProbLogProp, m, rule);
  CHECK(std::abs(d.result.value - expect) <= 1e-15);
  CHECK(d.result.backend == "circuit");
  CHECK(d.quadruple.measure == "counting");
  auto s = run_preset(Preset::SemanticLoss, m, rule);
  REQUIRE(s.loss.has_value());
  CHECK(s.loss->loss == doctest::Approx(-std::log(expect)));
  CHECK_FALSE(s.loss->saturated);
}

TEST_CASE("semantic loss") {
  auto t = SymbolTable::make({{"h", Domain::boolean()}, {"c", Domain::boolean()}, {"p", Domain::boolean()}});
  auto half = bern(t, {0.5, 0.5, 0.5});
  CHECK(semantic_loss(constant(true), half).loss == 0.0);
  CHECK(semantic_loss(parse_formula("h -> (c | p)", *t), half).loss == doctest::Approx(-std::log(0.875)).epsilon(1e-15));
  CHECK(semantic_loss(atom(0), bern(t, {1.0, 0.5, 0.5})).loss == 0.0);
  auto sat = semantic_loss(constant(false), half);
  CHECK(sat.saturated);
  CHECK(std::isinf(sat.loss));
  CHECK(semantic_loss(atom(0), bern(t, {0.0, 0.5, 0.5})).saturated);
}

TEST_CASE("boolean presets share their inner weighted count") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    int n = 1 + static_cast<int>(rng() % 8);
    auto t = oracle::atoms(n);
    std::vector<double> p(n);
    for (auto& x : p) x = u(rng);
    auto tree = oracle::random_tree(rng, n, 5);
    Formula f = oracle::to_formula(tree);
    Model m{t, Semantics::boolean(), bern(t, p)};
    auto a = run_preset(Preset::DeepProbLogProp, m, f);
    auto b = run_preset(Preset::NeurAspProp, m, f);
    auto c = run_preset(Preset::SemanticLoss, m, f);
    CHECK(a.result.value == b.result.value);
    CHECK(a.result.value == c.result.value);
    CHECK(std::abs(a.result.value - oracle::wmc_brute(tree, p)) <= 1e-12);
    if (a.result.value > 0.0) CHECK(c.loss->loss == semantic_loss_from_value(a.result.value).loss);
  }
}

TEST_CASE("point presets collapse to the fuzzy value") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto t = SymbolTable::make({{"h", Domain::unit_interval()}, {"c", Domain::unit_interval()}, {"p", Domain::unit_interval()}});
  Formula rule = parse_formula("h -> (c | p)", *t);
  Model m{t, Semantics::fuzzy(TNorm::Lukasiewicz), DiracPoint(oracle::from_values(t, {1.0, 0.5, 0.5}))};
  auto r = run_preset(Preset::Ltn, m, rule);
  CHECK(r.result.value == 1.0);
  CHECK(r.quadruple.measure == "collapse");
  for (int i = 0; i < 200; ++i) {
    auto fam = static_cast<oracle::Family>(i % 3);
    auto tree = oracle::random_tree(rng, 3, 5);
    std::vector<double> x{u(rng), u(rng), u(rng)};
    Model pm{t, Semantics::fuzzy(oracle::to_tnorm(fam)), DiracPoint(oracle::from_values(t, x))};
    auto l = run_preset(Preset::Ltn, pm, oracle::to_formula(tree));
    auto s = run_preset(Preset::Sbr, pm, oracle::to_formula(tree));
    CHECK(l.result.value == s.result.value);
    CHECK(l.result.value == doctest::Approx(oracle::eval_fuzzy(tree, fam, x)).epsilon(1e-12));
  }
}

TEST_CASE("nmln marginals and interpretation probabilities") {
  auto t = SymbolTable::make({{"h", Domain::boolean()}, {"c", Domain::boolean()}, {"p", Domain::boolean()}});
  Formula rule = parse_formula("h -> (c | p)", *t);
  LogLinear b(t, Theory({rule}), {1.0}, Semantics::boolean(), Counting{});
  Model m{t, Semantics::boolean(), b};
  double e = std::exp(1.0);
  auto r = run_preset(Preset::Nmln, m, rule);
  CHECK(r.result.value == doctest::Approx(7 * e / (7 * e + 1)).epsilon(1e-14));
  double total = 0.0;
  for (std::uint64_t bits = 0; bits < 8; ++bits) {
    double pr = nmln_interpretation_probability(b, oracle::from_bits(t, bits));
    CHECK(pr == doctest::Approx(bits == 0b001 ? 1 / (7 * e + 1) : e / (7 * e + 1)).epsilon(1e-14));
    total += pr;
  }
  CHECK(std::abs(total - 1.0) <= 1e-9);
  CHECK_THROWS_AS(nmln_interpretation_probability(b, Interpretation(t)), InputError);

  std::mt19937_64 rng(53);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    auto tt = oracle::atoms(6);
    std::vector<Formula> th;
    std::vector<double> w;
    for (int k = 0; k < 4; ++k) {
      th.push_back(oracle::to_formula(oracle::random_tree(rng, 6, 3)));
      w.push_back(g(rng));
    }
    LogLinear ll(tt, Theory(th), w, Semantics::boolean(), Counting{});
    double s = 0.0;
    for (std::uint64_t bits = 0; bits < 64; ++bits) s += nmln_interpretation_probability(ll, oracle::from_bits(tt, bits));
    CHECK(std::abs(s - 1.0) <= 1e-9);
  }
}

TEST_CASE("fuzzy expectation preset") {
  auto t = SymbolTable::make({{"a", Domain::unit_interval()}});
  Semantics luk = Semantics::fuzzy(TNorm::Lukasiewicz);
  Model flat{t, luk, LogLinear(t, Theory({atom(0)}), {0.0}, luk, BorelQuadrature{1000})};
  auto r = run_preset(Preset::NeuPsl, flat, atom(0));
  CHECK(std::abs(r.result.value - 0.5) <= 1e-6);
  CHECK(r.quadruple.measure == "quadrature(g=1000)");
  PresetOptions mc;
  mc.measure = BorelMonteCarlo{20000, 4};
  auto rm = run_preset(Preset::NeuPsl, flat, atom(0), mc);
  REQUIRE(rm.result.std_error.has_value());
  CHECK(std::abs(rm.result.value - 0.5) <= 4 * *rm.result.std_error);
  PresetOptions counting;
  counting.measure = Counting{};
  CHECK_THROWS_AS(run_preset(Preset::NeuPsl, flat, atom(0), counting), InputError);
}

TEST_CASE("large weights approach the point value") {
  // Density ∝ exp(λa) on [0, 1]. E[a] = 1/(1 − e^−λ) − 1/λ, so the gap to
  // the point value 1 is 1/λ − e^−λ/(1 − e^−λ), just under 0.02 at λ = 50.
  auto t = SymbolTable::make({{"a", Domain::unit_interval()}});
  Semantics luk = Semantics::fuzzy(TNorm::Lukasiewicz);
  const double lam = 50.0;
  Model heavy{t, luk, LogLinear(t, Theory({atom(0)}), {lam}, luk, BorelQuadrature{2000})};
  Model point{t, luk, DiracPoint(oracle::from_values(t, {1.0}))};
  double e = run_preset(Preset::NeuPsl, heavy, atom(0)).result.value;
  double d = run_preset(Preset::Ltn, point, atom(0)).result.value;
  double exact = 1.0 / (1.0 - std::exp(-lam)) - 1.0 / lam;
  CHECK(e == doctest::Approx(exact).epsilon(1e-6));
  // The analytic gap sits on the 0.02 bound; allow for the grid error.
  CHECK(std::abs(exact - d) <= 0.02 + 1e-12);
  CHECK(std::abs(e - d) <= 0.02 + 1e-5);
  // A saturating query is pinned much more tightly.
  Formula sat = disjunction(atom(0), atom(0));
  CHECK(std::abs(run_preset(Preset::NeuPsl, heavy, sat).result.value - 1.0) <= 1e-6);
}

TEST_CASE("quadruples match the table rows") {
  auto bt = SymbolTable::make({{"a", Domain::boolean()}});
  auto ut = SymbolTable::make({{"a", Domain::unit_interval()}});
  Semantics luk = Semantics::fuzzy(TNorm::Lukasiewicz);
  Model bm{bt, Semantics::boolean(), bern(bt, {0.3})};
  Model ll{bt, Semantics::boolean(), LogLinear(bt, Theory({atom(0)}), {0.5}, Semantics::boolean(), Counting{})};
  Model dm{ut, Semantics::fuzzy(TNorm::Product), DiracPoint(oracle::from_values(ut, {0.3}))};
  Model fm{ut, luk, LogLinear(ut, Theory({atom(0)}), {0.5}, luk, BorelQuadrature{50})};
  std::map<Preset, const Model*> models = {{Preset::SemanticLoss, &bm}, {Preset::DeepProbLogProp, &bm},
                                           {Preset::NeurAspProp, &bm},  {Preset::Nmln, &ll},
                                           {Preset::Ltn, &dm},          {Preset::Sbr, &dm},
                                           {Preset::NeuPsl, &fm}};
  for (Preset p : all_presets()) {
    auto r = run_preset(p, *models.at(p), atom(0));
    CHECK_MESSAGE(row_matches(preset_name(p), r.quadruple), preset_name(p));
    CHECK(r.quadruple.belief == preset_belief(p));
    CHECK(preset_is_boolean(p) == (r.quadruple.semantics == "boolean"));
  }
}

TEST_CASE("presets reject mismatched models") {
  auto bt = SymbolTable::make({{"a", Domain::boolean()}});
  auto ut = SymbolTable::make({{"a", Domain::unit_interval()}});
  Model bm{bt, Semantics::boolean(), bern(bt, {0.3})};
  Model dm{ut, Semantics::fuzzy(TNorm::Product), DiracPoint(oracle::from_values(ut, {0.3}))};
  Model pm{ut, Semantics::fuzzy(TNorm::Product),
           LogLinear(ut, Theory({atom(0)}), {0.5}, Semantics::fuzzy(TNorm::Product), BorelQuadrature{50})};
  CHECK_THROWS_AS(run_preset(Preset::Ltn, bm, atom(0)), InputError);
  CHECK_THROWS_AS(run_preset(Preset::Nmln, bm, atom(0)), InputError);
  CHECK_THROWS_AS(run_preset(Preset::SemanticLoss, dm, atom(0)), InputError);
  CHECK_THROWS_AS(run_preset(Preset::NeuPsl, pm, atom(0)), InputError);
}
