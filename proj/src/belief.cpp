#include "nesy/belief.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nesy/error.hpp"
#include "nesy/integration.hpp"

namespace nesy {

IndependentBernoulli::IndependentBernoulli(SymbolTablePtr table, std::vector<std::pair<std::size_t, double>> probs)
    : table_(std::move(table)) {
  std::sort(probs.begin(), probs.end());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    auto [s, p] = probs[i];
    if (s >= table_->size()) throw InputError("bernoulli belief references unknown symbol");
    const auto& sym = (*table_)[s];
    if (sym.domain.kind() != DomainKind::Boolean)
      throw InputError("bernoulli belief over non-boolean symbol '" + sym.name + "'");
    if (i > 0 && probs[i - 1].first == s) throw InputError("duplicate probability for '" + sym.name + "'");
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("probability of '" + sym.name + "' outside [0, 1]");
    symbols_.push_back(s);
    probs_.push_back(p);
  }
}

std::optional<double> IndependentBernoulli::prob(std::size_t symbol) const {
  auto it = std::lower_bound(symbols_.begin(), symbols_.end(), symbol);
  if (it == symbols_.end() || *it != symbol) return std::nullopt;
  return probs_[static_cast<std::size_t>(it - symbols_.begin())];
}

std::vector<double> IndependentBernoulli::dense() const {
  std::vector<double> out(table_->size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < symbols_.size(); ++i) out[symbols_[i]] = probs_[i];
  return out;
}

void IndependentBernoulli::check_complete() const {
  for (const auto& s : table_->symbols())
    if (s.domain.kind() == DomainKind::Boolean && !prob(s.index))
      throw InputError("atom '" + s.name + "' is missing a probability");
}

double IndependentBernoulli::weight(const Interpretation& w) const {
  double out = 1.0;
  for (std::size_t i = 0; i < symbols_.size(); ++i) out *= w.value(symbols_[i]) != 0.0 ? probs_[i] : 1.0 - probs_[i];
  return out;
}

LogLinear::LogLinear(SymbolTablePtr table, Theory theory, std::vector<double> weights, Semantics sem, MeasureSpec base)
    : table_(std::move(table)), theory_(std::move(theory)), weights_(std::move(weights)), sem_(sem), base_(base) {
  if (weights_.size() != theory_.size())
    throw InputError("log-linear belief has " + std::to_string(weights_.size()) + " weights for " +
                     std::to_string(theory_.size()) + " sentences");
  for (double l : weights_)
    if (!std::isfinite(l)) throw InputError("log-linear weights must be finite");
  check_measure(base_);
  evaluators_.reserve(theory_.size());
  for (const auto& f : theory_.sentences()) evaluators_.emplace_back(sem_, f, *table_);
}

std::vector<double> LogLinear::features(const Interpretation& w) const {
  std::vector<double> out(evaluators_.size());
  for (std::size_t i = 0; i < evaluators_.size(); ++i) out[i] = evaluators_[i](w);
  return out;
}

double LogLinear::unnormalized(const Interpretation& w) const {
  double s = 0.0;
  for (std::size_t i = 0; i < evaluators_.size(); ++i) s += weights_[i] * evaluators_[i](w);
  return std::exp(s);
}

double LogLinear::weight(const Interpretation& w) const {
  double u = unnormalized(w);
  return norm_ ? u / norm_->z : u;
}

LogLinear LogLinear::with_weights(std::vector<double> weights) const {
  return LogLinear(table_, theory_, std::move(weights), sem_, base_);
}

LogLinear normalize(const LogLinear& b, unsigned threads) {
  Interpretation base(b.table());
  auto dims = b.table()->all_indices();
  Estimate e = integrate(base, dims, b.base_measure(), 1,
                         [&](const Interpretation& w, std::span<double> out) { out[0] = b.unnormalized(w); }, threads);
  double z = e.value[0];
  if (!std::isfinite(z) || !(z > 0.0)) throw NumericalError("log-linear normalizing constant is not finite and positive");
  LogLinear out = b;
  out.norm_ = Normalization{z, e.stochastic ? std::optional<double>(e.std_error(0)) : std::nullopt};
  return out;
}

DiracPoint::DiracPoint(Interpretation point) : point_(std::move(point)) {
  if (!point_.total()) throw InputError("dirac point must assign every symbol");
}

double MembershipCurve::operator()(double x) const {
  if (x <= knots.front().first) return knots.front().second;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    auto [x1, y1] = knots[i];
    if (x <= x1) {
      auto [x0, y0] = knots[i - 1];
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
  }
  return knots.back().second;
}

FuzzyMembership::FuzzyMembership(SymbolTablePtr table, std::vector<MembershipCurve> curves) : curves_(std::move(curves)) {
  std::set<std::size_t> seen;
  for (const auto& c : curves_) {
    if (c.symbol >= table->size()) throw InputError("membership curve references unknown symbol");
    const auto& sym = (*table)[c.symbol];
    if (sym.domain.kind() != DomainKind::UnitInterval)
      throw InputError("membership curve over non-unit symbol '" + sym.name + "'");
    if (!seen.insert(c.symbol).second) throw InputError("two membership curves for '" + sym.name + "'");
    if (c.knots.size() < 2) throw InputError("membership curve of '" + sym.name + "' needs at least 2 knots");
    if (c.knots.front().first != 0.0 || c.knots.back().first != 1.0)
      throw InputError("membership curve of '" + sym.name + "' must have knots at x = 0 and x = 1");
    for (std::size_t i = 0; i < c.knots.size(); ++i) {
      if (!(c.knots[i].second >= 0.0 && c.knots[i].second <= 1.0))
        throw InputError("membership values of '" + sym.name + "' must lie in [0, 1]");
      if (i > 0 && !(c.knots[i].first > c.knots[i - 1].first))
        throw InputError("membership knots of '" + sym.name + "' must be strictly increasing");
    }
    if (!(c.exponent >= 0.0) || !std::isfinite(c.exponent))
      throw InputError("membership exponent of '" + sym.name + "' must be finite and non-negative");
  }
  std::sort(curves_.begin(), curves_.end(), [](const auto& a, const auto& b) { return a.symbol < b.symbol; });
}

std::vector<std::size_t> FuzzyMembership::symbols() const {
  std::vector<std::size_t> out;
  for (const auto& c : curves_) out.push_back(c.symbol);
  return out;
}

double FuzzyMembership::weight(const Interpretation& w) const {
  double out = 1.0;
  for (const auto& c : curves_) {
    double m = c(w.value(c.symbol));
    out *= c.exponent == 1.0 ? m : std::pow(m, c.exponent);
  }
  return out;
}

double belief_weight(const Belief& b, const Formula&, const Interpretation& w) {
  return std::visit(
      [&](const auto& bel) -> double {
        using B = std::decay_t<decltype(bel)>;
        if constexpr (std::is_same_v<B, DiracPoint>) {
          throw InputError("atomic belief has no density; dirac beliefs are only usable inside the integrator");
        } else {
          if constexpr (std::is_same_v<B, IndependentBernoulli>) bel.check_complete();
          return bel.weight(w);
        }
      },
      b);
}

std::vector<std::size_t> support(const Belief& b) {
  return std::visit(
      [](const auto& bel) -> std::vector<std::size_t> {
        using B = std::decay_t<decltype(bel)>;
        if constexpr (std::is_same_v<B, IndependentBernoulli>)
          return bel.symbols();
        else if constexpr (std::is_same_v<B, LogLinear>)
          return bel.table()->all_indices();
        else if constexpr (std::is_same_v<B, DiracPoint>)
          return bel.point().table()->all_indices();
        else
          return bel.symbols();
      },
      b);
}

std::string family_name(const Belief& b) {
  switch (b.index()) {
    case 0: return "bernoulli";
    case 1: return "loglinear";
    case 2: return "dirac";
    default: return "fuzzyset";
  }
}

std::vector<double> parameters(const Belief& b) {
  if (auto* p = std::get_if<IndependentBernoulli>(&b)) return p->probs();
  if (auto* l = std::get_if<LogLinear>(&b)) return l->weights();
  if (auto* d = std::get_if<DiracPoint>(&b)) {
    std::vector<double> out;
    for (std::size_t i = 0; i < d->point().size(); ++i) out.push_back(d->point().value(i));
    return out;
  }
  return {};
}

ParameterUpdate with_parameters(const Belief& b, std::span<const double> theta, double eps) {
  auto expected = parameters(b).size();
  if (std::holds_alternative<FuzzyMembership>(b)) throw InputError("fuzzyset beliefs have no parameter vector");
  if (theta.size() != expected)
    throw InputError("parameter vector has length " + std::to_string(theta.size()) + ", expected " +
                     std::to_string(expected));
  ParameterUpdate out{b, false};
  if (auto* p = std::get_if<IndependentBernoulli>(&b)) {
    std::vector<std::pair<std::size_t, double>> probs;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      double v = theta[i];
      if (std::isnan(v)) throw InputError("parameter " + std::to_string(i) + " is NaN");
      double c = std::clamp(v, eps, 1.0 - eps);
      if (c != v) out.clamped = true;
      probs.emplace_back(p->symbols()[i], c);
    }
    out.belief = IndependentBernoulli(p->table(), std::move(probs));
  } else if (auto* l = std::get_if<LogLinear>(&b)) {
    out.belief = l->with_weights(std::vector<double>(theta.begin(), theta.end()));
  } else if (auto* d = std::get_if<DiracPoint>(&b)) {
    Interpretation w(d->point().table());
    for (std::size_t i = 0; i < theta.size(); ++i) w.set(i, theta[i]);
    out.belief = DiracPoint(std::move(w));
  }
  return out;
}

}  // namespace nesy
