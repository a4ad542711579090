#include "nesy/gradients.hpp"

#include <cmath>

#include "nesy/error.hpp"
#include "nesy/integration.hpp"

namespace nesy {

GradientResult grad_wmc(const CompiledCircuit& c, const IndependentBernoulli& b) {
  auto dense = b.dense();
  auto cg = wmc_gradient(c, dense);
  GradientResult r;
  r.value = cg.value;
  r.grad.reserve(b.symbols().size());
  for (auto s : b.symbols()) r.grad.push_back(s < cg.grad.size() ? cg.grad[s] : 0.0);
  return r;
}

GradientResult grad_loglinear(const LogLinear& b, const LogicFn& l, const Formula& f,
                              const std::optional<MeasureSpec>& m, unsigned threads) {
  const auto& table = b.table();
  Evaluator ev(b.semantics(), f, *table);
  const std::size_t n = b.weights().size();
  const std::size_t k = 2 + 2 * n;
  Interpretation base(table);
  auto dims = table->all_indices();
  // Components: A = ∫ l·u, B = ∫ u, C_i = ∫ l·u·φ_i, D_i = ∫ u·φ_i.
  Estimate e = integrate(base, dims, m ? *m : b.base_measure(), k,
                         [&](const Interpretation& w, std::span<double> out) {
                           double u = b.unnormalized(w);
                           double lu = l.select(ev(w)) * u;
                           out[0] = lu;
                           out[1] = u;
                           auto phi = b.features(w);
                           for (std::size_t i = 0; i < n; ++i) {
                             out[2 + i] = lu * phi[i];
                             out[2 + n + i] = u * phi[i];
                           }
                         },
                         threads);
  const double A = e.value[0], B = e.value[1];
  if (!std::isfinite(B) || !(B > 0.0)) throw NumericalError("log-linear normalizing constant is not finite and positive");
  if (!(A > 0.0)) throw NumericalError("gradient of log F is undefined because F = 0");
  GradientResult r;
  r.value = A / B;
  r.grad.resize(n);
  if (e.stochastic) r.grad_std_error.emplace(n);
  std::vector<double> dg(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double C = e.value[2 + i], D = e.value[2 + n + i];
    r.grad[i] = C / A - D / B;
    if (e.stochastic) {
      std::fill(dg.begin(), dg.end(), 0.0);
      dg[0] = -C / (A * A);
      dg[1] = D / (B * B);
      dg[2 + i] = 1.0 / A;
      dg[2 + n + i] = -1.0 / B;
      (*r.grad_std_error)[i] = delta_std_error(e, dg);
    }
  }
  return r;
}

namespace {

struct Dual {
  double v;
  std::vector<double> g;
};

class DiracDiff {
 public:
  DiracDiff(TNorm t, const Interpretation& w, double tol)
      : t_(t), w_(w), tol_(tol), n_(w.table()->size()), kinks_(n_, false) {}

  Dual run(const Formula& f) {
    using namespace connective;
    switch (f.kind()) {
      case NodeKind::True: return constant_dual(1.0);
      case NodeKind::False: return constant_dual(0.0);
      case NodeKind::Atom: {
        Dual d = constant_dual(w_.value(f.symbol()));
        d.g[f.symbol()] = 1.0;
        return d;
      }
      case NodeKind::Compare: {
        long double e = to_double(f.linear().constant);
        for (const auto& term : f.linear().terms)
          e += to_double(term.coeff) * static_cast<long double>(w_.value(term.symbol));
        if (std::fabs(e) <= tol_)
          for (const auto& term : f.linear().terms) flag(term.symbol);
        return constant_dual(compare_holds(f.linear(), f.comparator(), w_) ? 1.0 : 0.0);
      }
      case NodeKind::Not: {
        Dual x = run(f.operand());
        if (t_ == TNorm::Goedel) {
          if (std::fabs(x.v) <= tol_) flag_nonzero(x.g);
          return constant_dual(negate(t_, x.v));
        }
        for (auto& gi : x.g) gi = -gi;
        x.v = negate(t_, x.v);
        return x;
      }
      case NodeKind::And: return conj_d(run(f.lhs()), run(f.rhs()));
      case NodeKind::Or: return disj_d(run(f.lhs()), run(f.rhs()));
      case NodeKind::Implies: return implies_d(run(f.lhs()), run(f.rhs()));
      case NodeKind::Iff: {
        Dual x = run(f.lhs());
        Dual y = run(f.rhs());
        return conj_d(implies_d(x, y), implies_d(y, x));
      }
    }
    return constant_dual(0.0);
  }

  std::vector<bool> take_kinks() { return std::move(kinks_); }

 private:
  Dual constant_dual(double v) const { return Dual{v, std::vector<double>(n_, 0.0)}; }

  void flag(std::size_t i) { kinks_[i] = true; }
  void flag_nonzero(const std::vector<double>& g) {
    for (std::size_t i = 0; i < n_; ++i)
      if (g[i] != 0.0) flag(i);
  }
  void flag_diff(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < n_; ++i)
      if (a[i] != b[i]) flag(i);
  }
  bool near(double a, double b) const { return std::fabs(a - b) <= tol_; }

  std::vector<double> lin(double a, const std::vector<double>& x, double b, const std::vector<double>& y) const {
    std::vector<double> g(n_);
    for (std::size_t i = 0; i < n_; ++i) g[i] = a * x[i] + b * y[i];
    return g;
  }

  Dual conj_d(const Dual& x, const Dual& y) {
    double v = connective::conj(t_, x.v, y.v);
    switch (t_) {
      case TNorm::Lukasiewicz: {
        double s = x.v + y.v - 1.0;
        auto active = lin(1, x.g, 1, y.g);
        auto zero = std::vector<double>(n_, 0.0);
        if (near(s, 0.0)) flag_diff(zero, active);
        return Dual{v, s > 0.0 ? active : zero};
      }
      case TNorm::Goedel:
        if (near(x.v, y.v)) flag_diff(x.g, y.g);
        return Dual{v, y.v < x.v ? y.g : x.g};
      case TNorm::Product: return Dual{v, lin(y.v, x.g, x.v, y.g)};
    }
    return Dual{v, {}};
  }

  Dual disj_d(const Dual& x, const Dual& y) {
    double v = connective::disj(t_, x.v, y.v);
    switch (t_) {
      case TNorm::Lukasiewicz: {
        double s = x.v + y.v;
        auto active = lin(1, x.g, 1, y.g);
        auto zero = std::vector<double>(n_, 0.0);
        if (near(s, 1.0)) flag_diff(zero, active);
        return Dual{v, s < 1.0 ? active : zero};
      }
      case TNorm::Goedel:
        if (near(x.v, y.v)) flag_diff(x.g, y.g);
        return Dual{v, x.v < y.v ? y.g : x.g};
      case TNorm::Product: return Dual{v, lin(1.0 - y.v, x.g, 1.0 - x.v, y.g)};
    }
    return Dual{v, {}};
  }

  Dual implies_d(const Dual& x, const Dual& y) {
    double v = connective::implies(t_, x.v, y.v);
    auto zero = std::vector<double>(n_, 0.0);
    switch (t_) {
      case TNorm::Lukasiewicz: {
        double s = 1.0 - x.v + y.v;
        auto active = lin(-1, x.g, 1, y.g);
        if (near(s, 1.0)) flag_diff(zero, active);
        return Dual{v, s < 1.0 ? active : zero};
      }
      case TNorm::Goedel:
        // Jumps from 1 to y as x crosses y.
        if (near(x.v, y.v)) {
          flag_nonzero(x.g);
          flag_nonzero(y.g);
        }
        return Dual{v, x.v <= y.v ? zero : y.g};
      case TNorm::Product: {
        if (x.v <= y.v) {
          if (near(x.v, y.v) && x.v > 0.0) flag_diff(zero, lin(-y.v / (x.v * x.v), x.g, 1.0 / x.v, y.g));
          return Dual{v, zero};
        }
        auto active = lin(-y.v / (x.v * x.v), x.g, 1.0 / x.v, y.g);
        if (near(x.v, y.v)) flag_diff(zero, active);
        return Dual{v, active};
      }
    }
    return Dual{v, {}};
  }

  TNorm t_;
  const Interpretation& w_;
  double tol_;
  std::size_t n_;
  std::vector<bool> kinks_;
};

}  // namespace

GradientResult grad_dirac(const Formula& f, TNorm t, const Interpretation& point, double kink_tolerance) {
  if (!point.total()) throw InputError("gradient point must assign every symbol");
  if (kink_tolerance < 0.0) throw InputError("kink tolerance must be nonnegative");
  DiracDiff diff(t, point, kink_tolerance);
  Dual d = diff.run(f);
  GradientResult r;
  r.value = d.v;
  r.grad = std::move(d.g);
  r.kinks = diff.take_kinks();
  for (bool k : r.kinks) r.any_kink = r.any_kink || k;
  return r;
}

}  // namespace nesy

namespace nesy {

GradientResult value_and_grad(const Model& model, const LogicFn& l, const Formula& f, const MeasureSpec& m,
                              const InferOptions& opts, double kink_tolerance) {
  Evaluator check(model.semantics, f, *model.symbols);
  if (const auto* bern = std::get_if<IndependentBernoulli>(&model.belief)) {
    if (!model.semantics.is_boolean() || !std::holds_alternative<Counting>(m))
      throw InputError("bernoulli gradients need boolean semantics and the counting measure");
    bern->check_complete();
    Formula g = f;
    std::vector<std::size_t> fixed;
    if (opts.evidence)
      for (std::size_t s = 0; s < model.symbols->size(); ++s)
        if (opts.evidence->assigned(s)) fixed.push_back(s);
    if (opts.subspace) throw InputError("bernoulli gradients take evidence, not an explicit subspace");
    for (auto s : fixed) {
      if ((*model.symbols)[s].domain.kind() != DomainKind::Boolean)
        throw InputError("evidence on numeric symbols is not supported for gradients");
      g = condition(g, s, opts.evidence->value(s) != 0.0);
    }
    GradientResult r = grad_wmc(compile(g, *model.symbols), *bern);
    // Evidence factors q_s = p_s or 1 − p_s multiply the conditioned count.
    const auto& syms = bern->symbols();
    std::vector<double> q(syms.size(), 1.0);
    std::vector<bool> is_fixed(syms.size(), false);
    for (std::size_t k = 0; k < syms.size(); ++k) {
      if (!opts.evidence || !opts.evidence->assigned(syms[k])) continue;
      is_fixed[k] = true;
      double p = bern->probs()[k];
      q[k] = opts.evidence->value(syms[k]) != 0.0 ? p : 1.0 - p;
    }
    const double w = r.value;
    const double l1 = l.select(1.0);
    for (std::size_t k = 0; k < syms.size(); ++k) {
      double others = 1.0;
      for (std::size_t j = 0; j < syms.size(); ++j)
        if (j != k) others *= q[j];
      if (is_fixed[k])
        r.grad[k] = l1 * others * w * (opts.evidence->value(syms[k]) != 0.0 ? 1.0 : -1.0);
      else
        r.grad[k] = l1 * others * r.grad[k];
    }
    double all = 1.0;
    for (double x : q) all *= x;
    r.value = l1 * all * w;
    return r;
  }
  if (const auto* ll = std::get_if<LogLinear>(&model.belief)) {
    if (opts.evidence || opts.subspace) throw InputError("log-linear gradients integrate over the whole space; drop the evidence");
    return grad_loglinear(*ll, l, f, m, opts.threads);
  }
  if (const auto* dirac = std::get_if<DiracPoint>(&model.belief)) {
    if (!model.semantics.is_fuzzy()) throw InputError("gradients of a point belief need fuzzy semantics");
    GradientResult r = grad_dirac(f, model.semantics.tnorm(), dirac->point(), kink_tolerance);
    const double v = r.value;
    r.value = l.select(v);
    if (const auto* t = std::get_if<LogicFn::Threshold>(&l.kind())) {
      if (std::fabs(v - t->tau) <= kink_tolerance)
        for (std::size_t i = 0; i < r.grad.size(); ++i)
          if (r.grad[i] != 0.0) r.kinks[i] = true;
      std::fill(r.grad.begin(), r.grad.end(), 0.0);
    } else if (!l.is_direct() && !l.selects(v)) {
      std::fill(r.grad.begin(), r.grad.end(), 0.0);
    }
    r.any_kink = false;
    for (bool k : r.kinks) r.any_kink = r.any_kink || k;
    return r;
  }
  throw InputError("fuzzy-set beliefs have no parameter vector to differentiate");
}

}  // namespace nesy
