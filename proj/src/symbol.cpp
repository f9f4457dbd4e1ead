#include "gcl/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace gcl {

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

auto term_key(const SymbolTerm& t) {
  return std::tie(t.x_pow, t.xi_pow, t.alpha, t.x_center, t.beta, t.xi_center);
}

}  // namespace

SymbolSpec SymbolSpec::gaussian(std::size_t n, std::size_t m, cplx coef, Vec alpha, Vec beta,
                                Vec x_center, Vec xi_center) {
  SymbolSpec s(n, m);
  SymbolTerm t;
  t.coef = coef;
  t.alpha = std::move(alpha);
  t.beta = std::move(beta);
  t.x_center = std::move(x_center);
  t.xi_center = std::move(xi_center);
  s.add_term(std::move(t));
  return s;
}

void SymbolSpec::add_term(SymbolTerm t) {
  auto fill = [](auto& v, std::size_t dim, auto value, const char* name) {
    if (v.empty()) v.assign(dim, value);
    if (v.size() != dim) {
      throw Error(std::string("symbol term: '") + name + "' has wrong dimension");
    }
  };
  fill(t.x_pow, n_, 0, "x_pow");
  fill(t.xi_pow, m_, 0, "xi_pow");
  fill(t.alpha, n_, 1.0, "alpha");
  fill(t.x_center, n_, 0.0, "x_center");
  fill(t.beta, m_, 1.0, "beta");
  fill(t.xi_center, m_, 0.0, "xi_center");
  for (double a : t.alpha) {
    if (!(a > 0.0)) throw Error("symbol term: Gaussian widths alpha must be positive");
  }
  for (double b : t.beta) {
    if (!(b > 0.0)) throw Error("symbol term: Gaussian widths beta must be positive");
  }
  for (int p : t.x_pow) {
    if (p < 0) throw Error("symbol term: negative exponent");
  }
  for (int p : t.xi_pow) {
    if (p < 0) throw Error("symbol term: negative exponent");
  }
  terms_.push_back(std::move(t));
  canonicalize();
}

void SymbolSpec::canonicalize() {
  std::stable_sort(terms_.begin(), terms_.end(),
                   [](const SymbolTerm& a, const SymbolTerm& b) { return term_key(a) < term_key(b); });
  std::vector<SymbolTerm> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && term_key(merged.back()) == term_key(t)) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const SymbolTerm& t) { return t.coef == cplx(0.0, 0.0); });
  terms_ = std::move(merged);
}

bool operator==(const SymbolSpec& a, const SymbolSpec& b) {
  if (a.n_ != b.n_ || a.m_ != b.m_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (term_key(a.terms_[i]) != term_key(b.terms_[i])) return false;
    if (a.terms_[i].coef != b.terms_[i].coef) return false;
  }
  return true;
}

cplx SymbolSpec::term_value(std::size_t k, std::span<const double> x,
                            std::span<const double> xi) const {
  const auto& t = terms_[k];
  double poly = 1.0;
  double expo = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    poly *= ipow(x[j], t.x_pow[j]);
    const double d = x[j] - t.x_center[j];
    expo -= t.alpha[j] * d * d;
  }
  for (std::size_t l = 0; l < m_; ++l) {
    poly *= ipow(xi[l], t.xi_pow[l]);
    const double d = xi[l] - t.xi_center[l];
    expo -= t.beta[l] * d * d;
  }
  return t.coef * (poly * std::exp(expo));
}

cplx SymbolSpec::operator()(std::span<const double> x, std::span<const double> xi) const {
  cplx s = 0.0;
  for (std::size_t k = 0; k < terms_.size(); ++k) s += term_value(k, x, xi);
  return s;
}

// d/dy [c y^p exp(-a (y - yc)^2)] = c p y^{p-1} e - 2 a c y^{p+1} e + 2 a yc c y^p e
SymbolSpec SymbolSpec::derivative(bool base, std::size_t axis) const {
  SymbolSpec out(n_, m_);
  for (const auto& t : terms_) {
    auto& pow = base ? t.x_pow : t.xi_pow;
    const double width = base ? t.alpha[axis] : t.beta[axis];
    const double center = base ? t.x_center[axis] : t.xi_center[axis];
    const int p = pow[axis];
    auto emit = [&](cplx c, int new_pow) {
      if (c == cplx(0.0, 0.0)) return;
      SymbolTerm u = t;
      u.coef = c;
      (base ? u.x_pow : u.xi_pow)[axis] = new_pow;
      out.terms_.push_back(std::move(u));
    };
    if (p > 0) emit(t.coef * static_cast<double>(p), p - 1);
    emit(t.coef * (-2.0 * width), p + 1);
    emit(t.coef * (2.0 * width * center), p);
  }
  out.canonicalize();
  return out;
}

SymbolSpec SymbolSpec::d_x(std::size_t j) const {
  if (j >= n_) throw Error("d_x: base index out of range");
  return derivative(true, j);
}

SymbolSpec SymbolSpec::d_xi(std::size_t k) const {
  if (k >= m_) throw Error("d_xi: fiber index out of range");
  return derivative(false, k);
}

SymbolSpec SymbolSpec::times_x(std::size_t j) const {
  if (j >= n_) throw Error("times_x: base index out of range");
  SymbolSpec out = *this;
  for (auto& t : out.terms_) ++t.x_pow[j];
  out.canonicalize();
  return out;
}

SymbolSpec SymbolSpec::times_xi(std::size_t i) const {
  if (i >= m_) throw Error("times_xi: fiber index out of range");
  SymbolSpec out = *this;
  for (auto& t : out.terms_) ++t.xi_pow[i];
  out.canonicalize();
  return out;
}

SymbolSpec SymbolSpec::scaled(cplx c) const {
  SymbolSpec out = *this;
  for (auto& t : out.terms_) t.coef *= c;
  out.canonicalize();
  return out;
}

SymbolSpec& SymbolSpec::operator+=(const SymbolSpec& o) {
  if (o.n_ != n_ || o.m_ != m_) throw Error("symbol addition: dimension mismatch");
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  canonicalize();
  return *this;
}

DecayReport SymbolSpec::decay(const GridSpec& grid) const {
  if (grid.base_dim() != n_ || grid.fiber_dim() != m_) {
    throw GridMismatchError("symbol dimensions do not match the grid");
  }
  DecayReport report;
  Vec x(n_), xi(m_);
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    double peak = 0.0, edge = 0.0;
    for (std::size_t b = 0; b < grid.base_size(); ++b) {
      grid.base_point(b, x);
      const bool base_edge = grid.on_base_boundary(b);
      for (std::size_t f = 0; f < grid.fiber_size(); ++f) {
        grid.fiber_point(f, xi);
        const double v = std::abs(term_value(k, x, xi));
        peak = std::max(peak, v);
        if (base_edge || grid.on_fiber_boundary(f)) edge = std::max(edge, v);
      }
    }
    const double ratio = peak > 0.0 ? edge / peak : 0.0;
    if (ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_term = k;
    }
  }
  return report;
}

SampledSymbol eval_symbol(const SymbolSpec& spec, const GridSpec& grid, bool strict) {
  if (grid.base_dim() != spec.base_dim() || grid.fiber_dim() != spec.fiber_dim()) {
    throw GridMismatchError("symbol dimensions do not match the grid");
  }
  if (strict) {
    const auto report = spec.decay(grid);
    if (!report.ok()) {
      std::ostringstream msg;
      msg << "symbol term " << report.worst_term << " does not decay on the grid box: boundary magnitude "
          << report.worst_ratio << " of peak";
      throw DecayError(msg.str());
    }
  }
  SampledSymbol out(grid);
  const std::size_t fs = grid.fiber_size();
  parallel_for(grid.base_size(), [&](std::size_t begin, std::size_t end) {
    Vec x(grid.base_dim()), xi(grid.fiber_dim());
    for (std::size_t b = begin; b < end; ++b) {
      grid.base_point(b, x);
      for (std::size_t f = 0; f < fs; ++f) {
        grid.fiber_point(f, xi);
        out.at(b, f) = spec(x, xi);
      }
    }
  });
  return out;
}

}  // namespace gcl
