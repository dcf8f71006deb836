#pragma once

// Field abstractions over the coordinate ball: scalar fields with exact
// second-order jets (expression-backed or composed), covector and symmetric
// 2-tensor fields as component arrays, and metric fields (Euclidean,
// conformal, or general symmetric).  Algebraic combinators keep jets exact,
// so derived objects like G = 2(k-U)g or 2(k-U)u feed curvature and
// Christoffel formulas without finite differencing.

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "mpray/expr.hpp"
#include "mpray/jet.hpp"
#include "mpray/linalg.hpp"

namespace mpray {

class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  // Value, gradient, Hessian.  Throws Error for fields without derivatives.
  virtual Jet2 jet(const Vec& x) const = 0;
};

using ScalarFieldPtr = std::shared_ptr<const ScalarField>;

class ConstantField final : public ScalarField {
 public:
  ConstantField(int dim, double c) : dim_(dim), c_(c) {}
  int dim() const override { return dim_; }
  double value(const Vec&) const override { return c_; }
  Jet2 jet(const Vec&) const override { return Jet2::constant(dim_, c_); }

 private:
  int dim_;
  double c_;
};

class ExprField final : public ScalarField {
 public:
  explicit ExprField(Expr e) : expr_(std::move(e)) {}
  int dim() const override { return expr_.dim(); }
  double value(const Vec& x) const override { return expr_.eval(x); }
  Jet2 jet(const Vec& x) const override { return expr_.jet2(x); }
  const Expr& expr() const { return expr_; }

 private:
  Expr expr_;
};

// c0 + c1 * f
class AffineField final : public ScalarField {
 public:
  AffineField(double c0, double c1, ScalarFieldPtr f) : c0_(c0), c1_(c1), f_(std::move(f)) {}
  int dim() const override { return f_->dim(); }
  double value(const Vec& x) const override { return c0_ + c1_ * f_->value(x); }
  Jet2 jet(const Vec& x) const override { return c1_ * f_->jet(x) + c0_; }

 private:
  double c0_, c1_;
  ScalarFieldPtr f_;
};

// ca * a + cb * b
class SumField final : public ScalarField {
 public:
  SumField(ScalarFieldPtr a, ScalarFieldPtr b, double ca = 1.0, double cb = 1.0)
      : a_(std::move(a)), b_(std::move(b)), ca_(ca), cb_(cb) {}
  int dim() const override { return a_->dim(); }
  double value(const Vec& x) const override { return ca_ * a_->value(x) + cb_ * b_->value(x); }
  Jet2 jet(const Vec& x) const override { return ca_ * a_->jet(x) + cb_ * b_->jet(x); }

 private:
  ScalarFieldPtr a_, b_;
  double ca_, cb_;
};

class ProductField final : public ScalarField {
 public:
  ProductField(ScalarFieldPtr a, ScalarFieldPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  int dim() const override { return a_->dim(); }
  double value(const Vec& x) const override { return a_->value(x) * b_->value(x); }
  Jet2 jet(const Vec& x) const override { return a_->jet(x) * b_->jet(x); }

 private:
  ScalarFieldPtr a_, b_;
};

class QuotientField final : public ScalarField {
 public:
  QuotientField(ScalarFieldPtr a, ScalarFieldPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  int dim() const override { return a_->dim(); }
  double value(const Vec& x) const override {
    const double b = b_->value(x);
    if (b == 0.0) throw NumericalError("field quotient: division by zero");
    return a_->value(x) / b;
  }
  Jet2 jet(const Vec& x) const override {
    const Jet2 b = b_->jet(x);
    if (b.v == 0.0) throw NumericalError("field quotient: division by zero");
    return a_->jet(x) / b;
  }

 private:
  ScalarFieldPtr a_, b_;
};

// Value-only field for derived quantities whose derivatives are not formed.
class FuncField final : public ScalarField {
 public:
  FuncField(int dim, std::function<double(const Vec&)> fn, std::string what)
      : dim_(dim), fn_(std::move(fn)), what_(std::move(what)) {}
  int dim() const override { return dim_; }
  double value(const Vec& x) const override { return fn_(x); }
  Jet2 jet(const Vec&) const override {
    throw Error("derivatives unavailable for derived field: " + what_);
  }

 private:
  int dim_;
  std::function<double(const Vec&)> fn_;
  std::string what_;
};

inline ScalarFieldPtr make_expr_field(std::string_view src, int dim) {
  return std::make_shared<ExprField>(Expr::parse(src, dim));
}

inline ScalarFieldPtr make_constant_field(int dim, double c) {
  return std::make_shared<ConstantField>(dim, c);
}

// ---------------------------------------------------------------------------
// Coordinate maps (for gauge diffeomorphisms and pullbacks).

struct PointMap {
  int dim = 0;
  std::array<ScalarFieldPtr, kMaxDim> comp{};

  Vec value(const Vec& x) const {
    Vec y(dim);
    for (int i = 0; i < dim; ++i) y[i] = comp[static_cast<std::size_t>(i)]->value(x);
    return y;
  }
  std::array<Jet2, kMaxDim> jets(const Vec& x) const {
    std::array<Jet2, kMaxDim> out;
    for (int i = 0; i < dim; ++i) out[static_cast<std::size_t>(i)] =
        comp[static_cast<std::size_t>(i)]->jet(x);
    return out;
  }

  static PointMap identity(int dim) {
    PointMap m;
    m.dim = dim;
    for (int i = 0; i < dim; ++i) {
      std::string var = "x" + std::to_string(i + 1);
      m.comp[static_cast<std::size_t>(i)] = make_expr_field(var, dim);
    }
    return m;
  }
};

// base(map(x)) with exact jets via the chain rule (PointMap components carry
// exact Hessians, so this is exact through second order).
class PullbackScalarField final : public ScalarField {
 public:
  PullbackScalarField(PointMap map, ScalarFieldPtr base)
      : map_(std::move(map)), base_(std::move(base)) {}
  int dim() const override { return map_.dim; }
  double value(const Vec& x) const override { return base_->value(map_.value(x)); }
  Jet2 jet(const Vec& x) const override {
    const int n = map_.dim;
    const auto fj = map_.jets(x);
    Vec y(n);
    for (int a = 0; a < n; ++a) y[a] = fj[static_cast<std::size_t>(a)].v;
    const Jet2 bj = base_->jet(y);
    Jet2 r(n);
    r.v = bj.v;
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) s += bj.g[a] * fj[static_cast<std::size_t>(a)].g[i];
      r.g[i] = s;
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b)
            s += bj.h(a, b) * fj[static_cast<std::size_t>(a)].g[i] *
                 fj[static_cast<std::size_t>(b)].g[j];
          s += bj.g[a] * fj[static_cast<std::size_t>(a)].h(i, j);
        }
        r.h(i, j) = s;
      }
    return r;
  }

 private:
  PointMap map_;
  ScalarFieldPtr base_;
};

// ---------------------------------------------------------------------------
// Component packing for symmetric 2-tensors: slots for (i<=j) pairs.

inline int sym_slot(int i, int j) {
  static constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return table[i][j];
}

struct CovectorField {
  int dim = 0;
  std::array<ScalarFieldPtr, kMaxDim> comp{};

  Vec value(const Vec& x) const {
    Vec out(dim);
    for (int i = 0; i < dim; ++i) out[i] = comp[static_cast<std::size_t>(i)]->value(x);
    return out;
  }
  std::array<Jet2, kMaxDim> jets(const Vec& x) const {
    std::array<Jet2, kMaxDim> out;
    for (int i = 0; i < dim; ++i) out[static_cast<std::size_t>(i)] =
        comp[static_cast<std::size_t>(i)]->jet(x);
    return out;
  }

  static CovectorField zero(int dim) {
    CovectorField f;
    f.dim = dim;
    for (int i = 0; i < dim; ++i)
      f.comp[static_cast<std::size_t>(i)] = make_constant_field(dim, 0.0);
    return f;
  }
  static CovectorField from_exprs(int dim, const std::array<std::string, kMaxDim>& srcs) {
    CovectorField f;
    f.dim = dim;
    for (int i = 0; i < dim; ++i)
      f.comp[static_cast<std::size_t>(i)] = make_expr_field(srcs[static_cast<std::size_t>(i)], dim);
    return f;
  }
  bool is_zero_constant() const {
    for (int i = 0; i < dim; ++i) {
      auto c = std::dynamic_pointer_cast<const ConstantField>(comp[static_cast<std::size_t>(i)]);
      if (!c || c->value(Vec(dim)) != 0.0) return false;
    }
    return true;
  }
};

// Componentwise scalar multiple s*u (jets stay exact).
inline CovectorField scale_covector(const ScalarFieldPtr& s, const CovectorField& u) {
  CovectorField out;
  out.dim = u.dim;
  for (int i = 0; i < u.dim; ++i)
    out.comp[static_cast<std::size_t>(i)] =
        std::make_shared<ProductField>(s, u.comp[static_cast<std::size_t>(i)]);
  return out;
}

// Componentwise a + s*b.
inline CovectorField add_scaled_covector(const CovectorField& a, double s,
                                         const CovectorField& b) {
  CovectorField out;
  out.dim = a.dim;
  for (int i = 0; i < a.dim; ++i)
    out.comp[static_cast<std::size_t>(i)] = std::make_shared<SumField>(
        a.comp[static_cast<std::size_t>(i)], b.comp[static_cast<std::size_t>(i)], 1.0, s);
  return out;
}

inline CovectorField quotient_covector(const CovectorField& u, const ScalarFieldPtr& s) {
  CovectorField out;
  out.dim = u.dim;
  for (int i = 0; i < u.dim; ++i)
    out.comp[static_cast<std::size_t>(i)] =
        std::make_shared<QuotientField>(u.comp[static_cast<std::size_t>(i)], s);
  return out;
}

struct SymTensorField {
  int dim = 0;
  std::array<ScalarFieldPtr, 6> comp{};  // packed upper triangle via sym_slot

  Mat value(const Vec& x) const {
    Mat out(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        const double v = comp[static_cast<std::size_t>(sym_slot(i, j))]->value(x);
        out(i, j) = v;
        out(j, i) = v;
      }
    return out;
  }

  static SymTensorField zero(int dim) {
    SymTensorField f;
    f.dim = dim;
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j)
        f.comp[static_cast<std::size_t>(sym_slot(i, j))] = make_constant_field(dim, 0.0);
    return f;
  }
  // Expression sources in slot order 00, 01, 02, 11, 12, 22 (the entries
  // beyond the dimension are ignored and may be empty).
  static SymTensorField from_exprs(int dim, const std::array<std::string, 6>& srcs) {
    SymTensorField f;
    f.dim = dim;
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        const auto slot = static_cast<std::size_t>(sym_slot(i, j));
        f.comp[slot] = make_expr_field(srcs[slot], dim);
      }
    return f;
  }
  static SymTensorField identity_multiple(int dim, double c) {
    SymTensorField f = zero(dim);
    for (int i = 0; i < dim; ++i)
      f.comp[static_cast<std::size_t>(sym_slot(i, i))] = make_constant_field(dim, c);
    return f;
  }
};

// ---------------------------------------------------------------------------
// Metric fields.

struct MetricDerivs {
  Mat g;    // g_ij
  Ten3 dg;  // dg(k,i,j) = d_k g_ij
};

struct MetricDerivs2 {
  Mat g;
  Ten3 dg;
  Ten4 d2g;  // d2g(k,l,i,j) = d_k d_l g_ij
};

class MetricField {
 public:
  enum class Kind { Euclidean, Conformal, General };

  static MetricField euclidean(int dim) {
    MetricField m;
    m.kind_ = Kind::Euclidean;
    m.dim_ = dim;
    return m;
  }
  // g = factor * delta, factor > 0.
  static MetricField conformal(ScalarFieldPtr factor) {
    MetricField m;
    m.kind_ = Kind::Conformal;
    m.dim_ = factor->dim();
    m.factor_ = std::move(factor);
    return m;
  }
  static MetricField general(int dim, std::array<ScalarFieldPtr, 6> comps) {
    MetricField m;
    m.kind_ = Kind::General;
    m.dim_ = dim;
    m.comp_ = std::move(comps);
    return m;
  }

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const ScalarFieldPtr& conformal_factor() const { return factor_; }
  const std::array<ScalarFieldPtr, 6>& components() const { return comp_; }

  Mat value(const Vec& x) const {
    switch (kind_) {
      case Kind::Euclidean:
        return Mat::identity(dim_);
      case Kind::Conformal: {
        const double c = factor_->value(x);
        return c * Mat::identity(dim_);
      }
      case Kind::General: {
        Mat g(dim_);
        for (int i = 0; i < dim_; ++i)
          for (int j = i; j < dim_; ++j) {
            const double v = comp_[static_cast<std::size_t>(sym_slot(i, j))]->value(x);
            g(i, j) = v;
            g(j, i) = v;
          }
        return g;
      }
    }
    return Mat(dim_);  // unreachable
  }

  MetricDerivs derivs(const Vec& x) const {
    MetricDerivs out;
    out.g = Mat(dim_);
    out.dg = Ten3(dim_);
    fill(x, &out.g, &out.dg, nullptr);
    return out;
  }

  MetricDerivs2 derivs2(const Vec& x) const {
    MetricDerivs2 out;
    out.g = Mat(dim_);
    out.dg = Ten3(dim_);
    out.d2g = Ten4(dim_);
    fill(x, &out.g, &out.dg, &out.d2g);
    return out;
  }

  double volume_density(const Vec& x) const {
    const double d = det(value(x));
    if (!(d > 0.0)) throw NumericalError("metric determinant is not positive");
    return std::sqrt(d);
  }

 private:
  void fill(const Vec& x, Mat* g, Ten3* dg, Ten4* d2g) const {
    switch (kind_) {
      case Kind::Euclidean:
        *g = Mat::identity(dim_);
        return;  // dg, d2g stay zero
      case Kind::Conformal: {
        const Jet2 c = factor_->jet(x);
        for (int i = 0; i < dim_; ++i) (*g)(i, i) = c.v;
        for (int k = 0; k < dim_; ++k)
          for (int i = 0; i < dim_; ++i) (*dg)(k, i, i) = c.g[k];
        if (d2g)
          for (int k = 0; k < dim_; ++k)
            for (int l = 0; l < dim_; ++l)
              for (int i = 0; i < dim_; ++i) (*d2g)(k, l, i, i) = c.h(k, l);
        return;
      }
      case Kind::General: {
        for (int i = 0; i < dim_; ++i)
          for (int j = i; j < dim_; ++j) {
            const Jet2 cj = comp_[static_cast<std::size_t>(sym_slot(i, j))]->jet(x);
            (*g)(i, j) = cj.v;
            (*g)(j, i) = cj.v;
            for (int k = 0; k < dim_; ++k) {
              (*dg)(k, i, j) = cj.g[k];
              (*dg)(k, j, i) = cj.g[k];
            }
            if (d2g)
              for (int k = 0; k < dim_; ++k)
                for (int l = 0; l < dim_; ++l) {
                  (*d2g)(k, l, i, j) = cj.h(k, l);
                  (*d2g)(k, l, j, i) = cj.h(k, l);
                }
          }
        return;
      }
    }
  }

  Kind kind_ = Kind::Euclidean;
  int dim_ = 0;
  ScalarFieldPtr factor_;
  std::array<ScalarFieldPtr, 6> comp_{};
};

// s(x) * g, keeping the most structured representation available.
inline MetricField scale_metric(const ScalarFieldPtr& s, const MetricField& g) {
  switch (g.kind()) {
    case MetricField::Kind::Euclidean:
      return MetricField::conformal(s);
    case MetricField::Kind::Conformal:
      return MetricField::conformal(std::make_shared<ProductField>(s, g.conformal_factor()));
    case MetricField::Kind::General: {
      std::array<ScalarFieldPtr, 6> comps{};
      for (int i = 0; i < g.dim(); ++i)
        for (int j = i; j < g.dim(); ++j) {
          const auto slot = static_cast<std::size_t>(sym_slot(i, j));
          comps[slot] = std::make_shared<ProductField>(s, g.components()[slot]);
        }
      return MetricField::general(g.dim(), comps);
    }
  }
  return g;  // unreachable
}

// Component (i, j) of a metric as a scalar field with exact jets.
inline ScalarFieldPtr metric_component(const MetricField& g, int i, int j) {
  switch (g.kind()) {
    case MetricField::Kind::Euclidean:
      return make_constant_field(g.dim(), i == j ? 1.0 : 0.0);
    case MetricField::Kind::Conformal:
      return (i == j) ? g.conformal_factor() : make_constant_field(g.dim(), 0.0);
    case MetricField::Kind::General:
      return g.components()[static_cast<std::size_t>(sym_slot(i, j))];
  }
  return nullptr;  // unreachable
}

// Metric whose components are a + s*b (for perturbed systems g + s h).
inline MetricField add_scaled_metric(const MetricField& g, double s, const SymTensorField& h) {
  std::array<ScalarFieldPtr, 6> comps{};
  const int n = g.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const auto slot = static_cast<std::size_t>(sym_slot(i, j));
      comps[slot] = std::make_shared<SumField>(metric_component(g, i, j), h.comp[slot], 1.0, s);
    }
  return MetricField::general(n, comps);
}

// ---------------------------------------------------------------------------
// Pullback fields for gauge transformations.  Scalar pullbacks are exact to
// second order; metric/covector pullback components have exact value and
// gradient (enough for Christoffel symbols and the flow) while their Hessian
// falls back to central differences of the exact gradient, since it would
// need third derivatives of the coordinate map.

namespace detail {

inline Mat metric_value_at(const MetricField& g, const Vec& x) { return g.value(x); }

template <typename GradFn>
inline Mat fd_hessian_of_gradient(const GradFn& grad, const Vec& x, int n, double h = 1e-5) {
  Mat out(n);
  for (int k = 0; k < n; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const Vec gp = grad(xp), gm = grad(xm);
    for (int l = 0; l < n; ++l) out(k, l) = (gp[l] - gm[l]) / (2.0 * h);
  }
  // Symmetrize: mixed partials agree for smooth data.
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      const double m = 0.5 * (out(k, l) + out(l, k));
      out(k, l) = m;
      out(l, k) = m;
    }
  return out;
}

}  // namespace detail

// Component (i,j) of the pullback metric (f*g)_{ij} = d_i f^a d_j f^b g_ab(f(x)).
class PullbackMetricComponent final : public ScalarField {
 public:
  PullbackMetricComponent(PointMap map, std::shared_ptr<const MetricField> base, int i, int j)
      : map_(std::move(map)), base_(std::move(base)), i_(i), j_(j) {}
  int dim() const override { return map_.dim; }

  double value(const Vec& x) const override {
    const int n = map_.dim;
    const auto fj = map_.jets(x);
    Vec y(n);
    for (int a = 0; a < n; ++a) y[a] = fj[static_cast<std::size_t>(a)].v;
    const Mat g = base_->value(y);
    double s = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        s += fj[static_cast<std::size_t>(a)].g[i_] * fj[static_cast<std::size_t>(b)].g[j_] *
             g(a, b);
    return s;
  }

  Jet2 jet(const Vec& x) const override {
    const int n = map_.dim;
    Jet2 r(n);
    const Vec grad = exact_gradient(x, &r.v);
    r.g = grad;
    r.h = detail::fd_hessian_of_gradient(
        [this](const Vec& z) {
          double unused = 0.0;
          return exact_gradient(z, &unused);
        },
        x, n);
    return r;
  }

 private:
  // d_k (f*g)_{ij} assembled from second derivatives of f and first
  // derivatives of g — exact.
  Vec exact_gradient(const Vec& x, double* value_out) const {
    const int n = map_.dim;
    const auto fj = map_.jets(x);
    Vec y(n);
    for (int a = 0; a < n; ++a) y[a] = fj[static_cast<std::size_t>(a)].v;
    const MetricDerivs gd = base_->derivs(y);
    double val = 0.0;
    Vec out(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const Jet2& fa = fj[static_cast<std::size_t>(a)];
        const Jet2& fb = fj[static_cast<std::size_t>(b)];
        val += fa.g[i_] * fb.g[j_] * gd.g(a, b);
        for (int k = 0; k < n; ++k) {
          double dgk = 0.0;  // d_k [g_ab(f(x))]
          for (int c = 0; c < n; ++c) dgk += gd.dg(c, a, b) * fj[static_cast<std::size_t>(c)].g[k];
          out[k] += fa.h(k, i_) * fb.g[j_] * gd.g(a, b) + fa.g[i_] * fb.h(k, j_) * gd.g(a, b) +
                    fa.g[i_] * fb.g[j_] * dgk;
        }
      }
    *value_out = val;
    return out;
  }

  PointMap map_;
  std::shared_ptr<const MetricField> base_;
  int i_, j_;
};

// Component i of the pullback 1-form (f*alpha)_i = alpha_a(f(x)) d_i f^a.
class PullbackCovectorComponent final : public ScalarField {
 public:
  PullbackCovectorComponent(PointMap map, CovectorField base, int i)
      : map_(std::move(map)), base_(std::move(base)), i_(i) {}
  int dim() const override { return map_.dim; }

  double value(const Vec& x) const override {
    const int n = map_.dim;
    const auto fj = map_.jets(x);
    Vec y(n);
    for (int a = 0; a < n; ++a) y[a] = fj[static_cast<std::size_t>(a)].v;
    const Vec al = base_.value(y);
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += al[a] * fj[static_cast<std::size_t>(a)].g[i_];
    return s;
  }

  Jet2 jet(const Vec& x) const override {
    const int n = map_.dim;
    Jet2 r(n);
    r.g = exact_gradient(x, &r.v);
    r.h = detail::fd_hessian_of_gradient(
        [this](const Vec& z) {
          double unused = 0.0;
          return exact_gradient(z, &unused);
        },
        x, n);
    return r;
  }

 private:
  Vec exact_gradient(const Vec& x, double* value_out) const {
    const int n = map_.dim;
    const auto fj = map_.jets(x);
    Vec y(n);
    for (int a = 0; a < n; ++a) y[a] = fj[static_cast<std::size_t>(a)].v;
    const auto aj = base_.jets(y);
    double val = 0.0;
    Vec out(n);
    for (int a = 0; a < n; ++a) {
      const Jet2& fa = fj[static_cast<std::size_t>(a)];
      val += aj[static_cast<std::size_t>(a)].v * fa.g[i_];
      for (int k = 0; k < n; ++k) {
        double dak = 0.0;  // d_k [alpha_a(f(x))]
        for (int c = 0; c < n; ++c)
          dak += aj[static_cast<std::size_t>(a)].g[c] * fj[static_cast<std::size_t>(c)].g[k];
        out[k] += dak * fa.g[i_] + aj[static_cast<std::size_t>(a)].v * fa.h(k, i_);
      }
    }
    *value_out = val;
    return out;
  }

  PointMap map_;
  CovectorField base_;
  int i_;
};

inline MetricField pullback_metric(const PointMap& map, const MetricField& base) {
  auto shared_base = std::make_shared<MetricField>(base);
  std::array<ScalarFieldPtr, 6> comps{};
  const int n = map.dim;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      comps[static_cast<std::size_t>(sym_slot(i, j))] =
          std::make_shared<PullbackMetricComponent>(map, shared_base, i, j);
  return MetricField::general(n, comps);
}

inline CovectorField pullback_covector(const PointMap& map, const CovectorField& base) {
  CovectorField out;
  out.dim = map.dim;
  for (int i = 0; i < map.dim; ++i)
    out.comp[static_cast<std::size_t>(i)] =
        std::make_shared<PullbackCovectorComponent>(map, base, i);
  return out;
}

}  // namespace mpray
