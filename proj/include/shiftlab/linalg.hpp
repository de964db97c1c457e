#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <vector>

#include "shiftlab/errors.hpp"
#include "shiftlab/rng.hpp"

namespace shiftlab {

inline constexpr int kMaxDim = 4;
inline constexpr double kSingularTol = 1e-12;

/// Fiber norm choice: a p-norm with p in [1, inf], or the Euclidean norm.
/// Euclidean coincides with p = 2 numerically; the tag is kept so reports can
/// echo the configured norm and so Hilbert-only operations can insist on it.
struct NormSpec {
  enum class Kind { euclidean, pnorm };
  Kind kind = Kind::euclidean;
  double p = 2.0;  // may be +inf for the max-norm

  static NormSpec euclidean() { return NormSpec{Kind::euclidean, 2.0}; }
  static NormSpec pnorm(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("NormSpec: p must be >= 1");
    return NormSpec{Kind::pnorm, p};
  }
  static NormSpec max_norm() {
    return NormSpec{Kind::pnorm, std::numeric_limits<double>::infinity()};
  }

  bool is_euclidean() const { return kind == Kind::euclidean || p == 2.0; }
  bool is_max() const { return std::isinf(p); }

  // Hoelder conjugate exponent.
  double dual_exponent() const {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
  }
};

// ---------------------------------------------------------------------------
// Vec
// ---------------------------------------------------------------------------

struct Vec {
  std::vector<double> e;

  Vec() = default;
  explicit Vec(std::vector<double> entries) : e(std::move(entries)) { validate(); }
  Vec(std::initializer_list<double> entries) : e(entries) { validate(); }

  static Vec zero(int d) { return Vec(std::vector<double>(static_cast<std::size_t>(d), 0.0)); }

  int dim() const { return static_cast<int>(e.size()); }
  double operator[](int i) const { return e[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return e[static_cast<std::size_t>(i)]; }

  void validate() const {
    if (e.empty() || e.size() > kMaxDim)
      throw dimension_error("Vec: dimension must be in [1, 4]");
    for (double x : e)
      if (!std::isfinite(x)) throw std::invalid_argument("Vec: non-finite entry");
  }

  Vec& operator+=(const Vec& o) {
    check_same_dim(o);
    for (int i = 0; i < dim(); ++i) e[static_cast<std::size_t>(i)] += o[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    check_same_dim(o);
    for (int i = 0; i < dim(); ++i) e[static_cast<std::size_t>(i)] -= o[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (double& x : e) x *= s;
    return *this;
  }

  void check_same_dim(const Vec& o) const {
    if (dim() != o.dim()) throw dimension_error("Vec: dimension mismatch");
  }
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator-(Vec a) { return a *= -1.0; }

inline double dot(const Vec& a, const Vec& b) {
  a.check_same_dim(b);
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

/// p-norm (or max-norm) of v; zero iff v = 0.
inline double vnorm(const Vec& v, const NormSpec& n = NormSpec::euclidean()) {
  if (n.is_max()) {
    double m = 0.0;
    for (double x : v.e) m = std::max(m, std::abs(x));
    return m;
  }
  if (n.p == 1.0) {
    double s = 0.0;
    for (double x : v.e) s += std::abs(x);
    return s;
  }
  // scale by the largest entry so that very long operator products (entries
  // up to ~1e300) do not overflow when raised to the p-th power
  double m = 0.0;
  for (double x : v.e) m = std::max(m, std::abs(x));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  if (n.p == 2.0) {
    for (double x : v.e) s += (x / m) * (x / m);
    return m * std::sqrt(s);
  }
  for (double x : v.e) s += std::pow(std::abs(x) / m, n.p);
  return m * std::pow(s, 1.0 / n.p);
}

inline bool is_zero(const Vec& v) {
  for (double x : v.e)
    if (x != 0.0) return false;
  return true;
}

inline Vec normalized(const Vec& v, const NormSpec& n = NormSpec::euclidean()) {
  double len = vnorm(v, n);
  if (len == 0.0) throw zero_vector_error("normalized: zero vector");
  return (1.0 / len) * v;
}

/// Cosine of the angle between u and v (Euclidean), clamped to [-1, 1].
inline double cos_angle(const Vec& u, const Vec& v) {
  if (is_zero(u) || is_zero(v)) throw zero_vector_error("cos_angle: zero vector");
  double c = dot(u, v) / (vnorm(u) * vnorm(v));
  return std::clamp(c, -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Mat
// ---------------------------------------------------------------------------

struct Mat {
  int d = 0;
  std::vector<double> a;  // row-major, d*d

  Mat() = default;
  Mat(int dim, std::vector<double> entries) : d(dim), a(std::move(entries)) { validate(); }
  Mat(std::initializer_list<std::initializer_list<double>> rows) {
    d = static_cast<int>(rows.size());
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != d)
        throw dimension_error("Mat: rows must form a square matrix");
      a.insert(a.end(), r.begin(), r.end());
    }
    validate();
  }

  static Mat identity(int dim) {
    Mat m(dim, std::vector<double>(static_cast<std::size_t>(dim) * dim, 0.0));
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
  }
  static Mat zero(int dim) {
    return Mat(dim, std::vector<double>(static_cast<std::size_t>(dim) * dim, 0.0));
  }
  static Mat diagonal(const std::vector<double>& diag) {
    Mat m = zero(static_cast<int>(diag.size()));
    for (int i = 0; i < m.d; ++i) m.at(i, i) = diag[static_cast<std::size_t>(i)];
    return m;
  }
  /// Rotation of the plane by `angle` radians.
  static Mat rotation(double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return Mat{{c, -s}, {s, c}};
  }

  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * d + j]; }
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * d + j]; }

  void validate() const {
    if (d < 1 || d > kMaxDim) throw dimension_error("Mat: dimension must be in [1, 4]");
    if (static_cast<int>(a.size()) != d * d) throw dimension_error("Mat: entry count mismatch");
    for (double x : a)
      if (!std::isfinite(x)) throw std::invalid_argument("Mat: non-finite entry");
  }
};

inline Vec apply(const Mat& m, const Vec& v) {
  if (m.d != v.dim()) throw dimension_error("apply: dimension mismatch");
  Vec out = Vec::zero(m.d);
  for (int i = 0; i < m.d; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.d; ++j) s += m.at(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

inline Mat operator*(const Mat& x, const Mat& y) {
  if (x.d != y.d) throw dimension_error("Mat product: dimension mismatch");
  Mat out = Mat::zero(x.d);
  for (int i = 0; i < x.d; ++i)
    for (int k = 0; k < x.d; ++k) {
      double xv = x.at(i, k);
      if (xv == 0.0) continue;
      for (int j = 0; j < x.d; ++j) out.at(i, j) += xv * y.at(k, j);
    }
  return out;
}

inline Mat operator*(double s, Mat m) {
  for (double& x : m.a) x *= s;
  return m;
}

inline Mat operator+(const Mat& x, const Mat& y) {
  if (x.d != y.d) throw dimension_error("Mat sum: dimension mismatch");
  Mat out = x;
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += y.a[i];
  return out;
}

inline Mat operator-(const Mat& x, const Mat& y) {
  if (x.d != y.d) throw dimension_error("Mat difference: dimension mismatch");
  Mat out = x;
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] -= y.a[i];
  return out;
}

inline Mat transpose(const Mat& m) {
  Mat out = Mat::zero(m.d);
  for (int i = 0; i < m.d; ++i)
    for (int j = 0; j < m.d; ++j) out.at(j, i) = m.at(i, j);
  return out;
}

inline double det(const Mat& m) {
  switch (m.d) {
    case 1:
      return m.at(0, 0);
    case 2:
      return m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    case 3:
      return m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1)) -
             m.at(0, 1) * (m.at(1, 0) * m.at(2, 2) - m.at(1, 2) * m.at(2, 0)) +
             m.at(0, 2) * (m.at(1, 0) * m.at(2, 1) - m.at(1, 1) * m.at(2, 0));
    default: {
      // Laplace expansion along the first row (d = 4).
      double s = 0.0;
      for (int j = 0; j < 4; ++j) {
        Mat minor = Mat::zero(3);
        for (int r = 1; r < 4; ++r) {
          int cc = 0;
          for (int c = 0; c < 4; ++c) {
            if (c == j) continue;
            minor.at(r - 1, cc++) = m.at(r, c);
          }
        }
        s += ((j % 2 == 0) ? 1.0 : -1.0) * m.at(0, j) * det(minor);
      }
      return s;
    }
  }
}

/// Closed-form cofactor inverse for d <= 4.
inline Mat invert(const Mat& m, double tol = kSingularTol) {
  double dd = det(m);
  if (std::abs(dd) <= tol) throw singular_matrix_error("invert: |det| below tolerance");
  Mat adj = Mat::zero(m.d);
  if (m.d == 1) {
    adj.at(0, 0) = 1.0;
  } else {
    for (int i = 0; i < m.d; ++i)
      for (int j = 0; j < m.d; ++j) {
        Mat minor = Mat::zero(m.d - 1);
        int rr = 0;
        for (int r = 0; r < m.d; ++r) {
          if (r == i) continue;
          int cc = 0;
          for (int c = 0; c < m.d; ++c) {
            if (c == j) continue;
            minor.at(rr, cc++) = m.at(r, c);
          }
          ++rr;
        }
        adj.at(j, i) = (((i + j) % 2 == 0) ? 1.0 : -1.0) * det(minor);
      }
  }
  return (1.0 / dd) * adj;
}

/// Solve m * x = b by Gaussian elimination with partial pivoting.
inline Vec solve(const Mat& m, const Vec& b, double tol = kSingularTol) {
  if (m.d != b.dim()) throw dimension_error("solve: dimension mismatch");
  Mat A = m;
  Vec x = b;
  int d = m.d;
  std::vector<int> perm(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int col = 0; col < d; ++col) {
    int piv = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(A.at(r, col)) > std::abs(A.at(piv, col))) piv = r;
    if (std::abs(A.at(piv, col)) <= tol)
      throw singular_matrix_error("solve: pivot below tolerance");
    if (piv != col) {
      for (int c = 0; c < d; ++c) std::swap(A.at(piv, c), A.at(col, c));
      std::swap(x[piv], x[col]);
    }
    for (int r = col + 1; r < d; ++r) {
      double f = A.at(r, col) / A.at(col, col);
      if (f == 0.0) continue;
      for (int c = col; c < d; ++c) A.at(r, c) -= f * A.at(col, c);
      x[r] -= f * x[col];
    }
  }
  for (int r = d - 1; r >= 0; --r) {
    double s = x[r];
    for (int c = r + 1; c < d; ++c) s -= A.at(r, c) * x[c];
    x[r] = s / A.at(r, r);
  }
  return x;
}

/// Matrix whose columns are the given basis vectors.
inline Mat columns(const std::vector<Vec>& basis) {
  int d = basis.empty() ? 0 : basis.front().dim();
  if (static_cast<int>(basis.size()) != d)
    throw dimension_error("columns: need exactly d vectors of dimension d");
  Mat m = Mat::zero(d);
  for (int j = 0; j < d; ++j) {
    if (basis[static_cast<std::size_t>(j)].dim() != d)
      throw dimension_error("columns: inconsistent dimensions");
    for (int i = 0; i < d; ++i) m.at(i, j) = basis[static_cast<std::size_t>(j)][i];
  }
  return m;
}

inline double gram_det(const std::vector<Vec>& basis) {
  Mat b = columns(basis);
  return det(transpose(b) * b);
}

/// Coefficients alpha with v = sum alpha_i * basis_i.
inline std::vector<double> coordinates_in_basis(const Vec& v, const std::vector<Vec>& basis,
                                                double tol = kSingularTol) {
  if (gram_det(basis) <= tol)
    throw degenerate_basis_error("coordinates_in_basis: Gram determinant below tolerance");
  Vec alpha = solve(columns(basis), v);
  return alpha.e;
}

// ---------------------------------------------------------------------------
// Symmetric eigenvalues (cyclic Jacobi) and operator norms
// ---------------------------------------------------------------------------

/// Eigenvalues of a symmetric matrix, ascending. Jacobi sweeps; d <= 4.
inline std::vector<double> sym_eigenvalues(Mat m) {
  const int d = m.d;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) off += m.at(i, j) * m.at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) {
        double apq = m.at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (m.at(q, q) - m.at(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < d; ++k) {
          double mkp = m.at(k, p), mkq = m.at(k, q);
          m.at(k, p) = c * mkp - s * mkq;
          m.at(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < d; ++k) {
          double mpk = m.at(p, k), mqk = m.at(q, k);
          m.at(p, k) = c * mpk - s * mqk;
          m.at(q, k) = s * mpk + c * mqk;
        }
      }
  }
  std::vector<double> ev(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) ev[static_cast<std::size_t>(i)] = m.at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

namespace detail {

/// Deterministic quasi-uniform directions on the unit sphere of R^d.
inline std::vector<Vec> sphere_directions(int d, int count) {
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  if (d == 1) {
    dirs.push_back(Vec{1.0});
    return dirs;
  }
  if (d == 2) {
    for (int i = 0; i < count; ++i) {
      double t = 3.14159265358979323846 * i / count;  // half circle: norms are even
      dirs.push_back(Vec{std::cos(t), std::sin(t)});
    }
    return dirs;
  }
  Rng rng(0x5EEDULL);
  for (int i = 0; i < count; ++i) {
    Vec v = Vec::zero(d);
    double len2 = 0.0;
    for (int k = 0; k < d; ++k) {
      // Box-Muller from two uniforms
      double u1 = std::max(rng.next_double(), 1e-300);
      double u2 = rng.next_double();
      v[k] = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
      len2 += v[k] * v[k];
    }
    if (len2 == 0.0) continue;
    dirs.push_back((1.0 / std::sqrt(len2)) * v);
  }
  return dirs;
}

/// Maximize ratio(v) over the unit sphere: coarse sampling plus shrinking
/// local perturbation refinement. Used only for norms without a closed form.
template <typename F>
double sphere_maximize(int d, F&& ratio, int samples = 4096) {
  auto dirs = sphere_directions(d, samples);
  Vec best = dirs.front();
  double best_val = ratio(best);
  for (const Vec& v : dirs) {
    double r = ratio(v);
    if (r > best_val) {
      best_val = r;
      best = v;
    }
  }
  Rng rng(0xA11CEULL);
  double step = 0.1;
  while (step > 1e-9) {
    bool improved = false;
    for (int trial = 0; trial < 64; ++trial) {
      Vec cand = best;
      for (int k = 0; k < d; ++k) cand[k] += rng.uniform(-step, step);
      double len = vnorm(cand);
      if (len == 0.0) continue;
      cand *= 1.0 / len;
      double r = ratio(cand);
      if (r > best_val) {
        best_val = r;
        best = cand;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best_val;
}

}  // namespace detail

/// Operator norm of m induced by the given vector norm.
/// p = 1, 2, inf have closed forms; other p fall back to sphere search.
inline double operator_norm(const Mat& m, const NormSpec& n = NormSpec::euclidean()) {
  if (n.is_euclidean()) {
    auto ev = sym_eigenvalues(transpose(m) * m);
    return std::sqrt(std::max(0.0, ev.back()));
  }
  if (n.p == 1.0) {
    double best = 0.0;
    for (int j = 0; j < m.d; ++j) {
      double s = 0.0;
      for (int i = 0; i < m.d; ++i) s += std::abs(m.at(i, j));
      best = std::max(best, s);
    }
    return best;
  }
  if (n.is_max()) {
    double best = 0.0;
    for (int i = 0; i < m.d; ++i) {
      double s = 0.0;
      for (int j = 0; j < m.d; ++j) s += std::abs(m.at(i, j));
      best = std::max(best, s);
    }
    return best;
  }
  return detail::sphere_maximize(m.d, [&](const Vec& v) {
    return vnorm(apply(m, v), n) / vnorm(v, n);
  });
}

/// Operator norm of the coordinate projection v -> alpha_target(v) * b_target
/// with respect to the given norm. The projection is rank one, b g^T with g
/// the dual vector of b_target, so the norm is |b|_n * |g|_{n*} exactly.
inline double projection_operator_norm(int target_index, const std::vector<Vec>& basis,
                                       const NormSpec& n = NormSpec::euclidean(),
                                       double tol = kSingularTol) {
  int d = static_cast<int>(basis.size());
  if (target_index < 0 || target_index >= d)
    throw std::out_of_range("projection_operator_norm: bad target index");
  if (gram_det(basis) <= tol)
    throw degenerate_basis_error("projection_operator_norm: Gram determinant below tolerance");
  Vec e = Vec::zero(d);
  e[target_index] = 1.0;
  Vec g = solve(transpose(columns(basis)), e);
  NormSpec dual = n.is_euclidean() ? NormSpec::euclidean()
                                   : (std::isinf(n.dual_exponent()) ? NormSpec::max_norm()
                                                                    : NormSpec::pnorm(n.dual_exponent()));
  return vnorm(basis[static_cast<std::size_t>(target_index)], n) * vnorm(g, dual);
}

// ---------------------------------------------------------------------------
// Real eigen-decomposition for d <= 4 (characteristic polynomial + scan)
// ---------------------------------------------------------------------------

struct RealEigenPair {
  double value = 0.0;
  Vec vector;  // unit (Euclidean)
};

namespace detail {

/// Characteristic polynomial coefficients c so that
/// det(tI - m) = t^d + c[d-1] t^{d-1} + ... + c[0]  (Faddeev-LeVerrier).
inline std::vector<double> char_poly(const Mat& m) {
  int d = m.d;
  std::vector<double> c(static_cast<std::size_t>(d), 0.0);
  Mat mk = Mat::identity(d);
  double ck = 1.0;  // coefficient of t^d
  std::vector<double> coeffs;
  coeffs.push_back(ck);
  for (int k = 1; k <= d; ++k) {
    mk = m * mk;
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += mk.at(i, i);
    ck = -tr / k;
    coeffs.push_back(ck);
    for (int i = 0; i < d; ++i) mk.at(i, i) += ck;
  }
  // coeffs = [1, c_{d-1}, ..., c_0]
  for (int i = 0; i < d; ++i) c[static_cast<std::size_t>(d - 1 - i)] = coeffs[static_cast<std::size_t>(i + 1)];
  return c;
}

inline double poly_eval(const std::vector<double>& c, double t) {
  int d = static_cast<int>(c.size());
  double v = 1.0;
  for (int i = d - 1; i >= 0; --i) v = v * t + c[static_cast<std::size_t>(i)];
  return v;
}

/// All real roots found by dense sign scanning + bisection on a Cauchy-bound
/// interval. Adequate for d <= 4 with well-separated roots.
inline std::vector<double> real_roots(const std::vector<double>& c) {
  double bound = 1.0;
  for (double x : c) bound = std::max(bound, std::abs(x));
  bound += 1.0;
  const int steps = 20000;
  std::vector<double> roots;
  double prev_t = -bound;
  double prev_v = poly_eval(c, prev_t);
  for (int i = 1; i <= steps; ++i) {
    double t = -bound + 2.0 * bound * i / steps;
    double v = poly_eval(c, t);
    if (prev_v == 0.0) {
      roots.push_back(prev_t);
    } else if (prev_v * v < 0.0) {
      double lo = prev_t, hi = t, vlo = prev_v;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double vm = poly_eval(c, mid);
        if (vm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (vlo * vm < 0.0) {
          hi = mid;
        } else {
          lo = mid;
          vlo = vm;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_t = t;
    prev_v = v;
  }
  return roots;
}

}  // namespace detail

/// Real eigenpairs of m with pairwise-distinct eigenvalues; empty when the
/// spectrum is not fully real and simple (within separation tolerance).
inline std::vector<RealEigenPair> real_eigenpairs(const Mat& m, double sep_tol = 1e-8) {
  auto roots = detail::real_roots(detail::char_poly(m));
  if (static_cast<int>(roots.size()) != m.d) return {};
  std::sort(roots.begin(), roots.end());
  for (std::size_t i = 1; i < roots.size(); ++i)
    if (roots[i] - roots[i - 1] < sep_tol) return {};
  std::vector<RealEigenPair> pairs;
  for (double lambda : roots) {
    // Null vector of (m - lambda I) via elimination; the column without a
    // pivot becomes the free variable.
    Mat A = m;
    for (int i = 0; i < m.d; ++i) A.at(i, i) -= lambda;
    int d = m.d;
    std::vector<int> pivot_row(static_cast<std::size_t>(d), -1);
    int row = 0;
    for (int col = 0; col < d && row < d; ++col) {
      int piv = row;
      for (int r = row + 1; r < d; ++r)
        if (std::abs(A.at(r, col)) > std::abs(A.at(piv, col))) piv = r;
      if (std::abs(A.at(piv, col)) < 1e-9) continue;
      if (piv != row)
        for (int c = 0; c < d; ++c) std::swap(A.at(piv, c), A.at(row, c));
      for (int r = 0; r < d; ++r) {
        if (r == row) continue;
        double f = A.at(r, col) / A.at(row, col);
        for (int c = 0; c < d; ++c) A.at(r, c) -= f * A.at(row, c);
      }
      pivot_row[static_cast<std::size_t>(col)] = row;
      ++row;
    }
    int free_col = -1;
    for (int col = 0; col < d; ++col)
      if (pivot_row[static_cast<std::size_t>(col)] < 0) free_col = col;
    if (free_col < 0) return {};
    Vec v = Vec::zero(d);
    v[free_col] = 1.0;
    for (int col = 0; col < d; ++col) {
      int pr = pivot_row[static_cast<std::size_t>(col)];
      if (pr >= 0) v[col] = -A.at(pr, free_col) / A.at(pr, col);
    }
    pairs.push_back(RealEigenPair{lambda, normalized(v)});
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Gram factorization (used to realize bases with prescribed pairwise cosines)
// ---------------------------------------------------------------------------

/// Vectors whose Gram matrix equals `gram` (Cholesky). Throws when the Gram
/// matrix is not positive definite.
inline std::vector<Vec> basis_from_gram(const Mat& gram) {
  int d = gram.d;
  Mat L = Mat::zero(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = gram.at(i, j);
      for (int k = 0; k < j; ++k) s -= L.at(i, k) * L.at(j, k);
      if (i == j) {
        if (s <= 0.0)
          throw degenerate_basis_error("basis_from_gram: Gram matrix not positive definite");
        L.at(i, i) = std::sqrt(s);
      } else {
        L.at(i, j) = s / L.at(j, j);
      }
    }
  }
  std::vector<Vec> basis;
  for (int i = 0; i < d; ++i) {
    Vec v = Vec::zero(d);
    for (int k = 0; k < d; ++k) v[k] = L.at(i, k);
    basis.push_back(v);
  }
  return basis;
}

}  // namespace shiftlab
