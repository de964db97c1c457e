#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "shiftlab/opseq.hpp"

namespace shiftlab {

/// A finitely supported point of the bilateral sequence space: fiber vectors
/// on an explicit window [a, b], implicitly zero outside. p is a property of
/// the point; operations reject mixed-p inputs.
struct SeqPoint {
  long a = 0;
  long b = 0;
  double p = 2.0;
  std::vector<Vec> entries;  // entries[n - a] for n in [a, b]

  SeqPoint() = default;
  SeqPoint(long lo, long hi, double pp, int fiber_dim) : a(lo), b(hi), p(pp) {
    if (lo > hi) throw std::invalid_argument("SeqPoint: degenerate window");
    if (!(pp >= 1.0)) throw std::invalid_argument("SeqPoint: p must be >= 1");
    entries.assign(static_cast<std::size_t>(hi - lo + 1), Vec::zero(fiber_dim));
  }

  int fiber_dim() const { return entries.front().dim(); }
  bool in_window(long n) const { return n >= a && n <= b; }

  const Vec& at(long n) const { return entries[static_cast<std::size_t>(n - a)]; }
  Vec& at(long n) { return entries[static_cast<std::size_t>(n - a)]; }

  /// Entry at n, zero outside the window.
  Vec get(long n) const { return in_window(n) ? at(n) : Vec::zero(fiber_dim()); }

  static SeqPoint impulse(long n, const Vec& v, double p = 2.0) {
    SeqPoint pt(n, n, p, v.dim());
    pt.at(n) = v;
    return pt;
  }
};

inline void check_compatible(const SeqPoint& x, const SeqPoint& y) {
  if (x.fiber_dim() != y.fiber_dim()) throw dimension_error("SeqPoint: fiber dimension mismatch");
  if (x.p != y.p) throw std::invalid_argument("SeqPoint: mixed p");
}

inline SeqPoint operator+(const SeqPoint& x, const SeqPoint& y) {
  check_compatible(x, y);
  SeqPoint out(std::min(x.a, y.a), std::max(x.b, y.b), x.p, x.fiber_dim());
  for (long n = out.a; n <= out.b; ++n) out.at(n) = x.get(n) + y.get(n);
  return out;
}

inline SeqPoint operator-(const SeqPoint& x, const SeqPoint& y) {
  check_compatible(x, y);
  SeqPoint out(std::min(x.a, y.a), std::max(x.b, y.b), x.p, x.fiber_dim());
  for (long n = out.a; n <= out.b; ++n) out.at(n) = x.get(n) - y.get(n);
  return out;
}

inline SeqPoint operator*(double s, SeqPoint x) {
  for (Vec& v : x.entries) v *= s;
  return x;
}

/// (sum_n |x_n|^p)^{1/p} over the support window, fiber norms per `fiber`.
inline double seq_norm(const SeqPoint& pt, const NormSpec& fiber = NormSpec::euclidean()) {
  double s = 0.0;
  for (const Vec& v : pt.entries) s += std::pow(vnorm(v, fiber), pt.p);
  return std::pow(s, 1.0 / pt.p);
}

/// sigma_S: entry at n of the result is S_{n+1}(x_{n+1}).
inline SeqPoint shift_apply(const OperatorSequence& s, const SeqPoint& pt) {
  if (s.dim() != pt.fiber_dim()) throw dimension_error("shift_apply: fiber dimension mismatch");
  SeqPoint out(pt.a - 1, pt.b - 1, pt.p, pt.fiber_dim());
  for (long n = out.a; n <= out.b; ++n) out.at(n) = apply(s.generator(n + 1), pt.at(n + 1));
  return out;
}

/// sigma_S^{-1}: entry at n of the result is S_n^{-1}(x_{n-1}).
inline SeqPoint shift_apply_inverse(const OperatorSequence& s, const SeqPoint& pt) {
  if (s.dim() != pt.fiber_dim()) throw dimension_error("shift_apply_inverse: fiber dimension mismatch");
  SeqPoint out(pt.a + 1, pt.b + 1, pt.p, pt.fiber_dim());
  for (long n = out.a; n <= out.b; ++n) out.at(n) = apply(s.generator_inverse(n), pt.at(n - 1));
  return out;
}

inline SeqPoint shift_apply_iterate(const OperatorSequence& s, SeqPoint pt, long k) {
  for (; k > 0; --k) pt = shift_apply(s, pt);
  for (; k < 0; ++k) pt = shift_apply_inverse(s, pt);
  return pt;
}

/// Positive weight sequence with a declared band (1/C, C); backs B_omega.
class WeightSeq {
 public:
  using Generator = std::function<double(long)>;

  WeightSeq(double band, Generator gen) : band_(band), gen_(std::move(gen)) {
    if (!(band > 1.0)) throw std::invalid_argument("WeightSeq: band constant must exceed 1");
  }

  static WeightSeq constant(double w, double band) {
    return WeightSeq(band, [w](long) { return w; });
  }

  double band() const { return band_; }

  double omega(long n) const {
    double w = gen_(n);
    if (!(w > 1.0 / band_ && w < band_))
      throw std::domain_error("WeightSeq: value outside the declared band");
    return w;
  }

 private:
  double band_;
  Generator gen_;
};

/// B_omega on scalar points: entry at n of the result is omega_{n+1} x_{n+1}.
inline SeqPoint wshift_apply(const WeightSeq& w, const SeqPoint& pt) {
  if (pt.fiber_dim() != 1) throw dimension_error("wshift_apply: scalar fibers required");
  SeqPoint out(pt.a - 1, pt.b - 1, pt.p, 1);
  for (long n = out.a; n <= out.b; ++n) out.at(n) = Vec{w.omega(n + 1) * pt.at(n + 1)[0]};
  return out;
}

inline SeqPoint wshift_apply_inverse(const WeightSeq& w, const SeqPoint& pt) {
  if (pt.fiber_dim() != 1) throw dimension_error("wshift_apply_inverse: scalar fibers required");
  SeqPoint out(pt.a + 1, pt.b + 1, pt.p, 1);
  for (long n = out.a; n <= out.b; ++n) out.at(n) = Vec{pt.at(n - 1)[0] / w.omega(n)};
  return out;
}

/// Componentwise B_omega on a d-tuple of scalar points (product carries the
/// sum norm; see product_norm).
inline std::vector<SeqPoint> product_shift_apply(const std::vector<WeightSeq>& factors,
                                                 const std::vector<SeqPoint>& pts) {
  if (factors.size() != pts.size())
    throw std::invalid_argument("product_shift_apply: length mismatch");
  std::vector<SeqPoint> out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out.push_back(wshift_apply(factors[i], pts[i]));
  return out;
}

inline double product_norm(const std::vector<SeqPoint>& pts) {
  double s = 0.0;
  for (const SeqPoint& pt : pts) s += seq_norm(pt);
  return s;
}

/// Skew-product (x, y) -> (B_omega x + B_omega y, B_omega y).
inline std::pair<SeqPoint, SeqPoint> skew_apply(const WeightSeq& w,
                                                const std::pair<SeqPoint, SeqPoint>& pair) {
  SeqPoint bx = wshift_apply(w, pair.first);
  SeqPoint by = wshift_apply(w, pair.second);
  return {bx + by, by};
}

}  // namespace shiftlab
