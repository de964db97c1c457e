#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "shiftlab/classify.hpp"

namespace shiftlab {

inline constexpr long kDefaultNMax = 64;
inline constexpr long kDefaultKMax = 512;
inline constexpr double kVerdictMargin = 1e-3;   // limits this close to 1 are inconclusive
inline constexpr double kDivergenceCap = 1e12;   // series blow-up => wrong certificate

/// One of the bracketed quantities of the shadowing criteria, evaluated per
/// window length n: the raw sup/inf of weight products, its n-th root, and a
/// finite-window limit estimate (log-slope between n_max/2 and n_max; the
/// true limits exist by sub-multiplicativity).
struct GrowthLadder {
  std::vector<double> values;  // values[n-1], n = 1..n_max
  std::vector<double> roots;   // n-th roots of values
  double limit_estimate = 1.0;
  bool decreasing = false;     // trend of the roots over the second half
};

namespace detail {

inline GrowthLadder finish_ladder(std::vector<double> values) {
  GrowthLadder g;
  g.values = std::move(values);
  long n_max = static_cast<long>(g.values.size());
  g.roots.reserve(g.values.size());
  for (long n = 1; n <= n_max; ++n)
    g.roots.push_back(std::pow(g.values[static_cast<std::size_t>(n - 1)], 1.0 / static_cast<double>(n)));
  long half = std::max<long>(1, n_max / 2);
  if (n_max > half) {
    double num = std::log(g.values[static_cast<std::size_t>(n_max - 1)]) -
                 std::log(g.values[static_cast<std::size_t>(half - 1)]);
    g.limit_estimate = std::exp(num / static_cast<double>(n_max - half));
  } else {
    g.limit_estimate = g.roots.back();
  }
  g.decreasing = g.roots[static_cast<std::size_t>(n_max - 1)] <=
                 g.roots[static_cast<std::size_t>(half - 1)];
  return g;
}

}  // namespace detail

/// Per-seed evaluation of the three shadowing conditions.
struct SeedShadowReport {
  char fired = 0;  // 'A', 'B', 'C', or 0 when nothing fires at this window
  GrowthLadder a_sup;       // sup of weight products over all window positions
  GrowthLadder b_inf;       // inf of weight products over all window positions
  GrowthLadder c_contract;  // sup over windows strictly in the past
  GrowthLadder c_expand;    // inf over windows strictly in the future
};

/// Evaluates the displayed sup/inf weight-product quantities with the window
/// position k restricted to [0, k_max]. The norm-ratio displays telescope to
/// products of consecutive weights, so everything is computed from prefix
/// sums of log omega_n(x) — identical values, stable evaluation.
inline SeedShadowReport bm_ladders(const OperatorSequence& s, const Vec& x,
                                   long n_max = kDefaultNMax, long k_max = kDefaultKMax) {
  if (is_zero(x)) throw zero_vector_error("bm_ladders: zero seed");
  const long lo = -(k_max + n_max + 1), hi = k_max + n_max + 1;
  // prefix[i] = sum of log omega_j for j in [lo, lo + i - 1]
  std::vector<double> prefix(static_cast<std::size_t>(hi - lo + 2), 0.0);
  for (long j = lo; j <= hi; ++j)
    prefix[static_cast<std::size_t>(j - lo + 1)] =
        prefix[static_cast<std::size_t>(j - lo)] + std::log(s.weight(x, j));
  auto wsum = [&](long j0, long j1) {  // sum of log omega over [j0, j1]
    return prefix[static_cast<std::size_t>(j1 - lo + 1)] - prefix[static_cast<std::size_t>(j0 - lo)];
  };

  std::vector<double> a_vals, b_vals, cc_vals, ce_vals;
  for (long n = 1; n <= n_max; ++n) {
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    double cc_sup = -std::numeric_limits<double>::infinity();
    double ce_inf = std::numeric_limits<double>::infinity();
    // future-side windows [k, k+n], k >= 1
    for (long k = 1; k <= k_max; ++k) {
      double v = wsum(k, k + n);
      sup = std::max(sup, v);
      inf = std::min(inf, v);
      ce_inf = std::min(ce_inf, v);
    }
    // past-side windows [-k, -k+n-1], k >= n (end at or below zero)
    for (long k = n; k <= k_max; ++k) {
      double v = wsum(-k, -k + n - 1);
      sup = std::max(sup, v);
      inf = std::min(inf, v);
    }
    // windows straddling zero: [-k, n-k], 0 <= k <= n-1
    for (long k = 0; k <= n - 1; ++k) {
      double v = wsum(-k, n - k);
      sup = std::max(sup, v);
      inf = std::min(inf, v);
    }
    // strictly-past windows [-k-n, -k], k >= 1
    for (long k = 1; k <= k_max; ++k) cc_sup = std::max(cc_sup, wsum(-k - n, -k));
    a_vals.push_back(std::exp(sup));
    b_vals.push_back(std::exp(inf));
    cc_vals.push_back(std::exp(cc_sup));
    ce_vals.push_back(std::exp(ce_inf));
  }

  SeedShadowReport r;
  r.a_sup = detail::finish_ladder(std::move(a_vals));
  r.b_inf = detail::finish_ladder(std::move(b_vals));
  r.c_contract = detail::finish_ladder(std::move(cc_vals));
  r.c_expand = detail::finish_ladder(std::move(ce_vals));
  if (r.a_sup.limit_estimate < 1.0 - kVerdictMargin)
    r.fired = 'A';
  else if (r.b_inf.limit_estimate > 1.0 + kVerdictMargin)
    r.fired = 'B';
  else if (r.c_contract.limit_estimate < 1.0 - kVerdictMargin &&
           r.c_expand.limit_estimate > 1.0 + kVerdictMargin)
    r.fired = 'C';
  return r;
}

struct ShadowingCertificate {
  std::vector<std::pair<Vec, SeedShadowReport>> per_seed;
  bool verdict = false;     // shadowing holds iff every seed fires something
  std::string label = "none";  // "A" / "B" / "C" summarizing the split
  double k_bound = 0.0;     // filled by estimate_shadowing_bound
  long n_max = kDefaultNMax;
  long k_max = kDefaultKMax;
};

/// Requires a classification certificate (the reduction to weighted shifts
/// needs the conjugacy); refuses otherwise.
inline ShadowingCertificate shadowing_verdict(const OperatorSequence& s,
                                              const ClassificationVerdict& cls,
                                              long n_max = kDefaultNMax,
                                              long k_max = kDefaultKMax) {
  if (cls.criterion == Criterion::none)
    throw refusal_error("shadowing_verdict: no classification certificate");
  ShadowingCertificate cert;
  cert.n_max = n_max;
  cert.k_max = k_max;
  bool all_fired = true, all_a = true, all_b = true;
  for (const Vec& b : cls.basis) {
    SeedShadowReport r = bm_ladders(s, b, n_max, k_max);
    all_fired = all_fired && r.fired != 0;
    all_a = all_a && r.fired == 'A';
    all_b = all_b && r.fired == 'B';
    cert.per_seed.emplace_back(b, r);
  }
  cert.verdict = all_fired;
  if (!all_fired)
    cert.label = "none";
  else if (all_a)
    cert.label = "A";
  else if (all_b)
    cert.label = "B";
  else
    cert.label = "C";  // mixed split: contracting and expanding parts
  return cert;
}

enum class Hyperbolicity { contracting, expanding, not_hyperbolic };

inline const char* hyperbolicity_name(Hyperbolicity h) {
  switch (h) {
    case Hyperbolicity::contracting: return "contracting";
    case Hyperbolicity::expanding: return "expanding";
    case Hyperbolicity::not_hyperbolic: return "not-hyperbolic";
  }
  return "not-hyperbolic";
}

/// Spectral-annulus heuristic for one weight sequence: geometric means of
/// weight windows across the whole index range.
inline Hyperbolicity hyperbolicity_verdict(const WeightSeq& w, long n_max = kDefaultNMax,
                                           long k_max = kDefaultKMax) {
  const long lo = -(k_max + n_max + 1), hi = k_max + n_max + 1;
  std::vector<double> prefix(static_cast<std::size_t>(hi - lo + 2), 0.0);
  for (long j = lo; j <= hi; ++j)
    prefix[static_cast<std::size_t>(j - lo + 1)] =
        prefix[static_cast<std::size_t>(j - lo)] + std::log(w.omega(j));
  auto wsum = [&](long j0, long j1) {
    return prefix[static_cast<std::size_t>(j1 - lo + 1)] - prefix[static_cast<std::size_t>(j0 - lo)];
  };
  std::vector<double> sup_vals, inf_vals;
  for (long n = 1; n <= n_max; ++n) {
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    for (long k = -k_max; k <= k_max; ++k) {
      double v = wsum(k, k + n);
      sup = std::max(sup, v);
      inf = std::min(inf, v);
    }
    sup_vals.push_back(std::exp(sup));
    inf_vals.push_back(std::exp(inf));
  }
  GrowthLadder top = detail::finish_ladder(std::move(sup_vals));
  GrowthLadder bot = detail::finish_ladder(std::move(inf_vals));
  if (top.limit_estimate < 1.0 - kVerdictMargin) return Hyperbolicity::contracting;
  if (bot.limit_estimate > 1.0 + kVerdictMargin) return Hyperbolicity::expanding;
  return Hyperbolicity::not_hyperbolic;
}

// ---------------------------------------------------------------------------
// Shadowing orbit construction
// ---------------------------------------------------------------------------

struct SolveResult {
  std::vector<SeqPoint> orbit;   // orbit[t], t = 0..T with T defects supplied
  double sup_orbit = 0.0;
  double sup_defect = 0.0;
  double realized_ratio = 0.0;   // sup_orbit / sup_defect (0 when defects vanish)
};

/// Solve x^{(t+1)} = sigma_S(x^{(t)}) + z^{(t)} with a bounded orbit. Each
/// factor decouples along the diagonals m = fiber index + time: the scalar
/// recursion u_{t+1} = omega_{m-t} u_t + zeta_t is summed per impulse,
/// forward on contracting diagonals (condition A), backward on expanding
/// ones (B); under (C) the defect's fiber index picks the side (past fibers
/// propagate forward, future fibers backward).
inline SolveResult solve_shadowing(const ConjugacyBundle& bundle,
                                   const std::vector<SeqPoint>& defects,
                                   const ShadowingCertificate& cert) {
  if (!cert.verdict) throw refusal_error("solve_shadowing: certificate is false");
  if (defects.empty()) throw std::invalid_argument("solve_shadowing: no defects");
  const long T = static_cast<long>(defects.size());
  const int d = bundle.factors();
  const double p = defects.front().p;

  // defect coordinates per factor
  std::vector<std::vector<SeqPoint>> zeta;  // zeta[t][factor]
  zeta.reserve(defects.size());
  for (const SeqPoint& z : defects) zeta.push_back(bundle.forward(z));

  std::vector<WeightSeq> ws;
  std::vector<char> fired;
  for (int i = 0; i < d; ++i) {
    ws.push_back(bundle.factor_weights(i));
    fired.push_back(cert.per_seed[static_cast<std::size_t>(i)].second.fired);
  }

  // factor-coordinate orbit accumulators: acc[factor][t][fiber index]
  std::vector<std::vector<std::map<long, double>>> acc(
      static_cast<std::size_t>(d),
      std::vector<std::map<long, double>>(static_cast<std::size_t>(T + 1)));

  for (int i = 0; i < d; ++i) {
    const WeightSeq& w = ws[static_cast<std::size_t>(i)];
    for (long s = 0; s < T; ++s) {
      const SeqPoint& zf = zeta[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
      for (long j = zf.a; j <= zf.b; ++j) {
        double z = zf.at(j)[0];
        if (z == 0.0) continue;
        long m = j + s + 1;
        bool forward;
        switch (fired[static_cast<std::size_t>(i)]) {
          case 'A': forward = true; break;
          case 'B': forward = false; break;
          default: forward = j < 0; break;  // condition (C) split at zero
        }
        if (forward) {
          double c = z;
          for (long t = s + 1; t <= T; ++t) {
            acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)][m - t] += c;
            if (std::abs(c) > kDivergenceCap)
              throw divergence_error("solve_shadowing: forward series diverged");
            c *= w.omega(m - t);
          }
        } else {
          double c = z;
          for (long t = s; t >= 0; --t) {
            c /= w.omega(m - t);
            acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)][m - t] -= c;
            if (std::abs(c) > kDivergenceCap)
              throw divergence_error("solve_shadowing: backward series diverged");
          }
        }
      }
    }
  }

  SolveResult out;
  for (long t = 0; t <= T; ++t) {
    long a = 0, b = 0;
    bool any = false;
    for (int i = 0; i < d; ++i)
      for (const auto& [idx, val] : acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]) {
        (void)val;
        if (!any) { a = b = idx; any = true; }
        a = std::min(a, idx);
        b = std::max(b, idx);
      }
    std::vector<SeqPoint> factors_t;
    for (int i = 0; i < d; ++i) {
      SeqPoint f(a, b, p, 1);
      for (const auto& [idx, val] : acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)])
        f.at(idx) = Vec{val};
      factors_t.push_back(std::move(f));
    }
    out.orbit.push_back(bundle.inverse(factors_t));
  }

  const NormSpec& fn = bundle.seq().norm();
  for (const SeqPoint& x : out.orbit) out.sup_orbit = std::max(out.sup_orbit, seq_norm(x, fn));
  for (const SeqPoint& z : defects) out.sup_defect = std::max(out.sup_defect, seq_norm(z, fn));
  out.realized_ratio = out.sup_defect > 0.0 ? out.sup_orbit / out.sup_defect : 0.0;
  return out;
}

/// Closed-form series bound for a constant weight w (contracting or
/// expanding); the realized suite bound is reported alongside it.
inline double series_bound_constant(double w) {
  if (w < 1.0) return 1.0 / (1.0 - w);
  if (w > 1.0) return 1.0 / (w - 1.0);
  throw std::invalid_argument("series_bound_constant: weight on the unit circle");
}

/// One K for a family of certified factors: the sum norm on the product
/// space makes componentwise bounds combine by taking the max.
inline double equi_shadowing_bound(const std::vector<double>& per_factor_k) {
  if (per_factor_k.empty()) throw std::invalid_argument("equi_shadowing_bound: empty family");
  double k = 0.0;
  for (double v : per_factor_k) k = std::max(k, v);
  return k;
}

/// The fixed 200-instance defect suite: impulses, seeded random noise, and
/// adversarial sign patterns. Each instance is a list of T defect points.
inline std::vector<std::vector<SeqPoint>> make_defect_suite(int d, double p,
                                                            std::uint64_t seed = kDefaultProbeSeed) {
  std::vector<std::vector<SeqPoint>> suite;
  Rng rng(seed);
  const long T = 6;
  // 60 impulse instances sweeping time, fiber position, and component
  for (int t = 0; t < 60; ++t) {
    long at = t % T;
    long pos = (t / 6) % 5 - 2;
    int comp = t % d;
    Vec v = Vec::zero(d);
    v[comp] = (t % 2 == 0) ? 1.0 : -1.0;
    std::vector<SeqPoint> z(static_cast<std::size_t>(T), SeqPoint(-2, 2, p, d));
    z[static_cast<std::size_t>(at)] = SeqPoint::impulse(pos, v, p);
    suite.push_back(std::move(z));
  }
  // 100 bounded-noise instances
  for (int t = 0; t < 100; ++t) {
    std::vector<SeqPoint> z;
    for (long s = 0; s < T; ++s) {
      SeqPoint pt(-4, 4, p, d);
      for (long n = pt.a; n <= pt.b; ++n)
        for (int i = 0; i < d; ++i) pt.at(n)[i] = rng.uniform(-1.0, 1.0);
      z.push_back(std::move(pt));
    }
    suite.push_back(std::move(z));
  }
  // 40 worst-case sign patterns: unit entries, alternating and block signs
  for (int t = 0; t < 40; ++t) {
    std::vector<SeqPoint> z;
    for (long s = 0; s < T; ++s) {
      SeqPoint pt(-4, 4, p, d);
      for (long n = pt.a; n <= pt.b; ++n)
        for (int i = 0; i < d; ++i) {
          long phase = (t % 4 == 0) ? n + s : (t % 4 == 1) ? n : (t % 4 == 2) ? s : n - s;
          pt.at(n)[i] = (((phase + i + t / 4) % 2) == 0) ? 1.0 : -1.0;
        }
      z.push_back(std::move(pt));
    }
    suite.push_back(std::move(z));
  }
  return suite;
}

/// Numerically realized sup-ratio over the defect suite, times a 1.05 safety
/// factor. The same suite backs the acceptance checks, so the reported K is
/// a sound bound for every instance exercised there.
inline double estimate_shadowing_bound(const ConjugacyBundle& bundle,
                                       const ShadowingCertificate& cert,
                                       std::uint64_t seed = kDefaultProbeSeed) {
  double worst = 0.0;
  for (const auto& defects : make_defect_suite(bundle.seq().dim(), bundle.p(), seed)) {
    SolveResult r = solve_shadowing(bundle, defects, cert);
    worst = std::max(worst, r.realized_ratio);
  }
  return worst * 1.05;
}

}  // namespace shiftlab
