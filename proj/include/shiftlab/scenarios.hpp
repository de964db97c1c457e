#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "shiftlab/classify.hpp"
#include "shiftlab/shadow.hpp"

namespace shiftlab {

// ---------------------------------------------------------------------------
// Planar cones
// ---------------------------------------------------------------------------

/// Double cone in the plane: all v with angle(v, +-axis) <= half_angle.
struct Cone2D {
  Vec axis;           // unit
  double half_angle;  // radians

  Cone2D(Vec ax, double half) : axis(normalized(std::move(ax))), half_angle(half) {
    if (axis.dim() != 2) throw dimension_error("Cone2D: planar only");
    if (!(half > 1e-6 && half < 1.5707963267948966 - 1e-6))
      throw std::invalid_argument("Cone2D: half-angle out of range");
  }
};

inline Vec rotate2(const Vec& v, double angle) { return apply(Mat::rotation(angle), v); }

/// |angle(v, +-axis)|; zero vectors rejected.
inline double cone_angle(const Vec& v, const Cone2D& c) {
  return std::acos(std::abs(cos_angle(v, c.axis)));
}

inline bool cone_contains(const Vec& v, const Cone2D& c, double slack = 0.0) {
  return cone_angle(v, c) <= c.half_angle + slack;
}

/// True iff m maps the cone strictly inside itself by the margin; convexity
/// makes the two boundary rays sufficient in the plane.
inline bool cone_invariant(const Mat& m, const Cone2D& c, double margin = 1e-9) {
  for (double s : {+1.0, -1.0}) {
    Vec ray = rotate2(c.axis, s * c.half_angle);
    if (cone_angle(apply(m, ray), c) >= c.half_angle - margin) return false;
  }
  return true;
}

/// min |m v| over unit v in the cone: dense angular sampling (1e-4 rad) plus
/// shrinking local refinement.
inline double cone_expansion(const Mat& m, const Cone2D& c, double step = 1e-4) {
  double best = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  for (double t = -c.half_angle; t <= c.half_angle; t += step) {
    double v = vnorm(apply(m, rotate2(c.axis, t)));
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  double h = step;
  while (h > 1e-12) {
    for (double t : {best_t - h, best_t + h}) {
      double tt = std::clamp(t, -c.half_angle, c.half_angle);
      double v = vnorm(apply(m, rotate2(c.axis, tt)));
      if (v < best) {
        best = v;
        best_t = tt;
      }
    }
    h *= 0.5;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Covariant direction families (stable / unstable seeds for cone scenarios)
// ---------------------------------------------------------------------------

/// e_n along an invariant direction family, computed stably: the unstable
/// family by power iteration through the generators ending at n, the stable
/// family by inverse power iteration from below. Signs are aligned outward
/// from index 0 so that S_n e_n is a positive multiple of e_{n-1}, matching
/// the defining normalization.
class CovariantFamily {
 public:
  CovariantFamily(OperatorSequence::Generator gen, bool unstable, Vec hint, long k0 = 64,
                  long k_cap = 4096)
      : st_(std::make_shared<State>()) {
    st_->gen = std::move(gen);
    st_->unstable = unstable;
    st_->hint = normalized(std::move(hint));
    st_->k0 = k0;
    st_->k_cap = k_cap;
  }

  Vec at(long n) const {
    std::lock_guard<std::mutex> lock(st_->mu);
    return aligned(n);
  }

  std::function<Vec(long)> as_function() const {
    auto st = st_;
    return [st](long n) {
      std::lock_guard<std::mutex> lock(st->mu);
      return CovariantFamily::aligned_impl(*st, n);
    };
  }

 private:
  struct State {
    OperatorSequence::Generator gen;
    bool unstable;
    Vec hint;
    long k0, k_cap;
    std::map<long, Vec> cache;
    std::mutex mu;
  };

  static Vec raw_direction(State& st, long n, long k) {
    Vec u = st.hint;
    if (st.unstable) {
      for (long j = n + k; j >= n + 1; --j) u = normalized(apply(st.gen(j), u));
    } else {
      for (long j = n - k + 1; j <= n; ++j) u = normalized(apply(invert(st.gen(j)), u));
    }
    return u;
  }

  static Vec direction(State& st, long n) {
    Vec prev = raw_direction(st, n, st.k0);
    for (long k = 2 * st.k0; k <= st.k_cap; k *= 2) {
      Vec cur = raw_direction(st, n, k);
      double diff = std::min(vnorm(cur - prev), vnorm(cur + prev));
      prev = cur;
      if (diff < 1e-13) break;
    }
    return prev;
  }

  static Vec aligned_impl(State& st, long n) {
    auto it = st.cache.find(n);
    if (it != st.cache.end()) return it->second;
    if (st.cache.empty()) {
      Vec d0 = direction(st, 0);
      if (dot(d0, st.hint) < 0) d0 *= -1.0;
      st.cache.emplace(0, d0);
    }
    long hi = st.cache.rbegin()->first;
    while (hi < n) {
      Vec cand = direction(st, hi + 1);
      if (dot(apply(st.gen(hi + 1), cand), st.cache.at(hi)) < 0) cand *= -1.0;
      st.cache.emplace(hi + 1, cand);
      ++hi;
    }
    long lo = st.cache.begin()->first;
    while (lo > n) {
      Vec cand = direction(st, lo - 1);
      if (dot(cand, apply(st.gen(lo), st.cache.at(lo))) < 0) cand *= -1.0;
      st.cache.emplace(lo - 1, cand);
      --lo;
    }
    return st.cache.at(n);
  }

  Vec aligned(long n) const { return aligned_impl(*st_, n); }

  std::shared_ptr<State> st_;
};

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

struct ExpectedVerdicts {
  std::string criterion;      // classification criterion expected to decide
  bool refusal = false;       // classification yields none; conjugacy refuses
  bool shadowing = false;
  std::string shadow_label;   // "A", "B", "C", or "none"
  std::string hyperbolicity;  // free-form note
};

struct Scenario {
  std::string name;
  OpSeqPtr seq;
  double p = 2.0;
  std::vector<std::vector<Vec>> candidate_bases;
  ExpectedVerdicts expected;
  bool period_exhausted = false;  // the window provably covers all behavior
  std::optional<Cone2D> cone_plus, cone_minus;
  double eta = 0.0;  // certified cone-expansion constant (cone scenarios)
  std::map<std::string, double> params;
  std::string note;
};

namespace detail {

inline const Mat& hyperbolic_l() {
  static const Mat l{{2, 1}, {1, 1}};
  return l;
}

inline std::vector<Vec> canonical_basis(int d) {
  std::vector<Vec> basis;
  for (int i = 0; i < d; ++i) {
    Vec v = Vec::zero(d);
    v[i] = 1.0;
    basis.push_back(v);
  }
  return basis;
}

/// Eigen-directions of the symmetric generator [[2,1],[1,1]].
inline std::pair<Vec, Vec> l_eigenvectors() {
  double s5 = std::sqrt(5.0);
  Vec vp = normalized(Vec{1.0, (s5 - 1.0) / 2.0});
  Vec vm = normalized(Vec{1.0, -(s5 + 1.0) / 2.0});
  return {vp, vm};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Half-scale rotations: every weight is exactly one half and any orthogonal
/// basis stays orthogonal.
inline Scenario build_rotation(std::function<double(long)> theta = nullptr) {
  if (!theta)
    theta = [](long n) { return std::fmod(std::abs(static_cast<double>(n)) * 0.6180339887498949, 1.0); };
  Scenario sc;
  sc.name = "rotation";
  sc.seq = make_opseq(2, 3.0, NormSpec::euclidean(),
                      [theta](long n) { return 0.5 * Mat::rotation(theta(n)); });
  sc.candidate_bases = {detail::canonical_basis(2)};
  sc.expected = {"orthogonal", false, true, "A", "contracting"};
  sc.note = "conformal contractions; both factor weights are 1/2";
  return sc;
}

/// Diagonal generators: the canonical basis is orthogonal and the factor
/// weights are the absolute diagonal entries.
inline Scenario build_diagonal(std::vector<std::function<double(long)>> lambda = {}) {
  if (lambda.empty()) {
    lambda.push_back([](long) { return 2.0; });
    lambda.push_back([](long) { return 0.5; });
  }
  int d = static_cast<int>(lambda.size());
  Scenario sc;
  sc.name = "diagonal";
  sc.seq = make_opseq(d, 4.0, NormSpec::euclidean(), [lambda, d](long n) {
    std::vector<double> diag;
    for (int i = 0; i < d; ++i) {
      double v = lambda[static_cast<std::size_t>(i)](n);
      if (v == 0.0) throw singular_matrix_error("build_diagonal: zero diagonal entry");
      diag.push_back(v);
    }
    return Mat::diagonal(diag);
  });
  sc.candidate_bases = {detail::canonical_basis(d)};
  sc.expected = {"orthogonal", false, true, "C", "expanding and contracting factors"};
  sc.period_exhausted = true;
  sc.note = "constant diagonal generators";
  return sc;
}

/// Constant symmetric generator with orthogonal eigenvectors; constant
/// factor weights (3 +- sqrt 5)/2.
inline Scenario build_eigen_orthogonal() {
  auto [vp, vm] = detail::l_eigenvectors();
  double s5 = std::sqrt(5.0);
  std::vector<OperatorSequence::InvariantSeed> inv = {
      {vp, [vp](long) { return vp; }},
      {vm, [vm](long) { return vm; }},
  };
  Scenario sc;
  sc.name = "eigen_orthogonal";
  sc.seq = std::make_shared<const OperatorSequence>(
      2, 4.0, NormSpec::euclidean(), [](long) { return detail::hyperbolic_l(); }, inv);
  sc.candidate_bases = {{vp, vm}};
  sc.expected = {"orthogonal", false, true, "C", "expanding and contracting factors"};
  sc.period_exhausted = true;
  sc.params["lambda_plus"] = (3.0 + s5) / 2.0;
  sc.params["lambda_minus"] = (3.0 - s5) / 2.0;
  sc.note = "constant symmetric generator; eigenbasis is orthogonal";
  return sc;
}

/// Constant non-symmetric generator [[2,3],[1,2]]: no orthogonal basis, but
/// one eigenbasis diagonalizes every S_n.
inline Scenario build_jointly_diagonalizable() {
  double s3 = std::sqrt(3.0);
  Vec vp = normalized(Vec{s3, 1.0});
  Vec vm = normalized(Vec{-s3, 1.0});
  std::vector<OperatorSequence::InvariantSeed> inv = {
      {vp, [vp](long) { return vp; }},
      {vm, [vm](long) { return vm; }},
  };
  Scenario sc;
  sc.name = "jointly_diagonalizable";
  sc.seq = std::make_shared<const OperatorSequence>(
      2, 6.0, NormSpec::euclidean(), [](long) { return Mat{{2, 3}, {1, 2}}; }, inv);
  sc.candidate_bases = {detail::canonical_basis(2)};
  sc.expected = {"jointly-diagonalizable", false, true, "C",
                 "expanding and contracting factors"};
  sc.period_exhausted = true;
  sc.params["lambda_plus"] = 2.0 + s3;
  sc.params["lambda_minus"] = 2.0 - s3;
  sc.note = "non-normal constant generator; classified through a common eigenbasis";
  return sc;
}

/// Schedule matrices near L = [[2,1],[1,1]] with invariant expanding and
/// contracting cones about its eigenvectors; S_0 is the identity. The seed
/// basis consists of the cone-limit directions v*+- computed by iterated
/// normalized products.
inline Scenario build_anosov(double perturbation = 0.05, double half_angle = 0.25,
                             std::uint64_t schedule_seed = 0x50D1ULL) {
  auto [vp, vm] = detail::l_eigenvectors();
  Cone2D cp(vp, half_angle), cm(vm, half_angle);
  Mat l = detail::hyperbolic_l();
  auto gen = [l, perturbation, schedule_seed](long n) {
    if (n == 0) return Mat::identity(2);
    Rng rng(schedule_seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(n)));
    Mat m = l;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m.at(i, j) += rng.uniform(-perturbation / 2, perturbation / 2);
    return m;
  };
  CovariantFamily unstable(gen, true, vp);
  CovariantFamily stable(gen, false, vm);
  Vec seed_p = unstable.at(0), seed_m = stable.at(0);
  std::vector<OperatorSequence::InvariantSeed> inv = {
      {seed_p, unstable.as_function()},
      {seed_m, stable.as_function()},
  };
  Scenario sc;
  sc.name = "anosov";
  sc.seq = std::make_shared<const OperatorSequence>(2, 3.5, NormSpec::euclidean(), gen, inv);
  sc.candidate_bases = {{seed_p, seed_m}};
  sc.cone_plus = cp;
  sc.cone_minus = cm;
  sc.expected = {perturbation == 0.0 ? "orthogonal" : "gamma-angle", false, true, "C",
                 "generalized hyperbolic via the cone splitting"};
  sc.params["perturbation"] = perturbation;
  sc.params["half_angle"] = half_angle;
  sc.note = "perturbed hyperbolic automorphism schedule with invariant cones";
  return sc;
}

/// Certify every schedule matrix against the cones and return the uniform
/// expansion constant eta (min over the window of the forward expansion on
/// C+ and the backward expansion on C-). The identity at index 0 is exempt
/// from the strict-invariance requirement.
inline double certify_anosov(Scenario& sc, long lo, long hi) {
  if (!sc.cone_plus || !sc.cone_minus) throw std::invalid_argument("certify_anosov: no cones");
  double eta = std::numeric_limits<double>::infinity();
  for (long n = lo; n <= hi; ++n) {
    if (n == 0) continue;
    Mat m = sc.seq->generator(n);
    Mat mi = sc.seq->generator_inverse(n);
    if (!cone_invariant(m, *sc.cone_plus))
      throw std::invalid_argument("certify_anosov: expanding-cone invariance fails at index " +
                                  std::to_string(n));
    if (!cone_invariant(mi, *sc.cone_minus))
      throw std::invalid_argument("certify_anosov: contracting-cone invariance fails at index " +
                                  std::to_string(n));
    eta = std::min(eta, cone_expansion(m, *sc.cone_plus, 1e-3));
    eta = std::min(eta, cone_expansion(mi, *sc.cone_minus, 1e-3));
  }
  if (!(eta > 1.0)) throw std::invalid_argument("certify_anosov: no uniform expansion");
  sc.eta = eta;
  sc.params["eta"] = eta;
  return eta;
}

/// Smallest q in [min_q, cap] such that one elliptic run followed by one L
/// step keeps both cones strictly invariant (the two displayed invariance
/// conditions).
inline long find_return_time(double zeta, const Cone2D& cp, const Cone2D& cm, long cap = 200,
                             long min_q = 2) {
  Mat l = detail::hyperbolic_l();
  for (long q = min_q; q <= cap; ++q) {
    Mat rq = Mat::rotation(2.0 * 3.14159265358979323846 * zeta * static_cast<double>(q));
    Mat m = l * rq;
    Mat m2 = rq * l;
    if (cone_invariant(m, cp) && cone_invariant(invert(m), cm) && cone_invariant(m2, cp) &&
        cone_invariant(invert(m2), cm))
      return q;
  }
  throw std::invalid_argument("find_return_time: no valid return time below the cap");
}

/// Alternating runs ... L^{n_2} R^{m_1} L^{n_1} Id L^{n_1} R^{m_1} L^{n_2} ...
/// with R the rotation by 2 pi zeta. Bounded gaps keep every rotation run at
/// the base return time; unbounded gaps grow the runs through the return
/// times q, 3q+-.., chosen so each run still nearly closes the circle.
inline Scenario build_elliptic_hyperbolic(bool bounded, double zeta = 0.6180339887498949,
                                          double half_angle = 0.25) {
  auto [vp, vm] = detail::l_eigenvectors();
  Cone2D cp(vp, half_angle), cm(vm, half_angle);
  long q = find_return_time(zeta, cp, cm);
  Mat l = detail::hyperbolic_l();
  Mat r = Mat::rotation(2.0 * 3.14159265358979323846 * zeta);

  // m_i: rotation-run lengths; bounded: the base return time everywhere;
  // unbounded: geometrically growing certified return times, so the schedule
  // stays cone-compatible run by run while the gaps diverge
  std::vector<long> rot_runs{q};
  if (!bounded) {
    long floor_len = 2 * q;
    for (int i = 1; i < 16; ++i) {
      long qi = find_return_time(zeta, cp, cm, 4 * floor_len + 400, floor_len);
      rot_runs.push_back(qi);
      floor_len = 2 * qi;
    }
  }
  auto rot_run = [rot_runs](long i) {
    auto idx = std::min<std::size_t>(static_cast<std::size_t>(i - 1), rot_runs.size() - 1);
    return rot_runs[idx];
  };
  auto ell_run = [q](long) { return q; };

  auto gen = [l, r, rot_run, ell_run](long n) {
    if (n == 0) return Mat::identity(2);
    long off = std::labs(n);  // 1-based offset into the mirrored run pattern
    long i = 1;
    for (;;) {
      long nl = ell_run(i);
      if (off <= nl) return l;
      off -= nl;
      long mr = rot_run(i);
      if (off <= mr) return r;
      off -= mr;
      ++i;
    }
  };
  CovariantFamily unstable(gen, true, vp, 256);
  CovariantFamily stable(gen, false, vm, 256);
  Vec seed_p = unstable.at(0), seed_m = stable.at(0);
  std::vector<OperatorSequence::InvariantSeed> inv = {
      {seed_p, unstable.as_function()},
      {seed_m, stable.as_function()},
  };
  Scenario sc;
  sc.name = bounded ? "elliptic_bounded" : "elliptic_unbounded";
  sc.seq = std::make_shared<const OperatorSequence>(2, 4.0, NormSpec::euclidean(), gen, inv);
  sc.candidate_bases = {{seed_p, seed_m}};
  sc.cone_plus = cp;
  sc.cone_minus = cm;
  sc.eta = std::min(cone_expansion(l, cp), cone_expansion(invert(l), cm));
  if (bounded) {
    sc.expected = {"gamma-angle", false, true, "C", "generalized hyperbolic (split)"};
  } else {
    sc.expected = {"gamma-angle", false, false, "none",
                   "rotation runs of unbounded length defeat every growth condition"};
  }
  sc.params["zeta"] = zeta;
  sc.params["q"] = static_cast<double>(q);
  sc.params["M"] = static_cast<double>(1 + (bounded ? q : 0));
  sc.params["eta"] = sc.eta;
  sc.params["half_angle"] = half_angle;
  sc.note = "hyperbolic runs separated by elliptic rotation runs at return times";
  return sc;
}

/// Constant Jordan block under the max-norm: no basis has uniformly bounded
/// coordinate projections; the operator is a skew-product of two unweighted
/// backward shifts through the coordinate split.
inline Scenario build_jordan_skew() {
  Scenario sc;
  sc.name = "jordan_skew";
  sc.seq = make_constant_opseq(Mat{{1, 1}, {0, 1}}, 4.0, NormSpec::max_norm());
  sc.candidate_bases = {detail::canonical_basis(2)};
  sc.expected = {"none", true, false, "none", "norms of iterates grow linearly"};
  sc.period_exhausted = true;
  sc.note = "shear generator; projections onto the drifting frame blow up";
  return sc;
}

/// Alternating T, T^{-1} with T = diag(2, 1/2): every single generator is
/// hyperbolic, yet all growth ladders sit exactly at one.
inline Scenario build_no_cones() {
  Mat t = Mat::diagonal({2.0, 0.5});
  Mat ti = Mat::diagonal({0.5, 2.0});
  Scenario sc;
  sc.name = "no_cones";
  sc.seq = make_opseq(2, 3.0, NormSpec::euclidean(),
                      [t, ti](long n) { return (((n % 2) + 2) % 2 == 1) ? t : ti; });
  sc.candidate_bases = {detail::canonical_basis(2)};
  sc.expected = {"orthogonal", false, false, "none",
                 "each generator hyperbolic; the alternation cancels all growth"};
  sc.period_exhausted = true;
  sc.note = "period-two alternation of a hyperbolic matrix and its inverse";
  return sc;
}

/// Identity dynamics on a normalized basis with pairwise cosines
/// (-1/2, -1/2+delta, -1/2+delta): the pairwise-cosine test fails while the
/// projections stay bounded for each fixed delta, blowing up as delta -> 0.
inline Scenario build_delta_basis(double delta = 0.01) {
  if (!(delta > 0.0 && delta <= 0.05))
    throw std::invalid_argument("build_delta_basis: delta out of range");
  Mat gram{{1, -0.5, -0.5 + delta}, {-0.5, 1, -0.5 + delta}, {-0.5 + delta, -0.5 + delta, 1}};
  auto basis = basis_from_gram(gram);  // throws when infeasible
  Scenario sc;
  sc.name = "delta_basis";
  sc.seq = make_constant_opseq(Mat::identity(3), 2.0);
  sc.candidate_bases = {basis};
  sc.expected = {"subspace-angle", false, false, "none", "isometric; nothing contracts or expands"};
  sc.period_exhausted = true;
  Vec x0 = basis[0] + basis[1] + basis[2];
  sc.params["delta"] = delta;
  sc.params["x0_norm_sq"] = dot(x0, x0);
  sc.note = "nearly degenerate basis; projection norms scale like 1/(2 sqrt delta)";
  return sc;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

inline std::vector<std::string> scenario_names() {
  return {"rotation",        "diagonal",        "eigen_orthogonal", "jointly_diagonalizable",
          "anosov",          "elliptic_bounded", "elliptic_unbounded", "jordan_skew",
          "no_cones",        "delta_basis"};
}

inline Scenario build_scenario(const std::string& name) {
  if (name == "rotation") return build_rotation();
  if (name == "diagonal") return build_diagonal();
  if (name == "eigen_orthogonal") return build_eigen_orthogonal();
  if (name == "jointly_diagonalizable") return build_jointly_diagonalizable();
  if (name == "anosov") return build_anosov();
  if (name == "elliptic_bounded") return build_elliptic_hyperbolic(true);
  if (name == "elliptic_unbounded") return build_elliptic_hyperbolic(false);
  if (name == "jordan_skew") return build_jordan_skew();
  if (name == "no_cones") return build_no_cones();
  if (name == "delta_basis") return build_delta_basis();
  std::string known;
  for (const auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown scenario '" + name + "'; built-ins: " + known);
}

}  // namespace shiftlab
