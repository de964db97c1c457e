#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "shiftlab/linalg.hpp"

namespace shiftlab {

/// Two-sided family of invertible d x d matrices S_n with a declared uniform
/// bound C on max{|S_n|, |S_n^{-1}|}. Immutable; all caches are idempotent
/// fills behind a mutex, so the public API is read-only and thread-safe.
///
/// Partial products are anchored at index 0 in both directions:
///   forward_inverse(n) = (S_1 ... S_n)^{-1}       for n >= 0  (identity at 0)
///   backward(m)        = S_m S_{m+1} ... S_0      for m <= 1  (identity at 1)
/// so the weight and frame formulas cost O(1) amortized per index.
class OperatorSequence {
 public:
  using Generator = std::function<Mat(long)>;

  /// Frames along seeds that span an invariant direction family cannot be
  /// recovered from the anchored products in floating point: the spurious
  /// component grows geometrically while the true one decays. Scenarios that
  /// know their invariant directions register them here; frame_vector and
  /// weight then use the registered family (weights via the intertwining
  /// relation, omega_n(x) = |S_n e_n(x)|), which is the same quantity by the
  /// telescoping identity but evaluated stably.
  struct InvariantSeed {
    Vec seed;                        // unit
    std::function<Vec(long)> frame;  // n -> e_n(seed), unit, sign-aligned
  };

  OperatorSequence(int d, double bound, NormSpec norm, Generator gen,
                   std::vector<InvariantSeed> invariants = {})
      : d_(d), bound_(bound), norm_(norm), gen_(std::move(gen)),
        invariants_(std::move(invariants)) {
    if (d < 1 || d > kMaxDim) throw dimension_error("OperatorSequence: bad fiber dimension");
    if (!(bound > 0.0)) throw std::invalid_argument("OperatorSequence: bound must be positive");
  }

  int dim() const { return d_; }
  double bound() const { return bound_; }
  const NormSpec& norm() const { return norm_; }

  Mat generator(long n) const {
    std::lock_guard<std::mutex> lock(mu_);
    return gen_cached(n);
  }

  Mat generator_inverse(long n) const {
    std::lock_guard<std::mutex> lock(mu_);
    return gen_inv_cached(n);
  }

  /// S_[n,m]: S_n ... S_m if n < m; S_n if n = m; identity if n > m.
  Mat partial_product(long n, long m) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (n > m) return Mat::identity(d_);
    Mat acc = gen_cached(n);
    for (long j = n + 1; j <= m; ++j) acc = acc * gen_cached(j);
    return acc;
  }

  /// (S_[1,n])^{-1} for n >= 0; identity at n = 0.
  Mat forward_inverse(long n) const {
    std::lock_guard<std::mutex> lock(mu_);
    return forward_inverse_locked(n);
  }

  /// S_[m,0] for m <= 0; S_0 at m = 0; identity at m = 1.
  Mat backward(long m) const {
    std::lock_guard<std::mutex> lock(mu_);
    return backward_locked(m);
  }

  /// Weight sequence along the seed x:
  ///   n > 0:  |(S_[1,n-1])^{-1} x| / |(S_[1,n])^{-1} x|
  ///   n <= 0: |S_[n,0] x| / |S_[n+1,0] x|
  double weight(const Vec& x, long n) const {
    if (is_zero(x)) throw zero_vector_error("weight: zero seed");
    if (const InvariantSeed* inv = match_invariant(x))
      return vnorm(apply(generator(n), inv->frame(n)), norm_);
    std::lock_guard<std::mutex> lock(mu_);
    if (n > 0)
      return vnorm(apply(forward_inverse_locked(n - 1), x), norm_) /
             vnorm(apply(forward_inverse_locked(n), x), norm_);
    return vnorm(apply(backward_locked(n), x), norm_) /
           vnorm(apply(backward_locked(n + 1), x), norm_);
  }

  /// Frame vector: normalized (S_[1,n])^{-1} x for n >= 0, normalized
  /// S_[n+1,0] x for n < 0.
  Vec frame_vector(const Vec& x, long n) const {
    if (is_zero(x)) throw zero_vector_error("frame_vector: zero seed");
    if (const InvariantSeed* inv = match_invariant(x)) {
      double c = collinear_factor(x, inv->seed);
      return (c > 0 ? 1.0 : -1.0) * inv->frame(n);
    }
    std::lock_guard<std::mutex> lock(mu_);
    Vec raw = (n >= 0) ? apply(forward_inverse_locked(n), x) : apply(backward_locked(n + 1), x);
    return normalized(raw, norm_);
  }

 private:
  // c with x = c * seed, or 0 when the vectors are not collinear
  static double collinear_factor(const Vec& x, const Vec& seed) {
    int top = 0;
    for (int i = 1; i < seed.dim(); ++i)
      if (std::abs(seed[i]) > std::abs(seed[top])) top = i;
    double c = x[top] / seed[top];
    return vnorm(x - c * seed) <= 1e-9 * vnorm(x) ? c : 0.0;
  }

  const InvariantSeed* match_invariant(const Vec& x) const {
    for (const auto& inv : invariants_)
      if (x.dim() == inv.seed.dim() && collinear_factor(x, inv.seed) != 0.0) return &inv;
    return nullptr;
  }

  Mat gen_cached(long n) const {
    auto it = gen_cache_.find(n);
    if (it != gen_cache_.end()) return it->second;
    Mat m = gen_(n);
    if (m.d != d_) throw dimension_error("OperatorSequence: generator dimension mismatch");
    return gen_cache_.emplace(n, std::move(m)).first->second;
  }

  Mat gen_inv_cached(long n) const {
    auto it = gen_inv_cache_.find(n);
    if (it != gen_inv_cache_.end()) return it->second;
    return gen_inv_cache_.emplace(n, invert(gen_cached(n))).first->second;
  }

  Mat forward_inverse_locked(long n) const {
    if (n <= 0) return Mat::identity(d_);
    auto idx = static_cast<std::size_t>(n);
    if (fwd_inv_.empty()) fwd_inv_.push_back(Mat::identity(d_));
    while (fwd_inv_.size() <= idx) {
      long next = static_cast<long>(fwd_inv_.size());
      fwd_inv_.push_back(gen_inv_cached(next) * fwd_inv_.back());
    }
    return fwd_inv_[idx];
  }

  Mat backward_locked(long m) const {
    if (m >= 1) return Mat::identity(d_);
    auto idx = static_cast<std::size_t>(-m);  // back_[k] = S_[-k,0]
    if (back_.empty()) back_.push_back(gen_cached(0));
    while (back_.size() <= idx) {
      long next = -static_cast<long>(back_.size());
      back_.push_back(gen_cached(next) * back_.back());
    }
    return back_[idx];
  }

  int d_;
  double bound_;
  NormSpec norm_;
  Generator gen_;
  std::vector<InvariantSeed> invariants_;

  mutable std::mutex mu_;
  mutable std::map<long, Mat> gen_cache_;
  mutable std::map<long, Mat> gen_inv_cache_;
  mutable std::vector<Mat> fwd_inv_;  // fwd_inv_[n] = (S_[1,n])^{-1}
  mutable std::vector<Mat> back_;     // back_[k] = S_[-k,0]
};

using OpSeqPtr = std::shared_ptr<const OperatorSequence>;

inline OpSeqPtr make_opseq(int d, double bound, NormSpec norm,
                           OperatorSequence::Generator gen) {
  return std::make_shared<const OperatorSequence>(d, bound, norm, std::move(gen));
}

inline OpSeqPtr make_constant_opseq(const Mat& s, double bound,
                                    NormSpec norm = NormSpec::euclidean()) {
  return make_opseq(s.d, bound, norm, [s](long) { return s; });
}

/// Per-seed cache of frame vectors and weights.
class Frame {
 public:
  Frame(OpSeqPtr seq, Vec seed) : seq_(std::move(seq)), seed_(std::move(seed)) {
    if (is_zero(seed_)) throw zero_vector_error("Frame: zero seed");
  }

  const Vec& seed() const { return seed_; }

  Vec e(long n) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = e_cache_.find(n);
    if (it != e_cache_.end()) return it->second;
    return e_cache_.emplace(n, seq_->frame_vector(seed_, n)).first->second;
  }

  double omega(long n) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = w_cache_.find(n);
    if (it != w_cache_.end()) return it->second;
    return w_cache_.emplace(n, seq_->weight(seed_, n)).first->second;
  }

 private:
  OpSeqPtr seq_;
  Vec seed_;
  mutable std::mutex mu_;
  mutable std::map<long, Vec> e_cache_;
  mutable std::map<long, double> w_cache_;
};

/// Max over n in [lo, hi] of |S_{n+1} e_{n+1}(x) - omega_{n+1}(x) e_n(x)|.
inline double check_intertwining(const OperatorSequence& s, const Vec& x, long lo, long hi) {
  if (is_zero(x)) throw zero_vector_error("check_intertwining: zero seed");
  double worst = 0.0;
  for (long n = lo; n <= hi; ++n) {
    Vec lhs = apply(s.generator(n + 1), s.frame_vector(x, n + 1));
    Vec rhs = s.weight(x, n + 1) * s.frame_vector(x, n);
    worst = std::max(worst, vnorm(lhs - rhs, s.norm()));
  }
  return worst;
}

/// True iff max{|S_n|, |S_n^{-1}|} < declared bound for all n in [lo, hi];
/// also reports the largest operator norm encountered.
inline std::pair<bool, double> uniform_bound_check(const OperatorSequence& s, long lo, long hi) {
  bool ok = true;
  double witness = 0.0;
  for (long n = lo; n <= hi; ++n) {
    double a = operator_norm(s.generator(n), s.norm());
    double b = operator_norm(s.generator_inverse(n), s.norm());
    double m = std::max(a, b);
    witness = std::max(witness, m);
    if (!(m < s.bound())) ok = false;
  }
  return {ok, witness};
}

}  // namespace shiftlab
