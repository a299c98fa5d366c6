#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kleinian/error.hpp"
#include "kleinian/matrix.hpp"
#include "kleinian/scalar.hpp"

namespace kleinian {

/// A vector of ℚ², used both for ν and for integral translation parts.
struct RationalVec2 {
  Rational x{0};
  Rational y{0};

  RationalVec2() = default;
  RationalVec2(Rational a, Rational b) : x(std::move(a)), y(std::move(b)) {}

  bool is_integral() const { return kleinian::is_integral(x) && kleinian::is_integral(y); }
  bool is_zero() const { return x == 0 && y == 0; }

  RationalVec2& operator+=(const RationalVec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  RationalVec2& operator-=(const RationalVec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend RationalVec2 operator+(RationalVec2 a, const RationalVec2& b) { return a += b; }
  friend RationalVec2 operator-(RationalVec2 a, const RationalVec2& b) { return a -= b; }
  friend RationalVec2 operator-(const RationalVec2& a) { return {-a.x, -a.y}; }
  friend RationalVec2 operator*(const Rational& c, const RationalVec2& v) { return {c * v.x, c * v.y}; }
  friend bool operator==(const RationalVec2& a, const RationalVec2& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(const RationalVec2& a, const RationalVec2& b) { return !(a == b); }

  std::string to_string() const { return "(" + kleinian::to_string(x) + ", " + kleinian::to_string(y) + ")"; }
};

/// Element of SL(2,ℤ). Construction rejects determinant ≠ 1.
class IntMatrix2 {
 public:
  IntMatrix2() : IntMatrix2(1, 0, 0, 1) {}
  IntMatrix2(Integer a, Integer b, Integer c, Integer d)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    if (a_ * d_ - b_ * c_ != 1)
      throw Error(ErrorCode::NotUnimodular, "det " + kleinian::to_string(Integer(a_ * d_ - b_ * c_)) + " ≠ 1");
  }

  static IntMatrix2 identity() { return {}; }

  const Integer& a() const { return a_; }
  const Integer& b() const { return b_; }
  const Integer& c() const { return c_; }
  const Integer& d() const { return d_; }
  Integer trace() const { return a_ + d_; }
  bool is_identity() const { return a_ == 1 && b_ == 0 && c_ == 0 && d_ == 1; }

  IntMatrix2 inverse() const { return {d_, -b_, -c_, a_}; }

  friend IntMatrix2 operator*(const IntMatrix2& m, const IntMatrix2& n) {
    return {m.a_ * n.a_ + m.b_ * n.c_, m.a_ * n.b_ + m.b_ * n.d_, m.c_ * n.a_ + m.d_ * n.c_,
            m.c_ * n.b_ + m.d_ * n.d_};
  }
  friend RationalVec2 operator*(const IntMatrix2& m, const RationalVec2& v) {
    return {Rational(m.a_) * v.x + Rational(m.b_) * v.y, Rational(m.c_) * v.x + Rational(m.d_) * v.y};
  }
  friend bool operator==(const IntMatrix2& m, const IntMatrix2& n) {
    return m.a_ == n.a_ && m.b_ == n.b_ && m.c_ == n.c_ && m.d_ == n.d_;
  }
  friend bool operator!=(const IntMatrix2& m, const IntMatrix2& n) { return !(m == n); }

  /// Mⁿ for any integer n (negative powers are integral since det = 1).
  IntMatrix2 pow(std::int64_t n) const {
    IntMatrix2 base = n < 0 ? inverse() : *this;
    std::uint64_t e = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
    IntMatrix2 acc;
    while (e) {
      if (e & 1) acc = acc * base;
      base = base * base;
      e >>= 1;
    }
    return acc;
  }

  template <class S>
  Mat2<S> as() const {
    return Mat2<S>{{{S(Rational(a_)), S(Rational(b_))}, {S(Rational(c_)), S(Rational(d_))}}};
  }

  std::string to_string() const {
    return "[[" + kleinian::to_string(a_) + "," + kleinian::to_string(b_) + "],[" + kleinian::to_string(c_) +
           "," + kleinian::to_string(d_) + "]]";
  }

 private:
  Integer a_, b_, c_, d_;
};

inline bool is_hyperbolic_toral(const IntMatrix2& m) { return abs(m.trace()) > 2; }

/// Exact eigen-decomposition of a hyperbolic A in ℚ(√d), d the square-free
/// part of trace² − 4. v₊ and v₋ have first coordinate 1.
struct EigenData {
  QuadExt lambda;
  QuadExt lambda_inv;
  std::array<QuadExt, 2> v_plus;
  std::array<QuadExt, 2> v_minus;
  std::int64_t radicand = 0;
};

inline EigenData eigen_data(const IntMatrix2& m) {
  if (!is_hyperbolic_toral(m)) throw Error(ErrorCode::NotHyperbolic, m.to_string());
  Integer tau = m.trace();
  Integer disc = tau * tau - 4;
  Integer root;
  Integer free = squarefree_part(disc, &root);
  if (free == 1) throw Error(ErrorCode::NotHyperbolic, "rational eigenvalues for " + m.to_string());
  if (free > Integer(INT64_MAX)) throw Error(ErrorCode::NotHyperbolic, "discriminant too large");
  auto d = free.convert_to<std::int64_t>();
  EigenData e;
  e.radicand = d;
  e.lambda = QuadExt(Rational(tau, 2), Rational(root, 2), d);
  e.lambda_inv = QuadExt(Rational(tau, 2), Rational(-root, 2), d);
  // b ≠ 0 for every hyperbolic element of SL(2,ℤ): b = 0 forces a = d = ±1.
  QuadExt a(Rational(m.a())), b(Rational(m.b()));
  e.v_plus = {QuadExt(1), (e.lambda - a) / b};
  e.v_minus = {QuadExt(1), (e.lambda_inv - a) / b};
  return e;
}

/// S(x): the least n ≥ 1 with n·x ∈ ℤ².
inline Integer denominator_order(const RationalVec2& v) {
  Integer p = denominator(v.x), q = denominator(v.y);
  return p / boost::multiprecision::gcd(p, q) * q;
}

namespace detail {
inline RationalVec2 fractional(const RationalVec2& v) {
  return {v.x - Rational(floor(v.x)), v.y - Rational(floor(v.y))};
}
}  // namespace detail

/// Per(A, x): the least n ≥ 1 with Aⁿx − x ∈ ℤ². The orbit of x mod ℤ² stays in
/// the S(x)² points of (S⁻¹ℤ/ℤ)², so the search ends within S(x)² steps.
inline std::int64_t period(const IntMatrix2& m, const RationalVec2& v) {
  RationalVec2 start = detail::fractional(v);
  Integer s = denominator_order(v);
  Integer bound = s * s;
  RationalVec2 y = start;
  for (std::int64_t n = 1; Integer(n) <= bound; ++n) {
    y = detail::fractional(m * y);
    if (y == start) return n;
  }
  throw Error(ErrorCode::IdentityViolation, "period exceeded S(x)² for " + v.to_string());
}

/// φ(B, x, l): Σ_{j<l} Bʲx for l > 0, 0 for l = 0, −Σ_{j=1}^{|l|} B⁻ʲx for l < 0.
inline RationalVec2 phi(const IntMatrix2& m, const RationalVec2& x, std::int64_t l) {
  RationalVec2 acc;
  if (l > 0) {
    RationalVec2 term = x;
    for (std::int64_t j = 0; j < l; ++j) {
      acc += term;
      term = m * term;
    }
  } else if (l < 0) {
    IntMatrix2 inv = m.inverse();
    RationalVec2 term = inv * x;
    for (std::int64_t j = 1; j <= -l; ++j) {
      acc -= term;
      term = inv * term;
    }
  }
  return acc;
}

/// φ with the sign of the l < 0 branch flipped. Exists only so verification
/// harnesses can prove they detect a wrong cocycle.
inline RationalVec2 phi_with_sign_fault(const IntMatrix2& m, const RationalVec2& x, std::int64_t l) {
  return l < 0 ? -phi(m, x, l) : phi(m, x, l);
}

using PhiFn = RationalVec2 (*)(const IntMatrix2&, const RationalVec2&, std::int64_t);

/// The integral correction terms relating φ(B,ν,±l) to the period data of ν.
struct DeltaWitness {
  std::array<RationalVec2, 8> delta;  // δ₁..δ₈ at indices 0..7
  IntMatrix2 B;
  RationalVec2 nu;
  std::int64_t l = 0, s = 0;
  std::int64_t per = 0;
  Integer S;
  std::int64_t K = 0, r = 0, n_tilde = 0, t = 0;
};

/// Builds δ₁..δ₈ for l = K·Per + r (l > 0, 0 < r < Per), K = ñ·S + t, 0 < s < Per and
/// checks their integrality and the three identities
///   φ(B,ν,−l)       = δ₁+δ₂+δ₃ + (S−1)·B^{Per−r} φ(B,ν,l)
///   φ(B,ν,l)        = δ₄+δ₅+δ₆ + t·φ(B,ν,Per) + φ(B,ν,r)
///   B^r φ(B,ν,s+1)  = δ₇+δ₈
/// with
///   δ₁ = −B^{−r} φ(B, B^{−K·Per}ν − ν, l)      δ₂ = −B^{Per−r} φ(B, B^{−Per}ν − ν, l)
///   δ₃ = −S·B^{Per−r} φ(B,ν,l)                 δ₄ = Σ_{i<K} φ(B, B^{i·Per}ν − ν, Per)
///   δ₅ = φ(B, B^{K·Per}ν − ν, r)              δ₆ = ñ·S·φ(B,ν,Per)
/// and, if r+s < Per, δ₇ = 0, δ₈ = Σ_{j=r}^{r+s} Bʲν; otherwise, with u = r+s−Per+1,
/// δ₇ = φ(B, B^{Per}ν − ν, u), δ₈ = Σ_{j=r}^{Per−1} Bʲν + φ(B,ν,u).
/// Every φ evaluation goes through `phi_fn`.
inline DeltaWitness tec1_witness(const IntMatrix2& B, const RationalVec2& nu, std::int64_t l, std::int64_t s,
                                 PhiFn phi_fn = phi) {
  DeltaWitness w;
  w.B = B;
  w.nu = nu;
  w.l = l;
  w.s = s;
  w.per = period(B, nu);
  w.S = denominator_order(nu);
  const std::int64_t P = w.per;
  if (l <= 0) throw Error(ErrorCode::DecompositionDegenerate, "l = " + std::to_string(l) + " must be positive");
  w.K = l / P;
  w.r = l % P;
  if (w.r == 0) throw Error(ErrorCode::DecompositionDegenerate, "l ≡ 0 mod Per(B,ν) = " + std::to_string(P));
  if (s <= 0 || s >= P)
    throw Error(ErrorCode::DecompositionDegenerate, "s = " + std::to_string(s) + " outside (0, " + std::to_string(P) + ")");
  const auto S_small = w.S.convert_to<std::int64_t>();
  w.n_tilde = w.K / S_small;
  w.t = w.K % S_small;
  const Rational S(w.S);
  const std::int64_t r = w.r, K = w.K;

  auto phi_l = phi_fn(B, nu, l);
  auto phi_P = phi_fn(B, nu, P);
  auto& d = w.delta;
  d[0] = -(B.pow(-r) * phi_fn(B, B.pow(-K * P) * nu - nu, l));
  d[1] = -(B.pow(P - r) * phi_fn(B, B.pow(-P) * nu - nu, l));
  d[2] = -(S * (B.pow(P - r) * phi_l));
  for (std::int64_t i = 0; i < K; ++i) d[3] += phi_fn(B, B.pow(i * P) * nu - nu, P);
  d[4] = phi_fn(B, B.pow(K * P) * nu - nu, r);
  d[5] = Rational(w.n_tilde) * S * phi_P;
  if (r + s < P) {
    for (std::int64_t j = r; j <= r + s; ++j) d[7] += B.pow(j) * nu;
  } else {
    const std::int64_t u = r + s - P + 1;
    d[6] = phi_fn(B, B.pow(P) * nu - nu, u);
    for (std::int64_t j = r; j < P; ++j) d[7] += B.pow(j) * nu;
    d[7] += phi_fn(B, nu, u);
  }

  auto context = [&] {
    return "B=" + B.to_string() + " ν=" + nu.to_string() + " l=" + std::to_string(l) + " s=" + std::to_string(s);
  };
  for (std::size_t i = 0; i < 7; ++i)
    if (!d[i].is_integral())
      throw Error(ErrorCode::IdentityViolation,
                  "δ" + std::to_string(i + 1) + " = " + d[i].to_string() + " not integral; " + context());

  RationalVec2 lhs1 = phi_fn(B, nu, -l);
  RationalVec2 rhs1 = d[0] + d[1] + d[2] + (S - 1) * (B.pow(P - r) * phi_l);
  if (lhs1 != rhs1)
    throw Error(ErrorCode::IdentityViolation,
                "identity 1: " + lhs1.to_string() + " ≠ " + rhs1.to_string() + "; " + context());
  RationalVec2 rhs2 = d[3] + d[4] + d[5] + Rational(w.t) * phi_P + phi_fn(B, nu, r);
  if (phi_l != rhs2)
    throw Error(ErrorCode::IdentityViolation,
                "identity 2: " + phi_l.to_string() + " ≠ " + rhs2.to_string() + "; " + context());
  RationalVec2 lhs3 = B.pow(r) * phi_fn(B, nu, s + 1);
  RationalVec2 rhs3 = d[6] + d[7];
  if (lhs3 != rhs3)
    throw Error(ErrorCode::IdentityViolation,
                "identity 3: " + lhs3.to_string() + " ≠ " + rhs3.to_string() + "; " + context());
  return w;
}

/// b + φ(B,ν,l) = β + Σ_{j<Per} m_j Bʲν with β integral and 0 ≤ m_j < S(ν).
struct NormalForm {
  std::vector<Integer> m;
  RationalVec2 beta;
};

/// Bʲν ≡ B^{j mod Per}ν (mod ℤ²), and S(ν)·Bʲν is integral, so the multiplicity
/// of each residue class only matters mod S(ν).
inline NormalForm normal_form(const IntMatrix2& B, std::int64_t l, const RationalVec2& b, const RationalVec2& nu) {
  if (!b.is_integral()) throw Error(ErrorCode::NonIntegralTranslation, b.to_string());
  const std::int64_t P = period(B, nu);
  const Integer S = denominator_order(nu);
  std::vector<Integer> count(static_cast<std::size_t>(P), Integer(0));
  auto residue = [P](std::int64_t j) { return static_cast<std::size_t>(((j % P) + P) % P); };
  if (l > 0)
    for (std::int64_t j = 0; j < l; ++j) count[residue(j)] += 1;
  else
    for (std::int64_t j = 1; j <= -l; ++j) count[residue(-j)] -= 1;
  NormalForm nf;
  nf.m.resize(static_cast<std::size_t>(P));
  RationalVec2 sum;
  RationalVec2 term = nu;
  for (std::size_t j = 0; j < nf.m.size(); ++j) {
    Integer m = count[j] % S;
    if (m < 0) m += S;
    nf.m[j] = m;
    sum += Rational(m) * term;
    term = B * term;
  }
  nf.beta = b + phi(B, nu, l) - sum;
  if (!nf.beta.is_integral())
    throw Error(ErrorCode::IdentityViolation, "normal form remainder " + nf.beta.to_string() + " not integral");
  return nf;
}

}  // namespace kleinian
