#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kleinian/error.hpp"
#include "kleinian/matrix.hpp"
#include "kleinian/scalar.hpp"
#include "kleinian/toral.hpp"

namespace kleinian {

enum class ToralFamily { GammaA, GammaABnu };

inline std::string_view to_string(ToralFamily f) { return f == ToralFamily::GammaA ? "gamma_a" : "gamma_ab_nu"; }

/// Parameters (A, B, ν) of a hyperbolic toral group. Γ_A uses B = I and ν = 0.
struct ToralGroupSpec {
  ToralFamily family = ToralFamily::GammaA;
  IntMatrix2 A;
  IntMatrix2 B;
  RationalVec2 nu;
  /// Word length up to which the all-hyperbolic hypothesis was checked (0 = not checked).
  int verified_word_bound = 0;

  static constexpr int kDefaultWordBound = 6;

  static ToralGroupSpec gamma_a(const IntMatrix2& A) {
    if (!is_hyperbolic_toral(A)) throw Error(ErrorCode::NotHyperbolic, "A = " + A.to_string());
    return {ToralFamily::GammaA, A, IntMatrix2::identity(), RationalVec2{}, 0};
  }

  /// Checks the hypotheses: A hyperbolic, AB = BA, Aν − ν integral, and every
  /// nonidentity AⁱBʲ with |i| + |j| ≤ word_bound hyperbolic. The last one is a
  /// finite check of a statement about the whole group.
  static ToralGroupSpec gamma_ab_nu(const IntMatrix2& A, const IntMatrix2& B, const RationalVec2& nu,
                                    int word_bound = kDefaultWordBound) {
    if (!is_hyperbolic_toral(A)) throw Error(ErrorCode::NotHyperbolic, "A = " + A.to_string());
    if (A * B != B * A) throw Error(ErrorCode::NonCommuting, A.to_string() + " and " + B.to_string());
    if (!(A * nu - nu).is_integral())
      throw Error(ErrorCode::InvalidSpec, "Aν − ν = " + (A * nu - nu).to_string() + " not integral");
    // A and B commute, so every word is AⁱBʲ.
    for (int i = -word_bound; i <= word_bound; ++i)
      for (int j = -word_bound; j <= word_bound; ++j) {
        if (std::abs(i) + std::abs(j) > word_bound) continue;
        IntMatrix2 g = A.pow(i) * B.pow(j);
        if (!g.is_identity() && !is_hyperbolic_toral(g))
          throw Error(ErrorCode::InvalidSpec,
                      "A^" + std::to_string(i) + "B^" + std::to_string(j) + " = " + g.to_string() + " not hyperbolic");
      }
    return {ToralFamily::GammaABnu, A, B, nu, word_bound};
  }

  /// No hypothesis checks; for exercising the closure diagnostics.
  static ToralGroupSpec unchecked(ToralFamily family, const IntMatrix2& A, const IntMatrix2& B,
                                  const RationalVec2& nu) {
    return {family, A, B, nu, 0};
  }

  friend bool operator==(const ToralGroupSpec& s, const ToralGroupSpec& t) {
    return s.family == t.family && s.A == t.A && s.B == t.B && s.nu == t.nu;
  }
  friend bool operator!=(const ToralGroupSpec& s, const ToralGroupSpec& t) { return !(s == t); }
};

/// ⟨k : l : b : ν⟩, realized as [[AᵏBˡ, b + φ(B,ν,l)], [0, 1]].
class ToralElement {
 public:
  ToralElement(std::shared_ptr<const ToralGroupSpec> spec, std::int64_t k, std::int64_t l, RationalVec2 b)
      : spec_(std::move(spec)), k_(k), l_(l), b_(std::move(b)) {
    if (!b_.is_integral()) throw Error(ErrorCode::NonIntegralTranslation, b_.to_string());
    if (spec_->family == ToralFamily::GammaA && l_ != 0)
      throw Error(ErrorCode::InvalidSpec, "Γ_A elements have l = 0");
  }

  const ToralGroupSpec& spec() const { return *spec_; }
  const std::shared_ptr<const ToralGroupSpec>& spec_ptr() const { return spec_; }
  std::int64_t k() const { return k_; }
  std::int64_t l() const { return l_; }
  const RationalVec2& b() const { return b_; }

  IntMatrix2 linear_part() const { return spec_->A.pow(k_) * spec_->B.pow(l_); }
  RationalVec2 translation() const { return b_ + phi(spec_->B, spec_->nu, l_); }

  Mat3<Rational> matrix() const {
    IntMatrix2 m = linear_part();
    RationalVec2 t = translation();
    return Mat3<Rational>{{{Rational(m.a()), Rational(m.b()), t.x},
                           {Rational(m.c()), Rational(m.d()), t.y},
                           {Rational(0), Rational(0), Rational(1)}}};
  }

  bool is_identity() const { return k_ == 0 && l_ == 0 && b_.is_zero(); }

  friend bool operator==(const ToralElement& a, const ToralElement& c) {
    return *a.spec_ == *c.spec_ && a.k_ == c.k_ && a.l_ == c.l_ && a.translation() == c.translation();
  }
  friend bool operator!=(const ToralElement& a, const ToralElement& c) { return !(a == c); }

  std::string to_string() const {
    return "<" + std::to_string(k_) + ":" + std::to_string(l_) + ":" + b_.to_string() + ">";
  }

 private:
  std::shared_ptr<const ToralGroupSpec> spec_;
  std::int64_t k_, l_;
  RationalVec2 b_;
};

inline ToralElement make_element(std::shared_ptr<const ToralGroupSpec> spec, std::int64_t k, std::int64_t l,
                                 RationalVec2 b) {
  return ToralElement(std::move(spec), k, l, std::move(b));
}

inline ToralElement identity_element(std::shared_ptr<const ToralGroupSpec> spec) {
  return ToralElement(std::move(spec), 0, 0, {});
}

/// The two correction terms of the closed-form quotient a·c⁻¹.
struct QuotientTerms {
  RationalVec2 b3;
  RationalVec2 b4;
};

/// b₃ = −A^{k₁}B^{l₁}(A^{−k₂}B^{−l₂} b₂ + B^{−l₂} φ(B, A^{−k₂}ν − ν, l₂)),
/// b₄ = B^{l₁} φ(B, A^{k₁}ν − ν, −l₂).
inline QuotientTerms quotient_terms(const ToralElement& a, const ToralElement& c) {
  const auto& s = a.spec();
  const IntMatrix2& A = s.A;
  const IntMatrix2& B = s.B;
  QuotientTerms q;
  RationalVec2 inner = A.pow(-c.k()) * (B.pow(-c.l()) * c.b()) +
                       B.pow(-c.l()) * phi(B, A.pow(-c.k()) * s.nu - s.nu, c.l());
  q.b3 = -(A.pow(a.k()) * (B.pow(a.l()) * inner));
  q.b4 = B.pow(a.l()) * phi(B, A.pow(a.k()) * s.nu - s.nu, -c.l());
  return q;
}

/// a·c⁻¹ (inverse_second) or a·c in closed form:
/// a·c⁻¹ = ⟨k₁−k₂ : l₁−l₂ : b₁+b₃+b₄⟩.
inline ToralElement compose(const ToralElement& a, const ToralElement& c, bool inverse_second) {
  if (a.spec() != c.spec()) throw Error(ErrorCode::SpecMismatch, "elements of different groups");
  if (!inverse_second) {
    ToralElement c_inv = compose(identity_element(a.spec_ptr()), c, true);
    return compose(a, c_inv, true);
  }
  QuotientTerms q = quotient_terms(a, c);
  if (!q.b3.is_integral() || !q.b4.is_integral())
    throw Error(ErrorCode::ClosureViolation, a.to_string() + "·" + c.to_string() + "⁻¹: b₃ = " + q.b3.to_string() +
                                                 ", b₄ = " + q.b4.to_string());
  return ToralElement(a.spec_ptr(), a.k() - c.k(), a.l() - c.l(), a.b() + q.b3 + q.b4);
}

inline ToralElement inverse(const ToralElement& c) { return compose(identity_element(c.spec_ptr()), c, true); }
inline ToralElement operator*(const ToralElement& a, const ToralElement& c) { return compose(a, c, false); }

/// Diagonalizing change of coordinates T = diag(T̂, 1), T̂ = [v₊ v₋]⁻¹, so that
/// T̂AT̂⁻¹ = diag(α, α⁻¹) and T̂BT̂⁻¹ = diag(β, β⁻¹).
struct Conjugator {
  std::shared_ptr<const ToralGroupSpec> spec;
  Mat3<QuadExt> T;
  Mat3<QuadExt> T_inv;
  QuadExt alpha;
  QuadExt beta;
  std::array<QuadExt, 2> x;  // rows of T̂
  std::array<QuadExt, 2> y;
};

inline Conjugator build_conjugator(std::shared_ptr<const ToralGroupSpec> spec) {
  const auto& s = *spec;
  if (s.A * s.B != s.B * s.A) throw Error(ErrorCode::NonCommuting, s.A.to_string() + " and " + s.B.to_string());
  EigenData e = eigen_data(s.A);
  Mat2<QuadExt> V{{{e.v_plus[0], e.v_minus[0]}, {e.v_plus[1], e.v_minus[1]}}};
  Mat2<QuadExt> That = inverse(V);
  Conjugator c;
  c.spec = spec;
  c.T = Mat3<QuadExt>{{{That[0][0], That[0][1], QuadExt(0)},
                       {That[1][0], That[1][1], QuadExt(0)},
                       {QuadExt(0), QuadExt(0), QuadExt(1)}}};
  c.T_inv = Mat3<QuadExt>{{{V[0][0], V[0][1], QuadExt(0)}, {V[1][0], V[1][1], QuadExt(0)}, {QuadExt(0), QuadExt(0), QuadExt(1)}}};
  c.x = {That[0][0], That[0][1]};
  c.y = {That[1][0], That[1][1]};
  Mat2<QuadExt> DA = That * s.A.as<QuadExt>() * V;
  Mat2<QuadExt> DB = That * s.B.as<QuadExt>() * V;
  // B commutes with A, so B is a polynomial in A and is diagonal in the same basis.
  if (DA[0][1] != QuadExt(0) || DA[1][0] != QuadExt(0) || DB[0][1] != QuadExt(0) || DB[1][0] != QuadExt(0))
    throw Error(ErrorCode::NonCommuting, "generators not simultaneously diagonal");
  c.alpha = DA[0][0];
  c.beta = DB[0][0];
  return c;
}

/// T·g·T⁻¹ in ℚ(√d).
inline Mat3<QuadExt> conjugated_element(const Conjugator& c, const ToralElement& g) {
  if (*c.spec != g.spec()) throw Error(ErrorCode::SpecMismatch, "conjugator built for another group");
  Mat3<Rational> m = g.matrix();
  Mat3<QuadExt> mq{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) mq[i][j] = QuadExt(m[i][j]);
  return c.T * mq * c.T_inv;
}

/// Bounds of a finite window |k| ≤ K, |l| ≤ L, |b_i| ≤ B onto the group.
struct Box {
  std::int64_t k = 0, l = 0, b = 0;
};

/// Visits every element in the box once, lexicographically in (k, l, b₁, b₂).
/// Γ_A ignores the l bound.
inline void for_each_element(const std::shared_ptr<const ToralGroupSpec>& spec, const Box& box,
                             const std::function<void(const ToralElement&)>& visit) {
  if (box.k < 0 || box.l < 0 || box.b < 0) throw Error(ErrorCode::InvalidSpec, "negative box bound");
  const std::int64_t L = spec->family == ToralFamily::GammaA ? 0 : box.l;
  for (std::int64_t k = -box.k; k <= box.k; ++k)
    for (std::int64_t l = -L; l <= L; ++l)
      for (std::int64_t b1 = -box.b; b1 <= box.b; ++b1)
        for (std::int64_t b2 = -box.b; b2 <= box.b; ++b2)
          visit(ToralElement(spec, k, l, RationalVec2(Rational(b1), Rational(b2))));
}

inline std::vector<ToralElement> enumerate(const std::shared_ptr<const ToralGroupSpec>& spec, const Box& box) {
  std::vector<ToralElement> out;
  for_each_element(spec, box, [&](const ToralElement& g) { out.push_back(g); });
  return out;
}

/// Generators of the group as exact 3×3 matrices: A (and B) as linear parts,
/// then the unit translations.
inline std::vector<Mat3<Rational>> standard_generators(const std::shared_ptr<const ToralGroupSpec>& spec) {
  std::vector<Mat3<Rational>> gens;
  gens.push_back(make_element(spec, 1, 0, {}).matrix());
  if (spec->family == ToralFamily::GammaABnu) gens.push_back(make_element(spec, 0, 1, {}).matrix());
  gens.push_back(make_element(spec, 0, 0, {Rational(1), Rational(0)}).matrix());
  gens.push_back(make_element(spec, 0, 0, {Rational(0), Rational(1)}).matrix());
  return gens;
}

}  // namespace kleinian
