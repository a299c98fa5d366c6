#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "kleinian/error.hpp"
#include "kleinian/matrix.hpp"
#include "kleinian/scalar.hpp"

namespace kleinian {

/// Best rational p/q with q ≤ max_den and |x − p/q| ≤ tol·max(1,|x|), from the
/// continued-fraction convergents of x.
inline std::optional<Rational> rational_approx(double x, long long max_den = 1000000, double tol = 1e-9) {
  if (!std::isfinite(x)) return std::nullopt;
  const double reach = tol * std::max(1.0, std::abs(x));
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;  // convergents h/k
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(r);
    if (std::abs(a) > 9e15) break;
    auto ai = static_cast<long long>(a);
    long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den || k2 <= 0) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <= reach) return Rational(h1, k1);
    double frac = r - a;
    if (frac <= 0) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

/// Roots of a monic real cubic x³ + c₂x² + c₁x + c₀ (Durand–Kerner, then Newton polish).
inline std::array<Complex, 3> cubic_roots(double c2, double c1, double c0) {
  auto p = [&](Complex z) { return ((z + c2) * z + c1) * z + c0; };
  auto dp = [&](Complex z) { return (3.0 * z + 2.0 * c2) * z + c1; };
  double bound = 1 + std::max({std::abs(c2), std::abs(c1), std::abs(c0)});
  std::array<Complex, 3> z{Complex(0.4, 0.9) * bound * 0.5, Complex(0.4, 0.9) * Complex(0.4, 0.9) * bound * 0.5,
                           Complex(0.4, 0.9) * Complex(0.4, 0.9) * Complex(0.4, 0.9) * bound * 0.5};
  for (int it = 0; it < 500; ++it) {
    double change = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      Complex denom = 1;
      for (std::size_t j = 0; j < 3; ++j)
        if (j != i) denom *= z[i] - z[j];
      if (std::abs(denom) == 0) denom = 1e-300;
      Complex step = p(z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15 * bound) break;
  }
  for (auto& r : z)
    for (int it = 0; it < 3; ++it) {
      Complex d = dp(r);
      if (std::abs(d) > 0) r -= p(r) / d;
    }
  return z;
}

/// Basis of the kernel of m (exact Gaussian elimination).
template <ExactScalar S>
std::vector<Vec3<S>> nullspace(Mat3<S> m) {
  std::array<int, 3> pivot_col{-1, -1, -1};
  std::size_t row = 0;
  std::array<bool, 3> is_pivot{false, false, false};
  for (std::size_t col = 0; col < 3 && row < 3; ++col) {
    std::size_t sel = row;
    while (sel < 3 && ScalarTraits<S>::is_zero(m[sel][col])) ++sel;
    if (sel == 3) continue;
    std::swap(m[sel], m[row]);
    S inv = S(1) / m[row][col];
    for (auto& x : m[row]) x = x * inv;
    for (std::size_t r = 0; r < 3; ++r) {
      if (r == row || ScalarTraits<S>::is_zero(m[r][col])) continue;
      S f = m[r][col];
      for (std::size_t c = 0; c < 3; ++c) m[r][c] = m[r][c] - f * m[row][c];
    }
    pivot_col[row] = static_cast<int>(col);
    is_pivot[col] = true;
    ++row;
  }
  std::vector<Vec3<S>> basis;
  for (std::size_t free = 0; free < 3; ++free) {
    if (is_pivot[free]) continue;
    Vec3<S> v{S(0), S(0), S(0)};
    v[free] = S(1);
    for (std::size_t r = 0; r < row; ++r) v[static_cast<std::size_t>(pivot_col[r])] = S(0) - m[r][free];
    basis.push_back(v);
  }
  return basis;
}

template <ExactScalar S>
bool is_zero_vec(const Vec3<S>& v) {
  return ScalarTraits<S>::is_zero(v[0]) && ScalarTraits<S>::is_zero(v[1]) && ScalarTraits<S>::is_zero(v[2]);
}

/// A projective subspace given by a basis of its linear span (1 = point, 2 = line, 3 = plane).
template <ExactScalar S>
struct Subspace {
  std::vector<Vec3<S>> basis;
  std::size_t dim() const { return basis.size(); }
  /// Normal covector of a line.
  Vec3<S> normal() const { return cross(basis[0], basis[1]); }
  bool contains(const Vec3<S>& v) const {
    if (dim() == 3) return true;
    if (dim() == 2) return ScalarTraits<S>::is_zero(pair(normal(), v));
    return is_zero_vec(cross(basis[0], v));
  }
};

template <ExactScalar S>
std::optional<Subspace<S>> intersect_subspaces(const Subspace<S>& u, const Subspace<S>& w) {
  if (u.dim() == 3) return w;
  if (w.dim() == 3) return u;
  if (u.dim() == 1) return w.contains(u.basis[0]) ? std::optional<Subspace<S>>(u) : std::nullopt;
  if (w.dim() == 1) return u.contains(w.basis[0]) ? std::optional<Subspace<S>>(w) : std::nullopt;
  Vec3<S> p = cross(u.normal(), w.normal());
  if (is_zero_vec(p)) return u;  // same line
  return Subspace<S>{{p}};
}

/// Union of subspaces, with members contained in another member dropped.
template <ExactScalar S>
std::vector<Subspace<S>> simplify_union(std::vector<Subspace<S>> parts) {
  std::vector<Subspace<S>> out;
  std::stable_sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.dim() > b.dim(); });
  for (const auto& s : parts) {
    bool covered = false;
    for (const auto& t : out) {
      bool all = true;
      for (const auto& v : s.basis) all = all && t.contains(v);
      if (all) {
        covered = true;
        break;
      }
    }
    if (!covered) out.push_back(s);
  }
  return out;
}

namespace detail {

template <ExactScalar S>
S eval_cubic(const std::array<S, 3>& c, const S& x) {
  return ((x + c[0]) * x + c[1]) * x + c[2];
}

/// Galois conjugate of a scalar (identity on rationals).
inline QuadExt galois(const QuadExt& q) { return q.conj(); }

// Repeated roots come out of the float solver with error ~ε^{1/k}, so candidate
// reconstructions are tried at several tolerances; each is verified exactly.
inline constexpr double kLadder[] = {1e-12, 1e-9, 1e-6, 1e-4};
inline bool nearly_real(const Complex& z) { return std::abs(z.imag()) <= 1e-4 * std::max(1.0, std::abs(z)); }

/// Real roots of the monic cubic x³ + c[0]x² + c[1]x + c[2] that lie in ℚ or in
/// the quadratic field of the coefficients (or, for rational coefficients, in the
/// splitting field of the quadratic cofactor). Roots are recovered from floats
/// and then verified exactly; roots outside these fields are not reported.
inline std::vector<QuadExt> exact_real_roots(const std::array<QuadExt, 3>& c) {
  std::vector<QuadExt> roots;
  auto add_root = [&](const QuadExt& r) {
    for (const auto& q : roots)
      if (q == r) return;
    roots.push_back(r);
  };
  auto f = cubic_roots(c[0].to_double(), c[1].to_double(), c[2].to_double());
  std::int64_t field = 0;
  for (const auto& x : c)
    if (!x.is_rational()) field = x.radicand();

  if (field == 0) {
    // Rational coefficients: find a rational root, deflate, solve the quadratic.
    std::optional<Rational> q;
    for (const auto& z : f) {
      if (!nearly_real(z)) continue;
      for (double t : kLadder) {
        auto cand = rational_approx(z.real(), 1000000, t);
        if (cand && eval_cubic(c, QuadExt(*cand)) == QuadExt(0)) {
          q = cand;
          break;
        }
      }
      if (q) break;
    }
    if (q) {
      add_root(QuadExt(*q));
      // x³ + c0x² + c1x + c2 = (x − r)(x² + px + s)
      Rational p = c[0].rational_part() + *q;
      Rational s = c[1].rational_part() + *q * p;
      Rational disc = p * p - 4 * s;
      if (disc < 0) return roots;
      Integer num = numerator(disc) * denominator(disc);
      Integer root;
      Integer free = num == 0 ? Integer(1) : squarefree_part(num, &root);
      if (num == 0) root = 0;
      // √disc = root·√free / denominator(disc)
      Rational coef = Rational(root) / Rational(denominator(disc));
      if (free == 1) {
        add_root(QuadExt((-p + coef) / 2));
        add_root(QuadExt((-p - coef) / 2));
      } else if (free <= Integer(INT64_MAX)) {
        auto d = free.convert_to<std::int64_t>();
        add_root(QuadExt(-p / 2, coef / 2, d));
        add_root(QuadExt(-p / 2, -coef / 2, d));
      }
    }
    return roots;
  }

  // Coefficients in ℚ(√d): a root r = a + b√d pairs with the root σ(r) of σ(P).
  auto g = cubic_roots(galois(c[0]).to_double(), galois(c[1]).to_double(), galois(c[2]).to_double());
  const double sd = std::sqrt(static_cast<double>(field));
  for (const auto& z : f) {
    if (!nearly_real(z)) continue;
    for (const auto& w : g) {
      if (!nearly_real(w)) continue;
      for (double t : kLadder) {
        auto a = rational_approx((z.real() + w.real()) / 2, 1000000, t);
        auto b = rational_approx((z.real() - w.real()) / (2 * sd), 1000000, t);
        if (!a || !b) continue;
        QuadExt r(*a, *b, field);
        if (eval_cubic(c, r) == QuadExt(0)) {
          add_root(r);
          break;
        }
      }
    }
  }
  return roots;
}

}  // namespace detail

/// Fixed-point set of the projective map m: the projectivized eigenspaces for
/// eigenvalues that can be represented exactly.
inline std::vector<Subspace<QuadExt>> fixed_subspaces(const Mat3<QuadExt>& m) {
  // characteristic polynomial x³ − tr x² + c₂ x − det
  QuadExt tr = m[0][0] + m[1][1] + m[2][2];
  QuadExt c2 = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] +
               m[1][1] * m[2][2] - m[1][2] * m[2][1];
  QuadExt dt = det(m);
  std::vector<Subspace<QuadExt>> out;
  for (const auto& mu : detail::exact_real_roots({QuadExt(0) - tr, c2, QuadExt(0) - dt})) {
    Mat3<QuadExt> shifted = m;
    for (std::size_t i = 0; i < 3; ++i) shifted[i][i] = shifted[i][i] - mu;
    auto basis = nullspace(shifted);
    if (!basis.empty()) out.push_back(Subspace<QuadExt>{basis});
  }
  return out;
}

}  // namespace kleinian
