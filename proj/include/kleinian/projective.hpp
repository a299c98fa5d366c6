#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kleinian/config.hpp"
#include "kleinian/error.hpp"
#include "kleinian/matrix.hpp"
#include "kleinian/scalar.hpp"

namespace kleinian {

namespace detail {

// Coordinates below this fraction of the vector norm do not fix the phase of a
// float representative.
inline constexpr double kPhaseFloor = 1e-12;

template <class S>
Vec3<S> canonicalize(Vec3<S> v) {
  if constexpr (ScalarTraits<S>::exact) {
    for (std::size_t i = 3; i-- > 0;) {
      if (!ScalarTraits<S>::is_zero(v[i])) {
        S pivot = v[i];
        for (auto& x : v) x = x / pivot;
        return v;
      }
    }
    throw Error(ErrorCode::Singular, "zero vector has no projective class");
  } else {
    double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
    if (!(n > 0) || !std::isfinite(n)) throw Error(ErrorCode::Singular, "zero vector has no projective class");
    for (auto& x : v) x /= n;
    for (auto& x : v) {
      if (std::abs(x) > kPhaseFloor) {
        Complex phase = std::conj(x) / std::abs(x);
        for (auto& y : v) y *= phase;
        break;
      }
    }
    return v;
  }
}

// Distance between float representatives after aligning phases.
inline double aligned_distance(const Vec3<Complex>& a, const Vec3<Complex>& b) {
  Complex ip = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
  Complex phase = std::abs(ip) > 0 ? std::conj(ip) / std::abs(ip) : Complex(1.0);
  double s = 0;
  for (std::size_t i = 0; i < 3; ++i) s += std::norm(a[i] - phase * b[i]);
  return std::sqrt(s);
}

}  // namespace detail

/// A point of P²: a nonzero triple up to scale, stored in canonical form.
template <class S>
class ProjectivePoint {
 public:
  explicit ProjectivePoint(const Vec3<S>& coords) : coords_(detail::canonicalize(coords)) {}
  ProjectivePoint(S a, S b, S c) : ProjectivePoint(Vec3<S>{std::move(a), std::move(b), std::move(c)}) {}

  static ProjectivePoint basis(std::size_t i) {
    Vec3<S> v{S(0), S(0), S(0)};
    v[i] = S(1);
    return ProjectivePoint(v);
  }

  const Vec3<S>& coords() const { return coords_; }
  const S& operator[](std::size_t i) const { return coords_[i]; }

  bool equals(const ProjectivePoint& o, const Tolerances& tol = default_tolerances()) const {
    if constexpr (ScalarTraits<S>::exact) {
      return coords_ == o.coords_;
    } else {
      return detail::aligned_distance(coords_, o.coords_) < tol.point;
    }
  }
  friend bool operator==(const ProjectivePoint& a, const ProjectivePoint& b) { return a.equals(b); }
  friend bool operator!=(const ProjectivePoint& a, const ProjectivePoint& b) { return !a.equals(b); }

  std::string to_string() const {
    return "[" + ScalarTraits<S>::format(coords_[0]) + ":" + ScalarTraits<S>::format(coords_[1]) +
           ":" + ScalarTraits<S>::format(coords_[2]) + "]";
  }

 private:
  Vec3<S> coords_;
};

/// A complex line of P², given by its coefficient covector; same canonical form as points.
template <class S>
class ProjectiveLine {
 public:
  explicit ProjectiveLine(const Vec3<S>& coeffs) : coeffs_(detail::canonicalize(coeffs)) {}
  ProjectiveLine(S a, S b, S c) : ProjectiveLine(Vec3<S>{std::move(a), std::move(b), std::move(c)}) {}

  /// The coordinate line {w_i = 0}.
  static ProjectiveLine coordinate(std::size_t i) {
    Vec3<S> v{S(0), S(0), S(0)};
    v[i] = S(1);
    return ProjectiveLine(v);
  }

  const Vec3<S>& coeffs() const { return coeffs_; }

  bool contains(const ProjectivePoint<S>& p, const Tolerances& tol = default_tolerances()) const {
    S r = pair(coeffs_, p.coords());
    if constexpr (ScalarTraits<S>::exact) {
      return ScalarTraits<S>::is_zero(r);
    } else {
      return std::abs(r) < tol.incidence;
    }
  }

  bool equals(const ProjectiveLine& o, const Tolerances& tol = default_tolerances()) const {
    if constexpr (ScalarTraits<S>::exact) {
      return coeffs_ == o.coeffs_;
    } else {
      return detail::aligned_distance(coeffs_, o.coeffs_) < tol.point;
    }
  }
  friend bool operator==(const ProjectiveLine& a, const ProjectiveLine& b) { return a.equals(b); }
  friend bool operator!=(const ProjectiveLine& a, const ProjectiveLine& b) { return !a.equals(b); }

  std::string to_string() const {
    return "<" + ScalarTraits<S>::format(coeffs_[0]) + ":" + ScalarTraits<S>::format(coeffs_[1]) +
           ":" + ScalarTraits<S>::format(coeffs_[2]) + ">";
  }

 private:
  Vec3<S> coeffs_;
};

/// An element of PGL(3): a nonsingular 3×3 matrix up to a nonzero scalar.
///
/// Float maps are stored with determinant 1 (principal cube root); exact maps
/// keep the matrix as given and record its determinant.
template <class S>
class ProjectiveMap {
 public:
  explicit ProjectiveMap(const Mat3<S>& m) : matrix_(m), det_(kleinian::det(m)) {
    if constexpr (ScalarTraits<S>::exact) {
      if (ScalarTraits<S>::is_zero(det_)) throw Error(ErrorCode::Singular, "projective map needs det ≠ 0");
    } else {
      if (std::abs(det_) == 0.0 || !std::isfinite(std::abs(det_)))
        throw Error(ErrorCode::Singular, "projective map needs det ≠ 0");
      Complex root = std::pow(det_, 1.0 / 3.0);
      for (auto& row : matrix_)
        for (auto& x : row) x /= root;
      det_ = kleinian::det(matrix_);
    }
  }

  static ProjectiveMap identity() { return ProjectiveMap(identity3<S>()); }

  const Mat3<S>& matrix() const { return matrix_; }
  const S& determinant() const { return det_; }

  ProjectiveMap inverse() const { return ProjectiveMap(kleinian::inverse(matrix_)); }
  friend ProjectiveMap operator*(const ProjectiveMap& a, const ProjectiveMap& b) {
    return ProjectiveMap(a.matrix_ * b.matrix_);
  }

  /// Proportionality test.
  bool equals(const ProjectiveMap& o, const Tolerances& tol = default_tolerances()) const {
    if constexpr (ScalarTraits<S>::exact) {
      std::size_t pi = 0, pj = 0;
      bool found = false;
      for (std::size_t i = 0; i < 3 && !found; ++i)
        for (std::size_t j = 0; j < 3 && !found; ++j)
          if (!ScalarTraits<S>::is_zero(matrix_[i][j])) {
            pi = i;
            pj = j;
            found = true;
          }
      const S& a = matrix_[pi][pj];
      const S& b = o.matrix_[pi][pj];
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
          if (matrix_[i][j] * b != o.matrix_[i][j] * a) return false;
      return true;
    } else {
      Complex num = 0;
      double na = 0, nb = 0;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          num += std::conj(matrix_[i][j]) * o.matrix_[i][j];
          na += std::norm(matrix_[i][j]);
          nb += std::norm(o.matrix_[i][j]);
        }
      Complex scale = num / na;  // best c with o ≈ c·this
      double resid = 0;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) resid += std::norm(o.matrix_[i][j] - scale * matrix_[i][j]);
      return std::sqrt(resid / nb) < tol.point;
    }
  }
  friend bool operator==(const ProjectiveMap& a, const ProjectiveMap& b) { return a.equals(b); }

 private:
  Mat3<S> matrix_;
  S det_;
};

/// A Möbius transformation of a projective line, as a 2×2 matrix up to scale.
template <class S>
class MoebiusMap {
 public:
  explicit MoebiusMap(const Mat2<S>& m) : matrix_(m) {
    S d = kleinian::det(m);
    if (ScalarTraits<S>::is_zero(d, 0.0)) throw Error(ErrorCode::Singular, "Möbius map needs det ≠ 0");
  }
  MoebiusMap(S a, S b, S c, S d) : MoebiusMap(Mat2<S>{{{std::move(a), std::move(b)}, {std::move(c), std::move(d)}}}) {}

  static MoebiusMap identity() { return MoebiusMap(identity2<S>()); }

  const Mat2<S>& matrix() const { return matrix_; }
  S trace() const { return matrix_[0][0] + matrix_[1][1]; }
  S determinant() const { return kleinian::det(matrix_); }
  /// trace²/det, invariant under rescaling and conjugation.
  S normalized_trace_squared() const {
    S t = trace();
    return t * t / determinant();
  }

  MoebiusMap inverse() const { return MoebiusMap(kleinian::inverse(matrix_)); }
  friend MoebiusMap operator*(const MoebiusMap& a, const MoebiusMap& b) {
    return MoebiusMap(a.matrix_ * b.matrix_);
  }

  bool equals(const MoebiusMap& o, const Tolerances& tol = default_tolerances()) const {
    const auto& a = matrix_;
    const auto& b = o.matrix_;
    if constexpr (ScalarTraits<S>::exact) {
      // a ∝ b iff all 2×2 minors of the stacked entries vanish
      std::array<S, 4> x{a[0][0], a[0][1], a[1][0], a[1][1]};
      std::array<S, 4> y{b[0][0], b[0][1], b[1][0], b[1][1]};
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
          if (x[i] * y[j] != x[j] * y[i]) return false;
      return true;
    } else {
      std::array<Complex, 4> x{a[0][0], a[0][1], a[1][0], a[1][1]};
      std::array<Complex, 4> y{b[0][0], b[0][1], b[1][0], b[1][1]};
      Complex num = 0;
      double nx = 0, ny = 0;
      for (std::size_t i = 0; i < 4; ++i) {
        num += std::conj(x[i]) * y[i];
        nx += std::norm(x[i]);
        ny += std::norm(y[i]);
      }
      Complex c = num / nx;
      double r = 0;
      for (std::size_t i = 0; i < 4; ++i) r += std::norm(y[i] - c * x[i]);
      return std::sqrt(r / ny) < tol.point;
    }
  }
  friend bool operator==(const MoebiusMap& a, const MoebiusMap& b) { return a.equals(b); }

 private:
  Mat2<S> matrix_;
};

// ---------------------------------------------------------------------------
// Incidence

template <class S>
ProjectiveLine<S> line_through(const ProjectivePoint<S>& p, const ProjectivePoint<S>& q,
                               const Tolerances& tol = default_tolerances()) {
  if (p.equals(q, tol)) throw Error(ErrorCode::EqualPoints, p.to_string());
  return ProjectiveLine<S>(cross(p.coords(), q.coords()));
}

template <class S>
ProjectivePoint<S> intersect(const ProjectiveLine<S>& l1, const ProjectiveLine<S>& l2,
                             const Tolerances& tol = default_tolerances()) {
  if (l1.equals(l2, tol)) throw Error(ErrorCode::EqualLines, l1.to_string());
  return ProjectivePoint<S>(cross(l1.coeffs(), l2.coeffs()));
}

template <class S>
ProjectivePoint<S> apply(const ProjectiveMap<S>& g, const ProjectivePoint<S>& x) {
  return ProjectivePoint<S>(g.matrix() * x.coords());
}

/// Image of a line: coefficients transform by the inverse transpose.
template <class S>
ProjectiveLine<S> apply(const ProjectiveMap<S>& g, const ProjectiveLine<S>& l) {
  return ProjectiveLine<S>(transpose(inverse(g.matrix())) * l.coeffs());
}

/// Central projection from p onto ℓ: x ↦ ↔{x,p} ∩ ℓ.
template <class S>
ProjectivePoint<S> project(const ProjectivePoint<S>& p, const ProjectiveLine<S>& l,
                           const ProjectivePoint<S>& x, const Tolerances& tol = default_tolerances()) {
  if (l.contains(p, tol)) throw Error(ErrorCode::CenterOnLine, p.to_string() + " on " + l.to_string());
  if (x.equals(p, tol)) throw Error(ErrorCode::UndefinedAtCenter, x.to_string());
  return intersect(line_through(x, p, tol), l, tol);
}

/// The two points used as the frame of ℓ when restricting maps to it:
/// standard basis points lying on ℓ first, then ℓ ∩ {w_i = 0} for i = 1, 2, 3.
template <class S>
std::array<ProjectivePoint<S>, 2> line_basis(const ProjectiveLine<S>& l,
                                             const Tolerances& tol = default_tolerances()) {
  std::vector<ProjectivePoint<S>> found;
  auto consider = [&](const ProjectivePoint<S>& p) {
    for (const auto& q : found)
      if (q.equals(p, tol)) return;
    found.push_back(p);
  };
  for (std::size_t i = 0; i < 3 && found.size() < 2; ++i) {
    auto e = ProjectivePoint<S>::basis(i);
    if (l.contains(e, tol)) consider(e);
  }
  for (std::size_t i = 0; i < 3 && found.size() < 2; ++i) {
    auto c = ProjectiveLine<S>::coordinate(i);
    if (!c.equals(l, tol)) consider(intersect(l, c, tol));
  }
  return {found.at(0), found.at(1)};
}

/// Π_{p,ℓ}(γ): the Möbius map induced on ℓ by a map fixing p, written in the
/// frame returned by line_basis(ℓ). Exact kinds compose exactly, not just up to scale.
template <class S>
MoebiusMap<S> restrict_to_line(const ProjectiveMap<S>& g, const ProjectivePoint<S>& p,
                               const ProjectiveLine<S>& l, const Tolerances& tol = default_tolerances()) {
  if (l.contains(p, tol)) throw Error(ErrorCode::CenterOnLine, p.to_string() + " on " + l.to_string());
  if (!kleinian::apply(g, p).equals(p, tol)) throw Error(ErrorCode::CenterNotFixed, p.to_string());
  auto frame = line_basis(l, tol);
  Mat3<S> c = from_columns(frame[0].coords(), frame[1].coords(), p.coords());
  Mat3<S> local = inverse(c) * g.matrix() * c;
  return MoebiusMap<S>(Mat2<S>{{{local[0][0], local[0][1]}, {local[1][0], local[1][1]}}});
}

// ---------------------------------------------------------------------------
// Classification

enum class MoebiusClass { Identity, Elliptic, Parabolic, Loxodromic };

inline std::string_view to_string(MoebiusClass c) {
  switch (c) {
    case MoebiusClass::Identity: return "identity";
    case MoebiusClass::Elliptic: return "elliptic";
    case MoebiusClass::Parabolic: return "parabolic";
    case MoebiusClass::Loxodromic: return "loxodromic";
  }
  return "?";
}

template <class S>
MoebiusClass classify_moebius(const MoebiusMap<S>& m, const Tolerances& tol = default_tolerances()) {
  const auto& a = m.matrix();
  if constexpr (ScalarTraits<S>::exact) {
    if (a[0][1] == S(0) && a[1][0] == S(0) && a[0][0] == a[1][1]) return MoebiusClass::Identity;
    S t = m.normalized_trace_squared();
    if (t == S(4)) return MoebiusClass::Parabolic;
    if (real_sign(t) >= 0 && real_sign(t - S(4)) < 0) return MoebiusClass::Elliptic;
    return MoebiusClass::Loxodromic;
  } else {
    double scale = std::max({std::abs(a[0][0]), std::abs(a[0][1]), std::abs(a[1][0]), std::abs(a[1][1])});
    if (std::abs(a[0][1]) <= tol.classify * scale && std::abs(a[1][0]) <= tol.classify * scale &&
        std::abs(a[0][0] - a[1][1]) <= tol.classify * scale)
      return MoebiusClass::Identity;
    Complex t = m.normalized_trace_squared();
    if (std::abs(t - 4.0) <= tol.classify) return MoebiusClass::Parabolic;
    if (std::abs(t.imag()) <= tol.classify && t.real() >= -tol.classify && t.real() < 4.0)
      return MoebiusClass::Elliptic;
    return MoebiusClass::Loxodromic;
  }
}

// ---------------------------------------------------------------------------
// Empirical limits of [a_m : b_m : 1]

enum class SequenceLimitKind { OnLineE1E2, PointE2, PointE1, Interior };

struct SequenceLimit {
  SequenceLimitKind kind;
  std::optional<ProjectivePoint<Complex>> point;  // set for Interior, e₁, e₂
};

/// Classifies the tail of [a_m : b_m : 1]. A coordinate diverges when every tail
/// term exceeds M_div in modulus; it converges when the tail stays within a
/// relative spread of its last term.
inline SequenceLimit classify_sequence_limit(const std::vector<std::pair<Complex, Complex>>& seq,
                                             const Tolerances& tol = default_tolerances()) {
  if (seq.size() < tol.tail || tol.tail == 0)
    throw Error(ErrorCode::Inconclusive, "sequence shorter than the tail window");
  auto first = seq.end() - static_cast<std::ptrdiff_t>(tol.tail);
  auto behaviour = [&](auto pick) {
    bool diverges = std::all_of(first, seq.end(), [&](const auto& t) {
      return std::abs(pick(t)) > tol.divergence;
    });
    if (diverges) return 1;
    Complex last = pick(seq.back());
    double reach = tol.convergence * std::max(1.0, std::abs(last));
    bool converges = std::all_of(first, seq.end(), [&](const auto& t) {
      return std::abs(pick(t)) <= tol.divergence && std::abs(pick(t) - last) <= reach;
    });
    return converges ? 0 : -1;
  };
  int a = behaviour([](const auto& t) { return t.first; });
  int b = behaviour([](const auto& t) { return t.second; });
  if (a == 1 && b == 1) return {SequenceLimitKind::OnLineE1E2, std::nullopt};
  if (a == 0 && b == 1) return {SequenceLimitKind::PointE2, ProjectivePoint<Complex>::basis(1)};
  if (a == 1 && b == 0) return {SequenceLimitKind::PointE1, ProjectivePoint<Complex>::basis(0)};
  if (a == 0 && b == 0) {
    const auto& [za, zb] = seq.back();
    return {SequenceLimitKind::Interior, ProjectivePoint<Complex>(za, zb, Complex(1.0))};
  }
  throw Error(ErrorCode::Inconclusive, "tail neither converges nor diverges coordinatewise");
}

}  // namespace kleinian
