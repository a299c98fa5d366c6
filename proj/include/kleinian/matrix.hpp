#pragma once

#include <array>
#include <cstddef>

#include "kleinian/error.hpp"
#include "kleinian/scalar.hpp"

namespace kleinian {

template <class S>
using Vec3 = std::array<S, 3>;
template <class S>
using Mat3 = std::array<std::array<S, 3>, 3>;
template <class S>
using Mat2 = std::array<std::array<S, 2>, 2>;

template <class S>
Mat3<S> identity3() {
  Mat3<S> m{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m[i][j] = S(i == j ? 1 : 0);
  return m;
}

template <class S>
Mat2<S> identity2() {
  return Mat2<S>{{{S(1), S(0)}, {S(0), S(1)}}};
}

template <class S>
Vec3<S> operator*(const Mat3<S>& m, const Vec3<S>& v) {
  Vec3<S> r{};
  for (std::size_t i = 0; i < 3; ++i) {
    S acc = m[i][0] * v[0];
    acc += m[i][1] * v[1];
    acc += m[i][2] * v[2];
    r[i] = acc;
  }
  return r;
}

template <class S>
Mat3<S> operator*(const Mat3<S>& a, const Mat3<S>& b) {
  Mat3<S> r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      S acc = a[i][0] * b[0][j];
      acc += a[i][1] * b[1][j];
      acc += a[i][2] * b[2][j];
      r[i][j] = acc;
    }
  return r;
}

template <class S>
Mat2<S> operator*(const Mat2<S>& a, const Mat2<S>& b) {
  Mat2<S> r{};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

template <class S>
std::array<S, 2> operator*(const Mat2<S>& m, const std::array<S, 2>& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

template <class S>
S det(const Mat3<S>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

template <class S>
S det(const Mat2<S>& m) {
  return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

template <class S>
Mat3<S> adjugate(const Mat3<S>& m) {
  Mat3<S> a{};
  a[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  a[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  a[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  a[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  a[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  a[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  a[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  a[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  a[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return a;
}

template <class S>
Mat3<S> inverse(const Mat3<S>& m) {
  S d = det(m);
  if (ScalarTraits<S>::is_zero(d, 0.0)) throw Error(ErrorCode::Singular, "singular 3x3 matrix");
  Mat3<S> a = adjugate(m);
  for (auto& row : a)
    for (auto& x : row) x = x / d;
  return a;
}

template <class S>
Mat2<S> inverse(const Mat2<S>& m) {
  S d = det(m);
  if (ScalarTraits<S>::is_zero(d, 0.0)) throw Error(ErrorCode::Singular, "singular 2x2 matrix");
  return Mat2<S>{{{m[1][1] / d, -m[0][1] / d}, {-m[1][0] / d, m[0][0] / d}}};
}

template <class S>
Mat3<S> transpose(const Mat3<S>& m) {
  Mat3<S> t{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) t[i][j] = m[j][i];
  return t;
}

template <class S>
Vec3<S> cross(const Vec3<S>& a, const Vec3<S>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Bilinear pairing (no conjugation): line coefficients against point coordinates.
template <class S>
S pair(const Vec3<S>& a, const Vec3<S>& b) {
  S acc = a[0] * b[0];
  acc += a[1] * b[1];
  acc += a[2] * b[2];
  return acc;
}

template <class S>
Mat3<S> from_columns(const Vec3<S>& c0, const Vec3<S>& c1, const Vec3<S>& c2) {
  Mat3<S> m{};
  for (std::size_t i = 0; i < 3; ++i) {
    m[i][0] = c0[i];
    m[i][1] = c1[i];
    m[i][2] = c2[i];
  }
  return m;
}

template <class To, class From>
Mat3<To> convert(const Mat3<From>& m) {
  Mat3<To> r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = To(m[i][j]);
  return r;
}

template <class S>
Mat3<Complex> to_complex(const Mat3<S>& m) {
  Mat3<Complex> r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = ScalarTraits<S>::to_complex(m[i][j]);
  return r;
}

template <class S>
Vec3<Complex> to_complex(const Vec3<S>& v) {
  return {ScalarTraits<S>::to_complex(v[0]), ScalarTraits<S>::to_complex(v[1]),
          ScalarTraits<S>::to_complex(v[2])};
}

}  // namespace kleinian
