#include <gtest/gtest.h>

#include <random>

#include "kleinian/projective.hpp"

using namespace kleinian;

namespace {

using P = ProjectivePoint<Rational>;
using L = ProjectiveLine<Rational>;
using M = ProjectiveMap<Rational>;

P pt(long long a, long long b, long long c) { return P(Rational(a), Rational(b), Rational(c)); }
L ln(long long a, long long b, long long c) { return L(Rational(a), Rational(b), Rational(c)); }

Mat3<Rational> random_matrix(std::mt19937_64& rng, bool upper_fixing_e1 = false) {
  while (true) {
    Mat3<Rational> m;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) m[i][j] = Rational(static_cast<long long>(rng() % 11) - 5);
    if (upper_fixing_e1) m[1][0] = m[2][0] = Rational(0);
    if (det(m) != 0) return m;
  }
}

}  // namespace

TEST(Projective, CanonicalFormExact) {
  P p(Rational(2), Rational(4), Rational(2));
  EXPECT_EQ(p.to_string(), "[1:2:1]");
  EXPECT_EQ(P(Rational(3), Rational(0), Rational(0)), P::basis(0));
  EXPECT_THROW(P(Rational(0), Rational(0), Rational(0)), Error);
}

TEST(Projective, CanonicalFormFloat) {
  ProjectivePoint<Complex> p(Complex(0, 2), Complex(0, 2), Complex(0));
  EXPECT_NEAR(p[0].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(p[0].imag(), 0, 1e-15);
  EXPECT_TRUE(p.equals(ProjectivePoint<Complex>(Complex(1), Complex(1), Complex(0))));
}

TEST(Projective, LineThroughBasisPoints) {
  EXPECT_EQ(line_through(P::basis(0), P::basis(1)), L::coordinate(2));
}

TEST(Projective, LineThroughOnesAndE1) {
  L l = line_through(pt(1, 1, 1), P::basis(0));
  EXPECT_EQ(l, ln(0, 1, -1));
  EXPECT_TRUE(l.contains(pt(1, 1, 1)));
  EXPECT_TRUE(l.contains(P::basis(0)));
}

TEST(Projective, LineThroughEqualPointsThrows) {
  try {
    line_through(pt(1, 2, 3), pt(2, 4, 6));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EqualPoints);
  }
}

TEST(Projective, IntersectExamples) {
  EXPECT_EQ(intersect(L::coordinate(0), L::coordinate(1)), P::basis(2));
  EXPECT_EQ(intersect(L::coordinate(0), ln(1, 0, -1)), P::basis(1));
  try {
    intersect(ln(1, 2, 3), ln(2, 4, 6));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EqualLines);
  }
}

TEST(Projective, ApplyExamples) {
  P x = pt(1, 1, 1);
  EXPECT_EQ(kleinian::apply(M::identity(), x), x);
  Mat3<Rational> d{{{Rational(2), 0, 0}, {0, Rational(1, 2), 0}, {0, 0, Rational(1)}}};
  EXPECT_EQ(kleinian::apply(M(d), x), P(Rational(2), Rational(1, 2), Rational(1)));
  // column 0 is 3·e₂
  Mat3<Rational> c{{{0, 1, 0}, {Rational(3), 0, 0}, {0, 0, 1}}};
  EXPECT_EQ(kleinian::apply(M(c), P::basis(0)), P::basis(1));
}

TEST(Projective, ProjectExamples) {
  EXPECT_EQ(project(P::basis(0), L::coordinate(0), pt(1, 1, 1)), pt(0, 1, 1));
  P on = pt(0, 3, 1);
  EXPECT_EQ(project(P::basis(0), L::coordinate(0), on), on);
  try {
    project(P::basis(2), L::coordinate(0), pt(1, 1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CenterOnLine);
  }
  try {
    project(P::basis(2), L::coordinate(2), P::basis(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UndefinedAtCenter);
  }
}

TEST(Projective, ProjectIsIdempotent) {
  std::mt19937_64 rng(7);
  P p = pt(1, 2, 3);
  L l = ln(1, 1, 1);
  for (int i = 0; i < 50; ++i) {
    P x(Rational(static_cast<long long>(rng() % 9) - 4), Rational(static_cast<long long>(rng() % 9) - 4),
        Rational(static_cast<long long>(rng() % 9) + 1));
    if (x == p) continue;
    P once = project(p, l, x);
    EXPECT_TRUE(l.contains(once));
    EXPECT_EQ(project(p, l, once), once);
  }
}

TEST(Projective, RestrictExamples) {
  L l1 = L::coordinate(0);
  auto id = restrict_to_line(M::identity(), P::basis(0), l1);
  EXPECT_EQ(classify_moebius(id), MoebiusClass::Identity);
  Mat3<Rational> d{{{Rational(5), 0, 0}, {0, Rational(2), 0}, {0, 0, Rational(3)}}};
  auto r = restrict_to_line(M(d), P::basis(0), l1);
  EXPECT_EQ(r, MoebiusMap<Rational>(Rational(2), Rational(0), Rational(0), Rational(3)));
  Mat3<Rational> swap{{{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}};
  try {
    restrict_to_line(M(swap), P::basis(0), l1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CenterNotFixed);
  }
}

TEST(Projective, RestrictIsHomomorphism) {
  std::mt19937_64 rng(11);
  L l1 = L::coordinate(0);
  for (int i = 0; i < 100; ++i) {
    M g(random_matrix(rng, true)), h(random_matrix(rng, true));
    auto lhs = restrict_to_line(g * h, P::basis(0), l1);
    auto rhs = restrict_to_line(g, P::basis(0), l1) * restrict_to_line(h, P::basis(0), l1);
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Projective, IncidencePreserved) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    M g(random_matrix(rng));
    P x = pt(static_cast<long long>(rng() % 7) - 3, static_cast<long long>(rng() % 7) - 3, 1);
    P y = pt(static_cast<long long>(rng() % 7) - 3, 1, static_cast<long long>(rng() % 7) - 3);
    if (x == y) continue;
    L l = line_through(x, y);
    L image = kleinian::apply(g, l);
    EXPECT_TRUE(image.contains(kleinian::apply(g, x)));
    EXPECT_TRUE(image.contains(kleinian::apply(g, y)));
    P z = pt(1, 1, 1);
    EXPECT_EQ(l.contains(z), image.contains(kleinian::apply(g, z)));
  }
}

TEST(Projective, ClassifyExamples) {
  using Mo = MoebiusMap<Rational>;
  EXPECT_EQ(classify_moebius(Mo::identity()), MoebiusClass::Identity);
  EXPECT_EQ(classify_moebius(Mo(Rational(1), Rational(1), Rational(0), Rational(1))), MoebiusClass::Parabolic);
  EXPECT_EQ(classify_moebius(Mo(Rational(2), Rational(0), Rational(0), Rational(1, 2))), MoebiusClass::Loxodromic);
  EXPECT_EQ(classify_moebius(Mo(Rational(0), Rational(-1), Rational(1), Rational(0))), MoebiusClass::Elliptic);
  EXPECT_EQ(classify_moebius(Mo(Rational(3), Rational(0), Rational(0), Rational(3))), MoebiusClass::Identity);
}

TEST(Projective, ClassifyFloat) {
  using Mo = MoebiusMap<Complex>;
  EXPECT_EQ(classify_moebius(Mo(1.0, 1.0, 0.0, 1.0)), MoebiusClass::Parabolic);
  EXPECT_EQ(classify_moebius(Mo(Complex(0, 2), 0.0, 0.0, Complex(0, -0.5))), MoebiusClass::Loxodromic);
  EXPECT_EQ(classify_moebius(Mo(std::polar(1.0, 0.3), 0.0, 0.0, std::polar(1.0, -0.3))), MoebiusClass::Elliptic);
}

TEST(Projective, ClassifyConjugationInvariant) {
  std::mt19937_64 rng(5);
  auto rnd = [&] { return Rational(static_cast<long long>(rng() % 9) - 4); };
  for (int i = 0; i < 100; ++i) {
    Rational a = rnd(), b = rnd(), c = rnd(), d = rnd(), p = rnd(), q = rnd(), r = rnd(), s = rnd();
    if (a * d - b * c == 0 || p * s - q * r == 0) continue;
    MoebiusMap<Rational> m(a, b, c, d), g(p, q, r, s);
    EXPECT_EQ(classify_moebius(m), classify_moebius(g * m * g.inverse()));
  }
}

TEST(Projective, SequenceLimits) {
  std::vector<std::pair<Complex, Complex>> both, e2, interior, mixed;
  for (double m = 2e6; m < 2e6 + 30; ++m) {
    both.push_back({m, m * m});
    e2.push_back({1 / m, m});
  }
  for (double m = 1e4; m < 1e4 + 30; ++m) interior.push_back({1 + 1 / m, 2.0});
  for (int m = 0; m < 30; ++m) mixed.push_back({m % 2 == 0 ? 1.0 : 5.0, 1.0});
  EXPECT_EQ(classify_sequence_limit(both).kind, SequenceLimitKind::OnLineE1E2);
  auto r = classify_sequence_limit(e2);
  EXPECT_EQ(r.kind, SequenceLimitKind::PointE2);
  EXPECT_TRUE(r.point->equals(ProjectivePoint<Complex>::basis(1)));
  auto s = classify_sequence_limit(interior);
  EXPECT_EQ(s.kind, SequenceLimitKind::Interior);
  EXPECT_TRUE(s.point->equals(ProjectivePoint<Complex>(1.0, 2.0, 1.0), Tolerances{.point = 1e-4}));
  EXPECT_THROW(classify_sequence_limit(mixed), Error);
}
