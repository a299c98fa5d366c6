#include <gtest/gtest.h>

#include <map>
#include <set>

#include "kleinian/verify.hpp"

using namespace kleinian;

namespace {

const IntMatrix2 kCat(2, 1, 1, 1);

std::shared_ptr<const ToralGroupSpec> cat_group() {
  return std::make_shared<const ToralGroupSpec>(ToralGroupSpec::gamma_a(kCat));
}

// A = cat², B = cat, ν = (−1/5, 3/5): Aν − ν is integral and every AⁱBʲ = cat^{2i+j}.
std::shared_ptr<const ToralGroupSpec> ab_group() {
  return std::make_shared<const ToralGroupSpec>(
      ToralGroupSpec::gamma_ab_nu(kCat.pow(2), kCat, {Rational(-1, 5), Rational(3, 5)}));
}

RationalVec2 iv(long long a, long long b) { return {Rational(a), Rational(b)}; }

std::string matrix_key(const ToralElement& e) {
  std::string key;
  for (const auto& row : e.matrix())
    for (const auto& x : row) key += to_string(x) + ",";
  return key;
}

}  // namespace

TEST(Group, SpecValidation) {
  EXPECT_THROW(ToralGroupSpec::gamma_a(IntMatrix2::identity()), Error);
  try {
    ToralGroupSpec::gamma_ab_nu(kCat, IntMatrix2(1, 1, 0, 1), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonCommuting);
  }
  try {
    ToralGroupSpec::gamma_ab_nu(kCat, kCat, {Rational(1, 2), Rational(0)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
  }
  EXPECT_EQ(ab_group()->verified_word_bound, 6);
}

TEST(Group, MakeElementExamples) {
  auto g = cat_group();
  EXPECT_EQ(make_element(g, 0, 0, {}).matrix(), identity3<Rational>());
  Mat3<Rational> want{{{2, 1, 0}, {1, 1, 0}, {0, 0, 1}}};
  EXPECT_EQ(make_element(g, 1, 0, {}).matrix(), want);
  auto h = ab_group();
  EXPECT_EQ(make_element(h, 0, 1, {}).translation(), h->nu);
  EXPECT_THROW(make_element(g, 0, 0, {Rational(1, 2), Rational(0)}), Error);
  EXPECT_THROW(make_element(g, 0, 1, {}), Error);
}

TEST(Group, ElementsHaveDeterminantOne) {
  Rng rng(1);
  auto h = ab_group();
  for (int i = 0; i < 20; ++i) EXPECT_EQ(det(random_element(rng, h).matrix()), 1);
}

TEST(Group, InverseLaw) {
  Rng rng(2);
  for (auto spec : {cat_group(), ab_group()})
    for (int i = 0; i < 30; ++i) {
      ToralElement a = random_element(rng, spec);
      EXPECT_TRUE(compose(a, a, true).is_identity());
      EXPECT_TRUE((a * inverse(a)).is_identity());
      EXPECT_EQ(a * identity_element(spec), a);
    }
}

TEST(Group, ClosedFormMatchesMatrixProduct) {
  EXPECT_TRUE(check_closure(0, 200, cat_group()).ok());
  EXPECT_TRUE(check_closure(0, 200, ab_group()).ok());
}

TEST(Group, Associativity) {
  Rng rng(3);
  auto h = ab_group();
  for (int i = 0; i < 50; ++i) {
    ToralElement a = random_element(rng, h), b = random_element(rng, h), c = random_element(rng, h);
    EXPECT_EQ(((a * b) * c).matrix(), (a * (b * c)).matrix());
  }
}

TEST(Group, ClosureViolationDetected) {
  auto bad = std::make_shared<const ToralGroupSpec>(
      ToralGroupSpec::unchecked(ToralFamily::GammaABnu, kCat.pow(2), kCat, {Rational(1, 7), Rational(0)}));
  bool seen = false;
  for_each_element(bad, Box{1, 1, 0}, [&](const ToralElement& a) {
    for_each_element(bad, Box{1, 1, 0}, [&](const ToralElement& c) {
      try {
        compose(a, c, true);
      } catch (const Error& e) {
        seen = seen || e.code() == ErrorCode::ClosureViolation;
      }
    });
  });
  EXPECT_TRUE(seen);
}

TEST(Group, SpecMismatch) {
  auto a = make_element(cat_group(), 1, 0, {});
  auto b = make_element(ab_group(), 1, 0, {});
  EXPECT_THROW(compose(a, b, true), Error);
}

TEST(Group, ConjugatorCat) {
  auto g = cat_group();
  Conjugator c = build_conjugator(g);
  EXPECT_EQ(c.alpha, eigen_data(kCat).lambda);
  EXPECT_EQ(c.alpha, QuadExt(Rational(3, 2), Rational(1, 2), 5));
  EXPECT_EQ(conjugated_element(c, identity_element(g)), identity3<QuadExt>());
  EXPECT_EQ(c.T * c.T_inv, identity3<QuadExt>());
}

TEST(Group, ConjugatedTranslation) {
  auto g = cat_group();
  Conjugator c = build_conjugator(g);
  Mat3<QuadExt> m = conjugated_element(c, make_element(g, 0, 0, iv(3, -2)));
  Mat3<QuadExt> want = identity3<QuadExt>();
  want[0][2] = c.x[0] * QuadExt(3) + c.x[1] * QuadExt(-2);
  want[1][2] = c.y[0] * QuadExt(3) + c.y[1] * QuadExt(-2);
  EXPECT_EQ(m, want);
}

TEST(Group, ConjugatedElementTemplate) {
  auto h = ab_group();
  Conjugator c = build_conjugator(h);
  Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    ToralElement g = random_element(rng, h, 4, 10);
    Mat3<QuadExt> m = conjugated_element(c, g);
    EXPECT_EQ(m[1][0], QuadExt(0));
    EXPECT_EQ(m[2][0], QuadExt(0));
    EXPECT_EQ(m[2][1], QuadExt(0));
    EXPECT_EQ(m[0][1], QuadExt(0));
    QuadExt diag = QuadExt(1);
    for (std::int64_t k = 0; k < std::abs(g.k()); ++k) diag = g.k() > 0 ? diag * c.alpha : diag / c.alpha;
    for (std::int64_t l = 0; l < std::abs(g.l()); ++l) diag = g.l() > 0 ? diag * c.beta : diag / c.beta;
    EXPECT_EQ(m[0][0], diag);
    EXPECT_EQ(m[0][0] * m[1][1] * m[2][2], QuadExt(1));
  }
}

TEST(Group, EnumerationCountsAndDistinctness) {
  auto g = cat_group();
  auto only = enumerate(g, Box{0, 0, 0});
  ASSERT_EQ(only.size(), 1u);
  EXPECT_TRUE(only[0].is_identity());
  auto box = enumerate(g, Box{1, 0, 1});
  EXPECT_EQ(box.size(), 27u);
  std::set<std::string> seen;
  for (const auto& e : enumerate(g, Box{3, 0, 4})) EXPECT_TRUE(seen.insert(matrix_key(e)).second) << e.to_string();
  EXPECT_EQ(seen.size(), 7u * 81u);
}

TEST(Group, LabelCollisionsComeFromDependentAB) {
  // Commuting hyperbolic A, B are powers of one primitive matrix, so labels can
  // repeat matrices; here ⟨k:l:b⟩ = ⟨k−1 : l+2 : b − B^l(ν + Bν)⟩ with ν + Bν = (0, 1).
  std::map<std::string, std::vector<ToralElement>> by_matrix;
  for (const auto& e : enumerate(ab_group(), Box{2, 2, 2})) by_matrix[matrix_key(e)].push_back(e);
  std::size_t collisions = 0;
  for (const auto& [key, es] : by_matrix) {
    for (std::size_t i = 1; i < es.size(); ++i) {
      ++collisions;
      EXPECT_EQ(es[i].matrix(), es[0].matrix());
      EXPECT_EQ(2 * es[i].k() + es[i].l(), 2 * es[0].k() + es[0].l());  // same power of cat
    }
  }
  EXPECT_GT(collisions, 0u);
  EXPECT_LT(by_matrix.size(), 5u * 5u * 25u);
}

TEST(Group, EnumerationOrderIsLexicographic) {
  auto all = enumerate(cat_group(), Box{1, 0, 1});
  EXPECT_EQ(all.front().to_string(), make_element(cat_group(), -1, 0, iv(-1, -1)).to_string());
  EXPECT_EQ(all.back().to_string(), make_element(cat_group(), 1, 0, iv(1, 1)).to_string());
}
