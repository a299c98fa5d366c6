#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <random>

#include "kleinian/limit_set.hpp"

using namespace kleinian;

namespace {

using CPoint = ProjectivePoint<Complex>;
using QLine = ProjectiveLine<Rational>;

std::shared_ptr<const ToralGroupSpec> cat_group() {
  return std::make_shared<const ToralGroupSpec>(ToralGroupSpec::gamma_a(IntMatrix2(2, 1, 1, 1)));
}

CPoint affine_point(Complex z, Complex w) { return CPoint(z, w, Complex(1)); }

// z = c (through e₂) and w = c (through e₁).
QLine z_line(Rational c) { return QLine(Rational(1), Rational(0), -c); }
QLine w_line(Rational c) { return QLine(Rational(0), Rational(1), -c); }

const LimitSetApprox& small_run() {
  static const LimitSetApprox a = accumulate_orbit(cat_group(), Box{5, 0, 8}, omega_samples(0));
  return a;
}

}  // namespace

TEST(LambdaDistance, Examples) {
  OmegaModel bare{};
  EXPECT_DOUBLE_EQ(predicted_lambda_distance(affine_point({0, 1}, {0, 1}), bare), 1.0);
  EXPECT_DOUBLE_EQ(predicted_lambda_distance(affine_point(1, {0, 1}), bare), 0.0);
  EXPECT_DOUBLE_EQ(predicted_lambda_distance(CPoint(1, 0, 0), bare), 0.0);
  EXPECT_DOUBLE_EQ(predicted_lambda_distance(affine_point({0.5, -0.25}, {0.3, 0.9}), bare), 0.25);
}

TEST(LambdaDistance, LargeChartSeesLineAtInfinity) {
  OmegaModel bare{};
  // [1 : i : 1e-3] is near the line at infinity even though Im(z), Im(w) are large.
  EXPECT_LE(predicted_lambda_distance(CPoint(1, Complex(0, 1), 1e-3), bare), 1e-3);
  // (10i, 10i) in the chart [1 : 1 : −0.1i]: every piece of Λ is 0.1 away.
  EXPECT_NEAR(predicted_lambda_distance(affine_point({0, 10}, {0, 10}), bare), 0.1, 1e-12);
  // [1 : i : i] is the affine point (−i, 1), on Λ.
  EXPECT_DOUBLE_EQ(predicted_lambda_distance(CPoint(1, Complex(0, 1), Complex(0, 1)), bare), 0.0);
}

TEST(OmegaModel, Components) {
  OmegaModel bare{};
  EXPECT_EQ(bare.component(affine_point({0, 1}, {0, -2})), std::make_pair(1, -1));
  EXPECT_FALSE(bare.component(affine_point(1, {0, 1})).has_value());
  EXPECT_FALSE(bare.component(CPoint(0, 1, 0)).has_value());
}

TEST(OmegaSamples, FourComponentsOfTwentyFive) {
  auto s = omega_samples(0);
  ASSERT_EQ(s.size(), 100u);
  OmegaModel bare{};
  std::map<std::pair<int, int>, int> per;
  for (const auto& p : s) ++per[*bare.component(p)];
  EXPECT_EQ(per.size(), 4u);
  for (const auto& [c, n] : per) EXPECT_EQ(n, 25);
  EXPECT_EQ(omega_samples(0)[7].coords(), s[7].coords());
}

TEST(Accumulate, IdentityOnlyYieldsNothing) {
  detail::ChartElement id{1.0, 0, 0, 0, 0, 0, 0};
  LimitSetApprox a = accumulate_orbit({id}, omega_samples(0), Box{0, 0, 0});
  EXPECT_EQ(a.count(Provenance::L1), 0u);
  EXPECT_EQ(a.count(Provenance::L2), 0u);
  EXPECT_TRUE(a.points.empty());
}

TEST(Accumulate, EmptyBoxThrows) {
  try {
    accumulate_orbit(cat_group(), Box{0, 0, 0}, omega_samples(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyEnumeration);
  }
}

TEST(Accumulate, L0HoldsPencilCentres) {
  const auto& a = small_run();
  bool e1 = false, e2 = false;
  for (const auto& p : a.points) {
    if (p.provenance != Provenance::L0) continue;
    e1 = e1 || p.point.equals(CPoint(1, 0, 0));
    e2 = e2 || p.point.equals(CPoint(0, 1, 0));
  }
  EXPECT_TRUE(e1);
  EXPECT_TRUE(e2);
}

TEST(Accumulate, PointsLieOnPredictedLambda) {
  const auto& a = small_run();
  EXPECT_GT(a.count(Provenance::L1), 0u);
  EXPECT_GT(a.count(Provenance::L2), 0u);
  SoundnessReport r = soundness(a, OmegaModel{});
  EXPECT_GE(r.fraction(), 0.99);
  // L0 fixed points are real, hence exactly in Λ.
  for (const auto& p : a.points) {
    if (p.provenance != Provenance::L0) continue;
    EXPECT_LT(predicted_lambda_distance(p.point, OmegaModel{}), 1e-9);
  }
}

TEST(Accumulate, NothingNearOmegaProbes) {
  const auto& a = small_run();
  for (double h : {0.1, 0.5, 1.0})
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) {
        CPoint probe = affine_point({0.3, s1 * h}, {-0.2, s2 * h});
        EXPECT_EQ(points_near(a, probe, 0.05), 0u) << h << " " << s1 << " " << s2;
      }
}

TEST(Accumulate, WitnessReproducesPoint) {
  const auto& a = small_run();
  auto samples = omega_samples(0);
  Conjugator conj = build_conjugator(cat_group());
  auto elems = detail::chart_elements(conj, Box{5, 0, 8});
  std::size_t checked = 0;
  for (const auto& p : a.points) {
    if (p.provenance != Provenance::L1 || checked >= 50) continue;
    auto it = std::find_if(elems.begin(), elems.end(), [&](const auto& e) { return e.to_string() == p.witness; });
    ASSERT_NE(it, elems.end());
    EXPECT_TRUE(p.point.equals(CPoint((*it)(samples[static_cast<std::size_t>(p.source)].coords())),
                               Tolerances{.point = 1e-9}));
    ++checked;
  }
  EXPECT_EQ(checked, 50u);
}

TEST(Accumulate, DeterministicAcrossThreadCounts) {
  auto run = [](const char* threads) {
    setenv("KLEINIAN_THREADS", threads, 1);
    auto a = accumulate_orbit(cat_group(), Box{3, 0, 5}, omega_samples(3));
    unsetenv("KLEINIAN_THREADS");
    return a;
  };
  LimitSetApprox a = run("1"), b = run("3");
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].point.coords(), b.points[i].point.coords());
    EXPECT_EQ(a.points[i].witness, b.points[i].witness);
    EXPECT_EQ(a.points[i].provenance, b.points[i].provenance);
  }
}

TEST(Equicontinuity, InteriorProbeStaysBounded) {
  auto reps = equicontinuity_probe(cat_group(), Box{8, 0, 20},
                                   {Probe{affine_point({0, 1}, {0, 1}), 0.1},
                                    Probe{affine_point({2, 0.5}, {-1, 2}), 0.1}});
  for (const auto& r : reps) {
    EXPECT_EQ(r.verdict, EquicontinuityVerdict::EquicontinuousLike) << r.max_ratio;
    EXPECT_TRUE(std::is_sorted(r.profile.begin(), r.profile.end()));
  }
}

TEST(Equicontinuity, ProbeOnLambdaBlowsUp) {
  auto reps = equicontinuity_probe(cat_group(), Box{8, 0, 20},
                                   {Probe{affine_point(1, {0, 1}), 0.01}, Probe{affine_point({0, 1}, 0.5), 0.01}});
  for (const auto& r : reps) {
    EXPECT_EQ(r.verdict, EquicontinuityVerdict::BlowsUp) << r.max_ratio;
    EXPECT_GT(r.max_ratio, default_tolerances().equicontinuity);
    EXPECT_FALSE(r.worst.empty());
  }
}

TEST(Equicontinuity, IdentityOnlyIsVacuous) {
  detail::ChartElement id{1.0, 0, 0, 0, 0, 0, 0};
  auto reps = equicontinuity_probe(std::vector<detail::ChartElement>{id}, {Probe{affine_point({0, 1}, {0, 1}), 0.1}});
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_EQ(reps[0].verdict, EquicontinuityVerdict::Vacuous);
}

TEST(GeneralPosition, Examples) {
  LineArrangement<Rational> triangle(
      {QLine::coordinate(0), QLine::coordinate(1), QLine::coordinate(2)});
  EXPECT_TRUE(general_position(triangle));
  LineArrangement<Rational> pencil({w_line(0), w_line(1), w_line(Rational(1, 2))});
  EXPECT_FALSE(general_position(pencil));
  LineArrangement<Rational> square({z_line(0), z_line(1), w_line(0), w_line(1)});
  EXPECT_TRUE(general_position(square));
  LineArrangement<Rational> repeated({z_line(0), z_line(0)});
  EXPECT_FALSE(general_position(repeated));
}

TEST(GeneralPosition, TooFewLines) {
  LineArrangement<Rational> one({z_line(0)});
  try {
    general_position(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewLines);
  }
}

TEST(GeneralPosition, PermutationInvariant) {
  std::vector<QLine> ls{z_line(0), z_line(1), w_line(0), w_line(1), QLine(Rational(1), Rational(1), Rational(-3)),
                        QLine::coordinate(2)};
  bool base = general_position(LineArrangement<Rational>(ls));
  std::mt19937 g(11);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(ls.begin(), ls.end(), g);
    EXPECT_EQ(general_position(LineArrangement<Rational>(ls)), base);
  }
}

TEST(GeneralPosition, FloatLines) {
  using FLine = ProjectiveLine<Complex>;
  LineArrangement<Complex> near_concurrent({FLine(1, 0, 0), FLine(0, 1, 0), FLine(1, 1, 1e-14)});
  EXPECT_FALSE(general_position(near_concurrent));
  LineArrangement<Complex> ok({FLine(1, 0, 0), FLine(0, 1, 0), FLine(1, 1, 1)});
  EXPECT_TRUE(general_position(ok));
}

TEST(Lig, PencilFamily) {
  LineArrangement<Rational> fam({z_line(0), z_line(1), z_line(2), w_line(0), w_line(1), w_line(2),
                                 QLine::coordinate(2)});
  LigResult r = lig_over_family(fam, OmegaModel{});
  EXPECT_EQ(r.max_size, 4u);
  EXPECT_EQ(r.witness, (std::vector<std::size_t>{0, 1, 3, 4}));
  ASSERT_EQ(r.vertices.size(), 2u);
  EXPECT_EQ(r.vertices[0], ProjectivePoint<Rational>::basis(0));
  EXPECT_EQ(r.vertices[1], ProjectivePoint<Rational>::basis(1));
  EXPECT_TRUE(std::all_of(fam.in_lambda.begin(), fam.in_lambda.end(), [](bool b) { return b; }));
}

TEST(Lig, TwoLinesHaveNoPencilVertex) {
  LineArrangement<Rational> fam({z_line(0), w_line(0)});
  LigResult r = lig_over_family(fam, OmegaModel{});
  EXPECT_EQ(r.max_size, 2u);
  EXPECT_TRUE(r.vertices.empty());
}

TEST(Lig, RejectsLineOutsideLambda) {
  LineArrangement<Rational> fam({z_line(0), QLine(Rational(1), Rational(1), Rational(-1))});
  try {
    lig_over_family(fam, OmegaModel{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CandidateOutsideLambda);
  }
}

TEST(Lig, CapOnCandidates) {
  std::vector<QLine> ls;
  for (int i = 0; i < 13; ++i) ls.push_back(z_line(i));
  LineArrangement<Rational> fam(ls);
  try {
    lig_over_family(fam, OmegaModel{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
  }
}

TEST(Lig, PencilPigeonhole) {
  // Lines of Λ come from two pencils and the line at infinity; a general-position
  // subset takes at most two from each pencil, so never more than four lines.
  std::mt19937 g(7);
  std::uniform_int_distribution<int> n(0, 5), c(-20, 20);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<QLine> ls;
    std::set<int> zs, ws;
    int nz = n(g), nw = n(g);
    while (static_cast<int>(zs.size()) < nz) zs.insert(c(g));
    while (static_cast<int>(ws.size()) < nw) ws.insert(c(g));
    for (int v : zs) ls.push_back(z_line(Rational(v, 3)));
    for (int v : ws) ls.push_back(w_line(Rational(v, 3)));
    if (trial % 2 == 0) ls.push_back(QLine::coordinate(2));
    if (ls.size() < 1) continue;
    LineArrangement<Rational> fam(ls);
    LigResult r = lig_over_family(fam, OmegaModel{});
    EXPECT_LE(r.max_size, 4u);
    std::size_t through1 = 0, through2 = 0;
    for (auto i : r.witness) {
      through1 += fam.lines[i].contains(ProjectivePoint<Rational>::basis(0));
      through2 += fam.lines[i].contains(ProjectivePoint<Rational>::basis(1));
    }
    EXPECT_LE(through1, 2u);
    EXPECT_LE(through2, 2u);
  }
}

TEST(Render, Dimensions) {
  SliceSpec s;
  s.width = 64;
  s.height = 32;
  Image img = render_slice(small_run(), s);
  EXPECT_EQ(img.rgb.size(), 64u * 32u * 3u);
  std::string ppm = img.to_ppm();
  EXPECT_EQ(ppm.rfind("P6\n64 32\n255\n", 0), 0u);
  EXPECT_EQ(ppm.size(), std::string("P6\n64 32\n255\n").size() + 64u * 32u * 3u);
}

TEST(Render, EmptyApproxIsBlank) {
  Image img = render_slice(LimitSetApprox{}, SliceSpec{});
  EXPECT_TRUE(std::all_of(img.rgb.begin(), img.rgb.end(), [](std::uint8_t v) { return v == 0; }));
}

TEST(Render, PixelGeometry) {
  // Re z ∈ [−4, 4) left to right, Im z ∈ (−4, 4] top to bottom, 8×8 pixels of size 1.
  LimitSetApprox a;
  auto add = [&](Complex z, Complex w) { a.points.push_back({affine_point(z, w), Provenance::L1, "", 0, 3}); };
  add({0.5, 0.5}, {0, 0.5});     // pixel (4, 3)
  add({0.5, 0.5}, {7, 0.52});    // same pixel
  add({-3.5, -3.5}, {1, 0.48});  // pixel (0, 7)
  add({0.5, 0.5}, {0, 0.7});     // off the slice
  add({9, 0}, {0, 0.5});         // off the raster
  a.points.push_back({CPoint(1, 0, 0), Provenance::L0, "", -1, 0});  // at infinity
  SliceSpec s;
  s.width = s.height = 8;
  Image img = render_slice(a, s);
  EXPECT_EQ(img.plotted, 3u);
  auto at = [&](std::size_t x, std::size_t y) { return img.rgb[3 * (y * 8 + x)]; };
  EXPECT_EQ(at(4, 3), 255);  // peak count is full brightness
  EXPECT_GT(at(0, 7), 0);
  EXPECT_LT(at(0, 7), at(4, 3));
  std::size_t lit = 0;
  for (std::size_t i = 0; i < 64; ++i) lit += img.rgb[3 * i] != 0;
  EXPECT_EQ(lit, 2u);
}

TEST(Render, Deterministic) {
  SliceSpec s;
  s.im_w = 0;
  s.band = 0.01;
  EXPECT_EQ(render_slice(small_run(), s).rgb, render_slice(small_run(), s).rgb);
}
