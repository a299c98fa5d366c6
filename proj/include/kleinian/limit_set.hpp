#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kleinian/config.hpp"
#include "kleinian/error.hpp"
#include "kleinian/group.hpp"
#include "kleinian/projective.hpp"

namespace kleinian {

// ---------------------------------------------------------------------------
// The predicted discontinuity region

/// Ω = ⋃ H^{ε₁}×H^{ε₂} in the affine chart [z : w : 1] of conjugated coordinates.
/// Λ is its complement: {Im z = 0} ∪ {Im w = 0} ∪ the line at infinity.
struct OmegaModel {
  std::shared_ptr<const Conjugator> conjugator;  // may be null for a bare model
  Tolerances tol{};

  static OmegaModel for_spec(std::shared_ptr<const ToralGroupSpec> spec, const Tolerances& tol = default_tolerances()) {
    return OmegaModel{std::make_shared<const Conjugator>(build_conjugator(std::move(spec))), tol};
  }

  /// Original coordinates to conjugated ones.
  Vec3<Complex> to_conjugated(const Vec3<Complex>& x) const {
    if (!conjugator) return x;
    return to_complex(conjugator->T) * x;
  }

  /// (ε₁, ε₂) of the component holding x, or nothing when x ∈ Λ.
  std::optional<std::pair<int, int>> component(const ProjectivePoint<Complex>& x) const {
    const auto& v = x.coords();
    if (std::abs(v[2]) < tol.infinity) return std::nullopt;
    Complex z = v[0] / v[2], w = v[1] / v[2];
    if (z.imag() == 0 || w.imag() == 0) return std::nullopt;
    return std::pair<int, int>{z.imag() > 0 ? 1 : -1, w.imag() > 0 ? 1 : -1};
  }
};

/// Distance from x to predicted Λ in the affine chart where x has its largest
/// coordinate. In the chart [z : w : 1] this is min(|Im z|, |Im w|); in the charts
/// [1 : u : t] and [u : 1 : t] the three pieces of Λ read Im t = 0, Im(u t̄) = 0
/// and t = 0.
inline double predicted_lambda_distance(const ProjectivePoint<Complex>& x, const OmegaModel& model) {
  Vec3<Complex> v = x.coords();
  if (std::abs(v[2]) < model.tol.infinity) return 0.0;
  std::size_t m = 2;
  for (std::size_t i : {0u, 1u})
    if (std::abs(v[i]) > std::abs(v[m])) m = i;
  const Complex pivot = v[m];
  for (auto& c : v) c /= pivot;
  if (m == 2) return std::min(std::abs(v[0].imag()), std::abs(v[1].imag()));
  const Complex u = v[m == 0 ? 1 : 0], t = v[2];
  const double f = std::abs((u * std::conj(t)).imag());
  double d = std::min(std::abs(t.imag()), std::abs(t));
  d = std::min(d, f / std::abs(t));
  if (std::abs(u) > 0) d = std::min(d, f / std::abs(u));
  return d;
}

// ---------------------------------------------------------------------------
// Float images of the conjugated group

namespace detail {

/// T g T⁻¹ acts on the chart as (z, w) ↦ (λz + c₁, λ⁻¹w + c₂).
struct ChartElement {
  double lambda;
  Complex c1, c2;
  std::int64_t k, l, b1, b2;

  std::pair<Complex, Complex> operator()(Complex z, Complex w) const { return {lambda * z + c1, w / lambda + c2}; }
  Vec3<Complex> operator()(const Vec3<Complex>& v) const {
    return {lambda * v[0] + c1 * v[2], v[1] / lambda + c2 * v[2], v[2]};
  }
  std::int64_t shell() const { return std::max({std::abs(k), std::abs(l), std::abs(b1), std::abs(b2)}); }
  bool is_identity() const { return k == 0 && l == 0 && b1 == 0 && b2 == 0; }
  std::string to_string() const {
    return "<" + std::to_string(k) + ":" + std::to_string(l) + ":(" + std::to_string(b1) + ", " + std::to_string(b2) +
           ")>";
  }
};

inline std::vector<ChartElement> chart_elements(const Conjugator& conj, const Box& box) {
  const auto& spec = *conj.spec;
  const double a = conj.alpha.to_double(), b = conj.beta.to_double();
  const double x0 = conj.x[0].to_double(), x1 = conj.x[1].to_double();
  const double y0 = conj.y[0].to_double(), y1 = conj.y[1].to_double();
  std::unordered_map<std::int64_t, RationalVec2> phis;
  std::vector<ChartElement> out;
  for_each_element(conj.spec, box, [&](const ToralElement& g) {
    auto it = phis.find(g.l());
    if (it == phis.end()) it = phis.emplace(g.l(), phi(spec.B, spec.nu, g.l())).first;
    const double t0 = to_double(g.b().x + it->second.x), t1 = to_double(g.b().y + it->second.y);
    ChartElement e;
    e.lambda = std::pow(a, static_cast<double>(g.k())) * std::pow(b, static_cast<double>(g.l()));
    e.c1 = x0 * t0 + x1 * t1;
    e.c2 = y0 * t0 + y1 * t1;
    e.k = g.k();
    e.l = g.l();
    e.b1 = static_cast<std::int64_t>(numerator(g.b().x));
    e.b2 = static_cast<std::int64_t>(numerator(g.b().y));
    out.push_back(e);
  });
  return out;
}

inline std::size_t worker_count(std::size_t work) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("KLEINIAN_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
  }
  return std::max<std::size_t>(1, std::min(n, work));
}

using CellKey = std::array<std::int64_t, 7>;  // six grid coordinates and a source tag

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto x : k) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 33));
  }
};

inline CellKey cell_of(const Vec3<Complex>& unit, double eps, std::int64_t tag) {
  CellKey k;
  for (std::size_t i = 0; i < 3; ++i) {
    k[2 * i] = static_cast<std::int64_t>(std::floor(unit[i].real() / eps));
    k[2 * i + 1] = static_cast<std::int64_t>(std::floor(unit[i].imag() / eps));
  }
  k[6] = tag;
  return k;
}

struct Cell {
  std::uint32_t hits = 0;        // distinct elements
  std::uint32_t last = UINT32_MAX;
  double norm = -1;              // representative: the image farthest out in the chart
  std::uint32_t element = 0;
  std::uint32_t source = 0;      // index into the swept sources
};

inline bool better(double norm, std::uint32_t element, std::uint32_t source, const Cell& c) {
  if (norm != c.norm) return norm > c.norm;
  if (element != c.element) return element < c.element;
  return source < c.source;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Orbit accumulation

enum class Provenance { L0, L1, L2 };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::L0: return "L0";
    case Provenance::L1: return "L1";
    case Provenance::L2: return "L2";
  }
  return "?";
}

struct AccumulationPoint {
  ProjectivePoint<Complex> point;
  Provenance provenance;
  std::string witness;  // group element ⟨k:l:(b₁, b₂)⟩
  int source = -1;      // sample index (L1) or disk index (L2); −1 for L0
  std::size_t hits = 0;
};

struct AccumulationParams {
  Box box;
  std::size_t samples = 0;
  std::size_t disks = 0;
  double disk_radius = 0.05;
  double cluster = 1e-3;
  std::size_t cluster_hits = 3;
};

struct LimitSetApprox {
  std::vector<AccumulationPoint> points;
  AccumulationParams params;
  std::size_t elements = 0;
  std::size_t passes = 0;
  // L0 only sees fixed points of enumerated elements, not closures of points
  // with infinite isotropy.
  std::string l0_note = "L0 from fixed points of enumerated infinite-order elements; closures may be undercounted";

  std::size_t count(Provenance p) const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [&](const auto& a) { return a.provenance == p; }));
  }
};

/// Samples for the four components of Ω: per component a 5×5 grid of imaginary
/// magnitudes with seeded real parts in [−1, 1].
inline std::vector<ProjectivePoint<Complex>> omega_samples(std::uint64_t seed = 0) {
  static constexpr double kHeights[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  std::uint64_t state = seed;
  auto next = [&]() {  // splitmix64, for the same stream on every platform
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  std::vector<ProjectivePoint<Complex>> out;
  for (int e1 : {1, -1})
    for (int e2 : {1, -1})
      for (double h : kHeights)
        for (double g : kHeights) {
          double rz = next(), rw = next();
          out.emplace_back(Complex(rz, e1 * h), Complex(rw, e2 * g), Complex(1.0));
        }
  return out;
}

struct AccumulateOptions {
  double disk_radius = 0.05;
  std::size_t disks_per_component = 4;  // first samples of each component become disk centres
  std::size_t passes = 8;               // cells are bucketed by hash to bound memory
};

namespace detail {

struct Source {
  Vec3<Complex> v;
  std::uint32_t tag;  // sample or disk index
};

// One sweep over elements × sources, keeping only cells in the given bucket.
// Cells are keyed by source when per_source is set (orbits of single points).
inline std::unordered_map<CellKey, Cell, CellKeyHash> sweep(const std::vector<ChartElement>& elems,
                                                            const std::vector<Source>& sources, bool per_source,
                                                            double eps, std::size_t pass, std::size_t passes) {
  const std::size_t workers = worker_count(elems.size());
  std::vector<std::unordered_map<CellKey, Cell, CellKeyHash>> parts(workers);
  auto run = [&](std::size_t w) {
    auto& cells = parts[w];
    const std::size_t lo = elems.size() * w / workers, hi = elems.size() * (w + 1) / workers;
    CellKeyHash hasher;
    for (std::size_t e = lo; e < hi; ++e) {
      for (std::uint32_t si = 0; si < sources.size(); ++si) {
        const Source& s = sources[si];
        Vec3<Complex> img = elems[e](s.v);
        double n = std::sqrt(std::norm(img[0]) + std::norm(img[1]) + std::norm(img[2]));
        CellKey key = cell_of(canonicalize(img), eps, per_source ? static_cast<std::int64_t>(s.tag) : -1);
        if (hasher(key) % passes != pass) continue;
        Cell& c = cells[key];
        const auto id = static_cast<std::uint32_t>(e);
        if (c.last != id) {
          c.last = id;
          ++c.hits;
        }
        double chart_norm = n / std::abs(img[2]);
        if (better(chart_norm, id, si, c)) {
          c.norm = chart_norm;
          c.element = id;
          c.source = si;
        }
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  // Element ranges are disjoint, so distinct-element counts add.
  auto& merged = parts[0];
  for (std::size_t w = 1; w < workers; ++w)
    for (const auto& [key, c] : parts[w]) {
      auto [it, fresh] = merged.try_emplace(key, c);
      if (fresh) continue;
      it->second.hits += c.hits;
      if (better(c.norm, c.element, c.source, it->second)) {
        it->second.norm = c.norm;
        it->second.element = c.element;
        it->second.source = c.source;
      }
    }
  return std::move(merged);
}

}  // namespace detail

/// Orbit accumulation over an explicit element list (chart form).
inline LimitSetApprox accumulate_orbit(const std::vector<detail::ChartElement>& elems,
                                       const std::vector<ProjectivePoint<Complex>>& samples, const Box& box,
                                       const Tolerances& tol = default_tolerances(),
                                       const AccumulateOptions& opt = {}) {
  LimitSetApprox out;
  out.params.box = box;
  out.params.samples = samples.size();
  out.params.disk_radius = opt.disk_radius;
  out.params.cluster = tol.cluster;
  out.params.cluster_hits = tol.cluster_hits;
  out.elements = elems.size();
  out.passes = std::max<std::size_t>(1, opt.passes);
  const double eps = tol.cluster;

  std::vector<detail::Source> points, disks;
  for (std::size_t i = 0; i < samples.size(); ++i)
    points.push_back({samples[i].coords(), static_cast<std::uint32_t>(i)});
  const std::size_t per_component = std::max<std::size_t>(1, samples.size() / 4);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i % per_component >= opt.disks_per_component) continue;
    const auto& v = samples[i].coords();
    const Complex z = v[0] / v[2], w = v[1] / v[2];
    const auto tag = static_cast<std::uint32_t>(out.params.disks++);
    const double r = opt.disk_radius;
    for (auto [dz, dw] : {std::pair<Complex, Complex>{0, 0}, {r, 0}, {Complex(0, r), 0}, {-r, 0}, {Complex(0, -r), 0},
                          {0, r}, {0, Complex(0, r)}, {0, -r}, {0, Complex(0, -r)}})
      disks.push_back({Vec3<Complex>{z + dz, w + dw, 1.0}, tag});
  }

  // Cells already reported, so L2 does not repeat L1.
  std::unordered_map<detail::CellKey, std::size_t, detail::CellKeyHash> seen;
  auto cell_only = [&](const Vec3<Complex>& v) { return detail::cell_of(detail::canonicalize(v), eps, -1); };
  auto emit = [&](const Vec3<Complex>& v, Provenance p, std::string witness, int source, std::size_t hits) {
    auto [it, fresh] = seen.try_emplace(cell_only(v), out.points.size());
    if (!fresh) return;
    out.points.push_back({ProjectivePoint<Complex>(v), p, std::move(witness), source, hits});
  };

  // L0: e₁, e₂ and the fixed points of enumerated non-translations (all real, so in Λ).
  std::vector<std::pair<detail::CellKey, AccumulationPoint>> l0;
  for (const auto& e : elems) {
    if (e.is_identity()) continue;
    l0.push_back({cell_only({1, 0, 0}), {ProjectivePoint<Complex>(1, 0, 0), Provenance::L0, e.to_string(), -1, 0}});
    l0.push_back({cell_only({0, 1, 0}), {ProjectivePoint<Complex>(0, 1, 0), Provenance::L0, e.to_string(), -1, 0}});
    if (std::abs(e.lambda - 1) > 1e-12) {
      Vec3<Complex> f{e.c1 / (1 - e.lambda), e.c2 / (1 - 1 / e.lambda), 1.0};
      l0.push_back({cell_only(f), {ProjectivePoint<Complex>(f), Provenance::L0, e.to_string(), -1, 0}});
    }
  }
  for (auto& [key, p] : l0) {
    if (seen.try_emplace(key, out.points.size()).second) out.points.push_back(std::move(p));
  }

  auto harvest = [&](const std::vector<detail::Source>& src, bool per_source, Provenance prov) {
    std::vector<std::pair<detail::CellKey, detail::Cell>> found;
    for (std::size_t pass = 0; pass < out.passes; ++pass) {
      auto cells = detail::sweep(elems, src, per_source, eps, pass, out.passes);
      for (const auto& [key, c] : cells)
        if (c.hits >= tol.cluster_hits) found.emplace_back(key, c);
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [key, c] : found) {
      const auto& e = elems[c.element];
      const auto& s = src[c.source];
      emit(e(s.v), prov, e.to_string(), static_cast<int>(s.tag), c.hits);
    }
  };
  harvest(points, true, Provenance::L1);
  harvest(disks, false, Provenance::L2);
  return out;
}

/// Orbit accumulation for a toral group over the enumeration box. Samples are
/// in conjugated coordinates. Throws EmptyEnumeration when the box holds no
/// element besides the identity.
inline LimitSetApprox accumulate_orbit(std::shared_ptr<const ToralGroupSpec> spec, const Box& box,
                                       const std::vector<ProjectivePoint<Complex>>& samples,
                                       const Tolerances& tol = default_tolerances(),
                                       const AccumulateOptions& opt = {}) {
  Conjugator conj = build_conjugator(std::move(spec));
  auto elems = detail::chart_elements(conj, box);
  if (elems.size() <= 1) throw Error(ErrorCode::EmptyEnumeration, "box holds only the identity");
  return accumulate_orbit(elems, samples, box, tol, opt);
}

/// Euclidean distance in the chart [z : w : 1]; points at infinity are infinitely far.
inline double chart_distance(const ProjectivePoint<Complex>& a, const ProjectivePoint<Complex>& b,
                             const Tolerances& tol = default_tolerances()) {
  const auto &u = a.coords(), &v = b.coords();
  if (std::abs(u[2]) < tol.infinity || std::abs(v[2]) < tol.infinity) return INFINITY;
  return std::sqrt(std::norm(u[0] / u[2] - v[0] / v[2]) + std::norm(u[1] / u[2] - v[1] / v[2]));
}

struct SoundnessReport {
  std::size_t total = 0;   // L1 and L2 points
  std::size_t within = 0;  // predicted Λ distance below the threshold
  double worst = 0;
  double fraction() const { return total == 0 ? 1.0 : static_cast<double>(within) / static_cast<double>(total); }
};

inline SoundnessReport soundness(const LimitSetApprox& approx, const OmegaModel& model, double threshold = 1e-3) {
  SoundnessReport r;
  for (const auto& p : approx.points) {
    if (p.provenance == Provenance::L0) continue;
    double d = predicted_lambda_distance(p.point, model);
    ++r.total;
    if (d < threshold) ++r.within;
    r.worst = std::max(r.worst, d);
  }
  return r;
}

/// Accumulation points (any provenance) within `radius` of the probe in the chart.
inline std::size_t points_near(const LimitSetApprox& approx, const ProjectivePoint<Complex>& probe, double radius) {
  return static_cast<std::size_t>(std::count_if(approx.points.begin(), approx.points.end(), [&](const auto& p) {
    return chart_distance(p.point, probe) < radius;
  }));
}

// ---------------------------------------------------------------------------
// Equicontinuity sampling

enum class EquicontinuityVerdict { EquicontinuousLike, BlowsUp, Inconclusive, Vacuous };

inline std::string_view to_string(EquicontinuityVerdict v) {
  switch (v) {
    case EquicontinuityVerdict::EquicontinuousLike: return "equicontinuous-like";
    case EquicontinuityVerdict::BlowsUp: return "blows up";
    case EquicontinuityVerdict::Inconclusive: return "inconclusive";
    case EquicontinuityVerdict::Vacuous: return "vacuous";
  }
  return "?";
}

struct Probe {
  ProjectivePoint<Complex> center;
  double radius;
};

struct ProbeReport {
  Probe probe;
  std::vector<double> profile;  // running max of the ratio up to each shell max(|k|,|l|,|b_i|)
  double max_ratio = 1;
  std::string worst;            // element attaining the max
  EquicontinuityVerdict verdict = EquicontinuityVerdict::Vacuous;
};

namespace detail {

inline double chordal(const Vec3<Complex>& a, const Vec3<Complex>& b) {
  Complex ip = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
  return std::sqrt(std::max(0.0, 1.0 - std::norm(ip)));
}

inline Vec3<Complex> unit(Vec3<Complex> v) {
  double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
  for (auto& x : v) x /= n;
  return v;
}

inline double diameter(const std::vector<Vec3<Complex>>& pts, std::size_t stride) {
  double d = 0;
  for (std::size_t i = 0; i < pts.size(); i += stride)
    for (std::size_t j = i + stride; j < pts.size(); j += stride) d = std::max(d, chordal(pts[i], pts[j]));
  return d;
}

}  // namespace detail

/// For each probe disk (a circle of 12 points in z and 12 in w around the
/// centre), the largest ratio of chordal image diameter to source diameter over
/// the box, profiled by shell. Verdict: equicontinuous-like when the ratio stays
/// ≤ C_eq; blows up when it exceeds C_eq and still grows by the blow-up factor
/// from half the box to the full box; inconclusive otherwise.
inline std::vector<ProbeReport> equicontinuity_probe(const std::vector<detail::ChartElement>& elems,
                                                     const std::vector<Probe>& probes,
                                                     const Tolerances& tol = default_tolerances()) {
  std::vector<ProbeReport> out;
  std::int64_t max_shell = 0;
  bool nontrivial = false;
  for (const auto& e : elems) {
    max_shell = std::max(max_shell, e.shell());
    nontrivial = nontrivial || !e.is_identity();
  }
  for (const auto& pr : probes) {
    ProbeReport rep{pr, {}, 1.0, "", EquicontinuityVerdict::Vacuous};
    if (!nontrivial) {
      out.push_back(rep);
      continue;
    }
    const auto& c = pr.center.coords();
    const Complex z = c[0] / c[2], w = c[1] / c[2];
    std::vector<Vec3<Complex>> src;
    for (int axis = 0; axis < 2; ++axis)
      for (int j = 0; j < 12; ++j) {
        Complex d = std::polar(pr.radius, 2 * M_PI * j / 12);
        src.push_back(detail::unit({axis == 0 ? z + d : z, axis == 1 ? w + d : w, 1.0}));
      }
    const double base = detail::diameter(src, 1);
    std::vector<double> by_shell(static_cast<std::size_t>(max_shell) + 1, 0.0);
    std::vector<Vec3<Complex>> img(src.size());
    for (const auto& e : elems) {
      for (std::size_t i = 0; i < src.size(); ++i) img[i] = detail::unit(e(src[i]));
      double r = detail::diameter(img, 3) / base;
      auto& slot = by_shell[static_cast<std::size_t>(e.shell())];
      slot = std::max(slot, r);
      if (r > rep.max_ratio) {
        rep.max_ratio = r;
        rep.worst = e.to_string();
      }
    }
    double run = 0;
    for (double r : by_shell) rep.profile.push_back(run = std::max(run, r));
    const double full = rep.profile.back(), half = rep.profile[rep.profile.size() / 2];
    if (full <= tol.equicontinuity)
      rep.verdict = EquicontinuityVerdict::EquicontinuousLike;
    else if (half > 0 && full / half >= tol.blowup_growth)
      rep.verdict = EquicontinuityVerdict::BlowsUp;
    else
      rep.verdict = EquicontinuityVerdict::Inconclusive;
    out.push_back(std::move(rep));
  }
  return out;
}

inline std::vector<ProbeReport> equicontinuity_probe(std::shared_ptr<const ToralGroupSpec> spec, const Box& box,
                                                     const std::vector<Probe>& probes,
                                                     const Tolerances& tol = default_tolerances()) {
  Conjugator conj = build_conjugator(std::move(spec));
  return equicontinuity_probe(detail::chart_elements(conj, box), probes, tol);
}

// ---------------------------------------------------------------------------
// Lines in general position

template <class S>
struct LineArrangement {
  std::vector<ProjectiveLine<S>> lines;
  std::vector<bool> in_lambda;  // set once a line is certified inside predicted Λ

  LineArrangement() = default;
  explicit LineArrangement(std::vector<ProjectiveLine<S>> ls) : lines(std::move(ls)), in_lambda(lines.size(), false) {}
  std::size_t size() const { return lines.size(); }
};

namespace detail {

template <class S>
bool concurrent(const ProjectiveLine<S>& a, const ProjectiveLine<S>& b, const ProjectiveLine<S>& c,
                const Tolerances& tol) {
  S d = pair(cross(a.coeffs(), b.coeffs()), c.coeffs());
  if constexpr (ScalarTraits<S>::exact)
    return ScalarTraits<S>::is_zero(d);
  else
    return std::abs(d) < tol.incidence;
}

template <class S>
bool general_position_of(const std::vector<const ProjectiveLine<S>*>& ls, const Tolerances& tol) {
  for (std::size_t i = 0; i < ls.size(); ++i)
    for (std::size_t j = i + 1; j < ls.size(); ++j) {
      if (ls[i]->equals(*ls[j], tol)) return false;
      for (std::size_t k = j + 1; k < ls.size(); ++k)
        if (concurrent(*ls[i], *ls[j], *ls[k], tol)) return false;
    }
  return true;
}

}  // namespace detail

/// Pairwise distinct and no three concurrent.
template <class S>
bool general_position(const LineArrangement<S>& arr, const Tolerances& tol = default_tolerances()) {
  if (arr.size() < 2) throw Error(ErrorCode::TooFewLines, std::to_string(arr.size()) + " line(s)");
  std::vector<const ProjectiveLine<S>*> ls;
  for (const auto& l : arr.lines) ls.push_back(&l);
  return detail::general_position_of(ls, tol);
}

struct LigResult {
  std::size_t max_size = 0;
  std::vector<std::size_t> witness;  // indices into the candidate family
  std::vector<ProjectivePoint<Rational>> vertices;
};

inline constexpr std::size_t kMaxLigCandidates = 12;

/// Certifies a real line inside predicted Λ by sampling complex points on it.
inline bool line_in_lambda(const ProjectiveLine<Rational>& l, const OmegaModel& omega) {
  auto frame = line_basis(l);
  const Vec3<Complex> p = to_complex(frame[0].coords()), q = to_complex(frame[1].coords());
  for (Complex s : {Complex(0), Complex(0, 1), Complex(1, 1), Complex(-2, 0.5), Complex(0.3, -3), Complex(5, 7)}) {
    Vec3<Complex> v{p[0] + s * q[0], p[1] + s * q[1], p[2] + s * q[2]};
    if (predicted_lambda_distance(ProjectivePoint<Complex>(v), omega) > 1e-12) return false;
  }
  return predicted_lambda_distance(ProjectivePoint<Complex>(q), omega) <= 1e-12;
}

/// Largest general-position subset of the candidates (exhaustive, largest size
/// first, subsets in lexicographic order) and its vertices: intersections of two
/// witness lines that are centres of the model's real pencils, e₁ and e₂.
inline LigResult lig_over_family(LineArrangement<Rational>& candidates, const OmegaModel& omega) {
  const std::size_t n = candidates.size();
  if (n > kMaxLigCandidates)
    throw Error(ErrorCode::InvalidSpec, std::to_string(n) + " candidates exceed the cap of 12");
  for (std::size_t i = 0; i < n; ++i) {
    if (!line_in_lambda(candidates.lines[i], omega))
      throw Error(ErrorCode::CandidateOutsideLambda, candidates.lines[i].to_string());
    candidates.in_lambda[i] = true;
  }
  const Tolerances tol = omega.tol;
  LigResult res;
  for (std::size_t size = n; size >= 1 && res.witness.empty(); --size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      std::vector<const ProjectiveLine<Rational>*> ls;
      for (auto i : idx) ls.push_back(&candidates.lines[i]);
      if (detail::general_position_of(ls, tol)) {
        res.max_size = size;
        res.witness = idx;
        break;
      }
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  const std::array<ProjectivePoint<Rational>, 2> centres{ProjectivePoint<Rational>::basis(0),
                                                         ProjectivePoint<Rational>::basis(1)};
  for (const auto& c : centres) {
    std::size_t through = 0;
    for (auto i : res.witness) through += candidates.lines[i].contains(c) ? 1 : 0;
    if (through >= 2) res.vertices.push_back(c);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Rendering

struct SliceSpec {
  std::size_t width = 256, height = 256;
  double im_w = 0.5;   // the fixed value of Im w
  double band = 0.05;  // accepted |Im w − im_w|
  double re_min = -4, re_max = 4;
  double im_min = -4, im_max = 4;
};

struct Image {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> rgb;
  std::size_t plotted = 0;  // accumulation points that fell on the raster

  std::string to_ppm() const {
    std::string s = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    s.append(rgb.begin(), rgb.end());
    return s;
  }
};

/// Density raster of accumulation points on the slice Im w ≈ im_w, plotted as
/// Re z (horizontal) × Im z (vertical, up). Brightness is log-scaled by count.
/// At desk-scale boxes the finite part of a toral cloud hugs the real plane, so
/// slices with Im w away from 0 can come out empty; `plotted` says so.
inline Image render_slice(const LimitSetApprox& approx, const SliceSpec& slice,
                          const Tolerances& tol = default_tolerances()) {
  Image img{slice.width, slice.height, std::vector<std::uint8_t>(slice.width * slice.height * 3, 0), 0};
  if (slice.width == 0 || slice.height == 0) return img;
  std::vector<std::size_t> counts(slice.width * slice.height, 0);
  std::size_t peak = 0;
  for (const auto& p : approx.points) {
    const auto& v = p.point.coords();
    if (std::abs(v[2]) < tol.infinity) continue;
    const Complex z = v[0] / v[2], w = v[1] / v[2];
    if (std::abs(w.imag() - slice.im_w) > slice.band) continue;
    const double fx = (z.real() - slice.re_min) / (slice.re_max - slice.re_min);
    const double fy = (slice.im_max - z.imag()) / (slice.im_max - slice.im_min);
    if (fx < 0 || fx >= 1 || fy < 0 || fy >= 1) continue;
    const auto x = static_cast<std::size_t>(fx * static_cast<double>(slice.width));
    const auto y = static_cast<std::size_t>(fy * static_cast<double>(slice.height));
    peak = std::max(peak, ++counts[y * slice.width + x]);
    ++img.plotted;
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    double t = std::log1p(static_cast<double>(counts[i])) / std::log1p(static_cast<double>(peak));
    auto level = static_cast<std::uint8_t>(std::lround(64 + 191 * t));
    img.rgb[3 * i] = level;
    img.rgb[3 * i + 1] = level;
    img.rgb[3 * i + 2] = level;
  }
  return img;
}

}  // namespace kleinian
