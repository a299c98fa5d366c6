#pragma once

#include <cstddef>

namespace kleinian {

/// Every numerical threshold of the float pipeline lives here. Exact code
/// paths never consult it.
struct Tolerances {
  double point = 1e-9;           // τ_pt: canonical point equality
  double incidence = 1e-9;       // τ_inc: |⟨line, point⟩|
  double classify = 1e-8;        // τ_cls: Möbius trace test
  double divergence = 1e6;       // M_div: sequence divergence threshold
  std::size_t tail = 20;         // N_tail: sequence tail length
  double convergence = 1e-6;     // relative spread for a convergent tail
  double discreteness = 1e-6;    // τ_disc: eLat log-image accumulation
  double cluster = 1e-3;         // ε_cl: grid cell size for orbit clustering
  std::size_t cluster_hits = 3;  // N_hit: distinct elements per cluster cell
  double equicontinuity = 10.0;  // C_eq: bounded image-diameter ratio
  double blowup_growth = 1.5;    // profile growth (half box → full box) that counts as blow-up
  double infinity = 1e-8;        // |t| below which a unit point is binned at infinity
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace kleinian
