#pragma once

#include <span>
#include <utility>
#include <vector>

#include "zkmcp/algebra/curve.hpp"

namespace zkmcp {

// Optimal ate pairing on BN254, loop parameter 6x + 2.

// Line coefficients for one Miller step. Evaluated at P = (xP, yP) the line
// is  (l0 * yP) + (l1 * xP) w + l3 w^3.
struct LineCoeffs {
  Fq2 l0, l1, l3;
};

// Miller-loop line coefficients for a fixed G2 point; reusable across
// pairings against that point (e.g. verification-key constants).
struct G2Prepared {
  std::vector<LineCoeffs> lines;
  bool infinity = true;

  static G2Prepared from(const G2Affine& q);
};

using PairingInput = std::pair<G1Affine, const G2Prepared*>;

Fq12 miller_loop(std::span<const PairingInput> pairs);
Fq12 final_exponentiation(const Fq12& f);

Fq12 pairing(const G1Affine& p, const G2Affine& q);

// prod_i e(P_i, Q_i) == 1, computed with one shared final exponentiation.
bool pairing_product_is_one(std::span<const PairingInput> pairs);

}  // namespace zkmcp
