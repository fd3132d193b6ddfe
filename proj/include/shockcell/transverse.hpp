#pragma once

#include "shockcell/riemann.hpp"

namespace shockcell {

/// A normal fluctuation (A^+dQ or A^-dQ, sweep-frame ordering) and the sound
/// speeds of the three cells of the column that receives it: the cell below,
/// the cell itself and the cell above.
struct TransverseInput {
  Vec4 fluct{};
  double c_below = 0.0;
  double c_mid = 0.0;
  double c_above = 0.0;
};

struct TransverseSplit {
  Vec4 up{};    // B^+ A dQ, goes to the edge above the middle cell
  Vec4 down{};  // B^- A dQ, goes to the edge below
};

/// Acoustic transverse solver for heterogeneous media. Only the density and
/// transverse-momentum entries of the fluctuation are projected onto the two
/// acoustic waves; normal momentum and energy are not propagated transversally.
/// Eigenvectors use the sound speed of the cell the wave enters.
inline TransverseSplit transverse_split(const TransverseInput& in) {
  const double d1 = in.fluct[0];
  const double d3 = in.fluct[2];
  const double c1 = in.c_below;
  const double c2 = in.c_mid;
  const double c3 = in.c_above;
  const double up = c3 * (c2 * d1 + d3) / (c3 + c2);
  const double down = -c1 * (c2 * d1 - d3) / (c1 + c2);
  return {{up, 0.0, up * c3, 0.0}, {down, 0.0, -down * c1, 0.0}};
}

}  // namespace shockcell
