#pragma once

#include <cstddef>

namespace anistat {

// Symmetric 2x2 slope tensor: theoretical Q = H(0), or the spatial average of
// gradient products. n is the number of nodes averaged (0 for theoretical).
struct SlopeTensor {
  double q11 = 0.0;
  double q22 = 0.0;
  double q12 = 0.0;
  std::size_t n = 0;

  double det() const { return q11 * q22 - q12 * q12; }
};

// qd = Q22 / Q11, qo = Q12 / Q11.
struct SlopeRatios {
  double qd = 1.0;
  double qo = 0.0;
};

}  // namespace anistat
