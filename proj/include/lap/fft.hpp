#pragma once

#include <Eigen/Dense>

#include <span>

namespace lap::fft {

enum class Sign { negative, positive };

// Unnormalised multidimensional DFT in place over a row-major array.
// negative: sum_j a_j exp(-2 pi i jk/n); positive: exp(+2 pi i jk/n).
void transform(Eigen::VectorXcd& data, std::span<const int> shape, Sign sign);

}  // namespace lap::fft
