#include "lap/fft.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <stdexcept>
#include <vector>

namespace lap::fft {

void transform(Eigen::VectorXcd& data, std::span<const int> shape, Sign sign) {
  Eigen::Index total = 1;
  for (int s : shape) total *= s;
  if (total != data.size()) throw std::invalid_argument("fft: shape does not match data size");

  Eigen::FFT<double> engine;
  engine.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<std::complex<double>> line, out;

  Eigen::Index stride = total;
  for (int len : shape) {
    stride /= len;
    if (len == 1) continue;
    line.resize(len);
    out.resize(len);
    const Eigen::Index block = stride * len;
    for (Eigen::Index base = 0; base < total; base += block) {
      for (Eigen::Index offset = 0; offset < stride; ++offset) {
        std::complex<double>* p = data.data() + base + offset;
        for (int k = 0; k < len; ++k) line[k] = p[k * stride];
        if (sign == Sign::negative)
          engine.fwd(out, line);
        else
          engine.inv(out, line);
        for (int k = 0; k < len; ++k) p[k * stride] = out[k];
      }
    }
  }
}

}  // namespace lap::fft
