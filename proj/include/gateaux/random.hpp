#ifndef GATEAUX_RANDOM_HPP
#define GATEAUX_RANDOM_HPP

#include <random>

#include "gateaux/types.hpp"

namespace gateaux {

// Seeded generator for all stochastic search and property sampling.
// Same seed, same platform: identical draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }

  double uniform() { return uniform_(gen_); }

  // Standard complex Gaussian: variance 1, independent re/im of variance 1/2.
  cplx cnormal() {
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    return cplx(normal() * inv_sqrt2, normal() * inv_sqrt2);
  }

  Mat gaussian(Index rows, Index cols) {
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = cnormal();
    return m;
  }

  Mat hermitian(Index n) {
    Mat g = gaussian(n, n);
    return 0.5 * (g + g.adjoint());
  }

  // Positive semidefinite with unit trace.
  Mat density(Index n) {
    Mat g = gaussian(n, n);
    Mat p = g * g.adjoint();
    return p / p.trace().real();
  }

  Vec unit_vector(Index n) {
    Vec v(n);
    for (Index i = 0; i < n; ++i) v(i) = cnormal();
    double nv = v.norm();
    if (nv == 0.0) {
      v.setZero();
      v(0) = 1.0;
      return v;
    }
    return v / nv;
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace gateaux

#endif
