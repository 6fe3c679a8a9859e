#pragma once

#include "gptw/grid.hpp"

#include <Eigen/Core>

namespace gptw {

// Raw multidimensional DFT on the node vector of a grid. The forward
// transform divides by the node count, so the zero mode is the mean.
void fft_forward(const TorusGrid& grid, const Eigen::VectorXcd& in, Eigen::VectorXcd& out);
void fft_inverse(const TorusGrid& grid, const Eigen::VectorXcd& in, Eigen::VectorXcd& out);

inline Eigen::VectorXcd fft_forward(const TorusGrid& grid, const Eigen::VectorXcd& in) {
  Eigen::VectorXcd out(in.size());
  fft_forward(grid, in, out);
  return out;
}

inline Eigen::VectorXcd fft_inverse(const TorusGrid& grid, const Eigen::VectorXcd& in) {
  Eigen::VectorXcd out(in.size());
  fft_inverse(grid, in, out);
  return out;
}

}  // namespace gptw
