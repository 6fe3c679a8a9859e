#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

namespace gptw {

/// Uniform discretization of the cube torus [0,T]^N, N in {2,3}.
///
/// Nodes are stored row-major: axis 0 (x_1) varies slowest. Every axis
/// shares the period T; the point counts may differ per axis.
class TorusGrid {
 public:
  TorusGrid(std::vector<int> sizes, double period);

  /// Same point count on every axis.
  static TorusGrid cube(int dim, int size, double period);

  int dim() const { return static_cast<int>(sizes_.size()); }
  int size(int axis) const { return sizes_[axis]; }
  const std::vector<int>& sizes() const { return sizes_; }
  double period() const { return period_; }
  double spacing(int axis) const { return period_ / sizes_[axis]; }
  Eigen::Index node_count() const { return node_count_; }

  /// Quadrature weight of one node, prod_i (T / M_i).
  double cell_volume() const { return cell_volume_; }
  /// T^N.
  double volume() const;

  /// Signed wavenumber of a per-axis index, in [-M/2, M/2).
  int wavenumber(int axis, int index) const {
    return index < sizes_[axis] / 2 ? index : index - sizes_[axis];
  }
  double coordinate(int axis, int index) const { return index * spacing(axis); }

  /// Per-axis indices of a flat node index.
  std::array<int, 3> unflatten(Eigen::Index flat) const;
  Eigen::Index flatten(const std::array<int, 3>& idx) const;
  /// Flat stride of one step along `axis`.
  Eigen::Index stride(int axis) const;

  bool operator==(const TorusGrid& other) const {
    return sizes_ == other.sizes_ && period_ == other.period_;
  }
  bool operator!=(const TorusGrid& other) const { return !(*this == other); }

 private:
  std::vector<int> sizes_;
  double period_;
  Eigen::Index node_count_ = 1;
  double cell_volume_ = 1.0;
};

}  // namespace gptw
