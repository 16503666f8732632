#pragma once

#include <Eigen/Dense>

namespace jointgraph {

/// A (p*M) x (p*M) matrix viewed as a p x p grid of M x M blocks.
///
/// Block indices in the public API are 1-based: block (j, l) covers rows
/// [(j-1)M, jM) and columns [(l-1)M, lM). Symmetry is not enforced here;
/// callers that need it check it themselves.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  BlockMatrix(Eigen::MatrixXd data, int p, int block_size);

  static BlockMatrix zero(int p, int block_size);
  static BlockMatrix identity(int p, int block_size);

  int p() const { return p_; }
  int block_size() const { return m_; }
  int dim() const { return p_ * m_; }

  const Eigen::MatrixXd& data() const { return data_; }
  Eigen::MatrixXd& data() { return data_; }

  /// Copy of block (j, l); throws IndexError outside 1..p.
  Eigen::MatrixXd block(int j, int l) const;
  double block_frobenius(int j, int l) const;

  /// p x p matrix of block Frobenius norms (0-based entries).
  Eigen::MatrixXd block_frobenius_grid() const;

  double norm_inf() const;  // max_j sum_l ||A_jl||_F
  double norm_max() const;  // max_{j,l} ||A_jl||_F
  double norm_one() const;  // max_l sum_j ||A_jl||_F

  BlockMatrix transpose() const;

 private:
  void check_index(int j, int l) const;

  Eigen::MatrixXd data_;
  int p_ = 0;
  int m_ = 0;
};

// Block norms for general block-partitioned matrices (block vectors, block
// columns). The matrix is cut into row_block x col_block tiles; rows and
// columns must be divisible by the tile size.
Eigen::MatrixXd tile_frobenius(const Eigen::MatrixXd& a, int row_block, int col_block);
double tile_norm_inf(const Eigen::MatrixXd& a, int row_block, int col_block);
double tile_norm_max(const Eigen::MatrixXd& a, int row_block, int col_block);
double tile_norm_one(const Eigen::MatrixXd& a, int row_block, int col_block);

}  // namespace jointgraph
