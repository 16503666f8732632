#include "jointgraph/blocknorm.hpp"

#include <string>

#include "jointgraph/errors.hpp"

namespace jointgraph {

BlockMatrix::BlockMatrix(Eigen::MatrixXd data, int p, int block_size)
    : data_(std::move(data)), p_(p), m_(block_size) {
  if (p_ < 1 || m_ < 1) throw ConfigError("BlockMatrix: p and M must be positive");
  const Eigen::Index side = static_cast<Eigen::Index>(p_) * m_;
  if (data_.rows() != side || data_.cols() != side) {
    throw ConfigError("BlockMatrix: expected a square matrix of side " + std::to_string(side) +
                      ", got " + std::to_string(data_.rows()) + "x" +
                      std::to_string(data_.cols()));
  }
}

BlockMatrix BlockMatrix::zero(int p, int block_size) {
  return BlockMatrix(Eigen::MatrixXd::Zero(p * block_size, p * block_size), p, block_size);
}

BlockMatrix BlockMatrix::identity(int p, int block_size) {
  return BlockMatrix(Eigen::MatrixXd::Identity(p * block_size, p * block_size), p, block_size);
}

void BlockMatrix::check_index(int j, int l) const {
  if (j < 1 || j > p_ || l < 1 || l > p_) {
    throw IndexError("block index (" + std::to_string(j) + "," + std::to_string(l) +
                     ") outside 1.." + std::to_string(p_));
  }
}

Eigen::MatrixXd BlockMatrix::block(int j, int l) const {
  check_index(j, l);
  return data_.block((j - 1) * m_, (l - 1) * m_, m_, m_);
}

double BlockMatrix::block_frobenius(int j, int l) const {
  check_index(j, l);
  return data_.block((j - 1) * m_, (l - 1) * m_, m_, m_).norm();
}

Eigen::MatrixXd BlockMatrix::block_frobenius_grid() const { return tile_frobenius(data_, m_, m_); }

double BlockMatrix::norm_inf() const { return tile_norm_inf(data_, m_, m_); }
double BlockMatrix::norm_max() const { return tile_norm_max(data_, m_, m_); }
double BlockMatrix::norm_one() const { return tile_norm_one(data_, m_, m_); }

BlockMatrix BlockMatrix::transpose() const { return BlockMatrix(data_.transpose(), p_, m_); }

Eigen::MatrixXd tile_frobenius(const Eigen::MatrixXd& a, int row_block, int col_block) {
  if (row_block < 1 || col_block < 1 || a.rows() % row_block != 0 || a.cols() % col_block != 0) {
    throw ConfigError("tile_frobenius: matrix not divisible into tiles");
  }
  const Eigen::Index rb = a.rows() / row_block;
  const Eigen::Index cb = a.cols() / col_block;
  Eigen::MatrixXd grid(rb, cb);
  for (Eigen::Index j = 0; j < rb; ++j)
    for (Eigen::Index l = 0; l < cb; ++l)
      grid(j, l) = a.block(j * row_block, l * col_block, row_block, col_block).norm();
  return grid;
}

double tile_norm_inf(const Eigen::MatrixXd& a, int row_block, int col_block) {
  return tile_frobenius(a, row_block, col_block).rowwise().sum().maxCoeff();
}

double tile_norm_max(const Eigen::MatrixXd& a, int row_block, int col_block) {
  return tile_frobenius(a, row_block, col_block).maxCoeff();
}

double tile_norm_one(const Eigen::MatrixXd& a, int row_block, int col_block) {
  return tile_frobenius(a, row_block, col_block).colwise().sum().maxCoeff();
}

}  // namespace jointgraph
