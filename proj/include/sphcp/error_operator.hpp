#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "sphcp/field.hpp"
#include "sphcp/grid.hpp"

namespace sphcp {

/// The spectral error operator E = Psi^T D_w^2 Psi. Entries vanish unless
/// m = m' and l + l' is even, so E splits into dense SPD blocks keyed by
/// (m, parity of l); only those blocks are stored and factored. Immutable
/// after construction.
class ErrorOperator {
 public:
  struct Block {
    int m = 0;
    int parity = 0;                // l mod 2
    std::vector<int> degrees;      // l values covered, ascending
    std::vector<int> coeff_index;  // global positions l*l + l + m
    Eigen::MatrixXd mat;
    Eigen::LLT<Eigen::MatrixXd> llt;  // cached lower-triangular factor
    Eigen::MatrixXd inv;

    int size() const { return static_cast<int>(degrees.size()); }
  };

  ErrorOperator(const DHGrid& grid, int L);

  int L() const { return L_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  /// Stored nonzeros: sum over blocks of size^2. Equals
  /// sum_{m=-L}^{L} ceil((L+1-|m|)^2 / 2).
  std::size_t nonzero_count() const;

  SpectralCoeffs apply(const SpectralCoeffs& v) const;
  SpectralCoeffs solve(const SpectralCoeffs& v) const;

  /// Concatenation of all blocks' coefficient indices, in block order. Maps
  /// block-local layout back to the canonical ordering.
  std::vector<int> permutation() const;

 private:
  int L_;
  std::vector<Block> blocks_;
};

}  // namespace sphcp
