#pragma once

#include <cstddef>
#include <vector>

#include "dtcae/linalg.hpp"

namespace dtcae {

/// Filter bank of one convolutional branch: (alpha*d) x m, one filter per column.
struct BranchParams {
  Matrix W;

  std::size_t filters() const noexcept { return W.cols(); }
  bool operator==(const BranchParams&) const = default;
};

/// Every learnable matrix of the model.
///
/// Wt and Ut hold one entry per domain, in dataset order; the last entry
/// belongs to the target domain.
struct ModelParams {
  std::size_t alpha = 1;
  BranchParams Wa;            // attribute embedding filters
  BranchParams W0;            // shared, domain-independent filters
  std::vector<BranchParams> Wt;
  Matrix Ua;                  // m_a x |y|
  Matrix U0;                  // m_0 x |y|
  std::vector<Matrix> Ut;     // m_t x |y| each
  Matrix Theta;               // |a| x m_a

  std::size_t T() const noexcept { return Wt.size(); }
  bool operator==(const ModelParams&) const = default;
};

/// Zero-initialized parameters with the given shapes.
ModelParams zero_params(std::size_t T, std::size_t d, std::size_t alpha, std::size_t numAttributes,
                        std::size_t numClasses, std::size_t ma, std::size_t m0, std::size_t mt);

}  // namespace dtcae
