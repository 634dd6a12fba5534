#pragma once

#include <cstddef>
#include <vector>

#include "dtcae/data.hpp"
#include "dtcae/params.hpp"

namespace dtcae {

/// Stacked sliding windows: column j is [x_j; ...; x_{j+alpha-1}].
struct WindowedInput {
  Matrix Z;

  std::size_t w() const noexcept { return Z.cols(); }
};

/// Per filter: index of the window with the largest pre-activation (first on
/// ties) and that pre-activation.
struct PoolTrace {
  std::vector<std::size_t> argmax;
  std::vector<double> preact;
};

struct BranchOutput {
  std::vector<double> out;
  PoolTrace trace;
};

/// Response of one filter after ReLU and max-pooling.
struct FilterResponse {
  double out = 0.0;
  std::size_t argmax = 0;
  double preact = 0.0;
};

WindowedInput slide_window(const InstanceSet& x, std::size_t alpha);

FilterResponse conv_pool_filter(const BranchParams& W, std::size_t k, const WindowedInput& Z);
BranchOutput conv_pool(const BranchParams& W, const WindowedInput& Z);

/// The three branch outputs of one point evaluated in domain t.
struct Representation {
  BranchOutput f0;
  BranchOutput ft;
  BranchOutput fa;
};

Representation represent(const WindowedInput& Z, std::size_t t, const ModelParams& params);

/// [f_0; f_t; f_a].
std::vector<double> full_rep(const DataPoint& point, std::size_t t, const ModelParams& params);

/// U_0^T f_0 + U_t^T f_t + U_a^T f_a.
std::vector<double> score(const Representation& rep, std::size_t t, const ModelParams& params);
std::vector<double> score(const DataPoint& point, std::size_t t, const ModelParams& params);

/// Smallest index of the largest entry.
std::size_t argmax_index(const std::vector<double>& v);
std::size_t predict(const DataPoint& point, std::size_t t, const ModelParams& params);

}  // namespace dtcae
