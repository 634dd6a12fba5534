#pragma once

#include <cstddef>
#include <vector>

#include "dtcae/objective.hpp"

namespace dtcae {

/// The four filter families updated by coordinate descent.
enum class Family {
  Attribute,  // W_a
  Shared,     // W_0
  Auxiliary,  // W_t of an auxiliary domain t
  Target,     // W_T
};

const char* family_name(Family f);

/// Filter bank of `family`; `t` selects the auxiliary domain and is ignored
/// otherwise.
BranchParams& branch_of(ModelParams& params, Family family, std::size_t t);
const BranchParams& branch_of(const ModelParams& params, Family family, std::size_t t);

/// Gradient of the total objective with respect to one filter column.
struct FilterGrad {
  std::vector<double> values;
};

/// Analytic gradient from a forward cache. `traces` supplies the pooling
/// argmax and ReLU activity (normally the same cache as `values`).
FilterGrad filter_gradient(const Problem& problem, const ModelParams& params, const ForwardCache& values,
                           const ForwardCache& traces, Family family, std::size_t t, std::size_t k);

FilterGrad grad_wa(const Problem& problem, const ModelParams& params, std::size_t k);
FilterGrad grad_w0(const Problem& problem, const ModelParams& params, std::size_t k);
FilterGrad grad_wt(const Problem& problem, const ModelParams& params, std::size_t t, std::size_t k);
FilterGrad grad_wT(const Problem& problem, const ModelParams& params, std::size_t k);

/// Central differences of the full objective, one filter coordinate at a time.
/// Not valid at ReLU kinks or pooling ties.
FilterGrad fd_gradient(const Problem& problem, const ModelParams& params, Family family, std::size_t t,
                       std::size_t k, double h);

/// Smallest distance of any relevant pre-activation from zero, and of any
/// pooling maximum from the runner-up window, for filter k of `family`.
/// Used to keep gradient checks away from non-differentiable points.
double kink_margin(const Problem& problem, const ModelParams& params, Family family, std::size_t t,
                   std::size_t k);

}  // namespace dtcae
