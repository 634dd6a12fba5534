#include "dtcae/grad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dtcae/errors.hpp"

namespace dtcae {

namespace {

const BranchOutput& branch_output(const Representation& rep, Family family) {
  switch (family) {
    case Family::Attribute:
      return rep.fa;
    case Family::Shared:
      return rep.f0;
    case Family::Auxiliary:
    case Family::Target:
      return rep.ft;
  }
  return rep.ft;
}

const Matrix& head_of(const ModelParams& params, Family family, std::size_t domain) {
  switch (family) {
    case Family::Attribute:
      return params.Ua;
    case Family::Shared:
      return params.U0;
    case Family::Auxiliary:
    case Family::Target:
      return params.Ut[domain];
  }
  return params.U0;
}

// Domains whose points depend on the family's filters.
bool touches(Family family, std::size_t t, std::size_t domain, std::size_t target) {
  switch (family) {
    case Family::Attribute:
    case Family::Shared:
      return true;
    case Family::Auxiliary:
      return domain == t;
    case Family::Target:
      return domain == target;
  }
  return false;
}

void check_index(const ModelParams& params, Family family, std::size_t t, std::size_t k) {
  if (family == Family::Auxiliary && t + 1 >= params.T()) {
    fail(ErrorKind::Config, "auxiliary domain index " + std::to_string(t) + " out of range");
  }
  if (k >= branch_of(params, family, t).filters()) {
    fail(ErrorKind::Config, std::string("filter index out of range for ") + family_name(family));
  }
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::Attribute:
      return "W_a";
    case Family::Shared:
      return "W_0";
    case Family::Auxiliary:
      return "W_t";
    case Family::Target:
      return "W_T";
  }
  return "?";
}

BranchParams& branch_of(ModelParams& params, Family family, std::size_t t) {
  return const_cast<BranchParams&>(branch_of(static_cast<const ModelParams&>(params), family, t));
}

const BranchParams& branch_of(const ModelParams& params, Family family, std::size_t t) {
  switch (family) {
    case Family::Attribute:
      return params.Wa;
    case Family::Shared:
      return params.W0;
    case Family::Auxiliary:
      return params.Wt.at(t);
    case Family::Target:
      return params.Wt.back();
  }
  return params.Wa;
}

FilterGrad filter_gradient(const Problem& problem, const ModelParams& params, const ForwardCache& values,
                           const ForwardCache& traces, Family family, std::size_t t, std::size_t k) {
  check_index(params, family, t, k);
  const Hyper& hyper = problem.hyper;
  const std::size_t target = problem.target();
  const std::size_t rows = branch_of(params, family, t).W.rows();

  std::vector<std::vector<double>> means;
  if (family == Family::Shared && hyper.C2 != 0.0) means = shared_means(problem, values);
  const bool neighbors = family != Family::Auxiliary && hyper.C3 != 0.0;

  FilterGrad grad{std::vector<double>(rows, 0.0)};
  for (std::size_t dom = 0; dom < problem.ds.T(); ++dom) {
    if (!touches(family, t, dom, target)) continue;
    const auto& points = problem.ds.domains[dom].points;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Representation& rep = values[dom][i];
      // Derivative of the objective with respect to slot k of this branch.
      double slot = 0.0;

      if (problem.labeled(dom, i)) {
        std::vector<double> r = score(rep, dom, params);
        r[*points[i].label] -= 1.0;
        slot += 2.0 * dot(head_of(params, family, dom).row(k), r);
      }
      if (family == Family::Attribute && hyper.C1 != 0.0 && problem.in_attribute_pool(dom, i)) {
        const double fit = dot(params.Theta.col(k), std::vector<double>(points[i].attributes.begin(),
                                                                         points[i].attributes.end()));
        slot += 2.0 * hyper.C1 * (rep.fa.out[k] - fit);
      }
      if (!means.empty()) {
        double gap = 0.0;
        for (std::size_t s = 0; s < means.size(); ++s) {
          if (s != dom) gap += means[dom][k] - means[s][k];
        }
        slot += 2.0 * hyper.C2 * gap / static_cast<double>(points.size());
      }
      if (neighbors && dom == target) {
        // Ordered double sum over a symmetric M: both endpoints contribute.
        const auto& reps = values[target];
        double pull = 0.0;
        for (std::size_t j = 0; j < reps.size(); ++j) {
          const double m = problem.graph.M(i, j);
          if (m != 0.0) pull += m * (branch_output(rep, family).out[k] - branch_output(reps[j], family).out[k]);
        }
        slot += 4.0 * hyper.C3 * pull;
      }

      const BranchOutput& traced = branch_output(traces[dom][i], family);
      if (slot == 0.0 || !(traced.trace.preact[k] > 0.0)) continue;
      const Matrix& Z = problem.windows[dom][i].Z;
      const std::size_t jstar = traced.trace.argmax[k];
      for (std::size_t r = 0; r < rows; ++r) grad.values[r] += slot * Z(r, jstar);
    }
  }
  return grad;
}

FilterGrad grad_wa(const Problem& problem, const ModelParams& params, std::size_t k) {
  const ForwardCache c = compute_forward(problem, params);
  return filter_gradient(problem, params, c, c, Family::Attribute, 0, k);
}

FilterGrad grad_w0(const Problem& problem, const ModelParams& params, std::size_t k) {
  const ForwardCache c = compute_forward(problem, params);
  return filter_gradient(problem, params, c, c, Family::Shared, 0, k);
}

FilterGrad grad_wt(const Problem& problem, const ModelParams& params, std::size_t t, std::size_t k) {
  const ForwardCache c = compute_forward(problem, params);
  return filter_gradient(problem, params, c, c, Family::Auxiliary, t, k);
}

FilterGrad grad_wT(const Problem& problem, const ModelParams& params, std::size_t k) {
  const ForwardCache c = compute_forward(problem, params);
  return filter_gradient(problem, params, c, c, Family::Target, 0, k);
}

FilterGrad fd_gradient(const Problem& problem, const ModelParams& params, Family family, std::size_t t,
                       std::size_t k, double h) {
  if (!(h > 0.0)) fail(ErrorKind::Config, "finite-difference step must be positive");
  check_index(params, family, t, k);
  ModelParams probe = params;
  Matrix& W = branch_of(probe, family, t).W;
  FilterGrad grad{std::vector<double>(W.rows(), 0.0)};
  for (std::size_t r = 0; r < W.rows(); ++r) {
    const double saved = W(r, k);
    W(r, k) = saved + h;
    const double up = objective(problem, probe).total;
    W(r, k) = saved - h;
    const double down = objective(problem, probe).total;
    W(r, k) = saved;
    grad.values[r] = (up - down) / (2.0 * h);
  }
  return grad;
}

double kink_margin(const Problem& problem, const ModelParams& params, Family family, std::size_t t,
                   std::size_t k) {
  check_index(params, family, t, k);
  const BranchParams& W = branch_of(params, family, t);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t dom = 0; dom < problem.ds.T(); ++dom) {
    if (!touches(family, t, dom, problem.target())) continue;
    for (const auto& Z : problem.windows[dom]) {
      std::vector<double> pre(Z.w());
      for (std::size_t j = 0; j < Z.w(); ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < Z.Z.rows(); ++r) s += W.W(r, k) * Z.Z(r, j);
        pre[j] = s;
      }
      std::sort(pre.begin(), pre.end(), std::greater<>());
      margin = std::min(margin, std::abs(pre[0]));
      if (pre.size() > 1 && pre[0] > 0.0) margin = std::min(margin, pre[0] - pre[1]);
    }
  }
  return margin;
}

}  // namespace dtcae
