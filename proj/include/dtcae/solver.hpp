#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dtcae/grad.hpp"
#include "dtcae/objective.hpp"

namespace dtcae {

/// Least-squares system for one closed-form block: minimize ||R - X^T F||^2
/// (+ lambda ||X||^2) over X, with F m x N features and R c x N targets.
struct SolveSystem {
  Matrix F;
  Matrix R;
};

enum class Head { Attribute, Shared, Domain };

/// Features and partial residuals for head `which` (domain `t` for Domain).
SolveSystem head_system(const Problem& problem, const ModelParams& params, const ForwardCache& cache, Head which,
                        std::size_t t = 0);
/// Attribute matrix A (|a| x N) and f_a features (m_a x N) over the attribute pool.
SolveSystem theta_system(const Problem& problem, const ForwardCache& cache);

/// ridge_solve(F F^T, F R^T, lambda).
Matrix solve_system(const SolveSystem& sys, double lambda);

Matrix solve_Ua(const Problem& problem, const ModelParams& params, const ForwardCache& cache);
Matrix solve_U0(const Problem& problem, const ModelParams& params, const ForwardCache& cache);
Matrix solve_Ut(const Problem& problem, const ModelParams& params, const ForwardCache& cache, std::size_t t);
Matrix solve_Theta(const Problem& problem, const ForwardCache& cache);

/// Recomputes filter k of `family` for every point it touches.
void refresh_filter(const Problem& problem, const ModelParams& params, ForwardCache& cache, Family family,
                    std::size_t t, std::size_t k);

/// One coordinate-descent pass over the filters of `family`, in order,
/// mutating `params` and keeping `cache` in sync.
void sweep_filters(const Problem& problem, ModelParams& params, ForwardCache& cache, Family family,
                   std::size_t t = 0);

/// Filters uniform in [-s, s] with s = 1/sqrt(alpha d); heads and Theta zero.
ModelParams init_params(const Problem& problem, std::uint64_t seed);

struct TrainReport {
  std::vector<ObjectiveBreakdown> objectiveTrace;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> wallTimePerIter;  // seconds
};

struct FitResult {
  ModelParams params;
  TrainReport report;
};

/// Alternating optimization: filter sweeps (W_a, W_0, auxiliary W_t, W_T),
/// then closed-form U_a, U_0, U_t, Theta, then the objective. Stops after
/// eta iterations or once consecutive objectives differ by at most eps.
FitResult fit(const Problem& problem, std::uint64_t seed);
FitResult fit(const MultiDomainDataset& ds, const Hyper& hyper, std::uint64_t seed);

/// Fraction of `test` points whose predicted class equals their label.
double evaluate(const DomainDataset& test, const ModelParams& params, std::size_t targetIdx);

}  // namespace dtcae
