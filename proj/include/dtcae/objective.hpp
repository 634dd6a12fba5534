#pragma once

#include <cstddef>
#include <vector>

#include "dtcae/data.hpp"
#include "dtcae/params.hpp"
#include "dtcae/repr.hpp"

namespace dtcae {

/// Which points the attribute-fit term (and the Theta solve) sums over.
enum class AttributeFitScope {
  All,                // every point of every domain
  LabeledTargetOnly,  // auxiliary points plus the labeled target prefix
};

struct Hyper {
  double C1 = 1.0;  // attribute fit
  double C2 = 1.0;  // domain matching
  double C3 = 1.0;  // neighborhood smoothness
  std::size_t alpha = 2;
  std::size_t ma = 4;
  std::size_t m0 = 4;
  std::size_t mt = 4;
  double tau = 1e-2;
  std::size_t eta = 200;
  double eps = 1e-6;
  double lambda = 1e-6;
  std::size_t k = 5;
  std::size_t innerSteps = 1;
  bool backtrack = true;
  AttributeFitScope attributeFitScope = AttributeFitScope::All;
  bool freezeTraceWithinSweep = false;
  /// When false, U_a is held at zero (used for attribute ablations).
  bool attributeHead = true;
};

void validate(const Hyper& hyper);

/// Symmetric 0/1 adjacency over target-domain points, zero diagonal.
struct NeighborGraph {
  Matrix M;
  std::size_t k = 0;
};

/// Connects each target point to its k nearest others (Euclidean distance
/// between instance means, ties to the smaller index), then symmetrizes by OR.
NeighborGraph build_knn(const DomainDataset& target, std::size_t k);

/// Dataset, hyperparameters, neighbor graph and pre-windowed inputs. Fixed
/// for the lifetime of one training run.
struct Problem {
  MultiDomainDataset ds;
  Hyper hyper;
  NeighborGraph graph;
  std::vector<std::vector<WindowedInput>> windows;  // [domain][point]

  std::size_t target() const noexcept { return ds.targetIndex; }
  bool labeled(std::size_t t, std::size_t i) const {
    return t != ds.targetIndex || i < ds.domains[t].labeledCount;
  }
  bool in_attribute_pool(std::size_t t, std::size_t i) const {
    return hyper.attributeFitScope == AttributeFitScope::All || labeled(t, i);
  }
};

/// Validates inputs, windows every point and builds the kNN graph.
Problem make_problem(MultiDomainDataset ds, const Hyper& hyper);
Problem make_problem(MultiDomainDataset ds, const Hyper& hyper, NeighborGraph graph);

/// Branch outputs of every point, evaluated with its own domain's f_t.
using ForwardCache = std::vector<std::vector<Representation>>;

ForwardCache compute_forward(const Problem& problem, const ModelParams& params);

/// Loss terms are stored unweighted; `total` applies C1..C3.
struct ObjectiveBreakdown {
  double total = 0.0;
  double lossLabeled = 0.0;
  double lossAttr = 0.0;
  double lossDomainMatch = 0.0;
  double lossNeighbor = 0.0;
};

double label_loss(const Problem& problem, const ModelParams& params, const ForwardCache& cache);
double attr_fit_loss(const Problem& problem, const ModelParams& params, const ForwardCache& cache);
double domain_match_loss(const Problem& problem, const ForwardCache& cache);
double neighbor_loss(const Problem& problem, const ForwardCache& cache);
ObjectiveBreakdown objective(const Problem& problem, const ModelParams& params, const ForwardCache& cache);

double label_loss(const Problem& problem, const ModelParams& params);
double attr_fit_loss(const Problem& problem, const ModelParams& params);
double domain_match_loss(const Problem& problem, const ModelParams& params);
double neighbor_loss(const Problem& problem, const ModelParams& params);
ObjectiveBreakdown objective(const Problem& problem, const ModelParams& params);

/// Per-domain mean of f_0 over all points.
std::vector<std::vector<double>> shared_means(const Problem& problem, const ForwardCache& cache);

/// Theta^T a.
std::vector<double> attribute_embedding(const Matrix& theta, const std::vector<std::uint8_t>& attributes);

}  // namespace dtcae
