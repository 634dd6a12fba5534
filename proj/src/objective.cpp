#include "dtcae/objective.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dtcae/errors.hpp"

namespace dtcae {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

std::vector<double> instance_mean(const InstanceSet& x) {
  std::vector<double> m(x.d(), 0.0);
  for (std::size_t r = 0; r < x.d(); ++r) {
    for (std::size_t j = 0; j < x.n(); ++j) m[r] += x.instances(r, j);
    m[r] /= static_cast<double>(x.n());
  }
  return m;
}

}  // namespace

void validate(const Hyper& h) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::Config, msg);
  };
  require(h.C1 >= 0.0 && h.C2 >= 0.0 && h.C3 >= 0.0, "C1, C2, C3 must be nonnegative");
  require(h.alpha >= 1, "alpha must be positive");
  require(h.ma >= 1 && h.m0 >= 1 && h.mt >= 1, "filter counts must be positive");
  require(h.tau >= 0.0, "tau must be nonnegative");
  require(h.eps >= 0.0, "eps must be nonnegative");
  require(h.lambda >= 0.0, "lambda must be nonnegative");
  require(h.innerSteps >= 1, "inner-steps must be positive");
}

NeighborGraph build_knn(const DomainDataset& target, std::size_t k) {
  const std::size_t n = target.size();
  if (k >= n) {
    fail(ErrorKind::Config, "neighbor count k=" + std::to_string(k) + " must be below target size " +
                                std::to_string(n));
  }
  std::vector<std::vector<double>> means;
  means.reserve(n);
  for (const auto& p : target.points) means.push_back(instance_mean(p.x));

  NeighborGraph g{Matrix(n, n), k};
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < n; ++i) {
    others.clear();
    std::vector<double> dist(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dist[j] = squared_distance(means[i], means[j]);
      others.push_back(j);
    }
    std::stable_sort(others.begin(), others.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    for (std::size_t r = 0; r < k; ++r) {
      g.M(i, others[r]) = 1.0;
      g.M(others[r], i) = 1.0;
    }
  }
  return g;
}

Problem make_problem(MultiDomainDataset ds, const Hyper& hyper) {
  validate(ds);
  NeighborGraph graph = build_knn(ds.target(), hyper.k);
  return make_problem(std::move(ds), hyper, std::move(graph));
}

Problem make_problem(MultiDomainDataset ds, const Hyper& hyper, NeighborGraph graph) {
  validate(ds);
  validate(hyper);
  const std::size_t nT = ds.target().size();
  if (graph.M.rows() != nT || graph.M.cols() != nT) {
    fail(ErrorKind::Shape, "neighbor graph does not match target domain size");
  }
  Problem p{std::move(ds), hyper, std::move(graph), {}};
  p.windows.resize(p.ds.T());
  for (std::size_t t = 0; t < p.ds.T(); ++t) {
    for (const auto& point : p.ds.domains[t].points) {
      p.windows[t].push_back(slide_window(point.x, hyper.alpha));
    }
  }
  return p;
}

ForwardCache compute_forward(const Problem& problem, const ModelParams& params) {
  if (params.T() != problem.ds.T()) fail(ErrorKind::Shape, "parameters built for a different domain count");
  ForwardCache cache(problem.ds.T());
  for (std::size_t t = 0; t < problem.ds.T(); ++t) {
    cache[t].reserve(problem.windows[t].size());
    for (const auto& Z : problem.windows[t]) cache[t].push_back(represent(Z, t, params));
  }
  return cache;
}

double label_loss(const Problem& problem, const ModelParams& params, const ForwardCache& cache) {
  double loss = 0.0;
  for (std::size_t t = 0; t < problem.ds.T(); ++t) {
    const auto& dom = problem.ds.domains[t];
    for (std::size_t i = 0; i < dom.size(); ++i) {
      if (!problem.labeled(t, i)) continue;
      const std::vector<double> h = score(cache[t][i], t, params);
      const std::vector<double> y = one_hot(*dom.points[i].label, problem.ds.numClasses);
      loss += squared_distance(h, y);
    }
  }
  return loss;
}

std::vector<double> attribute_embedding(const Matrix& theta, const std::vector<std::uint8_t>& attributes) {
  std::vector<double> a(attributes.begin(), attributes.end());
  return transposed_times(theta, a);
}

double attr_fit_loss(const Problem& problem, const ModelParams& params, const ForwardCache& cache) {
  double loss = 0.0;
  for (std::size_t t = 0; t < problem.ds.T(); ++t) {
    const auto& dom = problem.ds.domains[t];
    for (std::size_t i = 0; i < dom.size(); ++i) {
      if (!problem.in_attribute_pool(t, i)) continue;
      loss += squared_distance(cache[t][i].fa.out, attribute_embedding(params.Theta, dom.points[i].attributes));
    }
  }
  return loss;
}

std::vector<std::vector<double>> shared_means(const Problem& problem, const ForwardCache& cache) {
  std::vector<std::vector<double>> means;
  for (std::size_t t = 0; t < problem.ds.T(); ++t) {
    const auto& reps = cache[t];
    std::vector<double> mu(reps.front().f0.out.size(), 0.0);
    for (const auto& r : reps)
      for (std::size_t k = 0; k < mu.size(); ++k) mu[k] += r.f0.out[k];
    for (double& v : mu) v /= static_cast<double>(reps.size());
    means.push_back(std::move(mu));
  }
  return means;
}

double domain_match_loss(const Problem& problem, const ForwardCache& cache) {
  const auto means = shared_means(problem, cache);
  double loss = 0.0;
  for (std::size_t t = 0; t < means.size(); ++t)
    for (std::size_t s = t + 1; s < means.size(); ++s) loss += squared_distance(means[t], means[s]);
  return loss;
}

double neighbor_loss(const Problem& problem, const ForwardCache& cache) {
  const std::size_t T = problem.target();
  const auto& reps = cache[T];
  const Matrix& M = problem.graph.M;
  double loss = 0.0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t j = 0; j < reps.size(); ++j) {
      if (M(i, j) == 0.0) continue;
      const double d = squared_distance(reps[i].f0.out, reps[j].f0.out) +
                       squared_distance(reps[i].ft.out, reps[j].ft.out) +
                       squared_distance(reps[i].fa.out, reps[j].fa.out);
      loss += M(i, j) * d;
    }
  }
  return loss;
}

ObjectiveBreakdown objective(const Problem& problem, const ModelParams& params, const ForwardCache& cache) {
  ObjectiveBreakdown o;
  o.lossLabeled = label_loss(problem, params, cache);
  o.lossAttr = attr_fit_loss(problem, params, cache);
  o.lossDomainMatch = domain_match_loss(problem, cache);
  o.lossNeighbor = neighbor_loss(problem, cache);
  const Hyper& h = problem.hyper;
  o.total = o.lossLabeled + h.C1 * o.lossAttr + h.C2 * o.lossDomainMatch + h.C3 * o.lossNeighbor;
  return o;
}

double label_loss(const Problem& problem, const ModelParams& params) {
  return label_loss(problem, params, compute_forward(problem, params));
}
double attr_fit_loss(const Problem& problem, const ModelParams& params) {
  return attr_fit_loss(problem, params, compute_forward(problem, params));
}
double domain_match_loss(const Problem& problem, const ModelParams& params) {
  return domain_match_loss(problem, compute_forward(problem, params));
}
double neighbor_loss(const Problem& problem, const ModelParams& params) {
  return neighbor_loss(problem, compute_forward(problem, params));
}
ObjectiveBreakdown objective(const Problem& problem, const ModelParams& params) {
  return objective(problem, params, compute_forward(problem, params));
}

}  // namespace dtcae
