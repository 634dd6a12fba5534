#include "dtcae/solver.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "dtcae/errors.hpp"

namespace dtcae {

namespace {

void put_column(Matrix& m, std::size_t c, const std::vector<double>& v) { m.set_col(c, v); }

void add_scaled(std::vector<double>& acc, const Matrix& U, const std::vector<double>& f, double sign) {
  const std::vector<double> h = transposed_times(U, f);
  for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += sign * h[c];
}

void check_finite(const ObjectiveBreakdown& o, std::size_t iteration) {
  const std::pair<const char*, double> terms[] = {{"label", o.lossLabeled},
                                                  {"attr", o.lossAttr},
                                                  {"match", o.lossDomainMatch},
                                                  {"neighbor", o.lossNeighbor},
                                                  {"total", o.total}};
  for (const auto& [name, value] : terms) {
    if (!std::isfinite(value)) {
      fail(ErrorKind::Divergence, "objective term '" + std::string(name) + "' is not finite at iteration " +
                                      std::to_string(iteration));
    }
  }
}

}  // namespace

SolveSystem head_system(const Problem& problem, const ModelParams& params, const ForwardCache& cache, Head which,
                        std::size_t t) {
  const auto& ds = problem.ds;
  std::vector<std::pair<std::size_t, std::size_t>> pool;
  for (std::size_t dom = 0; dom < ds.T(); ++dom) {
    if (which == Head::Domain && dom != t) continue;
    for (std::size_t i = 0; i < ds.domains[dom].size(); ++i) {
      if (problem.labeled(dom, i)) pool.emplace_back(dom, i);
    }
  }
  if (pool.empty()) fail(ErrorKind::Data, "closed-form solve: labeled pool is empty");

  const std::size_t m = which == Head::Attribute ? params.Ua.rows()
                        : which == Head::Shared  ? params.U0.rows()
                                                 : params.Ut.at(t).rows();
  SolveSystem sys{Matrix(m, pool.size()), Matrix(ds.numClasses, pool.size())};
  for (std::size_t c = 0; c < pool.size(); ++c) {
    const auto [dom, i] = pool[c];
    const Representation& rep = cache[dom][i];
    std::vector<double> r = one_hot(*ds.domains[dom].points[i].label, ds.numClasses);
    switch (which) {
      case Head::Attribute:
        put_column(sys.F, c, rep.fa.out);
        add_scaled(r, params.U0, rep.f0.out, -1.0);
        add_scaled(r, params.Ut[dom], rep.ft.out, -1.0);
        break;
      case Head::Shared:
        put_column(sys.F, c, rep.f0.out);
        add_scaled(r, params.Ua, rep.fa.out, -1.0);
        add_scaled(r, params.Ut[dom], rep.ft.out, -1.0);
        break;
      case Head::Domain:
        put_column(sys.F, c, rep.ft.out);
        add_scaled(r, params.U0, rep.f0.out, -1.0);
        add_scaled(r, params.Ua, rep.fa.out, -1.0);
        break;
    }
    put_column(sys.R, c, r);
  }
  return sys;
}

SolveSystem theta_system(const Problem& problem, const ForwardCache& cache) {
  const auto& ds = problem.ds;
  std::vector<std::pair<std::size_t, std::size_t>> pool;
  for (std::size_t dom = 0; dom < ds.T(); ++dom)
    for (std::size_t i = 0; i < ds.domains[dom].size(); ++i)
      if (problem.in_attribute_pool(dom, i)) pool.emplace_back(dom, i);
  if (pool.empty()) fail(ErrorKind::Data, "Theta solve: attribute pool is empty");

  const std::size_t ma = cache[pool.front().first][pool.front().second].fa.out.size();
  SolveSystem sys{Matrix(ds.numAttributes, pool.size()), Matrix(ma, pool.size())};
  for (std::size_t c = 0; c < pool.size(); ++c) {
    const auto [dom, i] = pool[c];
    const auto& attrs = ds.domains[dom].points[i].attributes;
    put_column(sys.F, c, std::vector<double>(attrs.begin(), attrs.end()));
    put_column(sys.R, c, cache[dom][i].fa.out);
  }
  return sys;
}

Matrix solve_system(const SolveSystem& sys, double lambda) {
  return ridge_solve(gram(sys.F), matmul(sys.F, transpose(sys.R)), lambda);
}

Matrix solve_Ua(const Problem& problem, const ModelParams& params, const ForwardCache& cache) {
  return solve_system(head_system(problem, params, cache, Head::Attribute), problem.hyper.lambda);
}

Matrix solve_U0(const Problem& problem, const ModelParams& params, const ForwardCache& cache) {
  return solve_system(head_system(problem, params, cache, Head::Shared), problem.hyper.lambda);
}

Matrix solve_Ut(const Problem& problem, const ModelParams& params, const ForwardCache& cache, std::size_t t) {
  if (t >= problem.ds.T()) fail(ErrorKind::Config, "domain index out of range");
  return solve_system(head_system(problem, params, cache, Head::Domain, t), problem.hyper.lambda);
}

Matrix solve_Theta(const Problem& problem, const ForwardCache& cache) {
  return solve_system(theta_system(problem, cache), problem.hyper.lambda);
}

void refresh_filter(const Problem& problem, const ModelParams& params, ForwardCache& cache, Family family,
                    std::size_t t, std::size_t k) {
  const BranchParams& W = branch_of(params, family, t);
  for (std::size_t dom = 0; dom < problem.ds.T(); ++dom) {
    const bool hit = family == Family::Attribute || family == Family::Shared ||
                     (family == Family::Auxiliary && dom == t) ||
                     (family == Family::Target && dom == problem.target());
    if (!hit) continue;
    for (std::size_t i = 0; i < cache[dom].size(); ++i) {
      Representation& rep = cache[dom][i];
      BranchOutput& out = family == Family::Attribute ? rep.fa : family == Family::Shared ? rep.f0 : rep.ft;
      const FilterResponse r = conv_pool_filter(W, k, problem.windows[dom][i]);
      out.out[k] = r.out;
      out.trace.argmax[k] = r.argmax;
      out.trace.preact[k] = r.preact;
    }
  }
}

void sweep_filters(const Problem& problem, ModelParams& params, ForwardCache& cache, Family family,
                   std::size_t t) {
  const Hyper& hyper = problem.hyper;
  const std::size_t m = branch_of(params, family, t).filters();
  // Frozen mode keeps the pooling trace from the start of the sweep.
  const ForwardCache frozen = hyper.freezeTraceWithinSweep ? cache : ForwardCache{};
  const ForwardCache& traces = hyper.freezeTraceWithinSweep ? frozen : cache;

  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t step = 0; step < hyper.innerSteps; ++step) {
      const FilterGrad g = filter_gradient(problem, params, cache, traces, family, t, k);
      bool zero = true;
      for (double v : g.values) zero = zero && v == 0.0;
      if (zero || hyper.tau == 0.0) break;

      Matrix& W = branch_of(params, family, t).W;
      const std::vector<double> before = W.col(k);
      auto apply = [&](double rate) {
        std::vector<double> w = before;
        for (std::size_t r = 0; r < w.size(); ++r) w[r] -= rate * g.values[r];
        W.set_col(k, w);
        refresh_filter(problem, params, cache, family, t, k);
      };

      if (!hyper.backtrack) {
        apply(hyper.tau);
        continue;
      }
      const double start = objective(problem, params, cache).total;
      double rate = hyper.tau;
      bool accepted = false;
      for (int halvings = 0; halvings <= 20; ++halvings, rate *= 0.5) {
        apply(rate);
        if (objective(problem, params, cache).total <= start) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        W.set_col(k, before);
        refresh_filter(problem, params, cache, family, t, k);
        break;
      }
    }
  }
}

ModelParams init_params(const Problem& problem, std::uint64_t seed) {
  const auto& ds = problem.ds;
  const Hyper& h = problem.hyper;
  ModelParams p = zero_params(ds.T(), ds.d, h.alpha, ds.numAttributes, ds.numClasses, h.ma, h.m0, h.mt);
  const double s = 1.0 / std::sqrt(static_cast<double>(h.alpha * ds.d));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-s, s);
  auto fill = [&](Matrix& m) {
    for (double& v : m.data()) v = uniform(rng);
  };
  fill(p.Wa.W);
  fill(p.W0.W);
  for (auto& b : p.Wt) fill(b.W);
  return p;
}

FitResult fit(const Problem& problem, std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  const Hyper& hyper = problem.hyper;
  const std::size_t T = problem.ds.T();
  FitResult result{init_params(problem, seed), {}};
  ModelParams& params = result.params;
  TrainReport& report = result.report;
  ForwardCache cache = compute_forward(problem, params);

  // With backtracking on, a closed-form block is kept only if the total
  // objective does not rise (the ridge term can otherwise nudge it up).
  auto guarded = [&](Matrix& slot, Matrix candidate) {
    if (!hyper.backtrack) {
      slot = std::move(candidate);
      return;
    }
    const double before = objective(problem, params, cache).total;
    Matrix old = std::move(slot);
    slot = std::move(candidate);
    if (!(objective(problem, params, cache).total <= before)) slot = std::move(old);
  };

  for (std::size_t iter = 1; iter <= hyper.eta; ++iter) {
    const auto started = Clock::now();

    sweep_filters(problem, params, cache, Family::Attribute);
    sweep_filters(problem, params, cache, Family::Shared);
    for (std::size_t t = 0; t + 1 < T; ++t) sweep_filters(problem, params, cache, Family::Auxiliary, t);
    sweep_filters(problem, params, cache, Family::Target);
    check_finite(objective(problem, params, cache), iter);

    if (hyper.attributeHead) guarded(params.Ua, solve_Ua(problem, params, cache));
    guarded(params.U0, solve_U0(problem, params, cache));
    for (std::size_t t = 0; t < T; ++t) guarded(params.Ut[t], solve_Ut(problem, params, cache, t));
    guarded(params.Theta, solve_Theta(problem, cache));

    const ObjectiveBreakdown o = objective(problem, params, cache);
    check_finite(o, iter);
    report.objectiveTrace.push_back(o);
    report.iterations = iter;
    report.wallTimePerIter.push_back(std::chrono::duration<double>(Clock::now() - started).count());

    if (iter >= 2 && std::abs(o.total - report.objectiveTrace[iter - 2].total) <= hyper.eps) {
      report.converged = true;
      break;
    }
  }
  return result;
}

FitResult fit(const MultiDomainDataset& ds, const Hyper& hyper, std::uint64_t seed) {
  return fit(make_problem(ds, hyper), seed);
}

double evaluate(const DomainDataset& test, const ModelParams& params, std::size_t targetIdx) {
  if (test.points.empty()) fail(ErrorKind::Data, "evaluate: empty test set");
  std::size_t correct = 0;
  for (const auto& p : test.points) {
    if (!p.label) fail(ErrorKind::Data, "evaluate: test point without label");
    if (predict(p, targetIdx, params) == *p.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.points.size());
}

}  // namespace dtcae
