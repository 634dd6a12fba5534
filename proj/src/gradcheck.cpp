#include "dtcae/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dtcae {

namespace {

constexpr std::size_t kT = 3, kD = 3, kAlpha = 2, kFilters = 4, kAttrs = 5, kClasses = 3;

MultiDomainDataset tiny_dataset(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> points(4, 6), sizes(kAlpha, 5), label(0, kClasses - 1);
  std::bernoulli_distribution coin(0.5);

  MultiDomainDataset ds;
  ds.d = kD;
  ds.numAttributes = kAttrs;
  ds.numClasses = kClasses;
  ds.targetIndex = kT - 1;
  for (std::size_t t = 0; t < kT; ++t) {
    DomainDataset dom;
    const std::size_t n = points(rng);
    std::uniform_int_distribution<std::size_t> labeled(1, n);
    const std::size_t l = t + 1 == kT ? labeled(rng) : n;
    for (std::size_t i = 0; i < n; ++i) {
      Matrix x(kD, sizes(rng));
      for (double& v : x.data()) v = normal(rng);
      std::vector<std::uint8_t> a(kAttrs);
      for (auto& b : a) b = coin(rng) ? 1 : 0;
      const std::size_t y = label(rng);
      dom.points.push_back(DataPoint{InstanceSet{std::move(x)}, std::move(a),
                                     i < l ? std::optional<std::size_t>(y) : std::nullopt});
    }
    dom.labeledCount = l;
    ds.domains.push_back(std::move(dom));
  }
  return ds;
}

double min_margin(const Problem& problem, const ModelParams& params) {
  double m = kink_margin(problem, params, Family::Attribute, 0, 0);
  for (std::size_t k = 0; k < kFilters; ++k) {
    m = std::min(m, kink_margin(problem, params, Family::Attribute, 0, k));
    m = std::min(m, kink_margin(problem, params, Family::Shared, 0, k));
    m = std::min(m, kink_margin(problem, params, Family::Target, 0, k));
    for (std::size_t t = 0; t + 1 < kT; ++t) m = std::min(m, kink_margin(problem, params, Family::Auxiliary, t, k));
  }
  return m;
}

}  // namespace

TinyInstance random_tiny_instance(std::uint64_t seed, double margin) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  for (;;) {
    Hyper hyper;
    hyper.alpha = kAlpha;
    hyper.ma = hyper.m0 = hyper.mt = kFilters;
    hyper.C1 = weight(rng);
    hyper.C2 = weight(rng);
    hyper.C3 = weight(rng);
    hyper.k = 2;
    Problem problem = make_problem(tiny_dataset(rng), hyper);

    ModelParams params = zero_params(kT, kD, kAlpha, kAttrs, kClasses, kFilters, kFilters, kFilters);
    auto fill = [&](Matrix& m, double scale) {
      for (double& v : m.data()) v = scale * normal(rng);
    };
    fill(params.Wa.W, 0.7);
    fill(params.W0.W, 0.7);
    for (auto& w : params.Wt) fill(w.W, 0.7);
    fill(params.Ua, 0.5);
    fill(params.U0, 0.5);
    for (auto& u : params.Ut) fill(u, 0.5);
    fill(params.Theta, 0.5);

    if (min_margin(problem, params) >= margin) return TinyInstance{std::move(problem), std::move(params)};
  }
}

GradCheckReport run_gradcheck(std::uint64_t seed, const GradCheckOptions& options) {
  GradCheckReport report;
  std::mt19937_64 seeds(seed);
  for (std::size_t n = 0; n < options.instances; ++n) {
    const TinyInstance inst = random_tiny_instance(seeds(), options.margin);
    const ForwardCache cache = compute_forward(inst.problem, inst.params);

    auto compare = [&](Family family, std::size_t t, std::size_t k) {
      const FilterGrad analytic = filter_gradient(inst.problem, inst.params, cache, cache, family, t, k);
      const FilterGrad numeric = fd_gradient(inst.problem, inst.params, family, t, k, options.h);
      double& worst = report.maxRelError[static_cast<std::size_t>(family)];
      for (std::size_t r = 0; r < numeric.values.size(); ++r) {
        const double fd = numeric.values[r];
        if (std::abs(fd) <= options.floor) continue;
        worst = std::max(worst, std::abs(analytic.values[r] - fd) / std::abs(fd));
        ++report.comparedEntries;
      }
    };
    for (std::size_t k = 0; k < kFilters; ++k) {
      compare(Family::Attribute, 0, k);
      compare(Family::Shared, 0, k);
      for (std::size_t t = 0; t + 1 < kT; ++t) compare(Family::Auxiliary, t, k);
      compare(Family::Target, 0, k);
    }
    ++report.instances;
  }
  return report;
}

}  // namespace dtcae
