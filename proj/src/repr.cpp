#include "dtcae/repr.hpp"

#include <algorithm>
#include <string>

#include "dtcae/errors.hpp"

namespace dtcae {

ModelParams zero_params(std::size_t T, std::size_t d, std::size_t alpha, std::size_t numAttributes,
                        std::size_t numClasses, std::size_t ma, std::size_t m0, std::size_t mt) {
  const std::size_t rows = alpha * d;
  ModelParams p;
  p.alpha = alpha;
  p.Wa.W = Matrix(rows, ma);
  p.W0.W = Matrix(rows, m0);
  p.Wt.assign(T, BranchParams{Matrix(rows, mt)});
  p.Ua = Matrix(ma, numClasses);
  p.U0 = Matrix(m0, numClasses);
  p.Ut.assign(T, Matrix(mt, numClasses));
  p.Theta = Matrix(numAttributes, ma);
  return p;
}

WindowedInput slide_window(const InstanceSet& x, std::size_t alpha) {
  if (alpha == 0) fail(ErrorKind::Window, "window length must be positive");
  if (x.n() < alpha) {
    fail(ErrorKind::Window, "instance set of size " + std::to_string(x.n()) +
                                " is shorter than window " + std::to_string(alpha));
  }
  const std::size_t d = x.d();
  const std::size_t w = x.n() - alpha + 1;
  Matrix Z(alpha * d, w);
  for (std::size_t j = 0; j < w; ++j)
    for (std::size_t s = 0; s < alpha; ++s)
      for (std::size_t r = 0; r < d; ++r) Z(s * d + r, j) = x.instances(r, j + s);
  return WindowedInput{std::move(Z)};
}

FilterResponse conv_pool_filter(const BranchParams& W, std::size_t k, const WindowedInput& Z) {
  FilterResponse best;
  for (std::size_t j = 0; j < Z.w(); ++j) {
    double pre = 0.0;
    for (std::size_t r = 0; r < Z.Z.rows(); ++r) pre += W.W(r, k) * Z.Z(r, j);
    if (j == 0 || pre > best.preact) {
      best.preact = pre;
      best.argmax = j;
    }
  }
  best.out = std::max(0.0, best.preact);
  return best;
}

BranchOutput conv_pool(const BranchParams& W, const WindowedInput& Z) {
  if (W.W.rows() != Z.Z.rows()) {
    fail(ErrorKind::Shape, "conv_pool: filter length " + std::to_string(W.W.rows()) +
                               " vs window length " + std::to_string(Z.Z.rows()));
  }
  if (Z.w() == 0) fail(ErrorKind::Window, "conv_pool: no windows");
  const std::size_t m = W.filters();
  BranchOutput o;
  o.out.resize(m);
  o.trace.argmax.resize(m);
  o.trace.preact.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const FilterResponse r = conv_pool_filter(W, k, Z);
    o.out[k] = r.out;
    o.trace.argmax[k] = r.argmax;
    o.trace.preact[k] = r.preact;
  }
  return o;
}

Representation represent(const WindowedInput& Z, std::size_t t, const ModelParams& params) {
  if (t >= params.T()) fail(ErrorKind::Shape, "domain index out of range");
  return Representation{conv_pool(params.W0, Z), conv_pool(params.Wt[t], Z), conv_pool(params.Wa, Z)};
}

std::vector<double> full_rep(const DataPoint& point, std::size_t t, const ModelParams& params) {
  const Representation rep = represent(slide_window(point.x, params.alpha), t, params);
  std::vector<double> f;
  f.reserve(rep.f0.out.size() + rep.ft.out.size() + rep.fa.out.size());
  f.insert(f.end(), rep.f0.out.begin(), rep.f0.out.end());
  f.insert(f.end(), rep.ft.out.begin(), rep.ft.out.end());
  f.insert(f.end(), rep.fa.out.begin(), rep.fa.out.end());
  return f;
}

std::vector<double> score(const Representation& rep, std::size_t t, const ModelParams& params) {
  std::vector<double> h = transposed_times(params.U0, rep.f0.out);
  const std::vector<double> ht = transposed_times(params.Ut.at(t), rep.ft.out);
  const std::vector<double> ha = transposed_times(params.Ua, rep.fa.out);
  if (ht.size() != h.size() || ha.size() != h.size()) fail(ErrorKind::Shape, "score: head widths differ");
  for (std::size_t c = 0; c < h.size(); ++c) h[c] += ht[c] + ha[c];
  return h;
}

std::vector<double> score(const DataPoint& point, std::size_t t, const ModelParams& params) {
  return score(represent(slide_window(point.x, params.alpha), t, params), t, params);
}

std::size_t argmax_index(const std::vector<double>& v) {
  if (v.empty()) fail(ErrorKind::Shape, "argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

std::size_t predict(const DataPoint& point, std::size_t t, const ModelParams& params) {
  return argmax_index(score(point, t, params));
}

}  // namespace dtcae
