#include "dtcae/data.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "dtcae/errors.hpp"
#include "json.hpp"

namespace dtcae {

using nlohmann::json;

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::size_t read_count(const json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key) || !obj[key].is_number_integer() || obj[key].get<long long>() < 0) {
    fail(ErrorKind::Parse, at_line(line) + "header field '" + key + "' must be a nonnegative integer");
  }
  return obj[key].get<std::size_t>();
}

DataPoint parse_point(const json& obj, const MultiDomainDataset& ds, std::size_t line,
                      std::size_t& domain) {
  if (!obj.is_object()) fail(ErrorKind::Parse, at_line(line) + "expected an object");
  for (const char* key : {"domain", "instances", "attributes"}) {
    if (!obj.contains(key)) fail(ErrorKind::Parse, at_line(line) + "missing '" + key + "'");
  }
  if (!obj["domain"].is_number_integer()) fail(ErrorKind::Parse, at_line(line) + "domain must be an integer");
  const long long dom = obj["domain"].get<long long>();
  if (dom < 0 || static_cast<std::size_t>(dom) >= ds.T()) {
    fail(ErrorKind::Schema, at_line(line) + "domain " + std::to_string(dom) + " out of range");
  }
  domain = static_cast<std::size_t>(dom);

  const json& cols = obj["instances"];
  if (!cols.is_array() || cols.empty()) {
    fail(ErrorKind::Validation, at_line(line) + "instances must be a nonempty list of columns");
  }
  const std::size_t n = cols.size();
  Matrix x(ds.d, n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!cols[j].is_array()) fail(ErrorKind::Parse, at_line(line) + "instance column must be a list");
    if (cols[j].size() != ds.d) {
      fail(ErrorKind::Schema, at_line(line) + "instance has length " + std::to_string(cols[j].size()) +
                                  ", header d=" + std::to_string(ds.d));
    }
    for (std::size_t r = 0; r < ds.d; ++r) {
      if (!cols[j][r].is_number()) fail(ErrorKind::Parse, at_line(line) + "instance entries must be numbers");
      const double v = cols[j][r].get<double>();
      if (!std::isfinite(v)) fail(ErrorKind::Validation, at_line(line) + "non-finite instance entry");
      x(r, j) = v;
    }
  }

  const json& attrs = obj["attributes"];
  if (!attrs.is_array()) fail(ErrorKind::Parse, at_line(line) + "attributes must be a list");
  if (attrs.size() != ds.numAttributes) {
    fail(ErrorKind::Schema, at_line(line) + "expected " + std::to_string(ds.numAttributes) + " attributes");
  }
  DataPoint p{InstanceSet{std::move(x)}, {}, std::nullopt};
  p.attributes.reserve(attrs.size());
  for (const auto& a : attrs) {
    if (!a.is_number_integer()) fail(ErrorKind::Parse, at_line(line) + "attributes must be integers");
    const long long v = a.get<long long>();
    if (v != 0 && v != 1) fail(ErrorKind::Validation, at_line(line) + "attribute value must be 0 or 1");
    p.attributes.push_back(static_cast<std::uint8_t>(v));
  }

  if (obj.contains("label") && !obj["label"].is_null()) {
    if (!obj["label"].is_number_integer()) fail(ErrorKind::Parse, at_line(line) + "label must be an integer or null");
    const long long y = obj["label"].get<long long>();
    if (y < 0 || static_cast<std::size_t>(y) >= ds.numClasses) {
      fail(ErrorKind::Validation, at_line(line) + "label out of range");
    }
    p.label = static_cast<std::size_t>(y);
  }
  return p;
}

}  // namespace

std::size_t labeled_prefix(const std::vector<DataPoint>& points) {
  std::size_t l = 0;
  while (l < points.size() && points[l].label.has_value()) ++l;
  return l;
}

void validate(const MultiDomainDataset& ds) {
  if (ds.T() < 2) fail(ErrorKind::Validation, "dataset needs at least 2 domains");
  if (ds.targetIndex != ds.T() - 1) fail(ErrorKind::Validation, "target domain must be the last domain");
  if (ds.d == 0 || ds.numAttributes == 0 || ds.numClasses == 0) {
    fail(ErrorKind::Validation, "d, numAttributes and numClasses must be positive");
  }
  for (std::size_t t = 0; t < ds.T(); ++t) {
    const auto& dom = ds.domains[t];
    const std::string where = "domain " + std::to_string(t) + ": ";
    if (dom.points.empty()) fail(ErrorKind::Validation, where + "no points");
    for (const auto& p : dom.points) {
      if (p.x.d() != ds.d) fail(ErrorKind::Schema, where + "instance dimension mismatch");
      if (p.x.n() == 0) fail(ErrorKind::Validation, where + "empty instance set");
      if (p.attributes.size() != ds.numAttributes) fail(ErrorKind::Schema, where + "attribute length mismatch");
      for (auto a : p.attributes) {
        if (a > 1) fail(ErrorKind::Validation, where + "attribute value must be 0 or 1");
      }
      if (p.label && *p.label >= ds.numClasses) fail(ErrorKind::Validation, where + "label out of range");
    }
    const std::size_t prefix = labeled_prefix(dom.points);
    if (dom.labeledCount > prefix) fail(ErrorKind::Validation, where + "labeledCount exceeds labeled prefix");
    if (t != ds.targetIndex && (prefix != dom.size() || dom.labeledCount != dom.size())) {
      fail(ErrorKind::Validation, where + "auxiliary domains must be fully labeled");
    }
  }
}

MultiDomainDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open dataset " + path.string());

  MultiDomainDataset ds;
  std::string text;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::Parse, at_line(line) + e.what());
    }
    if (!have_header) {
      if (!obj.is_object()) fail(ErrorKind::Parse, at_line(line) + "header must be an object");
      if (read_count(obj, "version", line) != 1) fail(ErrorKind::Schema, at_line(line) + "unsupported version");
      const std::size_t T = read_count(obj, "T", line);
      ds.d = read_count(obj, "d", line);
      ds.numAttributes = read_count(obj, "numAttributes", line);
      ds.numClasses = read_count(obj, "numClasses", line);
      ds.targetIndex = read_count(obj, "targetIndex", line);
      if (T < 2) fail(ErrorKind::Schema, at_line(line) + "T must be at least 2");
      if (ds.targetIndex != T - 1) fail(ErrorKind::Schema, at_line(line) + "targetIndex must be T-1");
      ds.domains.resize(T);
      have_header = true;
      continue;
    }
    std::size_t domain = 0;
    DataPoint p = parse_point(obj, ds, line, domain);
    if (domain != ds.targetIndex && !p.label) {
      fail(ErrorKind::Validation, at_line(line) + "auxiliary point without label");
    }
    ds.domains[domain].points.push_back(std::move(p));
  }
  if (!have_header) fail(ErrorKind::Parse, "dataset " + path.string() + " is empty");
  for (auto& dom : ds.domains) dom.labeledCount = labeled_prefix(dom.points);
  validate(ds);
  return ds;
}

void save_dataset(const MultiDomainDataset& ds, const std::filesystem::path& path) {
  validate(ds);
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write dataset " + path.string());
  json header = {{"version", 1},          {"T", ds.T()},
                 {"d", ds.d},             {"numAttributes", ds.numAttributes},
                 {"numClasses", ds.numClasses}, {"targetIndex", ds.targetIndex}};
  out << header.dump() << '\n';
  for (std::size_t t = 0; t < ds.T(); ++t) {
    for (const auto& p : ds.domains[t].points) {
      json cols = json::array();
      for (std::size_t j = 0; j < p.x.n(); ++j) cols.push_back(p.x.instances.col(j));
      json attrs = json::array();
      for (auto a : p.attributes) attrs.push_back(static_cast<int>(a));
      json rec = {{"domain", t}, {"instances", std::move(cols)}, {"attributes", std::move(attrs)}};
      rec["label"] = p.label ? json(*p.label) : json(nullptr);
      out << rec.dump() << '\n';
    }
  }
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TargetSplit split_target(const MultiDomainDataset& ds, const SplitSpec& spec) {
  validate(ds);
  const DomainDataset& target = ds.target();
  const std::size_t n = target.size();
  if (n < 4) fail(ErrorKind::Size, "split_target: target domain needs at least 4 points, has " + std::to_string(n));
  for (const auto& p : target.points) {
    if (!p.label) fail(ErrorKind::Validation, "split_target: every target point needs a label");
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(spec.seed);
  shuffle_in_place(order, rng);

  const std::size_t trainSize = n - n / 2;
  const std::size_t labeled = trainSize - trainSize / 2;

  TargetSplit split;
  split.train = ds;
  DomainDataset& train = split.train.domains[ds.targetIndex];
  train.points.clear();
  for (std::size_t i = 0; i < trainSize; ++i) {
    DataPoint p = target.points[order[i]];
    if (i >= labeled) {
      split.hiddenLabels.push_back(*p.label);
      p.label.reset();
    }
    train.points.push_back(std::move(p));
  }
  train.labeledCount = labeled;

  for (std::size_t i = trainSize; i < n; ++i) split.test.points.push_back(target.points[order[i]]);
  split.test.labeledCount = split.test.points.size();
  return split;
}

MultiDomainDataset with_target(const MultiDomainDataset& ds, std::size_t t) {
  if (t >= ds.T()) fail(ErrorKind::Config, "target domain " + std::to_string(t) + " out of range");
  MultiDomainDataset out = ds;
  out.domains.clear();
  for (std::size_t s = 0; s < ds.T(); ++s) {
    if (s != t) out.domains.push_back(ds.domains[s]);
  }
  out.domains.push_back(ds.domains[t]);
  for (std::size_t s = 0; s + 1 < out.T(); ++s) {
    auto& dom = out.domains[s];
    if (labeled_prefix(dom.points) != dom.size()) {
      fail(ErrorKind::Validation, "with_target: auxiliary domains must be fully labeled");
    }
    dom.labeledCount = dom.size();
  }
  out.targetIndex = out.T() - 1;
  out.domains.back().labeledCount = labeled_prefix(out.domains.back().points);
  return out;
}

void validate(const SynthConfig& cfg) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::Config, "synth: " + msg);
  };
  require(cfg.T >= 2, "T must be at least 2");
  require(cfg.numClasses >= 1 && cfg.perDomain >= 1 && cfg.d >= 1 && cfg.numAttributes >= 1,
          "counts must be positive");
  require(cfg.alpha >= 1, "alpha must be positive");
  require(cfg.minInstances >= cfg.alpha, "minInstances must be at least alpha");
  require(cfg.maxInstances >= cfg.minInstances, "maxInstances must be at least minInstances");
  require(cfg.numAttributes >= 63 || (std::uint64_t{1} << cfg.numAttributes) >= cfg.numClasses,
          "too few attributes to give each class a distinct code");
  require(cfg.noise >= 0.0 && cfg.domainShift >= 0.0, "noise and domainShift must be nonnegative");
}

MultiDomainDataset synth_generate(const SynthConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Matrix> motifs;
  for (std::size_t c = 0; c < cfg.numClasses; ++c) {
    Matrix m(cfg.d, cfg.alpha);
    for (double& v : m.data()) v = 2.0 * normal(rng);
    motifs.push_back(std::move(m));
  }

  std::set<std::vector<std::uint8_t>> used;
  std::vector<std::vector<std::uint8_t>> codes;
  std::bernoulli_distribution coin(0.5);
  while (codes.size() < cfg.numClasses) {
    std::vector<std::uint8_t> code(cfg.numAttributes);
    for (auto& a : code) a = coin(rng) ? 1 : 0;
    if (used.insert(code).second) codes.push_back(std::move(code));
  }

  MultiDomainDataset ds;
  ds.d = cfg.d;
  ds.numAttributes = cfg.numAttributes;
  ds.numClasses = cfg.numClasses;
  ds.targetIndex = cfg.T - 1;
  std::uniform_int_distribution<std::size_t> count(cfg.minInstances, cfg.maxInstances);

  for (std::size_t t = 0; t < cfg.T; ++t) {
    Matrix lin = Matrix::identity(cfg.d);
    std::vector<double> shift(cfg.d);
    for (double& v : lin.data()) v += 0.3 * cfg.domainShift * normal(rng);
    for (double& v : shift) v = cfg.domainShift * normal(rng);

    DomainDataset dom;
    for (std::size_t i = 0; i < cfg.perDomain; ++i) {
      const std::size_t c = i % cfg.numClasses;
      const std::size_t n = count(rng);
      Matrix raw(cfg.d, n);
      for (double& v : raw.data()) v = cfg.noise * normal(rng);
      std::uniform_int_distribution<std::size_t> offset(0, n - cfg.alpha);
      const std::size_t at = offset(rng);
      for (std::size_t j = 0; j < cfg.alpha; ++j)
        for (std::size_t r = 0; r < cfg.d; ++r) raw(r, at + j) += motifs[c](r, j);

      Matrix x = matmul(lin, raw);
      for (std::size_t r = 0; r < cfg.d; ++r)
        for (std::size_t j = 0; j < n; ++j) x(r, j) += shift[r];
      dom.points.push_back(DataPoint{InstanceSet{std::move(x)}, codes[c], c});
    }
    dom.labeledCount = dom.size();
    ds.domains.push_back(std::move(dom));
  }
  return ds;
}

std::vector<double> one_hot(std::size_t label, std::size_t numClasses) {
  std::vector<double> y(numClasses, 0.0);
  y.at(label) = 1.0;
  return y;
}

}  // namespace dtcae
