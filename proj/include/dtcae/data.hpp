#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "dtcae/linalg.hpp"

namespace dtcae {

/// One data point's instances: a d x n matrix, one instance per column.
struct InstanceSet {
  Matrix instances;

  std::size_t d() const noexcept { return instances.rows(); }
  std::size_t n() const noexcept { return instances.cols(); }

  bool operator==(const InstanceSet&) const = default;
};

struct DataPoint {
  InstanceSet x;
  std::vector<std::uint8_t> attributes;
  std::optional<std::size_t> label;

  bool operator==(const DataPoint&) const = default;
};

/// Points of one domain. The first `labeledCount` points carry labels.
struct DomainDataset {
  std::vector<DataPoint> points;
  std::size_t labeledCount = 0;

  std::size_t size() const noexcept { return points.size(); }
  bool operator==(const DomainDataset&) const = default;
};

/// T >= 2 domains; the target is always the last one.
struct MultiDomainDataset {
  std::vector<DomainDataset> domains;
  std::size_t targetIndex = 0;
  std::size_t d = 0;
  std::size_t numAttributes = 0;
  std::size_t numClasses = 0;

  std::size_t T() const noexcept { return domains.size(); }
  const DomainDataset& target() const { return domains.at(targetIndex); }
  bool operator==(const MultiDomainDataset&) const = default;
};

/// Checks every invariant of the dataset; throws Validation/Schema errors.
void validate(const MultiDomainDataset& ds);

/// Length of the labeled prefix of `points`.
std::size_t labeled_prefix(const std::vector<DataPoint>& points);

MultiDomainDataset load_dataset(const std::filesystem::path& path);
void save_dataset(const MultiDomainDataset& ds, const std::filesystem::path& path);

/// Deterministic 64-bit stream (splitmix64). Used for all shuffles so that
/// splits are reproducible independent of the standard library.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

/// In-place Fisher-Yates: for i = n-1 down to 1, swap(i, next() % (i+1)).
template <typename T>
void shuffle_in_place(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i-- > 1;) {
    const std::size_t j = static_cast<std::size_t>(rng.next() % (i + 1));
    std::swap(items[i], items[j]);
  }
}

struct SplitSpec {
  std::uint64_t seed = 0;
  static constexpr double trainFraction = 0.5;
  static constexpr double labeledFraction = 0.5;
};

struct TargetSplit {
  MultiDomainDataset train;
  DomainDataset test;
  /// True labels of the unlabeled train suffix, in train order. Never seen
  /// by the solver.
  std::vector<std::size_t> hiddenLabels;
};

/// Shuffles the target points, keeps ceil(n/2) for training (ceil of half of
/// those labeled) and the rest for testing. Auxiliary domains pass through.
TargetSplit split_target(const MultiDomainDataset& ds, const SplitSpec& spec);

/// Reorders domains so that domain `t` becomes the target (moved to the end).
MultiDomainDataset with_target(const MultiDomainDataset& ds, std::size_t t);

struct SynthConfig {
  std::size_t T = 3;
  std::size_t numClasses = 2;
  std::size_t perDomain = 40;
  std::size_t d = 4;
  std::size_t numAttributes = 6;
  std::size_t minInstances = 4;
  std::size_t maxInstances = 8;
  std::size_t alpha = 2;
  double noise = 1.0;
  double domainShift = 1.0;
  std::uint64_t seed = 1;
};

void validate(const SynthConfig& cfg);

/// Synthetic multi-domain instance-set data. Each class owns a motif of
/// `alpha` instances planted at a random offset in otherwise noisy sets;
/// each domain applies its own affine map to every instance; attributes are
/// a fixed binary code per class.
MultiDomainDataset synth_generate(const SynthConfig& cfg);

/// One-hot class vector of length `numClasses`.
std::vector<double> one_hot(std::size_t label, std::size_t numClasses);

}  // namespace dtcae
