#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "dtcae/grad.hpp"

namespace dtcae {

struct GradCheckOptions {
  std::size_t instances = 20;
  double h = 1e-5;
  /// Minimum distance of every pre-activation from 0 and of every pooled
  /// maximum from its runner-up; instances closer than this are redrawn.
  double margin = 1e-3;
  /// Entries with |FD| at or below this are not compared.
  double floor = 1e-8;
};

struct GradCheckReport {
  /// Worst elementwise relative error per family, indexed by Family.
  std::array<double, 4> maxRelError{};
  std::size_t instances = 0;
  std::size_t comparedEntries = 0;
};

/// Tiny random problem: T=3, d=3, alpha=2, four filters per branch,
/// |a|=5, |y|=3, at most 6 points per domain, random weights C1..C3.
struct TinyInstance {
  Problem problem;
  ModelParams params;
};

TinyInstance random_tiny_instance(std::uint64_t seed, double margin);

/// Compares analytic and central-difference gradients for every filter of
/// every family over `instances` random tiny problems.
GradCheckReport run_gradcheck(std::uint64_t seed, const GradCheckOptions& options);

}  // namespace dtcae
