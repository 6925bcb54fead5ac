#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace spancorr {

/// Aligned per-example scores of two systems.
struct PairedScores {
  std::vector<std::string> ids;
  std::vector<double> a;
  std::vector<double> b;

  /// Throws DataError on length mismatch, empty vectors or duplicate ids.
  void validate() const;
};

enum class RandomizationMethod { Exhaustive, MonteCarlo };

std::string_view to_string(RandomizationMethod m);

struct RandomizationOptions {
  std::size_t resamples = 10000;
  std::uint64_t seed = 0;
  /// Enumerate all 2^n swap patterns when n is at most this.
  std::size_t exhaustive_limit = 20;
};

struct RandomizationResult {
  std::size_t n = 0;
  /// mean(a) - mean(b)
  double statistic = 0.0;
  double p_value = 1.0;
  RandomizationMethod method = RandomizationMethod::Exhaustive;
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
};

/// Two-sided paired Fisher randomization test. Under the null each pair is
/// swapped with probability 1/2. The Monte Carlo estimate counts the observed
/// assignment, p = (hits + 1) / (resamples + 1), so p is never zero.
RandomizationResult fisher_randomization(const PairedScores& scores,
                                         const RandomizationOptions& options = {});

}  // namespace spancorr
