#include "spancorr/significance.hpp"

#include <cmath>
#include <unordered_set>

#include "spancorr/error.hpp"
#include "spancorr/rng.hpp"

namespace spancorr {
namespace {

// Relative slack so that |T'| == |T| survives summation-order rounding.
constexpr double kTieTolerance = 1e-9;

}  // namespace

void PairedScores::validate() const {
  if (a.empty() || b.empty()) throw DataError("paired scores are empty");
  if (a.size() != b.size()) throw DataError("paired score vectors differ in length");
  if (!ids.empty()) {
    if (ids.size() != a.size()) throw DataError("paired score ids misaligned with scores");
    std::unordered_set<std::string> seen(ids.begin(), ids.end());
    if (seen.size() != ids.size()) throw DataError("duplicate id in paired scores");
  }
}

std::string_view to_string(RandomizationMethod m) {
  return m == RandomizationMethod::Exhaustive ? "exhaustive" : "monte_carlo";
}

RandomizationResult fisher_randomization(const PairedScores& scores,
                                         const RandomizationOptions& options) {
  scores.validate();
  if (options.resamples == 0) throw ConfigError("resamples must be at least 1");
  const std::size_t n = scores.a.size();
  std::vector<double> diffs;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = scores.a[i] - scores.b[i];
    total += d;
    // Pairs with equal scores are unchanged by a swap.
    if (d != 0.0) diffs.push_back(d);
  }
  RandomizationResult result;
  result.n = n;
  result.statistic = total / static_cast<double>(n);
  result.seed = options.seed;
  const double observed = std::abs(total);
  const double threshold = observed - kTieTolerance * std::max(1.0, observed);

  if (n <= options.exhaustive_limit) {
    result.method = RandomizationMethod::Exhaustive;
    const std::size_t m = diffs.size();
    const std::uint64_t patterns = std::uint64_t{1} << m;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      double sum = 0.0;
      for (std::size_t i = 0; i < m; ++i) sum += (mask >> i & 1U) ? -diffs[i] : diffs[i];
      if (std::abs(sum) >= threshold) ++hits;
    }
    result.resamples = static_cast<std::size_t>(patterns);
    result.p_value = static_cast<double>(hits) / static_cast<double>(patterns);
    return result;
  }

  result.method = RandomizationMethod::MonteCarlo;
  result.resamples = options.resamples;
  std::uint64_t hits = 0;
  for (std::size_t r = 0; r < options.resamples; ++r) {
    Rng rng(derive_seed(options.seed, {r}));
    double sum = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      if (i % 64 == 0) bits = rng();
      sum += (bits & 1U) ? -diffs[i] : diffs[i];
      bits >>= 1;
    }
    if (std::abs(sum) >= threshold) ++hits;
  }
  result.p_value = static_cast<double>(hits + 1) / static_cast<double>(options.resamples + 1);
  return result;
}

}  // namespace spancorr
