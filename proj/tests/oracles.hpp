#pragma once

// Independent reference implementations used as test oracles.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "spancorr/transformer.hpp"

namespace spancorr::oracle {

struct BestSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  double score = 0.0;
};

/// Scans every (s, e) pair; keeps the first strict improvement, which is
/// the earliest start and then the shortest span among ties.
inline std::optional<BestSpan> brute_force_best(std::span<const double> start,
                                                std::span<const double> end,
                                                std::span<const char> mask, std::size_t max_len) {
  std::optional<BestSpan> best;
  for (std::size_t s = 0; s < start.size(); ++s) {
    if (!mask[s]) continue;
    for (std::size_t e = s; e < end.size() && e - s + 1 <= max_len; ++e) {
      if (!mask[e]) continue;
      const double score = start[s] + end[e];
      if (!best || score > best->score) best = BestSpan{s, e, score};
    }
  }
  return best;
}

/// Count of valid (s, e) pairs.
inline std::size_t candidate_count(std::span<const char> mask, std::size_t max_len) {
  std::size_t n = 0;
  for (std::size_t s = 0; s < mask.size(); ++s) {
    for (std::size_t e = s; e < mask.size() && e - s + 1 <= max_len; ++e) {
      n += mask[s] && mask[e];
    }
  }
  return n;
}

/// Two-sided paired randomization p-value by enumerating all 2^n sign patterns.
inline double exhaustive_p(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double observed = 0.0;
  for (std::size_t i = 0; i < n; ++i) observed += a[i] - b[i];
  observed = std::abs(observed / static_cast<double>(n));
  std::uint64_t hits = 0;
  const std::uint64_t patterns = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = a[i] - b[i];
      t += (mask >> i & 1) ? -d : d;
    }
    if (std::abs(t / static_cast<double>(n)) >= observed - 1e-12) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(patterns);
}

struct GradientCheck {
  std::size_t sampled = 0;
  std::size_t agreed = 0;
  double worst_relative_error = 0.0;
};

/// Compares analytic gradients with central differences on `samples`
/// randomly chosen scalar parameters.
inline GradientCheck check_gradients(SpanModel& model, const EncodedInput& input,
                                     std::size_t start, std::size_t end, std::size_t samples,
                                     std::uint64_t seed, double tolerance = 1e-3) {
  Weights grad = model.weights().zeros_like();
  model.loss_and_gradient(input, start, end, grad, 1.0, nullptr);

  std::vector<Matrix*> params;
  std::vector<const Matrix*> grads;
  model.weights().visit([&](const std::string&, Matrix& m) { params.push_back(&m); });
  grad.visit([&](const std::string&, const Matrix& m) { grads.push_back(&m); });

  std::mt19937_64 rng(seed);
  GradientCheck out;
  const double h = 1e-5;
  while (out.sampled < samples) {
    const std::size_t t = rng() % params.size();
    Matrix& p = *params[t];
    const Eigen::Index r = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(p.rows()));
    const Eigen::Index c = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(p.cols()));
    const double analytic = (*grads[t])(r, c);
    const double saved = p(r, c);
    p(r, c) = saved + h;
    const double up = model.loss(input, start, end);
    p(r, c) = saved - h;
    const double down = model.loss(input, start, end);
    p(r, c) = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    const double diff = std::abs(analytic - numeric);
    const double rel = scale > 0 ? diff / scale : 0.0;
    ++out.sampled;
    // Gradients at round-off level carry no relative information.
    if (diff < 1e-9 || rel <= tolerance) {
      ++out.agreed;
    } else {
      out.worst_relative_error = std::max(out.worst_relative_error, rel);
    }
  }
  return out;
}

}  // namespace spancorr::oracle
