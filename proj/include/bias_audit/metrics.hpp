#pragma once

#include <cstdint>
#include <span>

#include "bias_audit/domain.hpp"

namespace bias_audit {

/// Counts with Biased as the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t n() const noexcept { return tp + fp + fn + tn; }
  std::uint64_t correct() const noexcept { return tp + tn; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct LabelPair {
  BiasLabel truth;
  BiasLabel predicted;
};

ConfusionMatrix confusion(std::span<const LabelPair> pairs) noexcept;

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t n = 0;
};

/// Precision, recall and F1 are 0 when their denominators vanish. Throws
/// EmptyRun when the matrix is empty.
MetricsReport compute_metrics(const ConfusionMatrix& cm);

struct ZTestResult {
  double z = 0.0;
  double p_two_sided = 1.0;
  std::uint64_t n1 = 0, x1 = 0, n2 = 0, x2 = 0;
};

/// Pooled two-proportion z-test of x2/n2 against x1/n1. A positive z means
/// the second proportion is larger. p is two-sided and clamped below at
/// 1e-300. Throws std::invalid_argument for counts out of range and
/// DegenerateProportions when the pooled proportion is 0 or 1.
ZTestResult two_proportion_z(std::uint64_t n1, std::uint64_t x1, std::uint64_t n2, std::uint64_t x2);

}  // namespace bias_audit
