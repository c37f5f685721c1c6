#include "bias_audit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bias_audit/errors.hpp"
#include "bias_audit/normal.hpp"

namespace bias_audit {

ConfusionMatrix confusion(std::span<const LabelPair> pairs) noexcept {
  ConfusionMatrix cm;
  for (const auto& [truth, predicted] : pairs) {
    const bool t = truth == BiasLabel::Biased;
    const bool p = predicted == BiasLabel::Biased;
    if (t && p) ++cm.tp;
    else if (!t && p) ++cm.fp;
    else if (t && !p) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

namespace {
double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  const auto n = cm.n();
  if (n == 0) throw EmptyRun("no scored statements");
  MetricsReport r;
  r.n = n;
  r.accuracy = ratio(cm.tp + cm.tn, n);
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.recall = ratio(cm.tp, cm.tp + cm.fn);
  const double sum = r.precision + r.recall;
  r.f1 = sum == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / sum;
  return r;
}

ZTestResult two_proportion_z(std::uint64_t n1, std::uint64_t x1, std::uint64_t n2, std::uint64_t x2) {
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("two_proportion_z: sample sizes must be positive");
  if (x1 > n1 || x2 > n2) throw std::invalid_argument("two_proportion_z: successes exceed sample size");
  const double p1 = static_cast<double>(x1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(x2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
  if (x1 + x2 == 0 || x1 + x2 == n1 + n2) {
    throw DegenerateProportions("pooled proportion is " + std::to_string(pooled) + "; z is undefined");
  }
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  ZTestResult r;
  r.n1 = n1;
  r.x1 = x1;
  r.n2 = n2;
  r.x2 = x2;
  r.z = (p2 - p1) / se;
  r.p_two_sided = std::clamp(normal_two_sided_p(r.z), 1e-300, 1.0);
  return r;
}

}  // namespace bias_audit
