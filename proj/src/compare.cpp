#include "bias_audit/compare.hpp"

#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bias_audit/errors.hpp"

namespace bias_audit {

namespace {

struct Scored {
  BiasLabel truth;
  BiasLabel predicted;
};

std::map<StatementId, Scored> scored_by_id(const ResultsDocument& doc) {
  std::map<StatementId, Scored> out;
  for (const auto& r : doc.results.analyses) out[r.statement().id] = {r.statement().true_label, r.predicted_label()};
  for (const auto& r : doc.results.baselines) out[r.statement().id] = {r.statement().true_label, r.predicted_label()};
  return out;
}

RunSummary summarize_subset(const ResultsDocument& doc, std::string label, const std::map<StatementId, Scored>& all,
                            const std::set<StatementId>& keep) {
  std::vector<LabelPair> pairs;
  pairs.reserve(keep.size());
  for (auto id : keep) {
    const auto& s = all.at(id);
    pairs.push_back({s.truth, s.predicted});
  }
  RunSummary out;
  out.label = std::move(label);
  out.mode = doc.results.mode;
  out.confusion = confusion(pairs);
  out.metrics = compute_metrics(out.confusion);
  out.unscored = doc.results.failures.size() + (all.size() - keep.size());
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::string sci(double v) {
  std::ostringstream ss;
  ss << std::setprecision(4) << v;
  return ss.str();
}

}  // namespace

RunSummary summarize(const ResultsDocument& doc, std::string label) {
  const auto all = scored_by_id(doc);
  std::set<StatementId> keep;
  for (const auto& [id, _] : all) keep.insert(id);
  return summarize_subset(doc, std::move(label), all, keep);
}

Comparison compare_documents(const ResultsDocument& a, std::string label_a, const ResultsDocument& b,
                             std::string label_b) {
  const auto sa = scored_by_id(a);
  const auto sb = scored_by_id(b);
  std::set<StatementId> shared;
  for (const auto& [id, s] : sa) {
    auto it = sb.find(id);
    if (it == sb.end()) continue;
    if (it->second.truth != s.truth) {
      throw SchemaMismatch("runs disagree on the true label of statement " + std::to_string(id));
    }
    shared.insert(id);
  }
  if (shared.empty()) throw DisjointIds("the two runs share no scored statement ids");

  Comparison c;
  if (shared.size() != sa.size() || shared.size() != sb.size()) {
    c.warnings.push_back("scored id sets differ (" + std::to_string(sa.size()) + " vs " +
                         std::to_string(sb.size()) + "); comparing the " + std::to_string(shared.size()) +
                         " shared ids");
  }
  if (a.manifest.dataset_sha256 != b.manifest.dataset_sha256) {
    c.warnings.push_back("runs were produced from datasets with different digests");
  }
  c.a = summarize_subset(a, std::move(label_a), sa, shared);
  c.b = summarize_subset(b, std::move(label_b), sb, shared);
  try {
    c.z_test = two_proportion_z(c.a.confusion.n(), c.a.confusion.correct(), c.b.confusion.n(), c.b.confusion.correct());
  } catch (const DegenerateProportions& e) {
    c.warnings.push_back(std::string("z-test skipped: ") + e.what());
  }
  return c;
}

std::string run_label(const ResultsDocument& doc, const std::filesystem::path& path) {
  return std::string(to_string(doc.manifest.mode)) + " (" + path.stem().string() + ")";
}

Comparison compare_runs(const std::filesystem::path& a, const std::filesystem::path& b) {
  const auto da = read_results(a);
  const auto db = read_results(b);
  return compare_documents(da, run_label(da, a), db, run_label(db, b));
}

std::string render_table(const std::vector<RunSummary>& runs, const std::optional<ZTestResult>& z_test,
                         const std::vector<std::string>& warnings) {
  std::size_t width = 6;
  for (const auto& r : runs) width = std::max(width, r.label.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "Method" << std::right << std::setw(10) << "Accuracy"
      << std::setw(11) << "Precision" << std::setw(8) << "Recall" << std::setw(10) << "F1 Score" << std::setw(8)
      << "N" << std::setw(10) << "Unscored" << "\n";
  for (const auto& r : runs) {
    out << std::left << std::setw(static_cast<int>(width)) << r.label << std::right << std::setw(10)
        << fixed(r.metrics.accuracy, 3) << std::setw(11) << fixed(r.metrics.precision, 3) << std::setw(8)
        << fixed(r.metrics.recall, 3) << std::setw(10) << fixed(r.metrics.f1, 3) << std::setw(8) << r.metrics.n
        << std::setw(10) << r.unscored << "\n";
  }
  if (z_test) {
    out << "\nTwo-proportion z-test (accuracy): z = " << fixed(z_test->z, 3) << ", p = " << sci(z_test->p_two_sided)
        << " (two-sided), " << z_test->x1 << "/" << z_test->n1 << " vs " << z_test->x2 << "/" << z_test->n2 << "\n";
  }
  for (const auto& r : runs) {
    const auto& cm = r.confusion;
    out << "\nConfusion matrix: " << r.label << "\n"
        << std::left << std::setw(16) << "" << std::right << std::setw(14) << "pred biased" << std::setw(16)
        << "pred unbiased" << "\n"
        << std::left << std::setw(16) << "true biased" << std::right << std::setw(14) << cm.tp << std::setw(16)
        << cm.fn << "\n"
        << std::left << std::setw(16) << "true unbiased" << std::right << std::setw(14) << cm.fp << std::setw(16)
        << cm.tn << "\n";
  }
  for (const auto& w : warnings) out << "\nwarning: " << w << "\n";
  return out.str();
}

std::string render_table(const Comparison& c) { return render_table({c.a, c.b}, c.z_test, c.warnings); }

std::string render_json(const std::vector<RunSummary>& runs, const std::optional<ZTestResult>& z_test,
                        const std::vector<std::string>& warnings) {
  using ojson = nlohmann::ordered_json;
  ojson j;
  ojson arr = ojson::array();
  for (const auto& r : runs) {
    arr.push_back({{"label", r.label},
                   {"mode", to_string(r.mode)},
                   {"n", r.metrics.n},
                   {"unscored", r.unscored},
                   {"confusion", {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}, {"tn", r.confusion.tn}}},
                   {"metrics",
                    {{"accuracy", r.metrics.accuracy},
                     {"precision", r.metrics.precision},
                     {"recall", r.metrics.recall},
                     {"f1", r.metrics.f1}}}});
  }
  j["runs"] = std::move(arr);
  if (z_test) {
    j["z_test"] = {{"z", z_test->z}, {"p_two_sided", z_test->p_two_sided}, {"n1", z_test->n1},
                   {"x1", z_test->x1}, {"n2", z_test->n2},           {"x2", z_test->x2}};
  } else {
    j["z_test"] = nullptr;
  }
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << ",predicted_biased,predicted_unbiased\n"
      << "true_biased," << cm.tp << "," << cm.fn << "\n"
      << "true_unbiased," << cm.fp << "," << cm.tn << "\n";
  return out.str();
}

}  // namespace bias_audit
