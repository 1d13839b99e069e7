#pragma once

#include "modrec/bench/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace modrec::bench {

/// Statistics of one (method, sweep value) group.
struct SummaryRow {
  Method method = Method::fsr;
  SweepVariable sweep_var = SweepVariable::snr;
  double sweep_value = 0.0;
  std::size_t count = 0;
  double mean_nmse = 0.0;
  double median_nmse = 0.0;
  double std_nmse = 0.0;     // sample standard deviation, 0 for a single trial
  double mean_nmse_db = 0.0; // 10 log10(mean_nmse)
  double median_nmse_db = 0.0;
  double exact_rate = 0.0;
  double mean_runtime_ms = 0.0;
};

inline double median_of(std::vector<double> v) {
  detail::require(!v.empty(), "median_of: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double sweep_value_of(const TrialRecord& r, SweepVariable variable) {
  return variable == SweepVariable::snr ? r.snr_db : r.of;
}

/// Groups by (method, sweep value) in order of first appearance.
inline std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records, SweepVariable variable) {
  detail::require(!records.empty(), "summarize: no records");

  struct Group {
    Method method;
    double value;
    std::vector<const TrialRecord*> members;
  };
  std::vector<Group> groups;
  for (const auto& r : records) {
    const double value = sweep_value_of(r, variable);
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.method == r.method && g.value == value; });
    if (it == groups.end()) {
      groups.push_back({r.method, value, {}});
      it = std::prev(groups.end());
    }
    it->members.push_back(&r);
  }

  std::vector<SummaryRow> rows;
  for (const auto& g : groups) {
    std::vector<double> errors;
    double runtime = 0.0;
    std::size_t exact = 0;
    for (const TrialRecord* r : g.members) {
      errors.push_back(r->nmse);
      runtime += r->runtime_ms;
      exact += r->exact_recovery ? 1 : 0;
    }
    const double n = static_cast<double>(errors.size());
    SummaryRow row;
    row.method = g.method;
    row.sweep_var = variable;
    row.sweep_value = g.value;
    row.count = errors.size();
    row.mean_nmse = std::accumulate(errors.begin(), errors.end(), 0.0) / n;
    row.median_nmse = median_of(errors);
    if (errors.size() > 1) {
      double ss = 0.0;
      for (double e : errors) ss += (e - row.mean_nmse) * (e - row.mean_nmse);
      row.std_nmse = std::sqrt(ss / (n - 1.0));
    }
    row.mean_nmse_db = to_db(row.mean_nmse);
    row.median_nmse_db = to_db(row.median_nmse);
    row.exact_rate = static_cast<double>(exact) / n;
    row.mean_runtime_ms = runtime / n;
    rows.push_back(row);
  }
  return rows;
}

/// Rows of one method, in sweep order.
inline std::vector<SummaryRow> rows_for(const std::vector<SummaryRow>& rows, Method method) {
  std::vector<SummaryRow> out;
  std::copy_if(rows.begin(), rows.end(), std::back_inserter(out), [&](const SummaryRow& r) { return r.method == method; });
  return out;
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  detail::require_same_length(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()), "spearman");
  detail::require(x.size() >= 2, "spearman: need at least two points");
  const auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace modrec::bench
