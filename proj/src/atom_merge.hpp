#pragma once

// Internal helper shared by the channel and distribution translation units:
// deterministic merging of nearly-equal outcome values.

#include <algorithm>
#include <utility>
#include <vector>

namespace qwork::detail {

// Work values e_final[m] - e_initial[n] for all (m, n), grouped within
// 1e-8 * (max - min). Each group keeps the contributing index pairs.
struct MergedWorkValues {
  std::vector<double> values;
  std::vector<std::vector<std::pair<int, int>>> members; // (m, n) per group
  double merge_tol = 0.0;
};

inline MergedWorkValues merge_work_values(const std::vector<double>& e_initial,
                                          const std::vector<double>& e_final) {
  std::vector<std::pair<double, std::pair<int, int>>> raw;
  raw.reserve(e_final.size() * e_initial.size());
  for (size_t m = 0; m < e_final.size(); ++m) {
    for (size_t n = 0; n < e_initial.size(); ++n) {
      raw.push_back({e_final[m] - e_initial[n], {static_cast<int>(m), static_cast<int>(n)}});
    }
  }
  std::sort(raw.begin(), raw.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  MergedWorkValues out;
  out.merge_tol = 1e-8 * (raw.back().first - raw.front().first);
  size_t start = 0;
  while (start < raw.size()) {
    size_t stop = start + 1;
    while (stop < raw.size() && raw[stop].first - raw[stop - 1].first <= out.merge_tol) ++stop;
    double value = 0.0;
    std::vector<std::pair<int, int>> members;
    for (size_t i = start; i < stop; ++i) {
      value += raw[i].first;
      members.push_back(raw[i].second);
    }
    out.values.push_back(value / static_cast<double>(stop - start));
    out.members.push_back(std::move(members));
    start = stop;
  }
  return out;
}

// Sorts (position, weight) pairs and sums weights of positions closer than
// merge_tol (transitive closure, same rule as the spectral grouping).
inline std::vector<std::pair<double, double>> merge_weighted_atoms(
    std::vector<std::pair<double, double>> atoms, double merge_tol) {
  if (atoms.empty()) return atoms;
  std::sort(atoms.begin(), atoms.end());
  std::vector<std::pair<double, double>> out;
  size_t start = 0;
  while (start < atoms.size()) {
    size_t stop = start + 1;
    while (stop < atoms.size() && atoms[stop].first - atoms[stop - 1].first <= merge_tol) ++stop;
    double pos = 0.0, weight = 0.0;
    for (size_t i = start; i < stop; ++i) {
      pos += atoms[i].first;
      weight += atoms[i].second;
    }
    out.push_back({pos / static_cast<double>(stop - start), weight});
    start = stop;
  }
  return out;
}

} // namespace qwork::detail
