// Copyright 2026 The patsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference computations written without the library, for cross-checks.

#ifndef PATSIM_TESTS_ORACLES_H_
#define PATSIM_TESTS_ORACLES_H_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace patsim::oracle {

using Mat = std::vector<std::vector<double>>;

inline Mat HatByHand(const std::vector<double>& v) {
  const std::size_t n = v.size();
  Mat m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = v[i] - v[j];
  }
  return m;
}

inline Mat MatMul(const Mat& a, const Mat& b) {
  const std::size_t n = a.size();
  Mat c(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  }
  return c;
}

inline Mat Commutator(const Mat& a, const Mat& b) {
  Mat ab = MatMul(a, b);
  Mat ba = MatMul(b, a);
  for (std::size_t i = 0; i < ab.size(); ++i) {
    for (std::size_t j = 0; j < ab.size(); ++j) ab[i][j] -= ba[i][j];
  }
  return ab;
}

inline double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double CosOrZero(const std::vector<double>& a, const std::vector<double>& b) {
  double na = std::sqrt(Dot(a, a));
  double nb = std::sqrt(Dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return Dot(a, b) / (na * nb);
}

inline std::vector<double> RowNormsByHand(const Mat& m) {
  std::vector<double> out;
  for (const auto& row : m) out.push_back(std::sqrt(Dot(row, row)));
  return out;
}

// Top-2 principal axes of centered rows by power iteration with deflation,
// then projection. Signs follow the largest-magnitude loading.
inline std::vector<std::pair<double, double>> PcaByPowerIteration(const Mat& rows) {
  const std::size_t n = rows.size();
  const std::size_t d = rows.empty() ? 0 : rows[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / static_cast<double>(n);
  }
  Mat x = rows;
  for (auto& r : x) {
    for (std::size_t j = 0; j < d; ++j) r[j] -= mean[j];
  }
  Mat cov(d, std::vector<double>(d, 0.0));
  for (const auto& r : x) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) cov[i][j] += r[i] * r[j];
    }
  }
  double scale = 0.0;
  for (std::size_t i = 0; i < d; ++i) scale += cov[i][i];
  std::vector<std::vector<double>> axes;
  for (int k = 0; k < 2; ++k) {
    std::vector<double> v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = 1.0 + 0.1 * static_cast<double>(j);
    double lambda = 0.0;
    for (int it = 0; it < 5000; ++it) {
      std::vector<double> w(d, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) w[i] += cov[i][j] * v[j];
      }
      double norm = std::sqrt(Dot(w, w));
      if (norm == 0.0) break;
      for (auto& e : w) e /= norm;
      lambda = norm;
      v = w;
    }
    if (lambda <= 1e-10 * std::max(scale, 1e-300)) {
      axes.push_back(std::vector<double>(d, 0.0));
      continue;
    }
    std::size_t big = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (std::abs(v[j]) > std::abs(v[big]) + 1e-12) big = j;
    }
    if (v[big] < 0) {
      for (auto& e : v) e = -e;
    }
    axes.push_back(v);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) cov[i][j] -= lambda * v[i] * v[j];
    }
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& r : x) out.emplace_back(Dot(r, axes[0]), Dot(r, axes[1]));
  return out;
}

using Table = std::map<std::pair<std::string, std::string>, std::string>;

// P is kept iff no Q in S takes P*Q outside S.
inline std::set<std::string> AttractorsByDoubleLoop(const Table& table,
                                                    const std::set<std::string>& s) {
  std::set<std::string> out;
  for (const auto& p : s) {
    bool escapes = false;
    for (const auto& q : s) {
      auto it = table.find({p, q});
      if (it != table.end() && s.count(it->second) == 0) escapes = true;
    }
    if (!escapes) out.insert(p);
  }
  return out;
}

// Reachable set under composition and inversion, iterated until nothing
// changes.
inline std::set<std::string> ReachableFixpoint(const Table& table,
                                               const std::map<std::string, std::string>& inv,
                                               std::set<std::string> s) {
  while (true) {
    std::set<std::string> next = s;
    for (const auto& a : s) {
      for (const auto& b : s) {
        auto it = table.find({a, b});
        if (it != table.end()) next.insert(it->second);
      }
      auto jt = inv.find(a);
      if (jt != inv.end()) next.insert(jt->second);
    }
    if (next == s) return s;
    s = std::move(next);
  }
}

// Longest common subsequence by memoised recursion.
inline double LcsRatioByRecursion(std::string a, std::string b) {
  for (auto& c : a) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto& c : b) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (a.empty() && b.empty()) return 1.0;
  std::map<std::pair<std::size_t, std::size_t>, int> memo;
  std::function<int(std::size_t, std::size_t)> lcs = [&](std::size_t i, std::size_t j) -> int {
    if (i == a.size() || j == b.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int r = a[i] == b[j] ? 1 + lcs(i + 1, j + 1) : std::max(lcs(i + 1, j), lcs(i, j + 1));
    memo[key] = r;
    return r;
  };
  return 2.0 * lcs(0, 0) / static_cast<double>(a.size() + b.size());
}

}  // namespace patsim::oracle

#endif  // PATSIM_TESTS_ORACLES_H_
