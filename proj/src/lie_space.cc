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

#include "patsim/lie_space.h"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <optional>

namespace patsim {
namespace {

// Bracket row norms at or below this (relative to the operand scale) are
// treated as an exactly commuting pair.
constexpr double kCommuteTolerance = 1e-12;

// Relative cut-off below which a principal direction carries no variance.
constexpr double kRankTolerance = 1e-10;

PatternVector Sum(const PatternVector& a, const PatternVector& b) {
  PatternVector out{};
  for (std::size_t d = 0; d < kDims; ++d) out[d] = a[d] + b[d];
  return out;
}

}  // namespace

bool SkewMatrix::IsExactlySkew() const {
  for (std::size_t i = 0; i < kDims; ++i) {
    for (std::size_t j = 0; j < kDims; ++j) {
      if (entries[i][j] + entries[j][i] != 0.0) return false;
    }
  }
  return true;
}

double SkewMatrix::FrobeniusNorm() const {
  double sum = 0.0;
  for (const auto& row : entries) {
    for (double x : row) sum += x * x;
  }
  return std::sqrt(sum);
}

SkewMatrix operator+(const SkewMatrix& a, const SkewMatrix& b) {
  SkewMatrix out;
  for (std::size_t i = 0; i < kDims; ++i) {
    for (std::size_t j = 0; j < kDims; ++j) out(i, j) = a(i, j) + b(i, j);
  }
  return out;
}

SkewMatrix operator-(const SkewMatrix& a, const SkewMatrix& b) {
  SkewMatrix out;
  for (std::size_t i = 0; i < kDims; ++i) {
    for (std::size_t j = 0; j < kDims; ++j) out(i, j) = a(i, j) - b(i, j);
  }
  return out;
}

SkewMatrix operator*(double s, const SkewMatrix& a) {
  SkewMatrix out;
  for (std::size_t i = 0; i < kDims; ++i) {
    for (std::size_t j = 0; j < kDims; ++j) out(i, j) = s * a(i, j);
  }
  return out;
}

SkewMatrix Hat(const PatternVector& v) {
  SkewMatrix out;
  for (std::size_t i = 0; i < kDims; ++i) {
    for (std::size_t j = 0; j < kDims; ++j) out(i, j) = v[i] - v[j];
  }
  return out;
}

SkewMatrix Bracket(const SkewMatrix& x, const SkewMatrix& y) {
  // Both products are accumulated in the same k order so that entry (j, i)
  // is the exact negation of entry (i, j).
  SkewMatrix out;
  for (std::size_t i = 0; i < kDims; ++i) {
    for (std::size_t j = 0; j < kDims; ++j) {
      double xy = 0.0;
      double yx = 0.0;
      for (std::size_t k = 0; k < kDims; ++k) {
        xy += x(i, k) * y(k, j);
        yx += y(i, k) * x(k, j);
      }
      out(i, j) = xy - yx;
    }
  }
  return out;
}

EmergenceVector RowNorms(const SkewMatrix& m) {
  EmergenceVector eta{};
  for (std::size_t i = 0; i < kDims; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < kDims; ++j) sum += m(i, j) * m(i, j);
    eta[i] = std::sqrt(sum);
  }
  return eta;
}

double Norm(std::span<const double, kDims> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

Similarity Cosine(std::span<const double, kDims> a,
                  std::span<const double, kDims> b) {
  double na = Norm(a);
  double nb = Norm(b);
  if (na == 0.0 || nb == 0.0) return {0.0, true};
  double dot = 0.0;
  for (std::size_t d = 0; d < kDims; ++d) dot += a[d] * b[d];
  return {std::clamp(dot / (na * nb), -1.0, 1.0), false};
}

Similarity LieSimilarity(const PatternVector& va, const PatternVector& vb,
                         const PatternVector& vc) {
  PatternVector sum = Sum(va, vb);
  return Cosine(sum, vc);
}

namespace {

// Returns eta, or nullopt when the hat images of va and vb commute.
std::optional<EmergenceVector> Emergence(const PatternVector& va,
                                         const PatternVector& vb) {
  SkewMatrix xa = Hat(va);
  SkewMatrix xb = Hat(vb);
  EmergenceVector eta = RowNorms(Bracket(xa, xb));
  double scale = 1.0 + xa.FrobeniusNorm() * xb.FrobeniusNorm();
  double largest = *std::max_element(eta.begin(), eta.end());
  if (largest <= kCommuteTolerance * scale) return std::nullopt;
  return eta;
}

}  // namespace

PathDiagnostic PathIndependence(const PatternVector& va,
                                const PatternVector& vb) {
  PathDiagnostic out;
  auto eta = Emergence(va, vb);
  if (!eta) {
    out.commuting = true;
    out.delta = 1.0;
    return out;
  }
  out.eta = *eta;
  Similarity cos = Cosine(Sum(va, vb), out.eta);
  out.delta = std::clamp(1.0 - std::abs(cos.value), 0.0, 1.0);
  return out;
}

Similarity EmergenceConsistency(const PatternVector& va,
                                const PatternVector& vb,
                                const PatternVector& vc) {
  auto eta = Emergence(va, vb);
  if (!eta) return {0.0, true};
  return Cosine(*eta, vc);
}

bool PhaseDetect(const PatternVector& prev, const PatternVector& curr,
                 double theta) {
  PatternVector diff{};
  for (std::size_t d = 0; d < kDims; ++d) diff[d] = curr[d] - prev[d];
  return Norm(diff) > theta;
}

std::size_t DominantDimension(const PatternVector& v) {
  std::size_t best = 0;
  for (std::size_t d = 1; d < kDims; ++d) {
    if (std::abs(v[d]) > std::abs(v[best])) best = d;
  }
  return best;
}

std::vector<Point2> Project2d(std::span<const PatternVector> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  std::vector<Point2> out(points.size());
  if (n == 0) return out;

  Eigen::MatrixXd data(n, static_cast<Eigen::Index>(kDims));
  for (Eigen::Index r = 0; r < n; ++r) {
    for (std::size_t d = 0; d < kDims; ++d) {
      data(r, static_cast<Eigen::Index>(d)) = points[r][d];
    }
  }
  Eigen::RowVectorXd mean = data.colwise().mean();
  data.rowwise() -= mean;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::MatrixXd v = svd.matrixV();
  if (sv.size() == 0 || sv(0) <= 0.0) return out;

  std::array<bool, 2> live{false, false};
  for (Eigen::Index k = 0; k < 2 && k < sv.size(); ++k) {
    live[k] = sv(k) > kRankTolerance * sv(0);
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 1; i < v.rows(); ++i) {
      if (std::abs(v(i, k)) > std::abs(v(pivot, k))) pivot = i;
    }
    if (v(pivot, k) < 0.0) v.col(k) = -v.col(k);
  }

  for (Eigen::Index r = 0; r < n; ++r) {
    if (live[0]) out[r].x = data.row(r).dot(v.col(0));
    if (live[1]) out[r].y = data.row(r).dot(v.col(1));
  }
  return out;
}

}  // namespace patsim
