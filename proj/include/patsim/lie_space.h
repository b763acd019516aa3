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

// The 8-dimensional semantic space that pattern vectors live in, together
// with its embedding into so(8) as skew-symmetric matrices.
//
// Every function here is pure and thread-safe. All arithmetic is double
// precision.

#ifndef PATSIM_LIE_SPACE_H_
#define PATSIM_LIE_SPACE_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "patsim/types.h"

namespace patsim {

using Matrix8 = std::array<std::array<double, kDims>, kDims>;

// An element of so(8). Construction does not check skew-symmetry; values
// produced by Hat() and Bracket() are skew-symmetric bit for bit.
struct SkewMatrix {
  Matrix8 entries{};

  double operator()(std::size_t i, std::size_t j) const {
    return entries[i][j];
  }
  double& operator()(std::size_t i, std::size_t j) { return entries[i][j]; }

  bool IsExactlySkew() const;
  double FrobeniusNorm() const;

  friend SkewMatrix operator+(const SkewMatrix& a, const SkewMatrix& b);
  friend SkewMatrix operator-(const SkewMatrix& a, const SkewMatrix& b);
  friend SkewMatrix operator*(double s, const SkewMatrix& a);
  bool operator==(const SkewMatrix&) const = default;
};

// Row norms of a bracket matrix. Components are non-negative.
using EmergenceVector = std::array<double, kDims>;

// A cosine value together with a flag raised when one of the operands had
// zero norm. Degenerate values are reported as 0.0.
struct Similarity {
  double value = 0.0;
  bool degenerate = false;
};

struct PathDiagnostic {
  double delta = 1.0;
  // Set when the bracket vanishes (the two sources commute); delta is then
  // pinned to 1.0.
  bool commuting = false;
  EmergenceVector eta{};
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

// v -> v 1^T - 1 v^T.
SkewMatrix Hat(const PatternVector& v);

// Matrix commutator XY - YX.
SkewMatrix Bracket(const SkewMatrix& x, const SkewMatrix& y);

EmergenceVector RowNorms(const SkewMatrix& m);

double Norm(std::span<const double, kDims> v);
Similarity Cosine(std::span<const double, kDims> a,
                  std::span<const double, kDims> b);

// cos(va + vb, vc).
Similarity LieSimilarity(const PatternVector& va, const PatternVector& vb,
                         const PatternVector& vc);

// delta = 1 - |cos(va + vb, eta)| with eta = RowNorms([hat(va), hat(vb)]).
PathDiagnostic PathIndependence(const PatternVector& va,
                                const PatternVector& vb);

// cos(eta, vc): alignment of the bracket's emergence vector with a target.
// Degenerate (0.0) when the sources commute or vc is zero.
Similarity EmergenceConsistency(const PatternVector& va,
                                const PatternVector& vb,
                                const PatternVector& vc);

// True iff ||curr - prev||_2 > theta.
bool PhaseDetect(const PatternVector& prev, const PatternVector& curr,
                 double theta = 0.25);

// argmax_d |v[d]|, lowest index on ties.
std::size_t DominantDimension(const PatternVector& v);

// Projects points onto the top two principal directions of the centred
// data. Each direction is oriented so that its largest-magnitude loading is
// positive; directions with a vanishing singular value project to 0.
std::vector<Point2> Project2d(std::span<const PatternVector> points);

}  // namespace patsim

#endif  // PATSIM_LIE_SPACE_H_
