// Copyright 2026 The igedet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Axis-aligned box geometry and the two detection post-processing filters
// (oversized-box removal and class-agnostic greedy NMS).
//
// Coordinates are real-valued pixels with a top-left origin. A box is its
// upper-left corner plus width and height. All functions are pure.
#ifndef IGEDET_GEOMETRY_H_
#define IGEDET_GEOMETRY_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace igedet::geo {

inline constexpr double kDefaultMaxAreaFraction = 0.9;
inline constexpr double kDefaultNmsIouThreshold = 0.7;

struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  bool valid() const { return w > 0.0 && h > 0.0; }

  bool operator==(const BoundingBox&) const = default;
};

// Lexicographic (x, y, w, h) order. Used as the deterministic tie-break
// wherever boxes with equal scores must be ordered.
bool box_less(const BoundingBox& a, const BoundingBox& b);

struct ScoredBox {
  BoundingBox box;
  double score = 0.0;

  bool operator==(const ScoredBox&) const = default;
};

// Score descending, then box_less.
bool score_order(const ScoredBox& a, const ScoredBox& b);

double intersection_area(const BoundingBox& a, const BoundingBox& b);

// Intersection over union in [0, 1]; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

// Whether the box lies inside a width x height scene.
bool within(const BoundingBox& box, double width, double height);

// Clamps the box to [0, width] x [0, height]. Returns nullopt when nothing
// of at least `min_side` pixels per side is left.
std::optional<BoundingBox> clamp_to(const BoundingBox& box, double width,
                                    double height, double min_side = 0.0);

// Grows the box by `fraction` of its size on every side.
BoundingBox pad(const BoundingBox& box, double fraction);

// Half-open membership: x in [bx, bx + w), y in [by, by + h).
bool contains(const BoundingBox& box, double px, double py);

// Indices of boxes whose area is not over max_area_fraction of the scene
// area. Input order is preserved.
std::vector<std::size_t> filter_oversized_indices(
    std::span<const ScoredBox> boxes, double scene_w, double scene_h,
    double max_area_fraction = kDefaultMaxAreaFraction);

std::vector<ScoredBox> filter_oversized(
    std::span<const ScoredBox> boxes, double scene_w, double scene_h,
    double max_area_fraction = kDefaultMaxAreaFraction);

// Greedy class-agnostic suppression. Candidates are visited in score_order;
// a box is kept iff its IoU with every kept box is <= iou_threshold. The
// returned indices refer to `boxes` and are in score_order.
std::vector<std::size_t> nms_indices(
    std::span<const ScoredBox> boxes,
    double iou_threshold = kDefaultNmsIouThreshold);

std::vector<ScoredBox> nms(std::span<const ScoredBox> boxes,
                           double iou_threshold = kDefaultNmsIouThreshold);

}  // namespace igedet::geo

#endif  // IGEDET_GEOMETRY_H_
