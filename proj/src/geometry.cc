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
#include "igedet/geometry.h"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace igedet::geo {

bool box_less(const BoundingBox& a, const BoundingBox& b) {
  return std::tie(a.x, a.y, a.w, a.h) < std::tie(b.x, b.y, b.w, b.h);
}

bool score_order(const ScoredBox& a, const ScoredBox& b) {
  if (a.score != b.score) return a.score > b.score;
  return box_less(a.box, b.box);
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  if (a == b) return 1.0;
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

bool within(const BoundingBox& box, double width, double height) {
  return box.x >= 0.0 && box.y >= 0.0 && box.right() <= width &&
         box.bottom() <= height;
}

std::optional<BoundingBox> clamp_to(const BoundingBox& box, double width,
                                    double height, double min_side) {
  const double x0 = std::clamp(box.x, 0.0, width);
  const double y0 = std::clamp(box.y, 0.0, height);
  const double x1 = std::clamp(box.right(), 0.0, width);
  const double y1 = std::clamp(box.bottom(), 0.0, height);
  BoundingBox out{x0, y0, x1 - x0, y1 - y0};
  if (!out.valid() || out.w < min_side || out.h < min_side) {
    return std::nullopt;
  }
  return out;
}

BoundingBox pad(const BoundingBox& box, double fraction) {
  const double dx = box.w * fraction;
  const double dy = box.h * fraction;
  return {box.x - dx, box.y - dy, box.w + 2.0 * dx, box.h + 2.0 * dy};
}

bool contains(const BoundingBox& box, double px, double py) {
  return px >= box.x && px < box.right() && py >= box.y && py < box.bottom();
}

std::vector<std::size_t> filter_oversized_indices(
    std::span<const ScoredBox> boxes, double scene_w, double scene_h,
    double max_area_fraction) {
  const double limit = max_area_fraction * scene_w * scene_h;
  std::vector<std::size_t> kept;
  kept.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!(boxes[i].box.area() > limit)) kept.push_back(i);
  }
  return kept;
}

std::vector<ScoredBox> filter_oversized(std::span<const ScoredBox> boxes,
                                        double scene_w, double scene_h,
                                        double max_area_fraction) {
  std::vector<ScoredBox> out;
  for (std::size_t i :
       filter_oversized_indices(boxes, scene_w, scene_h, max_area_fraction)) {
    out.push_back(boxes[i]);
  }
  return out;
}

std::vector<std::size_t> nms_indices(std::span<const ScoredBox> boxes,
                                     double iou_threshold) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return score_order(boxes[a], boxes[b]);
                   });

  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const bool suppressed =
        std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
          return iou(boxes[i].box, boxes[k].box) > iou_threshold;
        });
    if (!suppressed) kept.push_back(i);
  }
  return kept;
}

std::vector<ScoredBox> nms(std::span<const ScoredBox> boxes,
                           double iou_threshold) {
  std::vector<ScoredBox> out;
  for (std::size_t i : nms_indices(boxes, iou_threshold)) {
    out.push_back(boxes[i]);
  }
  return out;
}

}  // namespace igedet::geo
