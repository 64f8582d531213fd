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
#ifndef IGEDET_IMAGE_H_
#define IGEDET_IMAGE_H_

#include <filesystem>
#include <memory>
#include <span>
#include <string>

#include "igedet/geometry.h"

namespace igedet {

// An image handed to a model backend.
//
// `digest` identifies the content for replay keys. For files it is the
// SHA-256 of the file bytes; for images derived in-process (crops,
// visualizations) it is taken over the decoded pixel buffer, so it does not
// depend on the PNG encoder in use.
struct ImagePayload {
  std::string uri;  // source path; empty for derived images
  std::string media_type = "image/png";
  std::shared_ptr<const std::string> bytes;  // encoded image
  std::string digest;
  int width = 0;
  int height = 0;
};

// Throws MissingFile; images that cannot be decoded keep width/height 0.
ImagePayload load_image(const std::filesystem::path& path);

// Crops the pixel-snapped region (floor of the near edges, ceil of the far
// edges, clamped to the image). Throws CropError when less than 1x1 pixel
// remains or the source cannot be decoded.
ImagePayload crop_image(const ImagePayload& src, const geo::BoundingBox& region);

// Copy of the image with the given boxes outlined.
ImagePayload draw_boxes(const ImagePayload& src,
                        std::span<const geo::BoundingBox> boxes);

}  // namespace igedet

#endif  // IGEDET_IMAGE_H_
