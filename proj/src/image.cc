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
#include "igedet/image.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "igedet/digest.h"
#include "igedet/errors.h"

namespace igedet {

namespace {

cv::Mat decode(const ImagePayload& img) {
  if (!img.bytes || img.bytes->empty()) return {};
  const std::vector<uchar> buf(img.bytes->begin(), img.bytes->end());
  return cv::imdecode(buf, cv::IMREAD_COLOR);
}

std::string pixel_digest(std::string_view tag, const cv::Mat& m) {
  cv::Mat c = m.isContinuous() ? m : m.clone();
  std::string raw(tag);
  raw += ':' + std::to_string(c.cols) + 'x' + std::to_string(c.rows) + 'x' +
         std::to_string(c.channels()) + ':';
  raw.append(reinterpret_cast<const char*>(c.data), c.total() * c.elemSize());
  return sha256_hex(raw);
}

ImagePayload encode(const cv::Mat& m, std::string digest) {
  std::vector<uchar> buf;
  if (!cv::imencode(".png", m, buf)) throw CropError("PNG encoding failed");
  ImagePayload out;
  out.bytes = std::make_shared<const std::string>(buf.begin(), buf.end());
  out.digest = std::move(digest);
  out.width = m.cols;
  out.height = m.rows;
  return out;
}

}  // namespace

ImagePayload load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  auto bytes = std::make_shared<std::string>(
      std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  ImagePayload out;
  out.uri = path.string();
  out.digest = sha256_hex(*bytes);
  out.bytes = std::move(bytes);
  const auto ext = path.extension().string();
  if (ext == ".jpg" || ext == ".jpeg") out.media_type = "image/jpeg";
  const cv::Mat m = decode(out);
  if (!m.empty()) {
    out.width = m.cols;
    out.height = m.rows;
  }
  return out;
}

ImagePayload crop_image(const ImagePayload& src,
                        const geo::BoundingBox& region) {
  const cv::Mat m = decode(src);
  if (m.empty()) throw CropError("cannot decode " + src.uri);
  const int x0 = std::clamp(static_cast<int>(std::floor(region.x)), 0, m.cols);
  const int y0 = std::clamp(static_cast<int>(std::floor(region.y)), 0, m.rows);
  const int x1 =
      std::clamp(static_cast<int>(std::ceil(region.right())), 0, m.cols);
  const int y1 =
      std::clamp(static_cast<int>(std::ceil(region.bottom())), 0, m.rows);
  if (x1 - x0 < 1 || y1 - y0 < 1) {
    throw CropError("crop region degenerates below 1x1 pixel");
  }
  const cv::Mat crop = m(cv::Rect(x0, y0, x1 - x0, y1 - y0)).clone();
  return encode(crop, pixel_digest("crop", crop));
}

ImagePayload draw_boxes(const ImagePayload& src,
                        std::span<const geo::BoundingBox> boxes) {
  cv::Mat m = decode(src);
  if (m.empty()) throw CropError("cannot decode " + src.uri);
  for (const auto& b : boxes) {
    const cv::Point p0(static_cast<int>(std::lround(b.x)),
                       static_cast<int>(std::lround(b.y)));
    const cv::Point p1(static_cast<int>(std::lround(b.right())) - 1,
                       static_cast<int>(std::lround(b.bottom())) - 1);
    cv::rectangle(m, p0, p1, cv::Scalar(0, 0, 255), 2);
  }
  return encode(m, pixel_digest("boxes", m));
}

}  // namespace igedet
