#pragma once

#include <filesystem>
#include <string>

#include <opencv2/core.hpp>

namespace vwsd {

/// Decoded raster: 8-bit, 3 channels, BGR channel order (OpenCV convention).
using Image = cv::Mat;

/// Reads and decodes an image file. Throws ImageError carrying the path on failure.
Image load_image(const std::filesystem::path& path);

/// Square resize to `size`×`size`. Returns a deep copy when the image already has that shape.
Image resize_square(const Image& image, int size);

/// Byte-exact comparison of shape, type and pixels.
bool same_pixels(const Image& a, const Image& b);

}  // namespace vwsd
