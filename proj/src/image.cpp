#include "vwsd/image.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "vwsd/errors.hpp"

namespace vwsd {

Image load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ImageError(path.string(), "file not found");
  Image image = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (image.empty()) throw ImageError(path.string(), "cannot decode image");
  return image;
}

Image resize_square(const Image& image, int size) {
  if (image.empty()) throw ImageError("<memory>", "empty image");
  if (image.rows == size && image.cols == size) return image.clone();
  Image out;
  const bool shrinking = image.rows > size && image.cols > size;
  cv::resize(image, out, cv::Size(size, size), 0, 0, shrinking ? cv::INTER_AREA : cv::INTER_LINEAR);
  return out;
}

bool same_pixels(const Image& a, const Image& b) {
  if (a.size() != b.size() || a.type() != b.type()) return false;
  if (a.empty()) return true;
  cv::Mat diff;
  cv::compare(a.reshape(1), b.reshape(1), diff, cv::CMP_NE);
  return cv::countNonZero(diff) == 0;
}

}  // namespace vwsd
