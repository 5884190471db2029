#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsnn/types.hpp"

namespace hsnn {

/// Byte images + labels as distributed in the big-endian IDX format.
struct ImageDataset {
  int rows = 0, cols = 0;
  std::vector<std::uint8_t> pixels;  ///< count * rows * cols, row-major
  std::vector<std::uint8_t> labels;

  int count() const { return static_cast<int>(labels.size()); }
  int image_size() const { return rows * cols; }
  const std::uint8_t* image(int i) const { return pixels.data() + std::size_t(i) * image_size(); }
  /// Pixel bytes scaled by gain/255 into an input-current vector.
  Vector image_current(int i, double gain) const;
  void validate() const;
};

struct IdxImages {
  int rows = 0, cols = 0;
  std::vector<std::uint8_t> pixels;
  int count() const { return rows * cols == 0 ? 0 : static_cast<int>(pixels.size()) / (rows * cols); }
};

IdxImages load_idx_images(const std::string& path);                 // magic 2051, 3 dims
std::vector<std::uint8_t> load_idx_labels(const std::string& path);  // magic 2049, 1 dim

void write_idx_images(const std::string& path, int count, int rows, int cols,
                      const std::vector<std::uint8_t>& pixels);
void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels);

/// Load and cross-validate an image/label pair.
ImageDataset load_dataset(const std::string& images_path, const std::string& labels_path);

}  // namespace hsnn
