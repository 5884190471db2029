#include "hsnn/idx.hpp"

#include <fstream>

namespace hsnn {

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path, const char* what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  require(in.gcount() == 4, "idx: '" + path + "' truncated while reading " + what);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
         std::uint32_t(b[3]);
}

void write_be32(std::ostream& out, std::uint32_t x) {
  unsigned char b[4] = {static_cast<unsigned char>(x >> 24), static_cast<unsigned char>(x >> 16),
                        static_cast<unsigned char>(x >> 8), static_cast<unsigned char>(x)};
  out.write(reinterpret_cast<char*>(b), 4);
}

std::vector<std::uint8_t> read_payload(std::istream& in, const std::string& path,
                                       std::size_t expected) {
  std::vector<std::uint8_t> data(expected);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(expected));
  require(static_cast<std::size_t>(in.gcount()) == expected,
          "idx: '" + path + "' truncated: expected " + std::to_string(expected) +
              " data bytes, got " + std::to_string(in.gcount()));
  in.peek();
  require(in.eof(), "idx: '" + path + "' has trailing bytes after the declared data");
  return data;
}

}  // namespace

IdxImages load_idx_images(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "idx: cannot open '" + path + "'");
  const std::uint32_t magic = read_be32(in, path, "magic");
  require(magic == 2051, "idx: '" + path + "' has unsupported magic " + std::to_string(magic) +
                             " (expected 2051 for ubyte images)");
  IdxImages img;
  const std::uint32_t count = read_be32(in, path, "image count");
  img.rows = static_cast<int>(read_be32(in, path, "row count"));
  img.cols = static_cast<int>(read_be32(in, path, "column count"));
  require(img.rows > 0 && img.cols > 0, "idx: '" + path + "' declares empty image dimensions");
  img.pixels = read_payload(in, path, std::size_t(count) * img.rows * img.cols);
  return img;
}

std::vector<std::uint8_t> load_idx_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "idx: cannot open '" + path + "'");
  const std::uint32_t magic = read_be32(in, path, "magic");
  require(magic == 2049, "idx: '" + path + "' has unsupported magic " + std::to_string(magic) +
                             " (expected 2049 for ubyte labels)");
  const std::uint32_t count = read_be32(in, path, "label count");
  return read_payload(in, path, count);
}

void write_idx_images(const std::string& path, int count, int rows, int cols,
                      const std::vector<std::uint8_t>& pixels) {
  require(count >= 0 && rows > 0 && cols > 0, "idx: bad image dimensions");
  require(pixels.size() == std::size_t(count) * rows * cols,
          "idx: pixel buffer does not match count*rows*cols");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), "idx: cannot open '" + path + "' for writing");
  write_be32(out, 2051);
  write_be32(out, static_cast<std::uint32_t>(count));
  write_be32(out, static_cast<std::uint32_t>(rows));
  write_be32(out, static_cast<std::uint32_t>(cols));
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  require(out.good(), "idx: write to '" + path + "' failed");
}

void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), "idx: cannot open '" + path + "' for writing");
  write_be32(out, 2049);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
  require(out.good(), "idx: write to '" + path + "' failed");
}

Vector ImageDataset::image_current(int i, double gain) const {
  require(i >= 0 && i < count(), "ImageDataset: image index out of range");
  const std::uint8_t* px = image(i);
  Vector x(image_size());
  for (int j = 0; j < image_size(); ++j) x[j] = gain * (px[j] / 255.0);
  return x;
}

void ImageDataset::validate() const {
  require(rows > 0 && cols > 0, "ImageDataset: empty image dimensions");
  require(pixels.size() == std::size_t(count()) * image_size(),
          "ImageDataset: image count does not match label count (" +
              std::to_string(pixels.size() / std::size_t(image_size() ? image_size() : 1)) +
              " images, " + std::to_string(labels.size()) + " labels)");
  for (std::size_t i = 0; i < labels.size(); ++i)
    require(labels[i] <= 9, "ImageDataset: label " + std::to_string(int(labels[i])) +
                                " at index " + std::to_string(i) + " is outside 0-9");
}

ImageDataset load_dataset(const std::string& images_path, const std::string& labels_path) {
  IdxImages img = load_idx_images(images_path);
  ImageDataset d;
  d.rows = img.rows;
  d.cols = img.cols;
  d.pixels = std::move(img.pixels);
  d.labels = load_idx_labels(labels_path);
  d.validate();
  return d;
}

}  // namespace hsnn
