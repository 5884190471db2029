#include "hsnn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

#include "hsnn/csv.hpp"

namespace hsnn {
namespace {

constexpr char kMagic[8] = {'H', 'S', 'N', 'N', 'C', 'K', 'P', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  Reader(const std::string& data, const std::string& path) : data_(data), path_(path) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(bytes(4)); }
  std::uint64_t u64() { return bytes(8); }
  double f64() { return std::bit_cast<double>(u64()); }

  void expect_magic() {
    if (data_.size() < 8 || std::memcmp(data_.data(), kMagic, 8) != 0)
      throw std::runtime_error("checkpoint '" + path_ + "': not a checkpoint file (bad magic)");
    pos_ = 8;
  }
  void expect_end() const {
    if (pos_ != data_.size())
      throw std::runtime_error("checkpoint '" + path_ + "': " +
                               std::to_string(data_.size() - pos_) + " trailing byte(s)");
  }

 private:
  std::uint64_t bytes(int n) {
    if (pos_ + n > data_.size())
      throw std::runtime_error("checkpoint '" + path_ + "': truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t(std::uint8_t(data_[pos_ + i])) << (8 * i);
    pos_ += n;
    return v;
  }

  const std::string& data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const EsState& state) {
  state.validate();
  if (state.sigma.size() != state.center.size())
    throw std::invalid_argument("checkpoint: center/sigma dimension mismatch");
  std::string out;
  out.reserve(8 + 4 + 4 + 8 * 3 + 16 * state.center.size());
  out.append(kMagic, 8);
  put_u32(out, kCheckpointVersion);
  put_u32(out, 0);
  put_u64(out, state.seed);
  put_u64(out, static_cast<std::uint64_t>(state.generation));
  put_u64(out, static_cast<std::uint64_t>(state.center.size()));
  for (Eigen::Index i = 0; i < state.center.size(); ++i) put_f64(out, state.center[i]);
  for (Eigen::Index i = 0; i < state.sigma.size(); ++i) put_f64(out, state.sigma[i]);
  atomic_write(path, out);
}

EsState load_checkpoint(const std::string& path) {
  std::string data = read_file(path);
  Reader r(data, path);
  r.expect_magic();
  std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint '" + path + "': format version " +
                             std::to_string(version) + " (this build reads " +
                             std::to_string(kCheckpointVersion) + ")");
  r.u32();  // reserved
  EsState state;
  state.seed = r.u64();
  state.generation = static_cast<int>(r.u64());
  std::uint64_t dim = r.u64();
  if (dim > (1ull << 32))
    throw std::runtime_error("checkpoint '" + path + "': implausible dimension " +
                             std::to_string(dim));
  state.center.resize(static_cast<Eigen::Index>(dim));
  state.sigma.resize(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < state.center.size(); ++i) state.center[i] = r.f64();
  for (Eigen::Index i = 0; i < state.sigma.size(); ++i) state.sigma[i] = r.f64();
  r.expect_end();
  state.validate();
  return state;
}

}  // namespace hsnn
