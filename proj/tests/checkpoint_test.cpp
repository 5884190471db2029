#include "hsnn/checkpoint.hpp"

#include <cstdio>
#include <stdexcept>

#include "doctest.h"
#include "hsnn/csv.hpp"

using namespace hsnn;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

EsState sample_state() {
  EsState st;
  st.center = Vector::LinSpaced(5, -2.0, 2.0);
  st.center[3] = 0.1 + 0.2;  // not exactly representable; must survive bit-for-bit
  st.sigma = Array::Constant(5, 0.25);
  st.sigma[0] = kSigmaMin;
  st.generation = 17;
  st.seed = 0xDEADBEEFCAFEBABEull;
  return st;
}

}  // namespace

TEST_CASE("checkpoint round-trips bit-for-bit") {
  TempFile f("ckpt_test_roundtrip.bin");
  EsState st = sample_state();
  save_checkpoint(f.path, st);
  EsState back = load_checkpoint(f.path);
  CHECK(back.generation == 17);
  CHECK(back.seed == st.seed);
  REQUIRE(back.center.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(back.center[i] == st.center[i]);
    CHECK(back.sigma[i] == st.sigma[i]);
  }
}

TEST_CASE("checkpoint bytes follow the documented layout") {
  TempFile f("ckpt_test_layout.bin");
  save_checkpoint(f.path, sample_state());
  std::string bytes = read_file(f.path);
  REQUIRE(bytes.size() == 8 + 4 + 4 + 8 * 3 + 16 * 5);
  CHECK(bytes.substr(0, 8) == "HSNNCKPT");
  CHECK(std::uint8_t(bytes[8]) == kCheckpointVersion);  // version, little-endian
  CHECK(std::uint8_t(bytes[9]) == 0);
  CHECK(std::uint8_t(bytes[16]) == 0xBE);  // seed low byte first
  CHECK(std::uint8_t(bytes[23]) == 0xDE);
  CHECK(std::uint8_t(bytes[24]) == 17);  // generation
  CHECK(std::uint8_t(bytes[32]) == 5);   // dimension
}

TEST_CASE("load rejects damaged files with specific messages") {
  TempFile f("ckpt_test_damage.bin");
  save_checkpoint(f.path, sample_state());
  std::string good = read_file(f.path);

  atomic_write(f.path, "not a checkpoint");
  CHECK_THROWS_WITH_AS(load_checkpoint(f.path), doctest::Contains("bad magic"),
                       std::runtime_error);

  atomic_write(f.path, good.substr(0, good.size() - 3));
  CHECK_THROWS_WITH_AS(load_checkpoint(f.path), doctest::Contains("truncated"),
                       std::runtime_error);

  atomic_write(f.path, good + "x");
  CHECK_THROWS_WITH_AS(load_checkpoint(f.path), doctest::Contains("trailing"),
                       std::runtime_error);

  std::string wrong_version = good;
  wrong_version[8] = 9;
  atomic_write(f.path, wrong_version);
  CHECK_THROWS_WITH_AS(load_checkpoint(f.path), doctest::Contains("version 9"),
                       std::runtime_error);

  CHECK_THROWS_AS(load_checkpoint("ckpt_test_nonexistent.bin"), std::exception);
}

TEST_CASE("save refuses an invalid state") {
  EsState st = sample_state();
  st.sigma[2] = -1.0;
  TempFile f("ckpt_test_invalid.bin");
  CHECK_THROWS_AS(save_checkpoint(f.path, st), std::exception);
}
