#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "dynabg/frame.hpp"
#include "dynabg/image_io.hpp"

using namespace dynabg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dynabg_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Frame make_frame(int w, int h, std::initializer_list<int> values) {
  Frame f(w, h);
  std::size_t i = 0;
  for (int v : values) f.data[i++] = static_cast<std::uint8_t>(v);
  return f;
}

}  // namespace

TEST_CASE("to_grayscale endpoints and luma") {
  CHECK(to_grayscale(255, 255, 255) == 255);
  CHECK(to_grayscale(0, 0, 0) == 0);
  CHECK(to_grayscale(255, 0, 0) == 76);  // round(0.299*255) = round(76.245)
}

TEST_CASE("to_grayscale fixes gray and is monotone per channel") {
  for (int v = 0; v <= 255; v += 17) {
    CHECK(to_grayscale(v, v, v) == v);
  }
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> byte(0, 254);
  for (int i = 0; i < 200; ++i) {
    const int r = byte(rng), g = byte(rng), b = byte(rng);
    CHECK(to_grayscale(r + 1, g, b) >= to_grayscale(r, g, b));
    CHECK(to_grayscale(r, g + 1, b) >= to_grayscale(r, g, b));
    CHECK(to_grayscale(r, g, b + 1) >= to_grayscale(r, g, b));
  }
}

TEST_CASE("stack lays frames out as columns") {
  FrameSequence seq;
  seq.frames.push_back(make_frame(1, 2, {5, 9}));
  seq.frames.push_back(make_frame(1, 2, {7, 3}));
  const PixelMatrix d = stack(seq);
  REQUIRE(d.rows() == 2);
  REQUIRE(d.cols() == 2);
  CHECK(d(0, 0) == 5);
  CHECK(d(0, 1) == 7);
  CHECK(d(1, 0) == 9);
  CHECK(d(1, 1) == 3);
}

TEST_CASE("stack of single-pixel frames") {
  FrameSequence seq;
  for (int i = 0; i < 3; ++i) seq.frames.push_back(make_frame(1, 1, {4}));
  const PixelMatrix d = stack(seq);
  REQUIRE(d.rows() == 1);
  REQUIRE(d.cols() == 3);
  CHECK(d(0, 0) == 4);
  CHECK(d(0, 1) == 4);
  CHECK(d(0, 2) == 4);
}

TEST_CASE("unstack inverts stack and clamps") {
  PixelMatrix m(2, 2);
  m << 5, 7, 9, 3;
  const FrameSequence seq = unstack(m, 1, 2);
  REQUIRE(seq.size() == 2);
  CHECK(seq[0].data == std::vector<std::uint8_t>{5, 9});
  CHECK(seq[1].data == std::vector<std::uint8_t>{7, 3});

  PixelMatrix wild(1, 2);
  wild << 260.4, -3.0;
  const FrameSequence clamped = unstack(wild, 1, 1);
  CHECK(clamped[0].data[0] == 255);
  CHECK(clamped[1].data[0] == 0);

  CHECK_THROWS_AS(unstack(m, 3, 1), std::invalid_argument);
}

TEST_CASE("stack/unstack round trip on random sequences") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 6);
    const int h = 1 + static_cast<int>(rng() % 6);
    FrameSequence seq;
    const int n = 2 + static_cast<int>(rng() % 4);
    for (int k = 0; k < n; ++k) {
      Frame f(w, h);
      for (auto& v : f.data) v = static_cast<std::uint8_t>(byte(rng));
      seq.frames.push_back(std::move(f));
    }
    const FrameSequence back = unstack(stack(seq), w, h);
    REQUIRE(back.size() == seq.size());
    for (std::size_t k = 0; k < seq.size(); ++k) {
      CHECK(back[k] == seq[k]);
    }
  }
}

TEST_CASE("stack is linear in pixel values") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> byte(0, 127);  // sums stay in range
  for (int trial = 0; trial < 10; ++trial) {
    FrameSequence a, b, sum;
    for (int k = 0; k < 3; ++k) {
      Frame fa(4, 3), fb(4, 3), fs(4, 3);
      for (std::size_t i = 0; i < fa.data.size(); ++i) {
        fa.data[i] = static_cast<std::uint8_t>(byte(rng));
        fb.data[i] = static_cast<std::uint8_t>(byte(rng));
        fs.data[i] = static_cast<std::uint8_t>(fa.data[i] + fb.data[i]);
      }
      a.frames.push_back(fa);
      b.frames.push_back(fb);
      sum.frames.push_back(fs);
    }
    CHECK((stack(sum) - (stack(a) + stack(b))).norm() == 0.0);
  }
}

TEST_CASE("sequence validation rejects mixed dimensions") {
  FrameSequence seq;
  seq.frames.push_back(Frame(4, 4));
  seq.frames.push_back(Frame(4, 5));
  CHECK_THROWS_WITH_AS(seq.validate(),
                       doctest::Contains("frame 1 is 4x5 but frame 0 is 4x4"),
                       std::invalid_argument);
  CHECK_THROWS_AS(FrameSequence{}.validate(), std::invalid_argument);
}

TEST_CASE("pgm round trip") {
  TempDir tmp;
  Frame f = make_frame(3, 2, {0, 128, 255, 17, 42, 99});
  const auto file = tmp.path / "frame.pgm";
  save_pgm(f, file);
  CHECK(load_pgm(file) == f);
  CHECK(load_frame(file) == f);
}

TEST_CASE("png round trip through the codec") {
  TempDir tmp;
  Frame f(5, 4);
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    f.data[i] = static_cast<std::uint8_t>(13 * i);
  }
  const auto file = tmp.path / "frame.png";
  save_frame(f, file);
  CHECK(load_frame(file) == f);
}

TEST_CASE("load_sequence orders, filters and validates") {
  TempDir tmp;
  for (int i = 3; i >= 1; --i) {
    char name[32];
    std::snprintf(name, sizeof(name), "in%06d.png", i);
    Frame f(4, 4, static_cast<std::uint8_t>(i * 10));
    save_frame(f, tmp.path / name);
  }
  save_pgm(Frame(2, 2), tmp.path / "other.pgm");

  const FrameSequence seq = load_sequence(tmp.path, "in*.png");
  REQUIRE(seq.size() == 3);
  CHECK(seq.width() == 4);
  CHECK(seq.height() == 4);
  CHECK(seq[0].data[0] == 10);  // lexicographic order
  CHECK(seq[2].data[0] == 30);

  CHECK_THROWS_WITH_AS(load_sequence(tmp.path, "nothing*"),
                       doctest::Contains("no frames"), std::runtime_error);
  // mixing the 2x2 pgm in trips the dimension check and names both sizes
  CHECK_THROWS_WITH_AS(load_sequence(tmp.path, "*"), doctest::Contains("2x2"),
                       std::runtime_error);
}

TEST_CASE("load_sequence reports undecodable files") {
  TempDir tmp;
  std::FILE* junk = std::fopen((tmp.path / "in000001.png").c_str(), "wb");
  std::fputs("not a png", junk);
  std::fclose(junk);
  CHECK_THROWS_WITH_AS(load_sequence(tmp.path, "*.png"),
                       doctest::Contains("in000001.png"), std::runtime_error);
}

TEST_CASE("downscale box-averages blocks") {
  TempDir tmp;
  Frame f = make_frame(4, 2, {10, 20, 30, 40, 10, 20, 30, 40});
  const auto file = tmp.path / "frame.pgm";
  save_pgm(f, file);
  const Frame half = load_frame(file, 2);
  REQUIRE(half.width == 2);
  REQUIRE(half.height == 1);
  CHECK(half.at(0, 0) == 15);
  CHECK(half.at(1, 0) == 35);
}

TEST_CASE("glob matching") {
  CHECK(glob_match("*", "anything.png"));
  CHECK(glob_match("in*.png", "in000001.png"));
  CHECK(!glob_match("in*.png", "gt000001.png"));
  CHECK(glob_match("in??????.jpg", "in000001.jpg"));
  CHECK(!glob_match("in??????.jpg", "in1.jpg"));
}
