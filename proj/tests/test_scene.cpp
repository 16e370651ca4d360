#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "cbr/dataset.hpp"
#include "cbr/rng.hpp"
#include "cbr/scene.hpp"

using namespace cbr;
namespace fs = std::filesystem;

namespace {

SceneSpec small_spec() {
  SceneSpec spec;
  spec.seed = 7;
  return spec;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("cbr_test_" + std::to_string(Rng::mix(reinterpret_cast<uint64_t>(this))));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("sample_scene determinism") {
  const SceneSpec spec = small_spec();
  const Frame a = sample_scene(spec, 42);
  const Frame b = sample_scene(spec, 42);
  REQUIRE(a.boxes.size() == b.boxes.size());
  for (size_t i = 0; i < a.boxes.size(); ++i) {
    CHECK(a.boxes[i].center == b.boxes[i].center);
    CHECK(a.boxes[i].dims == b.boxes[i].dims);
    CHECK(a.boxes[i].yaw == b.boxes[i].yaw);
  }
  CHECK(a.calib.pitch == b.calib.pitch);
  CHECK(a.image == b.image);

  const Frame c = sample_scene(spec, 43);
  CHECK(a.image.data != c.image.data);
}

TEST_CASE("sample_scene with zero objects") {
  SceneSpec spec = small_spec();
  spec.n_objects_min = spec.n_objects_max = 0;
  const Frame f = sample_scene(spec, 1);
  CHECK(f.boxes.empty());
  CHECK(f.image.width == spec.image_size);
  CHECK(f.image.height == spec.image_size);
}

TEST_CASE("sampled scenes have disjoint BEV boxes and in-volume centers") {
  SceneSpec spec = small_spec();
  int total_boxes = 0;
  for (int s = 0; s < 150; ++s) {
    const Frame f = sample_scene(spec, 1000 + s);
    total_boxes += static_cast<int>(f.boxes.size());
    for (size_t i = 0; i < f.boxes.size(); ++i) {
      const Box3D& b = f.boxes[i];
      CHECK(std::abs(b.center.x()) <= kPerceptionX);
      CHECK(b.center.y() >= 0.0);
      CHECK(b.center.y() <= kPerceptionY);
      CHECK(b.center.z() >= 0.0);
      CHECK(b.center.z() <= kPerceptionZ);
      for (size_t j = i + 1; j < f.boxes.size(); ++j) {
        CHECK(rotated_iou_bev(f.boxes[i], f.boxes[j]) == 0.0);
      }
    }
  }
  CHECK(total_boxes > 150);  // placement is not starving
}

TEST_CASE("every box projects at least partially into the image") {
  SceneSpec spec = small_spec();
  for (int s = 0; s < 60; ++s) {
    const Frame f = sample_scene(spec, 5000 + s);
    for (const Box3D& b : f.boxes) {
      const auto corners = box_corners(b);
      const auto pix = project_points(f.calib, corners);
      bool any_inside = false;
      for (const auto& p : pix) {
        any_inside = any_inside || (p.valid && p.u >= 0 && p.u < spec.image_size && p.v >= 0 &&
                                    p.v < spec.image_size);
      }
      CHECK(any_inside);
    }
  }
}

TEST_CASE("pitch histogram spans at least 20 degrees over 500 scenes") {
  SceneSpec spec = small_spec();
  double lo = 1e9, hi = -1e9;
  for (int s = 0; s < 500; ++s) {
    const Frame f = sample_scene(spec, 90000 + s);
    lo = std::min(lo, f.calib.pitch);
    hi = std::max(hi, f.calib.pitch);
  }
  CHECK(rad_to_deg(hi - lo) >= 20.0);
  CHECK(lo >= 0.0);
  CHECK(hi <= deg_to_rad(35.0));
}

TEST_CASE("render_image deterministic and empty-scene renders background only") {
  SceneSpec spec = small_spec();
  Frame f = sample_scene(spec, 77);
  const ImageU8 again = render_image(f);
  CHECK(f.image == again);

  Frame empty = f;
  empty.boxes.clear();
  const ImageU8 bg = render_image(empty);
  CHECK(bg.width == f.image.width);
  // object pixels must differ from the background somewhere
  if (!f.boxes.empty()) CHECK(!(bg == f.image));
}

TEST_CASE("rendered silhouette centroid tracks the projected box center") {
  SceneSpec spec = small_spec();
  Frame f;
  f.id = 3;
  f.calib.fx = f.calib.fy = 240;
  f.calib.cx = f.calib.cy = 128;
  f.calib.pitch = deg_to_rad(18.0);
  f.calib.position = {0, 0, 6.0};
  Box3D box;
  box.dims = {4.6, 1.9, 1.6};
  box.center = {0.0, 28.0, 0.8};
  box.yaw = 0.9;
  f.boxes = {box};
  f.image = ImageU8(spec.image_size, spec.image_size);
  f.image = render_image(f);

  Frame empty = f;
  empty.boxes.clear();
  const ImageU8 bg = render_image(empty);

  double su = 0, sv = 0;
  long n = 0;
  for (int y = 0; y < f.image.height; ++y) {
    for (int x = 0; x < f.image.width; ++x) {
      const uint8_t* a = f.image.pixel(y, x);
      const uint8_t* b = bg.pixel(y, x);
      const int d = std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
      if (d > 18) {  // above the additive noise floor
        su += x + 0.5;
        sv += y + 0.5;
        ++n;
      }
    }
  }
  REQUIRE(n > 50);
  const PixelPoint c = project_point(f.calib, box.center);
  REQUIRE(c.valid);
  CHECK(std::abs(su / n - c.u) < 5.0);
  CHECK(std::abs(sv / n - c.v) < 5.0);
}

TEST_CASE("dataset round-trip") {
  TempDir tmp;
  SceneSpec spec = small_spec();
  const std::vector<Frame> frames = generate_frames(spec, 12);
  const DatasetSplit split = make_split(frames, 0.25);
  CHECK(split.val.size() == 3);
  write_dataset(frames, split, tmp.path);

  const Dataset ds = read_dataset(tmp.path);
  REQUIRE(ds.frames.size() == frames.size());
  CHECK(ds.split.train.size() == split.train.size());
  for (size_t i = 0; i < frames.size(); ++i) {
    const Frame& a = frames[i];
    const Frame& b = ds.frames[i];
    CHECK(a.id == b.id);
    CHECK(a.image == b.image);
    // calib must round-trip bit-exact
    CHECK(a.calib.fx == b.calib.fx);
    CHECK(a.calib.pitch == b.calib.pitch);
    CHECK(a.calib.roll == b.calib.roll);
    CHECK(a.calib.position == b.calib.position);
    REQUIRE(a.boxes.size() == b.boxes.size());
    for (size_t k = 0; k < a.boxes.size(); ++k) {
      CHECK((a.boxes[k].center - b.boxes[k].center).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((a.boxes[k].dims - b.boxes[k].dims).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(std::abs(a.boxes[k].yaw - b.boxes[k].yaw) < 1e-9);
    }
  }
}

TEST_CASE("dataset write is byte-stable across reruns") {
  TempDir tmp_a, tmp_b;
  SceneSpec spec = small_spec();
  const auto frames_a = generate_frames(spec, 4);
  const auto frames_b = generate_frames(spec, 4);
  write_dataset(frames_a, make_split(frames_a, 0.2), tmp_a.path);
  write_dataset(frames_b, make_split(frames_b, 0.2), tmp_b.path);
  for (const char* rel : {"images/000002.png", "labels/000002.json", "calib/000002.json",
                          "split.json"}) {
    std::ifstream fa(tmp_a.path / rel, std::ios::binary);
    std::ifstream fb(tmp_b.path / rel, std::ios::binary);
    const std::string da((std::istreambuf_iterator<char>(fa)), {});
    const std::string db((std::istreambuf_iterator<char>(fb)), {});
    REQUIRE(!da.empty());
    CHECK(da == db);
  }
}

TEST_CASE("missing label file is reported with the frame id") {
  TempDir tmp;
  SceneSpec spec = small_spec();
  const auto frames = generate_frames(spec, 3);
  write_dataset(frames, make_split(frames, 0.0), tmp.path);
  fs::remove(tmp.path / "labels" / "000001.json");
  try {
    read_dataset(tmp.path);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("000001") != std::string::npos);
  }
}

TEST_CASE("manifest counts match directory contents") {
  TempDir tmp;
  SceneSpec spec = small_spec();
  const auto frames = generate_frames(spec, 20);
  write_dataset(frames, make_split(frames, 0.2), tmp.path);

  size_t n_images = 0;
  for (const auto& e : fs::directory_iterator(tmp.path / "images")) {
    (void)e;
    ++n_images;
  }
  const Dataset ds = read_dataset(tmp.path);
  CHECK(n_images == 20);
  CHECK(ds.frames.size() == 20);
  CHECK(ds.split.train.size() + ds.split.val.size() == 20);
}

TEST_CASE("calib json round-trip is bit-exact on adversarial doubles") {
  CameraCalib c;
  c.fx = 240.00000000000003;
  c.fy = 1.0 / 3.0;
  c.cx = 128.0000001;
  c.cy = 127.99999999999999;
  c.pitch = M_PI / 7;
  c.yaw = -0.30000000000000004;
  c.roll = 5e-324;  // denormal
  c.position = {0.1 + 0.2, 1e-17, 6.000000000000001};
  const CameraCalib d = calib_from_json(calib_to_json(c));
  CHECK(c.fx == d.fx);
  CHECK(c.fy == d.fy);
  CHECK(c.cx == d.cx);
  CHECK(c.cy == d.cy);
  CHECK(c.pitch == d.pitch);
  CHECK(c.yaw == d.yaw);
  CHECK(c.roll == d.roll);
  CHECK(c.position == d.position);
}
