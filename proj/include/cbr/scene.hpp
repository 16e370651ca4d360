#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cbr/geometry.hpp"
#include "cbr/image.hpp"

namespace cbr {

inline constexpr double kPerceptionX = 45.0;  // x in [-45, 45]
inline constexpr double kPerceptionY = 90.0;  // y in [0, 90]
inline constexpr double kPerceptionZ = 5.0;   // z in [0, 5]

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

// Procedural infrastructure-view scene: elevated camera over a ground plane
// populated with cuboid vehicles.
struct SceneSpec {
  int n_objects_min = 2;
  int n_objects_max = 6;
  Eigen::Vector2d length_range{3.8, 5.2};  // meters
  Eigen::Vector2d width_range{1.7, 2.1};
  Eigen::Vector2d height_range{1.4, 1.9};
  Eigen::Vector2d camera_height_range{5.0, 9.0};    // meters
  Eigen::Vector2d pitch_range{deg_to_rad(8.0), deg_to_rad(32.0)};  // radians
  Eigen::Vector2d cam_yaw_range{deg_to_rad(-8.0), deg_to_rad(8.0)};
  Eigen::Vector2d cam_roll_range{deg_to_rad(-3.0), deg_to_rad(3.0)};
  Eigen::Vector2d focal_range{210.0, 280.0};  // pixels at image_size 256, scaled with it
  Eigen::Vector2d object_y_range{8.0, 68.0};  // placement band, meters
  int image_size = 256;
  int n_classes = 1;
  uint64_t seed = 1;  // master seed for dataset generation
};

void validate(const SceneSpec& spec);

struct Frame {
  int id = 0;
  CameraCalib calib;
  std::vector<Box3D> boxes;  // canonical ground frame
  ImageU8 image;
};

// Deterministic in (spec, seed). Placement retries a bounded number of times
// per object and yields fewer objects rather than overlapping ones; every
// kept box projects at least partially into the image.
Frame sample_scene(const SceneSpec& spec, uint64_t seed);

// Painter's-algorithm rendering of frame.boxes over a ground-plane gradient.
// Pure function of the frame.
ImageU8 render_image(const Frame& frame);

// sample_scene + render_image for frame index i, seeded from spec.seed.
Frame generate_frame(const SceneSpec& spec, int index);

std::vector<Frame> generate_frames(const SceneSpec& spec, int count);

}  // namespace cbr
