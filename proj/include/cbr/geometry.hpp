#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <vector>

namespace cbr {

// Canonical ground frame: origin at the camera's vertical projection onto the
// ground plane, x lateral right, y forward, z up. All labels and predictions
// live in this frame.

inline constexpr double kDepthEpsilon = 1e-3;  // meters; behind-camera culling

struct CameraCalib {
  double fx = 0.0, fy = 0.0;  // focal lengths, pixels
  double cx = 0.0, cy = 0.0;  // principal point, pixels
  double pitch = 0.0;         // radians, positive tilts the view down
  double yaw = 0.0;           // radians, positive turns the view left
  double roll = 0.0;          // radians
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // meters, z = height above ground
};

// Throws std::invalid_argument on fx/fy <= 0, height <= 0 or non-finite fields.
void validate(const CameraCalib& calib);

struct Box3D {
  int class_id = 0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // x lateral, y forward, z up (cuboid center)
  Eigen::Vector3d dims = Eigen::Vector3d::Ones();    // length, width, height
  double yaw = 0.0;                                  // radians in (-pi, pi]
};

void validate(const Box3D& box);

// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

struct GridSpec {
  enum class Plane { kBev, kFv };

  Plane plane = Plane::kBev;
  double x_min = 0.0, x_max = 0.0;  // shared x axis (columns)
  double v_min = 0.0, v_max = 0.0;  // y for BEV, z for FV (rows)
  int rows = 0, cols = 0;

  double cell_w() const { return (x_max - x_min) / cols; }
  double cell_h() const { return (v_max - v_min) / rows; }

  static GridSpec bev(double x_min, double x_max, double y_min, double y_max, int rows, int cols);
  static GridSpec fv(double x_min, double x_max, double z_min, double z_max, int rows, int cols);
};

void validate(const GridSpec& spec);

struct CellIndex {
  int row = 0;
  int col = 0;
  bool operator==(const CellIndex&) const = default;
};

// Row 0 is the far edge (max y for BEV, max z for FV), col 0 is min x.
// Points on the closed range boundary clamp into the edge cells; outside
// the range returns nullopt.
std::optional<CellIndex> world_to_cell(double x, double v, const GridSpec& spec);

// Metric center of a cell, (x, v).
Eigen::Vector2d cell_center(const GridSpec& spec, int row, int col);

// Extrinsic Z(yaw) * Y(pitch) * X(roll) composition of right-handed
// elementary rotations. In the aviation-style frame used for camera
// orientation (x forward, y left, z up), pitch pi/2 maps forward to down.
Eigen::Matrix3d euler_to_rotation(double pitch, double yaw, double roll);

// Camera-to-ground rotation: columns are the camera axes (x right, y down,
// z optical) expressed in the canonical ground frame. At zero angles the
// optical axis is +y (forward) and image-down is -z.
Eigen::Matrix3d camera_to_ground_rotation(const CameraCalib& calib);

// Corners ordered bottom face CCW (viewed from +z) then top face CCW:
// indices 0..3 at z = center.z - h/2, 4..7 at +h/2; corner k+4 sits above k.
std::array<Eigen::Vector3d, 8> box_corners(const Box3D& box);

// Footprint rectangle in the x-y plane, CCW.
std::array<Eigen::Vector2d, 4> bev_corners(const Box3D& box);

struct PixelPoint {
  double u = 0.0, v = 0.0;  // pixels
  double depth = 0.0;       // camera-frame z, meters
  bool valid = false;       // false when depth <= kDepthEpsilon
};

PixelPoint project_point(const CameraCalib& calib, const Eigen::Vector3d& world);
std::vector<PixelPoint> project_points(const CameraCalib& calib,
                                       std::span<const Eigen::Vector3d> world);

// Area of the intersection of two convex polygons (Sutherland-Hodgman,
// subject clipped against each edge of the CCW clip polygon).
double convex_intersection_area(std::span<const Eigen::Vector2d> subject,
                                std::span<const Eigen::Vector2d> clip);

// IoU of the BEV footprints. Throws on degenerate (zero-area) boxes.
double rotated_iou_bev(const Box3D& a, const Box3D& b);

// Volume IoU: BEV intersection area x vertical overlap / volume union.
double iou_3d(const Box3D& a, const Box3D& b);

}  // namespace cbr
