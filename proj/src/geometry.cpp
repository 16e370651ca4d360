#include "cbr/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace cbr {

namespace {

bool all_finite(const Eigen::Vector3d& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

}  // namespace

void validate(const CameraCalib& calib) {
  if (!(calib.fx > 0.0) || !(calib.fy > 0.0)) {
    throw std::invalid_argument("CameraCalib: fx and fy must be positive");
  }
  if (!(calib.position.z() > 0.0)) {
    throw std::invalid_argument("CameraCalib: camera height must be positive");
  }
  if (!std::isfinite(calib.cx) || !std::isfinite(calib.cy) || !std::isfinite(calib.pitch) ||
      !std::isfinite(calib.yaw) || !std::isfinite(calib.roll) || !all_finite(calib.position)) {
    throw std::invalid_argument("CameraCalib: non-finite field");
  }
}

void validate(const Box3D& box) {
  if (!(box.dims.x() > 0.0 && box.dims.y() > 0.0 && box.dims.z() > 0.0)) {
    throw std::invalid_argument("Box3D: dims must be strictly positive");
  }
  if (!all_finite(box.center) || !std::isfinite(box.yaw)) {
    throw std::invalid_argument("Box3D: non-finite field");
  }
  if (box.yaw <= -M_PI || box.yaw > M_PI) {
    throw std::invalid_argument("Box3D: yaw must lie in (-pi, pi]");
  }
}

double normalize_angle(double angle) {
  double a = std::remainder(angle, 2.0 * M_PI);  // (-pi, pi] up to the -pi edge
  if (a <= -M_PI) a = M_PI;
  return a;
}

GridSpec GridSpec::bev(double x_min, double x_max, double y_min, double y_max, int rows, int cols) {
  GridSpec s;
  s.plane = Plane::kBev;
  s.x_min = x_min;
  s.x_max = x_max;
  s.v_min = y_min;
  s.v_max = y_max;
  s.rows = rows;
  s.cols = cols;
  validate(s);
  return s;
}

GridSpec GridSpec::fv(double x_min, double x_max, double z_min, double z_max, int rows, int cols) {
  GridSpec s = bev(x_min, x_max, z_min, z_max, rows, cols);
  s.plane = Plane::kFv;
  return s;
}

void validate(const GridSpec& spec) {
  if (spec.rows <= 0 || spec.cols <= 0) {
    throw std::invalid_argument("GridSpec: rows/cols must be positive");
  }
  if (!(spec.x_max > spec.x_min) || !(spec.v_max > spec.v_min)) {
    throw std::invalid_argument("GridSpec: empty range");
  }
}

std::optional<CellIndex> world_to_cell(double x, double v, const GridSpec& spec) {
  if (x < spec.x_min || x > spec.x_max || v < spec.v_min || v > spec.v_max) {
    return std::nullopt;
  }
  int col = static_cast<int>(std::floor((x - spec.x_min) / spec.cell_w()));
  int row = static_cast<int>(std::floor((spec.v_max - v) / spec.cell_h()));
  col = std::min(col, spec.cols - 1);
  row = std::min(row, spec.rows - 1);
  return CellIndex{row, col};
}

Eigen::Vector2d cell_center(const GridSpec& spec, int row, int col) {
  return {spec.x_min + (col + 0.5) * spec.cell_w(), spec.v_max - (row + 0.5) * spec.cell_h()};
}

Eigen::Matrix3d euler_to_rotation(double pitch, double yaw, double roll) {
  if (!std::isfinite(pitch) || !std::isfinite(yaw) || !std::isfinite(roll)) {
    throw std::invalid_argument("euler_to_rotation: non-finite angle");
  }
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const double cr = std::cos(roll), sr = std::sin(roll);
  Eigen::Matrix3d rz, ry, rx;
  rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  return rz * ry * rx;
}

Eigen::Matrix3d camera_to_ground_rotation(const CameraCalib& calib) {
  // Aviation frame A (x forward, y left, z up) hosts the euler angles.
  // M: A -> ground (x right, y forward, z up).
  Eigen::Matrix3d m;
  m << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  // B: camera (x right, y down, z optical) -> A at zero angles.
  Eigen::Matrix3d b;
  b << 0, 0, 1, -1, 0, 0, 0, -1, 0;
  return m * euler_to_rotation(calib.pitch, calib.yaw, calib.roll) * b;
}

std::array<Eigen::Vector3d, 8> box_corners(const Box3D& box) {
  validate(box);
  const double hl = 0.5 * box.dims.x(), hw = 0.5 * box.dims.y(), hh = 0.5 * box.dims.z();
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  // CCW in the box frame: (+,+), (-,+), (-,-), (+,-)
  const double lx[4] = {hl, -hl, -hl, hl};
  const double ly[4] = {hw, hw, -hw, -hw};
  std::array<Eigen::Vector3d, 8> out;
  for (int k = 0; k < 4; ++k) {
    const double wx = box.center.x() + c * lx[k] - s * ly[k];
    const double wy = box.center.y() + s * lx[k] + c * ly[k];
    out[k] = {wx, wy, box.center.z() - hh};
    out[k + 4] = {wx, wy, box.center.z() + hh};
  }
  return out;
}

std::array<Eigen::Vector2d, 4> bev_corners(const Box3D& box) {
  const auto corners = box_corners(box);
  std::array<Eigen::Vector2d, 4> out;
  for (int k = 0; k < 4; ++k) out[k] = corners[k].head<2>();
  return out;
}

PixelPoint project_point(const CameraCalib& calib, const Eigen::Vector3d& world) {
  const Eigen::Matrix3d r_cg = camera_to_ground_rotation(calib);
  const Eigen::Vector3d cam = r_cg.transpose() * (world - calib.position);
  PixelPoint p;
  p.depth = cam.z();
  if (cam.z() <= kDepthEpsilon) {
    p.valid = false;
    return p;
  }
  p.u = calib.fx * cam.x() / cam.z() + calib.cx;
  p.v = calib.fy * cam.y() / cam.z() + calib.cy;
  p.valid = true;
  return p;
}

std::vector<PixelPoint> project_points(const CameraCalib& calib,
                                       std::span<const Eigen::Vector3d> world) {
  validate(calib);
  const Eigen::Matrix3d r_gc = camera_to_ground_rotation(calib).transpose();
  std::vector<PixelPoint> out(world.size());
  for (size_t i = 0; i < world.size(); ++i) {
    const Eigen::Vector3d cam = r_gc * (world[i] - calib.position);
    PixelPoint& p = out[i];
    p.depth = cam.z();
    if (cam.z() <= kDepthEpsilon) continue;
    p.u = calib.fx * cam.x() / cam.z() + calib.cx;
    p.v = calib.fy * cam.y() / cam.z() + calib.cy;
    p.valid = true;
  }
  return out;
}

namespace {

double polygon_area(std::span<const Eigen::Vector2d> poly) {
  double acc = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    acc += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * acc;
}

}  // namespace

double convex_intersection_area(std::span<const Eigen::Vector2d> subject,
                                std::span<const Eigen::Vector2d> clip) {
  std::vector<Eigen::Vector2d> poly(subject.begin(), subject.end());
  std::vector<Eigen::Vector2d> next;
  const size_t m = clip.size();
  for (size_t e = 0; e < m && !poly.empty(); ++e) {
    const Eigen::Vector2d& a = clip[e];
    const Eigen::Vector2d& b = clip[(e + 1) % m];
    const Eigen::Vector2d edge = b - a;
    next.clear();
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
      const Eigen::Vector2d& p = poly[i];
      const Eigen::Vector2d& q = poly[(i + 1) % n];
      const double side_p = edge.x() * (p.y() - a.y()) - edge.y() * (p.x() - a.x());
      const double side_q = edge.x() * (q.y() - a.y()) - edge.y() * (q.x() - a.x());
      if (side_p >= 0.0) next.push_back(p);
      if ((side_p > 0.0 && side_q < 0.0) || (side_p < 0.0 && side_q > 0.0)) {
        const double t = side_p / (side_p - side_q);
        next.push_back(p + t * (q - p));
      }
    }
    poly.swap(next);
  }
  if (poly.size() < 3) return 0.0;
  return std::abs(polygon_area(poly));
}

double rotated_iou_bev(const Box3D& a, const Box3D& b) {
  validate(a);
  validate(b);
  const auto pa = bev_corners(a);
  const auto pb = bev_corners(b);
  const double area_a = a.dims.x() * a.dims.y();
  const double area_b = b.dims.x() * b.dims.y();
  if (area_a <= 0.0 || area_b <= 0.0) {
    throw std::invalid_argument("rotated_iou_bev: degenerate box");
  }
  const double inter = convex_intersection_area(pa, pb);
  return inter / (area_a + area_b - inter);
}

double iou_3d(const Box3D& a, const Box3D& b) {
  validate(a);
  validate(b);
  const double inter_bev = convex_intersection_area(bev_corners(a), bev_corners(b));
  const double za0 = a.center.z() - 0.5 * a.dims.z(), za1 = a.center.z() + 0.5 * a.dims.z();
  const double zb0 = b.center.z() - 0.5 * b.dims.z(), zb1 = b.center.z() + 0.5 * b.dims.z();
  const double overlap_z = std::max(0.0, std::min(za1, zb1) - std::max(za0, zb0));
  const double inter = inter_bev * overlap_z;
  const double vol_a = a.dims.prod();
  const double vol_b = b.dims.prod();
  if (vol_a <= 0.0 || vol_b <= 0.0) {
    throw std::invalid_argument("iou_3d: degenerate box");
  }
  return inter / (vol_a + vol_b - inter);
}

}  // namespace cbr
