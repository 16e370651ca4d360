#include "cbr/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cbr/rng.hpp"

namespace cbr {

void validate(const SceneSpec& spec) {
  if (spec.n_objects_min < 0 || spec.n_objects_max < spec.n_objects_min) {
    throw std::invalid_argument("SceneSpec: bad object count range");
  }
  if (spec.pitch_range.x() < 0.0 || spec.pitch_range.y() > deg_to_rad(35.0) ||
      spec.pitch_range.y() < spec.pitch_range.x()) {
    throw std::invalid_argument("SceneSpec: pitch range must lie within [0, 35] degrees");
  }
  auto nonempty = [](const Eigen::Vector2d& r) { return r.y() >= r.x(); };
  if (!nonempty(spec.length_range) || !nonempty(spec.width_range) ||
      !nonempty(spec.height_range) || !nonempty(spec.camera_height_range) ||
      !nonempty(spec.focal_range) || !nonempty(spec.object_y_range)) {
    throw std::invalid_argument("SceneSpec: empty range");
  }
  if (spec.image_size < 32) throw std::invalid_argument("SceneSpec: image too small");
  if (spec.n_classes < 1) throw std::invalid_argument("SceneSpec: n_classes must be >= 1");
}

namespace {

bool projects_into_image(const CameraCalib& calib, const Box3D& box, int size) {
  const auto corners = box_corners(box);
  const auto pix = project_points(calib, corners);
  for (const auto& p : pix) {
    if (p.valid && p.u >= 0 && p.u < size && p.v >= 0 && p.v < size) return true;
  }
  return false;
}

bool center_well_inside(const CameraCalib& calib, const Box3D& box, int size, double margin) {
  const PixelPoint p = project_point(calib, box.center);
  return p.valid && p.u >= margin && p.u < size - margin && p.v >= margin && p.v < size - margin;
}

Box3D inflate(const Box3D& box, double pad) {
  Box3D b = box;
  b.dims.x() += 2 * pad;
  b.dims.y() += 2 * pad;
  return b;
}

}  // namespace

namespace {

// Everything but the rendering; frame.image is left as an empty buffer of the
// requested size.
Frame sample_scene_core(const SceneSpec& spec, uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  Frame frame;

  CameraCalib& calib = frame.calib;
  const double scale = spec.image_size / 256.0;
  calib.fx = calib.fy = rng.uniform(spec.focal_range.x(), spec.focal_range.y()) * scale;
  calib.cx = calib.cy = spec.image_size / 2.0;
  calib.pitch = rng.uniform(spec.pitch_range.x(), spec.pitch_range.y());
  calib.yaw = rng.uniform(spec.cam_yaw_range.x(), spec.cam_yaw_range.y());
  calib.roll = rng.uniform(spec.cam_roll_range.x(), spec.cam_roll_range.y());
  calib.position = {0.0, 0.0,
                    rng.uniform(spec.camera_height_range.x(), spec.camera_height_range.y())};

  const int wanted = rng.uniform_int(spec.n_objects_min, spec.n_objects_max);
  constexpr int kMaxTriesPerObject = 60;
  constexpr double kClearance = 0.35;  // meters of BEV padding between objects

  for (int k = 0; k < wanted; ++k) {
    for (int attempt = 0; attempt < kMaxTriesPerObject; ++attempt) {
      Box3D box;
      box.class_id = spec.n_classes == 1 ? 0 : rng.uniform_int(0, spec.n_classes - 1);
      box.dims = {rng.uniform(spec.length_range.x(), spec.length_range.y()),
                  rng.uniform(spec.width_range.x(), spec.width_range.y()),
                  rng.uniform(spec.height_range.x(), spec.height_range.y())};
      const double y = rng.uniform(spec.object_y_range.x(), spec.object_y_range.y());
      const double x_lim = std::min(kPerceptionX - 3.0, 0.9 * y * calib.cx / calib.fx + 4.0);
      const double x = rng.uniform(-x_lim, x_lim);
      box.center = {x, y, 0.5 * box.dims.z()};  // resting on the ground
      box.yaw = normalize_angle(rng.uniform(-M_PI, M_PI));

      if (!center_well_inside(calib, box, spec.image_size, 6.0)) continue;
      if (!projects_into_image(calib, box, spec.image_size)) continue;

      const Box3D padded = inflate(box, kClearance);
      bool clear = true;
      for (const Box3D& other : frame.boxes) {
        if (rotated_iou_bev(padded, inflate(other, kClearance)) > 0.0) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;

      frame.boxes.push_back(box);
      break;
    }
  }
  frame.image = ImageU8(spec.image_size, spec.image_size);
  return frame;
}

}  // namespace

Frame sample_scene(const SceneSpec& spec, uint64_t seed) {
  Frame frame = sample_scene_core(spec, seed);
  frame.image = render_image(frame);
  return frame;
}

namespace {

struct Rgb {
  double r, g, b;
};

Rgb hsv_to_rgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c; g = x;
  } else if (hp < 2) {
    r = x; g = c;
  } else if (hp < 3) {
    g = c; b = x;
  } else if (hp < 4) {
    g = x; b = c;
  } else if (hp < 5) {
    r = x; b = c;
  } else {
    r = c; b = x;
  }
  const double m = v - c;
  return {r + m, g + m, b + m};
}

// quad corner indices into box_corners() output, outward per face
constexpr int kFaces[6][4] = {
    {3, 2, 1, 0},  // bottom (viewed from below)
    {4, 5, 6, 7},  // top
    {0, 1, 5, 4},  // side y+ in box frame
    {1, 2, 6, 5},  // side x-
    {2, 3, 7, 6},  // side y-
    {3, 0, 4, 7},  // side x+
};

}  // namespace

ImageU8 render_image(const Frame& frame) {
  const CameraCalib& calib = frame.calib;
  if (frame.image.width <= 0 || frame.image.height <= 0) {
    throw std::invalid_argument("render_image: frame.image must carry the target size");
  }
  const int w = frame.image.width, h = frame.image.height;
  std::vector<double> buf(static_cast<size_t>(w) * h * 3, 0.0);

  const Eigen::Matrix3d r_cg = camera_to_ground_rotation(calib);
  const Eigen::Vector3d cam_pos = calib.position;

  // ground plane with distance shading plus lane stripes; sky above horizon
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Eigen::Vector3d dir_cam((x + 0.5 - calib.cx) / calib.fx,
                                    (y + 0.5 - calib.cy) / calib.fy, 1.0);
      const Eigen::Vector3d dir = r_cg * dir_cam;
      double* px = &buf[(static_cast<size_t>(y) * w + x) * 3];
      if (dir.z() < -1e-9) {
        const double t = -cam_pos.z() / dir.z();
        const Eigen::Vector3d g = cam_pos + t * dir;
        const double rho = std::hypot(g.x(), g.y());
        const double fade = std::min(rho, 140.0) / 140.0;
        const double stripe = 0.04 * std::cos(2.0 * M_PI * g.x() / 7.5) +
                              0.025 * std::cos(2.0 * M_PI * g.y() / 12.0);
        const double base = 0.52 - 0.30 * fade + stripe;
        px[0] = base * 0.96;
        px[1] = base;
        px[2] = base * 0.90;
      } else {
        const double grad = static_cast<double>(y) / h;
        px[0] = 0.55 + 0.10 * grad;
        px[1] = 0.62 + 0.08 * grad;
        px[2] = 0.78 + 0.05 * grad;
      }
    }
  }

  // far-to-near painter ordering by camera-frame depth of the box center
  std::vector<int> order(frame.boxes.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  const Eigen::Matrix3d r_gc = r_cg.transpose();
  std::vector<double> depth(frame.boxes.size());
  for (size_t i = 0; i < frame.boxes.size(); ++i) {
    depth[i] = (r_gc * (frame.boxes[i].center - cam_pos)).z();
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return depth[a] > depth[b]; });

  const Eigen::Vector3d sun = Eigen::Vector3d(0.35, -0.5, 0.85).normalized();

  for (const int idx : order) {
    const Box3D& box = frame.boxes[idx];
    const auto corners = box_corners(box);
    const auto pix = project_points(calib, corners);

    Rng color_rng(Rng::mix(static_cast<uint64_t>(frame.id) * 1315423911ULL + idx));
    const Rgb base = hsv_to_rgb(color_rng.uniform(), 0.35 + 0.3 * color_rng.uniform(),
                                0.45 + 0.3 * color_rng.uniform());

    for (const auto& face : kFaces) {
      bool ok = true;
      for (int k = 0; k < 4; ++k) ok = ok && pix[face[k]].valid;
      if (!ok) continue;

      const Eigen::Vector3d centroid = 0.25 * (corners[face[0]] + corners[face[1]] +
                                               corners[face[2]] + corners[face[3]]);
      Eigen::Vector3d normal = (corners[face[1]] - corners[face[0]])
                                   .cross(corners[face[2]] - corners[face[0]])
                               .normalized();
      if (normal.dot(centroid - box.center) < 0) normal = -normal;
      if (normal.dot(centroid - cam_pos) >= 0) continue;  // backface

      const double shade = 0.45 + 0.55 * std::max(0.0, normal.dot(sun));
      const double rgb[3] = {base.r * shade, base.g * shade, base.b * shade};

      double u0 = 1e9, u1 = -1e9, v0 = 1e9, v1 = -1e9;
      Eigen::Vector2d poly[4];
      for (int k = 0; k < 4; ++k) {
        poly[k] = {pix[face[k]].u, pix[face[k]].v};
        u0 = std::min(u0, poly[k].x());
        u1 = std::max(u1, poly[k].x());
        v0 = std::min(v0, poly[k].y());
        v1 = std::max(v1, poly[k].y());
      }
      const int ix0 = std::max(0, static_cast<int>(std::floor(u0)));
      const int ix1 = std::min(w - 1, static_cast<int>(std::ceil(u1)));
      const int iy0 = std::max(0, static_cast<int>(std::floor(v0)));
      const int iy1 = std::min(h - 1, static_cast<int>(std::ceil(v1)));

      for (int py = iy0; py <= iy1; ++py) {
        for (int pxi = ix0; pxi <= ix1; ++pxi) {
          const Eigen::Vector2d p(pxi + 0.5, py + 0.5);
          double min_side = 1e9, max_side = -1e9;
          for (int k = 0; k < 4; ++k) {
            const Eigen::Vector2d& a = poly[k];
            const Eigen::Vector2d& b = poly[(k + 1) % 4];
            const double side = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
            min_side = std::min(min_side, side);
            max_side = std::max(max_side, side);
          }
          if (min_side >= 0.0 || max_side <= 0.0) {  // inside for either winding
            double* dst = &buf[(static_cast<size_t>(py) * w + pxi) * 3];
            dst[0] = rgb[0];
            dst[1] = rgb[1];
            dst[2] = rgb[2];
          }
        }
      }
    }
  }

  // additive sensor noise, then quantize
  Rng noise(Rng::mix(static_cast<uint64_t>(frame.id) ^ 0xBADC0FFEE0DDF00DULL));
  ImageU8 out(w, h);
  for (size_t i = 0; i < buf.size(); ++i) {
    const double v = buf[i] + noise.uniform(-0.02, 0.02);
    out.data[i] = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  }
  return out;
}

Frame generate_frame(const SceneSpec& spec, int index) {
  Frame frame =
      sample_scene_core(spec, Rng(spec.seed).split(static_cast<uint64_t>(index)).seed());
  frame.id = index;
  frame.image = render_image(frame);
  return frame;
}

std::vector<Frame> generate_frames(const SceneSpec& spec, int count) {
  std::vector<Frame> frames;
  frames.reserve(count);
  for (int i = 0; i < count; ++i) frames.push_back(generate_frame(spec, i));
  return frames;
}

}  // namespace cbr
