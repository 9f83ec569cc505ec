#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "socialpred/common.hpp"

namespace socialpred::geometry {

/// Head-mounted camera pose in court coordinates. `forward` is the optical
/// axis, `right`/`down` the image axes. The court surface normal is +z.
struct CameraPose {
  Vec3 center{0.0, 0.0, 1.7};
  Vec3 right{0.0, -1.0, 0.0};
  Vec3 down{0.0, 0.0, -1.0};
  Vec3 forward{1.0, 0.0, 0.0};
  double focal = 300.0;
  Vec2 principal{320.0, 240.0};
  int width = 640;
  int height = 480;

  void validate() const {
    const double tol = 1e-9;
    if (std::fabs(right.norm() - 1.0) > tol || std::fabs(down.norm() - 1.0) > tol ||
        std::fabs(forward.norm() - 1.0) > tol)
      throw InvalidArgument("CameraPose: axes not unit length");
    if (std::fabs(right.dot(down)) > tol || std::fabs(right.dot(forward)) > tol ||
        std::fabs(down.dot(forward)) > tol)
      throw InvalidArgument("CameraPose: axes not orthogonal");
    if (focal <= 0.0) throw InvalidArgument("CameraPose: focal <= 0");
    if (width <= 0 || height <= 0) throw InvalidArgument("CameraPose: empty image");
  }

  /// Lifts a 2D court state to a head-height camera: optical axis horizontal
  /// along the gaze, image x to the wearer's right, image y toward the floor.
  static CameraPose from_court_state(const Vec2& position, const Vec2& gaze,
                                     double camera_height = 1.7) {
    const double n = gaze.norm();
    if (n < 1e-12) throw InvalidArgument("CameraPose: zero gaze");
    const Vec2 g = gaze / n;
    CameraPose pose;
    pose.center = Vec3(position.x(), position.y(), camera_height);
    pose.forward = Vec3(g.x(), g.y(), 0.0);
    pose.right = Vec3(g.y(), -g.x(), 0.0);
    pose.down = Vec3(0.0, 0.0, -1.0);
    return pose;
  }
};

/// Upright cylinder standing on the floor, occupied by a gazing player.
struct Cylinder {
  Vec2 base_center{0.0, 0.0};
  double radius = 0.4;
  double height = 1.9;
  Vec2 gaze{1.0, 0.0};

  void validate() const {
    if (radius <= 0.0 || height <= 0.0)
      throw InvalidArgument("Cylinder: non-positive radius or height");
  }
};

/// Cylindrical (theta, h) sampling grid. theta is an absolute court azimuth,
/// h the cylinder-height coordinate (slope of the ray per unit horizontal
/// distance). Row 0 carries h_min; column count x theta step = theta range.
struct GridSpec {
  int rows = 128;
  int cols = 256;
  double theta_center = 0.0;
  double theta_half_range = deg_to_rad(60.0);
  double h_min = -1.5;
  double h_max = 1.0;

  double theta_step() const { return 2.0 * theta_half_range / cols; }
  double h_step() const { return (h_max - h_min) / rows; }
  double theta_at(int col) const {
    return theta_center - theta_half_range + (col + 0.5) * theta_step();
  }
  double h_at(int row) const { return h_min + (row + 0.5) * h_step(); }
  size_t pixel_count() const { return static_cast<size_t>(rows) * cols; }

  bool same_shape(const GridSpec& o) const {
    return rows == o.rows && cols == o.cols &&
           std::fabs(theta_half_range - o.theta_half_range) < 1e-12 &&
           std::fabs(h_min - o.h_min) < 1e-12 && std::fabs(h_max - o.h_max) < 1e-12;
  }

  /// Grid centered on the azimuth of a camera's optical axis.
  static GridSpec centered_on(const CameraPose& pose, int rows = 128, int cols = 256) {
    GridSpec g;
    g.rows = rows;
    g.cols = cols;
    g.theta_center = std::atan2(pose.forward.y(), pose.forward.x());
    return g;
  }
};

/// Simple planar RGB image with values in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::array<double, 3>> pixels;

  static Image create(int w, int h) {
    Image img;
    img.width = w;
    img.height = h;
    img.pixels.assign(static_cast<size_t>(w) * h, {0.0, 0.0, 0.0});
    return img;
  }
  std::array<double, 3>& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  const std::array<double, 3>& at(int x, int y) const {
    return pixels[static_cast<size_t>(y) * width + x];
  }
};

/// First person image reprojected onto the viewer cylinder. Pixels whose
/// ray leaves the source field of view are empty.
struct StabilizedImage {
  GridSpec grid;
  std::vector<std::array<double, 3>> rgb;
  std::vector<uint8_t> valid;

  size_t index(int row, int col) const { return static_cast<size_t>(row) * grid.cols + col; }
  bool is_valid(int row, int col) const { return valid[index(row, col)] != 0; }
  const std::array<double, 3>& at(int row, int col) const { return rgb[index(row, col)]; }
};

/// Social label render on the viewer cylinder: each pixel carries the index
/// of the nearest intersected cylinder (-1 for background) and the relative
/// gaze angle of that player as its hue. Saturation and value are the
/// constant 0.9 on player pixels and 0 on background.
struct LabelImage {
  static constexpr double kSatVal = 0.9;

  GridSpec grid;
  std::vector<int32_t> player;  // index into the cylinder list, -1 = background
  std::vector<double> hue;      // relative gaze angle in [0, 2pi), 0 on background

  size_t index(int row, int col) const { return static_cast<size_t>(row) * grid.cols + col; }
  int32_t player_at(int row, int col) const { return player[index(row, col)]; }
  double hue_at(int row, int col) const { return hue[index(row, col)]; }
  size_t occupied_count() const {
    size_t n = 0;
    for (int32_t p : player) n += (p >= 0);
    return n;
  }
};

/// Projects a camera pose to a court-plane player state. Velocity is the
/// finite difference against `previous_position` when given, zero otherwise.
inline PlayerState project_to_court(const CameraPose& pose,
                                    const std::optional<Vec2>& previous_position,
                                    double dt, int player_id = -1) {
  pose.validate();
  const Vec2 r12(pose.forward.x(), pose.forward.y());
  const double n = r12.norm();
  if (n <= 1e-6) throw DegenerateGaze("project_to_court: camera looks along the court normal");
  PlayerState s;
  s.position = Vec2(pose.center.x(), pose.center.y());
  s.gaze = r12 / n;
  if (previous_position) {
    if (dt <= 0.0) throw InvalidArgument("project_to_court: dt <= 0");
    s.velocity = (s.position - *previous_position) / dt;
  } else {
    s.velocity = Vec2::Zero();
  }
  s.player_id = player_id;
  return s;
}

struct AttentionEstimate {
  Vec2 point{0.0, 0.0};
  /// True when the least-squares point lies behind at least one gaze ray.
  bool behind_ray = false;
};

/// Least-squares intersection of the gaze rays: the point minimizing the
/// summed squared perpendicular distance to every ray's supporting line.
/// Solutions behind a ray are flagged, not rejected.
inline AttentionEstimate triangulate_attention(std::span<const PlayerState> states) {
  if (states.size() < 2)
    throw InvalidArgument("triangulate_attention: need at least 2 states");
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
  Vec2 b = Vec2::Zero();
  for (const auto& s : states) {
    const Vec2 d = s.gaze / s.gaze.norm();
    const Eigen::Matrix2d proj = Eigen::Matrix2d::Identity() - d * d.transpose();
    a += proj;
    b += proj * s.position;
  }
  // With unit directions each projector has eigenvalues {0, 1}, so the
  // normal matrix is singular iff all gazes are parallel.
  const double det = a.determinant();
  if (std::fabs(det) < 1e-10)
    throw ParallelGazes("triangulate_attention: gaze directions are parallel");
  AttentionEstimate est;
  est.point = a.ldlt().solve(b);
  for (const auto& s : states) {
    const Vec2 d = s.gaze / s.gaze.norm();
    if (d.dot(est.point - s.position) < 0.0) {
      est.behind_ray = true;
      break;
    }
  }
  return est;
}

namespace detail {

inline std::array<double, 3> bilinear_sample(const Image& img, double u, double v) {
  const int x0 = static_cast<int>(std::floor(u));
  const int y0 = static_cast<int>(std::floor(v));
  const double fx = u - x0;
  const double fy = v - y0;
  std::array<double, 3> out{0.0, 0.0, 0.0};
  const auto& p00 = img.at(x0, y0);
  const auto& p10 = img.at(std::min(x0 + 1, img.width - 1), y0);
  const auto& p01 = img.at(x0, std::min(y0 + 1, img.height - 1));
  const auto& p11 = img.at(std::min(x0 + 1, img.width - 1), std::min(y0 + 1, img.height - 1));
  for (int c = 0; c < 3; ++c) {
    const double top = p00[c] * (1.0 - fx) + p10[c] * fx;
    const double bot = p01[c] * (1.0 - fx) + p11[c] * fx;
    out[c] = top * (1.0 - fy) + bot * fy;
  }
  return out;
}

}  // namespace detail

/// Resamples a first person image onto the viewer cylinder. The direction
/// of output pixel (theta, h) is z = (cos theta, sin theta, h); it maps to
/// the normalized image coordinates (r_x.z / r.z, r_y.z / r.z) and from
/// there to pixels through the pinhole intrinsics. Rays behind the camera
/// or outside the source are marked empty.
inline StabilizedImage cylindrical_warp(const Image& source, const CameraPose& pose,
                                        const GridSpec& grid) {
  pose.validate();
  if (source.width <= 0 || source.height <= 0)
    throw InvalidArgument("cylindrical_warp: empty source image");
  StabilizedImage out;
  out.grid = grid;
  out.rgb.assign(grid.pixel_count(), {0.0, 0.0, 0.0});
  out.valid.assign(grid.pixel_count(), 0);
  for (int row = 0; row < grid.rows; ++row) {
    const double h = grid.h_at(row);
    for (int col = 0; col < grid.cols; ++col) {
      const double theta = grid.theta_at(col);
      const Vec3 z(std::cos(theta), std::sin(theta), h);
      const double depth = pose.forward.dot(z);
      if (depth <= 0.0) continue;
      const double xn = pose.right.dot(z) / depth;
      const double yn = pose.down.dot(z) / depth;
      const double u = pose.focal * xn + pose.principal.x();
      const double v = pose.focal * yn + pose.principal.y();
      if (u < 0.0 || u > source.width - 1.0 || v < 0.0 || v > source.height - 1.0) continue;
      const size_t i = out.index(row, col);
      out.rgb[i] = detail::bilinear_sample(source, u, v);
      out.valid[i] = 1;
    }
  }
  return out;
}

namespace detail {

/// Smallest positive ray parameter at which c + lambda*z enters the
/// cylinder, or nothing if the ray misses it. `z` need not be unit length.
inline std::optional<double> ray_cylinder_entry(const Vec3& origin, const Vec3& z,
                                                const Cylinder& cyl) {
  const double ox = origin.x() - cyl.base_center.x();
  const double oy = origin.y() - cyl.base_center.y();
  const double a = z.x() * z.x() + z.y() * z.y();
  const double b = 2.0 * (ox * z.x() + oy * z.y());
  const double c = ox * ox + oy * oy - cyl.radius * cyl.radius;
  double lo, hi;
  if (a < 1e-300) {
    // Vertical ray: inside or outside the circle for all lambda.
    if (c >= 0.0) return std::nullopt;
    lo = -std::numeric_limits<double>::infinity();
    hi = std::numeric_limits<double>::infinity();
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    lo = (-b - sq) / (2.0 * a);
    hi = (-b + sq) / (2.0 * a);
  }
  // Clip to the cylinder's vertical span [0, height].
  if (std::fabs(z.z()) < 1e-300) {
    if (origin.z() < 0.0 || origin.z() > cyl.height) return std::nullopt;
  } else {
    double zlo = (0.0 - origin.z()) / z.z();
    double zhi = (cyl.height - origin.z()) / z.z();
    if (zlo > zhi) std::swap(zlo, zhi);
    lo = std::max(lo, zlo);
    hi = std::min(hi, zhi);
  }
  lo = std::max(lo, 0.0);
  if (lo >= hi) return std::nullopt;
  return lo;
}

}  // namespace detail

/// Analytic label render: every grid ray is intersected against all
/// cylinders and the pixel takes the nearest hit (smallest positive entry
/// parameter). Hue is the hit player's gaze angle relative to the ego gaze.
inline LabelImage render_label_image(const CameraPose& ego, std::span<const Cylinder> others,
                                     const Vec2& ego_gaze, const GridSpec& grid) {
  ego.validate();
  for (const auto& cyl : others) {
    cyl.validate();
    const Vec2 d(ego.center.x() - cyl.base_center.x(), ego.center.y() - cyl.base_center.y());
    if (d.norm() < cyl.radius && ego.center.z() >= 0.0 && ego.center.z() <= cyl.height)
      throw InvalidArgument("render_label_image: a cylinder contains the camera center");
  }
  const double ego_angle = angle_of(ego_gaze);
  LabelImage out;
  out.grid = grid;
  out.player.assign(grid.pixel_count(), -1);
  out.hue.assign(grid.pixel_count(), 0.0);
  for (int row = 0; row < grid.rows; ++row) {
    const double h = grid.h_at(row);
    for (int col = 0; col < grid.cols; ++col) {
      const double theta = grid.theta_at(col);
      const Vec3 z(std::cos(theta), std::sin(theta), h);
      double best = std::numeric_limits<double>::infinity();
      int32_t best_j = -1;
      for (size_t j = 0; j < others.size(); ++j) {
        const auto entry = detail::ray_cylinder_entry(ego.center, z, others[j]);
        if (entry && *entry < best) {
          best = *entry;
          best_j = static_cast<int32_t>(j);
        }
      }
      if (best_j >= 0) {
        const size_t i = out.index(row, col);
        out.player[i] = best_j;
        out.hue[i] = wrap_two_pi(angle_of(others[best_j].gaze) - ego_angle);
      }
    }
  }
  return out;
}

/// Frobenius norm of the per-pixel HSV payload difference. Hue differences
/// are circular; background pixels enter as (0, 0, 0).
inline double label_distance(const LabelImage& a, const LabelImage& b) {
  if (!a.grid.same_shape(b.grid)) throw GridMismatch("label_distance: grid specs differ");
  double acc = 0.0;
  const size_t n = a.grid.pixel_count();
  for (size_t i = 0; i < n; ++i) {
    const bool pa = a.player[i] >= 0;
    const bool pb = b.player[i] >= 0;
    const double dh = circular_diff(pa ? a.hue[i] : 0.0, pb ? b.hue[i] : 0.0);
    const double ds = (pa ? LabelImage::kSatVal : 0.0) - (pb ? LabelImage::kSatVal : 0.0);
    acc += dh * dh + 2.0 * ds * ds;  // saturation and value channels are equal
  }
  return std::sqrt(acc);
}

}  // namespace socialpred::geometry
