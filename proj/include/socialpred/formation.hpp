#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "socialpred/common.hpp"

namespace socialpred::formation {

/// Occupancy + mean-velocity image over a discretized court. Rows follow the
/// court width (x), columns the length (y). Occupied cells store the mean
/// velocity of the players inside them as (angle, raw speed, normalized
/// speed); the HSV-style value channel is the constant 0.9 on occupied cells.
struct FormationImage {
  static constexpr double kValue = 0.9;

  int rows = 210;
  int cols = 410;
  Court court;
  double v_max = 9.0;
  std::vector<uint8_t> occupied;
  std::vector<double> angle;       // mean velocity direction in [0, 2pi), 0 when the mean is zero
  std::vector<double> speed;       // |mean velocity| in m/s
  std::vector<double> speed_norm;  // speed / v_max clamped to [0, 1]
  std::vector<int> occupied_cells;

  size_t index(int row, int col) const { return static_cast<size_t>(row) * cols + col; }
  bool is_occupied(int row, int col) const { return occupied[index(row, col)] != 0; }

  Vec2 velocity_at(size_t i) const {
    return speed[i] * unit_from_angle(angle[i]);
  }

  bool same_shape(const FormationImage& o) const { return rows == o.rows && cols == o.cols; }

  /// Center of cell (row, col) in court coordinates.
  Vec2 cell_center(int row, int col) const {
    return Vec2((row + 0.5) * court.width / rows, (col + 0.5) * court.length / cols);
  }

  int row_of(double x) const {
    return std::clamp(static_cast<int>(std::floor(x / court.width * rows)), 0, rows - 1);
  }
  int col_of(double y) const {
    return std::clamp(static_cast<int>(std::floor(y / court.length * cols)), 0, cols - 1);
  }
};

namespace detail {

inline FormationImage make_empty(const Court& court, int rows, int cols, double v_max) {
  if (rows <= 0 || cols <= 0) throw InvalidArgument("formation: non-positive grid");
  if (v_max <= 0.0) throw InvalidArgument("formation: v_max <= 0");
  FormationImage img;
  img.rows = rows;
  img.cols = cols;
  img.court = court;
  img.v_max = v_max;
  const size_t n = static_cast<size_t>(rows) * cols;
  img.occupied.assign(n, 0);
  img.angle.assign(n, 0.0);
  img.speed.assign(n, 0.0);
  img.speed_norm.assign(n, 0.0);
  return img;
}

inline void set_cell(FormationImage& img, size_t i, const Vec2& mean_velocity) {
  const double sp = mean_velocity.norm();
  img.occupied[i] = 1;
  img.speed[i] = sp;
  img.speed_norm[i] = std::min(sp / img.v_max, 1.0);
  // A cancelled mean velocity keeps the angle convention of 0.
  img.angle[i] = sp > 0.0 ? wrap_two_pi(angle_of(mean_velocity)) : 0.0;
  img.occupied_cells.push_back(static_cast<int>(i));
}

}  // namespace detail

/// Scatters the frame's players into court cells; each occupied cell carries
/// the mean velocity of the players that land in it. Positions outside the
/// court clamp to the nearest boundary cell.
inline FormationImage formation_image(const FrameState& frame, const Court& court,
                                      int rows = 210, int cols = 410, double v_max = 9.0) {
  FormationImage img = detail::make_empty(court, rows, cols, v_max);
  const size_t n = static_cast<size_t>(rows) * cols;
  std::vector<Vec2> sums(n, Vec2::Zero());
  std::vector<int> counts(n, 0);
  std::vector<size_t> touched;
  for (const auto& p : frame.players) {
    const size_t i = img.index(img.row_of(p.position.x()), img.col_of(p.position.y()));
    if (counts[i] == 0) touched.push_back(i);
    sums[i] += p.velocity;
    counts[i] += 1;
  }
  std::sort(touched.begin(), touched.end());
  for (size_t i : touched) detail::set_cell(img, i, sums[i] / counts[i]);
  return img;
}

/// Block-mean downsampling over occupied cells only; a block is empty iff
/// every constituent cell is empty.
inline FormationImage downsample(const FormationImage& src, int factor) {
  if (factor <= 0 || src.rows % factor != 0 || src.cols % factor != 0)
    throw NonDivisibleFactor("downsample: factor does not divide the grid");
  FormationImage img = detail::make_empty(src.court, src.rows / factor, src.cols / factor, src.v_max);
  for (int br = 0; br < img.rows; ++br) {
    for (int bc = 0; bc < img.cols; ++bc) {
      Vec2 sum = Vec2::Zero();
      int count = 0;
      for (int r = br * factor; r < (br + 1) * factor; ++r) {
        for (int c = bc * factor; c < (bc + 1) * factor; ++c) {
          const size_t i = src.index(r, c);
          if (src.occupied[i]) {
            sum += src.velocity_at(i);
            count += 1;
          }
        }
      }
      if (count > 0) detail::set_cell(img, img.index(br, bc), sum / count);
    }
  }
  return img;
}

}  // namespace socialpred::formation
