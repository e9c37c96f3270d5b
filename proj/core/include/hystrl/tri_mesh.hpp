#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "hystrl/play_kernel.hpp"

namespace hystrl {

inline constexpr int kDefaultMaxLevel = 10;

struct Point2 {
  double s1 = 0.0;
  double s2 = 0.0;
};

using Triangle = std::array<Point2, 3>;

/// Threshold triangle {s_lo <= s1 <= s2 <= s_hi}.
class TriDomain {
 public:
  TriDomain() = default;
  TriDomain(double s_lo, double s_hi);

  [[nodiscard]] double s_lo() const noexcept { return s_lo_; }
  [[nodiscard]] double s_hi() const noexcept { return s_hi_; }
  [[nodiscard]] double area() const noexcept { return 0.5 * (s_hi_ - s_lo_) * (s_hi_ - s_lo_); }
  /// Vertices (s_lo, s_lo), (s_lo, s_hi), (s_hi, s_hi).
  [[nodiscard]] Triangle triangle() const noexcept;
  [[nodiscard]] bool contains(Point2 p, double tol = 0.0) const noexcept;
  [[nodiscard]] double cell_area(int level) const noexcept;

  friend bool operator==(const TriDomain&, const TriDomain&) = default;

 private:
  double s_lo_ = -1.0;
  double s_hi_ = 1.0;
};

/// Digits i_1 ... i_j over {1, 2, 3, 4}; children 1-3 are the corners in
/// parent vertex order, child 4 is the inverted centre triangle.
class CellAddress {
 public:
  CellAddress() = default;
  explicit CellAddress(std::vector<std::uint8_t> digits);

  /// Inverse of index(); k is 1-based.
  static CellAddress from_index(int level, std::int64_t k);

  [[nodiscard]] int level() const noexcept { return static_cast<int>(digits_.size()); }
  [[nodiscard]] const std::vector<std::uint8_t>& digits() const noexcept { return digits_; }
  /// 1-based linear index, the base-4 reading of (digit - 1).
  [[nodiscard]] std::int64_t index() const noexcept;
  [[nodiscard]] CellAddress parent() const;

  friend bool operator==(const CellAddress&, const CellAddress&) = default;

 private:
  std::vector<std::uint8_t> digits_;
};

[[nodiscard]] std::array<Triangle, 4> subdivide(const Triangle& t) noexcept;
[[nodiscard]] Point2 centroid(const Triangle& t) noexcept;
[[nodiscard]] double signed_area(const Triangle& t) noexcept;
[[nodiscard]] bool strictly_inside(const Triangle& t, Point2 p) noexcept;

[[nodiscard]] constexpr std::int64_t cell_count(int level) noexcept {
  return std::int64_t{1} << (2 * level);
}

/// Level-j quaternary refinement of the domain; cells are stored in linear
/// index order, so the 4^(J-j) descendants of a cell form one contiguous block.
class MeshLevel {
 public:
  MeshLevel() = default;
  MeshLevel(TriDomain domain, int level, std::vector<Triangle> cells);

  [[nodiscard]] const TriDomain& domain() const noexcept { return domain_; }
  [[nodiscard]] int level() const noexcept { return level_; }
  [[nodiscard]] std::size_t size() const noexcept { return cells_.size(); }
  [[nodiscard]] const Triangle& cell(std::size_t k) const { return cells_.at(k); }
  [[nodiscard]] const std::vector<Triangle>& cells() const noexcept { return cells_; }
  [[nodiscard]] double cell_area() const noexcept { return domain_.cell_area(level_); }
  /// Quadrature point xi_{j,k}: the cell centroid.
  [[nodiscard]] const std::vector<Point2>& quad_points() const noexcept { return centroids_; }
  [[nodiscard]] ThresholdPair threshold(std::size_t k) const {
    return {centroids_.at(k).s1, centroids_.at(k).s2};
  }

 private:
  TriDomain domain_;
  int level_ = 0;
  std::vector<Triangle> cells_;
  std::vector<Point2> centroids_;
};

/// Errc::level_too_deep when level > max_level, Errc::invalid_argument when negative.
[[nodiscard]] MeshLevel refine(const TriDomain& domain, int level, int max_level = kDefaultMaxLevel);

/// Calls visit(k, centroid) for every level-`level` cell inside `root`, in
/// linear index order, without materialising the mesh.
void for_each_centroid(const Triangle& root, int level,
                       const std::function<void(std::int64_t, Point2)>& visit);

}  // namespace hystrl
