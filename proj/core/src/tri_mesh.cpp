#include "hystrl/tri_mesh.hpp"

#include <cmath>

#include "hystrl/error.hpp"

namespace hystrl {

TriDomain::TriDomain(double s_lo, double s_hi) : s_lo_(s_lo), s_hi_(s_hi) {
  if (!(s_lo < s_hi) || !std::isfinite(s_lo) || !std::isfinite(s_hi)) {
    throw Error(Errc::invalid_argument, "threshold domain needs finite s_lo < s_hi");
  }
}

Triangle TriDomain::triangle() const noexcept {
  return {Point2{s_lo_, s_lo_}, Point2{s_lo_, s_hi_}, Point2{s_hi_, s_hi_}};
}

bool TriDomain::contains(Point2 p, double tol) const noexcept {
  return p.s1 >= s_lo_ - tol && p.s2 <= s_hi_ + tol && p.s1 <= p.s2 + tol;
}

double TriDomain::cell_area(int level) const noexcept {
  return std::ldexp(area(), -2 * level);
}

CellAddress::CellAddress(std::vector<std::uint8_t> digits) : digits_(std::move(digits)) {
  for (auto d : digits_) {
    if (d < 1 || d > 4) throw Error(Errc::invalid_argument, "cell digits must lie in 1..4");
  }
}

CellAddress CellAddress::from_index(int level, std::int64_t k) {
  if (level < 0 || k < 1 || k > cell_count(level)) {
    throw Error(Errc::invalid_argument, "cell index out of range for level");
  }
  std::vector<std::uint8_t> digits(static_cast<std::size_t>(level));
  std::int64_t rest = k - 1;
  for (int i = level - 1; i >= 0; --i) {
    digits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rest % 4 + 1);
    rest /= 4;
  }
  return CellAddress(std::move(digits));
}

std::int64_t CellAddress::index() const noexcept {
  std::int64_t k = 0;
  for (auto d : digits_) k = 4 * k + (d - 1);
  return k + 1;
}

CellAddress CellAddress::parent() const {
  if (digits_.empty()) throw Error(Errc::invalid_argument, "root cell has no parent");
  return CellAddress(std::vector<std::uint8_t>(digits_.begin(), digits_.end() - 1));
}

namespace {

Point2 midpoint(Point2 a, Point2 b) noexcept { return {0.5 * (a.s1 + b.s1), 0.5 * (a.s2 + b.s2)}; }

void walk(const Triangle& t, int depth, std::int64_t& counter,
          const std::function<void(std::int64_t, Point2)>& visit) {
  if (depth == 0) {
    visit(counter++, centroid(t));
    return;
  }
  for (const auto& child : subdivide(t)) walk(child, depth - 1, counter, visit);
}

void collect(const Triangle& t, int depth, std::vector<Triangle>& out) {
  if (depth == 0) {
    out.push_back(t);
    return;
  }
  for (const auto& child : subdivide(t)) collect(child, depth - 1, out);
}

}  // namespace

std::array<Triangle, 4> subdivide(const Triangle& t) noexcept {
  const Point2 ab = midpoint(t[0], t[1]);
  const Point2 bc = midpoint(t[1], t[2]);
  const Point2 ca = midpoint(t[2], t[0]);
  return {Triangle{t[0], ab, ca}, Triangle{ab, t[1], bc}, Triangle{ca, bc, t[2]},
          Triangle{bc, ca, ab}};
}

Point2 centroid(const Triangle& t) noexcept {
  return {(t[0].s1 + t[1].s1 + t[2].s1) / 3.0, (t[0].s2 + t[1].s2 + t[2].s2) / 3.0};
}

double signed_area(const Triangle& t) noexcept {
  return 0.5 * ((t[1].s1 - t[0].s1) * (t[2].s2 - t[0].s2) -
                (t[2].s1 - t[0].s1) * (t[1].s2 - t[0].s2));
}

bool strictly_inside(const Triangle& t, Point2 p) noexcept {
  const double a = signed_area(t);
  const double w0 = signed_area({p, t[1], t[2]}) / a;
  const double w1 = signed_area({t[0], p, t[2]}) / a;
  const double w2 = signed_area({t[0], t[1], p}) / a;
  return w0 > 0.0 && w1 > 0.0 && w2 > 0.0;
}

MeshLevel::MeshLevel(TriDomain domain, int level, std::vector<Triangle> cells)
    : domain_(domain), level_(level), cells_(std::move(cells)) {
  centroids_.reserve(cells_.size());
  for (const auto& c : cells_) centroids_.push_back(centroid(c));
}

MeshLevel refine(const TriDomain& domain, int level, int max_level) {
  if (level < 0) throw Error(Errc::invalid_argument, "mesh level must be nonnegative");
  if (level > max_level) {
    throw Error(Errc::level_too_deep, "level " + std::to_string(level) + " exceeds cap " +
                                          std::to_string(max_level));
  }
  std::vector<Triangle> cells;
  cells.reserve(static_cast<std::size_t>(cell_count(level)));
  collect(domain.triangle(), level, cells);
  return MeshLevel(domain, level, std::move(cells));
}

void for_each_centroid(const Triangle& root, int level,
                       const std::function<void(std::int64_t, Point2)>& visit) {
  std::int64_t counter = 0;
  walk(root, level, counter, visit);
}

}  // namespace hystrl
