#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pm {

using Rational = mpq_class;
using Point = std::vector<Rational>;
using Multi = std::vector<std::size_t>;

// "num/den" with den > 0, fully reduced.
std::string to_string(const Rational& q);
// Accepts "a", "a/b", with optional sign. Throws std::invalid_argument.
Rational parse_rational(std::string_view s);

// Product of n strictly increasing rational axis lists. Vertices are numbered
// in lexicographic order with the first axis most significant.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<std::vector<Rational>> axes);

  // The same coordinate list on every axis.
  static Grid uniform(std::size_t n, const std::vector<Rational>& coords);
  // Integer coordinates lo, lo+1, ..., hi-1 scaled by pitch on every axis.
  static Grid regular(std::size_t n, long lo, long hi, const Rational& pitch = 1);

  std::size_t n() const { return axes_.size(); }
  const std::vector<Rational>& axis(std::size_t k) const { return axes_[k]; }
  const std::vector<std::vector<Rational>>& axes() const { return axes_; }
  std::size_t axis_size(std::size_t k) const { return axes_[k].size(); }
  std::size_t size() const { return size_; }
  std::size_t stride(std::size_t k) const { return strides_[k]; }

  std::size_t index(const Multi& m) const;
  Multi multi(std::size_t flat) const;
  std::size_t coord_index(std::size_t flat, std::size_t k) const {
    return (flat / strides_[k]) % axes_[k].size();
  }
  const Rational& coord(std::size_t flat, std::size_t k) const {
    return axes_[k][coord_index(flat, k)];
  }
  Point point(std::size_t flat) const;
  bool has_successor(std::size_t flat, std::size_t k) const {
    return coord_index(flat, k) + 1 < axes_[k].size();
  }
  bool leq(std::size_t a, std::size_t b) const;

  // Largest index i with axis[i] <= x (or < x for the strict version).
  std::optional<std::size_t> floor_index(std::size_t k, const Rational& x) const;
  std::optional<std::size_t> floor_strict_index(std::size_t k, const Rational& x) const;
  std::optional<std::size_t> find_index(std::size_t k, const Rational& x) const;
  // sup{q in grid : q <= x}, if any.
  std::optional<std::size_t> floor(const Point& x) const;
  // sup{q in grid : q_i < x_i for all i}, if any.
  std::optional<std::size_t> floor_strict(const Point& x) const;
  std::optional<std::size_t> find(const Point& x) const;

  std::vector<Rational> mesh_widths(std::size_t k) const;
  Grid translated(const Rational& r) const;
  bool contains_axes_of(const Grid& sub) const;

  bool operator==(const Grid& o) const { return axes_ == o.axes_; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  std::vector<std::vector<Rational>> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

// Per-axis union of coordinates.
Grid grid_union(const Grid& a, const Grid& b);
// Per-axis union with extra coordinates per axis.
Grid grid_with(const Grid& g, const std::vector<std::vector<Rational>>& extra);

Point add(const Point& x, const Rational& r);
Point add(const Point& x, const Point& y);
bool leq(const Point& a, const Point& b);

}  // namespace pm
