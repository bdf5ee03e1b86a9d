#include "persmod/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace pm {

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(std::string_view s) {
  std::string t(s);
  auto bad = [&] { return std::invalid_argument("malformed rational '" + t + "'"); };
  if (t.empty()) throw bad();
  auto slash = t.find('/');
  auto valid_int = [](const std::string& x) {
    std::size_t i = (!x.empty() && (x[0] == '-' || x[0] == '+')) ? 1 : 0;
    if (i >= x.size()) return false;
    for (; i < x.size(); ++i)
      if (x[i] < '0' || x[i] > '9') return false;
    return true;
  };
  std::string num = t.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : t.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+') throw bad();
  if (num[0] == '+') num.erase(0, 1);
  mpz_class n(num), d(den);
  if (d == 0) throw bad();
  Rational q(n, d);
  q.canonicalize();
  return q;
}

Grid::Grid(std::vector<std::vector<Rational>> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("grid needs at least one axis");
  for (auto& ax : axes_) {
    if (ax.empty()) throw std::invalid_argument("grid axis is empty");
    for (auto& c : ax) c.canonicalize();
    for (std::size_t i = 1; i < ax.size(); ++i)
      if (!(ax[i - 1] < ax[i])) throw std::invalid_argument("grid axis not strictly increasing");
  }
  strides_.assign(axes_.size(), 1);
  size_ = 1;
  for (std::size_t k = axes_.size(); k-- > 0;) {
    strides_[k] = size_;
    size_ *= axes_[k].size();
  }
}

Grid Grid::uniform(std::size_t n, const std::vector<Rational>& coords) {
  return Grid(std::vector<std::vector<Rational>>(n, coords));
}

Grid Grid::regular(std::size_t n, long lo, long hi, const Rational& pitch) {
  std::vector<Rational> c;
  for (long i = lo; i < hi; ++i) c.push_back(Rational(i) * pitch);
  return uniform(n, c);
}

std::size_t Grid::index(const Multi& m) const {
  std::size_t f = 0;
  for (std::size_t k = 0; k < n(); ++k) {
    if (m[k] >= axes_[k].size()) throw std::out_of_range("grid multi-index out of range");
    f += m[k] * strides_[k];
  }
  return f;
}

Multi Grid::multi(std::size_t flat) const {
  Multi m(n());
  for (std::size_t k = 0; k < n(); ++k) m[k] = coord_index(flat, k);
  return m;
}

Point Grid::point(std::size_t flat) const {
  Point p(n());
  for (std::size_t k = 0; k < n(); ++k) p[k] = coord(flat, k);
  return p;
}

bool Grid::leq(std::size_t a, std::size_t b) const {
  for (std::size_t k = 0; k < n(); ++k)
    if (coord_index(a, k) > coord_index(b, k)) return false;
  return true;
}

std::optional<std::size_t> Grid::floor_index(std::size_t k, const Rational& x) const {
  const auto& ax = axes_[k];
  auto it = std::upper_bound(ax.begin(), ax.end(), x);
  if (it == ax.begin()) return std::nullopt;
  return static_cast<std::size_t>(it - ax.begin()) - 1;
}

std::optional<std::size_t> Grid::floor_strict_index(std::size_t k, const Rational& x) const {
  const auto& ax = axes_[k];
  auto it = std::lower_bound(ax.begin(), ax.end(), x);
  if (it == ax.begin()) return std::nullopt;
  return static_cast<std::size_t>(it - ax.begin()) - 1;
}

std::optional<std::size_t> Grid::find_index(std::size_t k, const Rational& x) const {
  const auto& ax = axes_[k];
  auto it = std::lower_bound(ax.begin(), ax.end(), x);
  if (it == ax.end() || *it != x) return std::nullopt;
  return static_cast<std::size_t>(it - ax.begin());
}

std::optional<std::size_t> Grid::floor(const Point& x) const {
  std::size_t f = 0;
  for (std::size_t k = 0; k < n(); ++k) {
    auto i = floor_index(k, x[k]);
    if (!i) return std::nullopt;
    f += *i * strides_[k];
  }
  return f;
}

std::optional<std::size_t> Grid::floor_strict(const Point& x) const {
  std::size_t f = 0;
  for (std::size_t k = 0; k < n(); ++k) {
    auto i = floor_strict_index(k, x[k]);
    if (!i) return std::nullopt;
    f += *i * strides_[k];
  }
  return f;
}

std::optional<std::size_t> Grid::find(const Point& x) const {
  std::size_t f = 0;
  for (std::size_t k = 0; k < n(); ++k) {
    auto i = find_index(k, x[k]);
    if (!i) return std::nullopt;
    f += *i * strides_[k];
  }
  return f;
}

std::vector<Rational> Grid::mesh_widths(std::size_t k) const {
  std::vector<Rational> w;
  for (std::size_t i = 1; i < axes_[k].size(); ++i) w.push_back(axes_[k][i] - axes_[k][i - 1]);
  return w;
}

Grid Grid::translated(const Rational& r) const {
  auto ax = axes_;
  for (auto& a : ax)
    for (auto& c : a) c += r;
  return Grid(std::move(ax));
}

bool Grid::contains_axes_of(const Grid& sub) const {
  if (sub.n() != n()) return false;
  for (std::size_t k = 0; k < n(); ++k)
    for (const auto& c : sub.axis(k))
      if (!find_index(k, c)) return false;
  return true;
}

static std::vector<Rational> merge_axis(const std::vector<Rational>& a,
                                        const std::vector<Rational>& b) {
  std::vector<Rational> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Grid grid_union(const Grid& a, const Grid& b) {
  if (a.n() != b.n()) throw std::invalid_argument("grid dimension mismatch");
  std::vector<std::vector<Rational>> ax(a.n());
  for (std::size_t k = 0; k < a.n(); ++k) ax[k] = merge_axis(a.axis(k), b.axis(k));
  return Grid(std::move(ax));
}

Grid grid_with(const Grid& g, const std::vector<std::vector<Rational>>& extra) {
  if (extra.size() != g.n()) throw std::invalid_argument("grid dimension mismatch");
  std::vector<std::vector<Rational>> ax(g.n());
  for (std::size_t k = 0; k < g.n(); ++k) {
    auto e = extra[k];
    for (auto& c : e) c.canonicalize();
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    ax[k] = merge_axis(g.axis(k), e);
  }
  return Grid(std::move(ax));
}

Point add(const Point& x, const Rational& r) {
  Point y = x;
  for (auto& c : y) c += r;
  return y;
}

Point add(const Point& x, const Point& y) {
  Point z = x;
  for (std::size_t k = 0; k < z.size(); ++k) z[k] += y[k];
  return z;
}

bool leq(const Point& a, const Point& b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] > b[k]) return false;
  return true;
}

}  // namespace pm
