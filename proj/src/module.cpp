#include "persmod/module.hpp"

#include <sstream>

namespace pm {

namespace {

void check_shapes(const Grid& grid, const std::vector<std::size_t>& dims,
                  const std::vector<std::vector<Matrix>>& steps) {
  if (dims.size() != grid.size()) throw std::invalid_argument("dims length does not match grid");
  if (steps.size() != grid.n()) throw std::invalid_argument("steps need one list per axis");
  for (std::size_t k = 0; k < grid.n(); ++k) {
    if (steps[k].size() != grid.size())
      throw std::invalid_argument("steps list length does not match grid");
    for (std::size_t v = 0; v < grid.size(); ++v) {
      const Matrix& s = steps[k][v];
      std::size_t r = 0, c = 0;
      if (grid.has_successor(v, k)) {
        r = dims[v + grid.stride(k)];
        c = dims[v];
      }
      if (s.rows() != r || s.cols() != c) {
        std::ostringstream os;
        os << "step on axis " << k << " at vertex " << v << " has shape " << s.rows() << "x"
           << s.cols() << ", expected " << r << "x" << c;
        throw std::invalid_argument(os.str());
      }
    }
  }
}

std::vector<std::vector<Matrix>> zero_steps(const Grid& grid,
                                            const std::vector<std::size_t>& dims) {
  std::vector<std::vector<Matrix>> steps(grid.n(), std::vector<Matrix>(grid.size()));
  for (std::size_t k = 0; k < grid.n(); ++k)
    for (std::size_t v = 0; v < grid.size(); ++v)
      if (grid.has_successor(v, k)) steps[k][v] = Matrix(dims[v + grid.stride(k)], dims[v]);
  return steps;
}

}  // namespace

GridModule::GridModule(Grid grid, Field field, std::vector<std::size_t> dims,
                       std::vector<std::vector<Matrix>> steps) {
  check_shapes(grid, dims, steps);
  for (const auto& ax : steps)
    for (const auto& s : ax)
      for (Elem e : s.data())
        if (e >= field.p()) throw std::invalid_argument("matrix entry not reduced mod p");
  d_ = std::make_shared<const Data>(
      Data{std::move(grid), field, std::move(dims), std::move(steps)});
}

GridModule GridModule::zero(Grid grid, Field field) {
  std::vector<std::size_t> dims(grid.size(), 0);
  auto steps = zero_steps(grid, dims);
  return GridModule(std::move(grid), field, std::move(dims), std::move(steps));
}

std::size_t GridModule::total_dim() const {
  std::size_t t = 0;
  for (auto d : d_->dims) t += d;
  return t;
}

bool GridModule::is_zero() const { return total_dim() == 0; }

Matrix GridModule::structure_map(std::size_t a, std::size_t b) const {
  const Grid& g = grid();
  if (!g.leq(a, b)) throw std::invalid_argument("structure_map needs a <= b");
  const Field& F = field();
  if (dim(a) == 0 || dim(b) == 0) return Matrix(dim(b), dim(a));
  Matrix cur;
  bool ident = true;
  std::size_t v = a;
  for (std::size_t k = 0; k < g.n(); ++k) {
    std::size_t target = g.coord_index(b, k);
    while (g.coord_index(v, k) < target) {
      const Matrix& s = step(k, v);
      v += g.stride(k);
      if (s.is_identity()) continue;
      if (s.rows() == 0 || s.is_zero()) return Matrix(dim(b), dim(a));
      cur = ident ? s : mul(F, s, cur);
      ident = false;
    }
  }
  return ident ? Matrix::identity(dim(a)) : cur;
}

std::size_t GridModule::dim_at(const Point& x) const {
  auto f = grid().floor(x);
  return f ? dim(*f) : 0;
}

Matrix GridModule::map_at(const Point& x, const Point& y) const {
  auto fy = grid().floor(y);
  if (!fy) return Matrix(0, 0);
  auto fx = grid().floor(x);
  if (!fx) return Matrix(dim(*fy), 0);
  return structure_map(*fx, *fy);
}

bool GridModule::operator==(const GridModule& o) const {
  if (d_ == o.d_) return true;
  if (!d_ || !o.d_) return false;
  return d_->field == o.d_->field && d_->grid == o.d_->grid && d_->dims == o.d_->dims &&
         d_->steps == o.d_->steps;
}

ModuleBuilder::ModuleBuilder(Grid grid, Field field)
    : grid_(std::move(grid)), field_(field), dims_(grid_.size(), 0) {
  steps_ = zero_steps(grid_, dims_);
}

ModuleBuilder::ModuleBuilder(const GridModule& m)
    : grid_(m.grid()), field_(m.field()), dims_(m.dims()), steps_(m.steps()) {}

void ModuleBuilder::set_dim(std::size_t v, std::size_t d) {
  dims_[v] = d;
  for (std::size_t k = 0; k < grid_.n(); ++k) {
    if (grid_.has_successor(v, k)) steps_[k][v] = Matrix(dims_[v + grid_.stride(k)], d);
    if (grid_.coord_index(v, k) > 0) {
      std::size_t u = v - grid_.stride(k);
      steps_[k][u] = Matrix(d, dims_[u]);
    }
  }
}

void ModuleBuilder::set_step(std::size_t k, std::size_t v, Matrix m) {
  if (!grid_.has_successor(v, k)) throw std::invalid_argument("set_step at a vertex without successor");
  if (m.rows() != dims_[v + grid_.stride(k)] || m.cols() != dims_[v])
    throw std::invalid_argument("set_step shape mismatch");
  steps_[k][v] = std::move(m);
}

GridModule ModuleBuilder::build_unchecked() const { return GridModule(grid_, field_, dims_, steps_); }

GridModule ModuleBuilder::build() const {
  GridModule m = build_unchecked();
  auto rep = validate(m);
  if (!rep.ok) throw VerificationError("built module is not a functor: " + rep.message);
  return m;
}

ValidationReport validate(const GridModule& M) {
  ValidationReport rep;
  const Grid& g = M.grid();
  const Field& F = M.field();
  for (std::size_t v = 0; v < g.size(); ++v) {
    for (std::size_t j = 0; j < g.n(); ++j) {
      if (!g.has_successor(v, j)) continue;
      for (std::size_t k = j + 1; k < g.n(); ++k) {
        if (!g.has_successor(v, k)) continue;
        std::size_t vj = v + g.stride(j), vk = v + g.stride(k);
        Matrix a = mul(F, M.step(k, vj), M.step(j, v));
        Matrix b = mul(F, M.step(j, vk), M.step(k, v));
        if (a != b) {
          rep.ok = false;
          rep.vertex = v;
          rep.axis_j = j;
          rep.axis_k = k;
          rep.residual = sub(F, a, b);
          std::ostringstream os;
          os << "square at vertex " << v << " (";
          auto p = g.point(v);
          for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << to_string(p[i]);
          os << ") on axes " << j << "," << k << " does not commute, residual " << rep.residual.str();
          rep.message = os.str();
          return rep;
        }
      }
    }
  }
  return rep;
}

ModuleMorphism identity_morphism(const GridModule& M) {
  ModuleMorphism f{M, M, {}};
  f.mats.reserve(M.grid().size());
  for (std::size_t v = 0; v < M.grid().size(); ++v) f.mats.push_back(Matrix::identity(M.dim(v)));
  return f;
}

ModuleMorphism zero_morphism(const GridModule& M, const GridModule& N) {
  if (M.grid() != N.grid()) throw std::invalid_argument("morphism modules on different grids");
  ModuleMorphism f{M, N, {}};
  f.mats.reserve(M.grid().size());
  for (std::size_t v = 0; v < M.grid().size(); ++v) f.mats.emplace_back(N.dim(v), M.dim(v));
  return f;
}

std::string check_natural(const ModuleMorphism& f) {
  const GridModule& M = f.source;
  const GridModule& N = f.target;
  if (M.grid() != N.grid()) return "source and target grids differ";
  const Grid& g = M.grid();
  const Field& F = M.field();
  if (f.mats.size() != g.size()) return "wrong number of components";
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (f.mats[v].rows() != N.dim(v) || f.mats[v].cols() != M.dim(v))
      return "component shape mismatch at vertex " + std::to_string(v);
  }
  for (std::size_t k = 0; k < g.n(); ++k) {
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (!g.has_successor(v, k)) continue;
      std::size_t w = v + g.stride(k);
      if (mul(F, N.step(k, v), f.mats[v]) != mul(F, f.mats[w], M.step(k, v)))
        return "naturality fails on axis " + std::to_string(k) + " at vertex " + std::to_string(v);
    }
  }
  return {};
}

ModuleMorphism compose(const ModuleMorphism& g, const ModuleMorphism& f) {
  if (f.target.grid() != g.source.grid()) throw std::invalid_argument("compose grid mismatch");
  ModuleMorphism h{f.source, g.target, {}};
  const Field& F = f.source.field();
  h.mats.reserve(f.mats.size());
  for (std::size_t v = 0; v < f.mats.size(); ++v) h.mats.push_back(mul(F, g.mats[v], f.mats[v]));
  return h;
}

ModuleMorphism add(const ModuleMorphism& f, const ModuleMorphism& g) {
  ModuleMorphism h{f.source, f.target, {}};
  const Field& F = f.source.field();
  h.mats.reserve(f.mats.size());
  for (std::size_t v = 0; v < f.mats.size(); ++v) h.mats.push_back(add(F, f.mats[v], g.mats[v]));
  return h;
}

ModuleMorphism scale(Elem c, const ModuleMorphism& f) {
  ModuleMorphism h = f;
  for (auto& m : h.mats) m = scale(f.source.field(), c, m);
  return h;
}

bool is_iso(const ModuleMorphism& f) {
  const Field& F = f.source.field();
  for (const auto& m : f.mats)
    if (!is_invertible(F, m)) return false;
  return true;
}

GridModule direct_sum(const GridModule& M, const GridModule& N) {
  if (M.grid() != N.grid()) throw std::invalid_argument("direct_sum needs modules on the same grid");
  if (!(M.field() == N.field())) throw std::invalid_argument("direct_sum field mismatch");
  const Grid& g = M.grid();
  std::vector<std::size_t> dims(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) dims[v] = M.dim(v) + N.dim(v);
  std::vector<std::vector<Matrix>> steps(g.n(), std::vector<Matrix>(g.size()));
  for (std::size_t k = 0; k < g.n(); ++k)
    for (std::size_t v = 0; v < g.size(); ++v)
      if (g.has_successor(v, k)) steps[k][v] = block_diag(M.step(k, v), N.step(k, v));
  return GridModule(g, M.field(), std::move(dims), std::move(steps));
}

GridModule direct_sum(const std::vector<GridModule>& parts, const Grid& grid, const Field& field) {
  GridModule acc = GridModule::zero(grid, field);
  for (const auto& p : parts) acc = direct_sum(acc, p);
  return acc;
}

GridModule free_module(const Grid& grid, std::size_t i, const Field& field) {
  ModuleBuilder b(grid, field);
  for (std::size_t v = 0; v < grid.size(); ++v)
    if (grid.leq(i, v)) b.set_dim(v, 1);
  for (std::size_t k = 0; k < grid.n(); ++k)
    for (std::size_t v = 0; v < grid.size(); ++v)
      if (grid.has_successor(v, k) && b.dim(v) == 1) b.set_step(k, v, Matrix::identity(1));
  return b.build();
}

GridModule interval_module(const Point& a, const Point& b, const Field& field) {
  if (a.size() != b.size() || a.empty()) throw PreconditionError("interval endpoints differ in length");
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!(a[k] < b[k])) throw PreconditionError("interval_module needs a < b componentwise");
  std::vector<std::vector<Rational>> ax;
  for (std::size_t k = 0; k < a.size(); ++k) ax.push_back({a[k], b[k]});
  Grid grid(std::move(ax));
  ModuleBuilder bld(grid, field);
  std::size_t top = grid.size() - 1;
  for (std::size_t v = 0; v < grid.size(); ++v)
    if (v != top) bld.set_dim(v, 1);
  for (std::size_t k = 0; k < grid.n(); ++k)
    for (std::size_t v = 0; v < grid.size(); ++v)
      if (grid.has_successor(v, k) && v + grid.stride(k) != top)
        bld.set_step(k, v, Matrix::identity(1));
  return bld.build();
}

std::size_t max_pointwise_dim(const GridModule& M) {
  std::size_t m = 0;
  for (auto d : M.dims()) m = std::max(m, d);
  return m;
}

std::pair<GridModule, ModuleMorphism> change_basis(const GridModule& M,
                                                   const std::vector<Matrix>& bases) {
  const Grid& g = M.grid();
  const Field& F = M.field();
  std::vector<Matrix> inv(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    auto i = inverse(F, bases[v]);
    if (!i || bases[v].rows() != M.dim(v)) throw std::invalid_argument("change_basis needs invertible matrices");
    inv[v] = std::move(*i);
  }
  std::vector<std::vector<Matrix>> steps(g.n(), std::vector<Matrix>(g.size()));
  for (std::size_t k = 0; k < g.n(); ++k)
    for (std::size_t v = 0; v < g.size(); ++v)
      if (g.has_successor(v, k))
        steps[k][v] = mul(F, mul(F, bases[v + g.stride(k)], M.step(k, v)), inv[v]);
  GridModule out(g, F, M.dims(), std::move(steps));
  return {out, ModuleMorphism{M, out, bases}};
}

}  // namespace pm
