#include "persmod/construct.hpp"

namespace pm {

namespace {

Matrix col(std::initializer_list<std::int64_t> v, const Field& F) {
  Matrix m(v.size(), 1);
  std::size_t i = 0;
  for (auto x : v) m(i++, 0) = F.from_int(x);
  return m;
}

Matrix row(std::initializer_list<std::int64_t> v, const Field& F) {
  Matrix m(1, v.size());
  std::size_t j = 0;
  for (auto x : v) m(0, j++) = F.from_int(x);
  return m;
}

}  // namespace

GridModule module_G(const Field& F) {
  Grid grid = Grid::regular(2, 0, 5);
  // dims[y][x]
  static const int dims[5][5] = {
      {0, 0, 0, 1, 1},
      {0, 0, 1, 2, 1},
      {0, 1, 2, 2, 1},
      {1, 2, 2, 2, 1},
      {1, 1, 1, 1, 1},
  };
  auto at = [&](std::size_t x, std::size_t y) { return grid.index({x, y}); };
  ModuleBuilder b(grid, F);
  for (std::size_t x = 0; x < 5; ++x)
    for (std::size_t y = 0; y < 5; ++y) b.set_dim(at(x, y), dims[y][x]);

  const Matrix I1 = Matrix::identity(1), I2 = Matrix::identity(2);
  const Matrix diag = col({1, 1}, F), anti = row({1, -1}, F);
  const Matrix first = col({1, 0}, F), second = col({0, 1}, F);
  // axis 0 (x direction)
  for (std::size_t x = 0; x < 4; ++x) b.set_step(0, at(x, 4), I1);
  b.set_step(0, at(0, 3), diag);
  b.set_step(0, at(1, 3), I2);
  b.set_step(0, at(2, 3), I2);
  b.set_step(0, at(3, 3), anti);
  b.set_step(0, at(1, 2), first);
  b.set_step(0, at(2, 2), I2);
  b.set_step(0, at(3, 2), anti);
  b.set_step(0, at(2, 1), second);
  b.set_step(0, at(3, 1), anti);
  b.set_step(0, at(3, 0), Matrix(1, 1));
  // axis 1 (y direction)
  for (std::size_t y = 0; y < 4; ++y) b.set_step(1, at(4, y), I1);
  b.set_step(1, at(0, 3), Matrix(1, 1));
  b.set_step(1, at(1, 2), first);
  b.set_step(1, at(1, 3), anti);
  b.set_step(1, at(2, 1), second);
  b.set_step(1, at(2, 2), I2);
  b.set_step(1, at(2, 3), anti);
  b.set_step(1, at(3, 0), diag);
  b.set_step(1, at(3, 1), I2);
  b.set_step(1, at(3, 2), I2);
  b.set_step(1, at(3, 3), anti);
  return b.build();
}

}  // namespace pm
