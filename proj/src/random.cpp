#include "persmod/random.hpp"

namespace pm {

Matrix random_matrix(std::size_t r, std::size_t c, const Field& F, std::mt19937_64& rng) {
  std::uniform_int_distribution<Elem> d(0, F.p() - 1);
  Matrix m(r, c);
  for (auto& e : m.data()) e = d(rng);
  return m;
}

Matrix random_invertible(std::size_t n, const Field& F, std::mt19937_64& rng) {
  for (;;) {
    Matrix m = random_matrix(n, n, F, rng);
    if (is_invertible(F, m)) return m;
  }
}

GridModule random_module_on(const Grid& grid, std::size_t max_dim, std::uint64_t seed,
                            const Field& F) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dimd(0, max_dim);
  ModuleBuilder b(grid, F);
  const std::size_t n = grid.n();
  for (std::size_t v = 0; v < grid.size(); ++v) {
    std::size_t d = dimd(rng);
    b.set_dim(v, d);
    std::vector<std::size_t> preds, offs;
    std::size_t D = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (grid.coord_index(v, i) == 0) continue;
      preds.push_back(i);
      offs.push_back(D);
      D += b.dim(v - grid.stride(i));
    }
    if (d == 0 || D == 0) continue;
    // Columns of K: for each pair of predecessor axes i < j the square at
    // w = v - e_i - e_j, with step_j(w) in slot i and -step_i(w) in slot j.
    Matrix K(D, 0);
    for (std::size_t a = 0; a < preds.size(); ++a) {
      for (std::size_t c = a + 1; c < preds.size(); ++c) {
        std::size_t i = preds[a], j = preds[c];
        std::size_t w = v - grid.stride(i) - grid.stride(j);
        std::size_t dw = b.dim(w);
        if (dw == 0) continue;
        Matrix blk(D, dw);
        blk.set_block(offs[a], 0, b.step(j, w));
        blk.set_block(offs[c], 0, scale(F, F.neg(1), b.step(i, w)));
        K = hstack(K, blk);
      }
    }
    Matrix L = K.cols() == 0 ? Matrix::identity(D) : left_nullspace(F, K);
    Matrix A = mul(F, random_matrix(d, L.rows(), F, rng), L);
    for (std::size_t a = 0; a < preds.size(); ++a) {
      std::size_t i = preds[a];
      std::size_t u = v - grid.stride(i);
      b.set_step(i, u, A.block(0, offs[a], d, b.dim(u)));
    }
  }
  return b.build();
}

GridModule random_module(std::size_t n, std::size_t size, std::size_t max_dim, std::uint64_t seed,
                         const Field& F) {
  return random_module_on(Grid::regular(n, 0, static_cast<long>(size)), max_dim, seed, F);
}

GridModule random_basis_change(const GridModule& M, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Matrix> bases;
  for (std::size_t v = 0; v < M.grid().size(); ++v)
    bases.push_back(random_invertible(M.dim(v), M.field(), rng));
  return change_basis(M, bases).first;
}

}  // namespace pm
