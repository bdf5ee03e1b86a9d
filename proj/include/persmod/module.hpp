#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "persmod/errors.hpp"
#include "persmod/field.hpp"
#include "persmod/grid.hpp"
#include "persmod/matrix.hpp"

namespace pm {

class ModuleBuilder;

// Finite-grid persistence module. steps[k][v] is the dims(v+e_k) x dims(v)
// matrix for vertices v with a successor along axis k, and an empty 0x0
// matrix otherwise. The module stands for its extension to R^n: the value at
// x is the value at the largest grid vertex <= x, or 0 when there is none.
//
// Cheap to copy; the data is shared and never mutated.
class GridModule {
 public:
  GridModule() = default;
  GridModule(Grid grid, Field field, std::vector<std::size_t> dims,
             std::vector<std::vector<Matrix>> steps);

  static GridModule zero(Grid grid, Field field = Field());

  bool valid_handle() const { return d_ != nullptr; }
  const Grid& grid() const { return d_->grid; }
  const Field& field() const { return d_->field; }
  std::size_t n() const { return d_->grid.n(); }
  std::size_t dim(std::size_t v) const { return d_->dims[v]; }
  const std::vector<std::size_t>& dims() const { return d_->dims; }
  const Matrix& step(std::size_t k, std::size_t v) const { return d_->steps[k][v]; }
  const std::vector<std::vector<Matrix>>& steps() const { return d_->steps; }

  std::size_t total_dim() const;
  bool is_zero() const;

  // Composite of unit steps from grid vertex a to grid vertex b >= a.
  Matrix structure_map(std::size_t a, std::size_t b) const;
  // Dimension of the extension at an arbitrary point.
  std::size_t dim_at(const Point& x) const;
  // Structure map of the extension between points x <= y.
  Matrix map_at(const Point& x, const Point& y) const;

  // Bit-exact data equality (same grid, dims and matrices).
  bool operator==(const GridModule& o) const;
  bool operator!=(const GridModule& o) const { return !(*this == o); }

 private:
  struct Data {
    Grid grid;
    Field field;
    std::vector<std::size_t> dims;
    std::vector<std::vector<Matrix>> steps;
  };
  std::shared_ptr<const Data> d_;
  friend class ModuleBuilder;
};

// Mutable editor; build() checks shapes and commutativity.
class ModuleBuilder {
 public:
  ModuleBuilder(Grid grid, Field field);
  explicit ModuleBuilder(const GridModule& m);

  const Grid& grid() const { return grid_; }
  const Field& field() const { return field_; }
  std::size_t dim(std::size_t v) const { return dims_[v]; }
  const Matrix& step(std::size_t k, std::size_t v) const { return steps_[k][v]; }

  // Changes the dimension at v and resets every step touching v to zero.
  void set_dim(std::size_t v, std::size_t d);
  void set_step(std::size_t k, std::size_t v, Matrix m);

  GridModule build_unchecked() const;
  GridModule build() const;

 private:
  Grid grid_;
  Field field_;
  std::vector<std::size_t> dims_;
  std::vector<std::vector<Matrix>> steps_;
};

struct ValidationReport {
  bool ok = true;
  std::size_t vertex = 0;
  std::size_t axis_j = 0;
  std::size_t axis_k = 0;
  Matrix residual;
  std::string message;
};

ValidationReport validate(const GridModule& M);

// Natural transformation between two modules on the same grid.
struct ModuleMorphism {
  GridModule source;
  GridModule target;
  std::vector<Matrix> mats;

  const Matrix& at(std::size_t v) const { return mats[v]; }
};

ModuleMorphism identity_morphism(const GridModule& M);
ModuleMorphism zero_morphism(const GridModule& M, const GridModule& N);
// Returns an empty string when natural, otherwise a description of the first failure.
std::string check_natural(const ModuleMorphism& f);
ModuleMorphism compose(const ModuleMorphism& g, const ModuleMorphism& f);
ModuleMorphism add(const ModuleMorphism& f, const ModuleMorphism& g);
ModuleMorphism scale(Elem c, const ModuleMorphism& f);
bool is_iso(const ModuleMorphism& f);

GridModule direct_sum(const GridModule& M, const GridModule& N);
GridModule direct_sum(const std::vector<GridModule>& parts, const Grid& grid, const Field& field);
GridModule free_module(const Grid& grid, std::size_t i, const Field& field = Field());
GridModule interval_module(const Point& a, const Point& b, const Field& field = Field());
std::size_t max_pointwise_dim(const GridModule& M);
// M with every vertex space re-based by the given invertible matrices:
// new step = B(v+e_k) * step * B(v)^{-1}, returned with the iso M -> result.
std::pair<GridModule, ModuleMorphism> change_basis(const GridModule& M,
                                                   const std::vector<Matrix>& bases);

}  // namespace pm
