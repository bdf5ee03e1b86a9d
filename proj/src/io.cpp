#include "persmod/io.hpp"

#include <fstream>
#include <sstream>

#include "persmod/errors.hpp"

namespace pm {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw MalformedInput(what); }

const json& field_of(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing key '") + key + "'");
  return j.at(key);
}

std::size_t to_size(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    malformed(std::string(what) + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

Rational rational_from_json(const json& j) {
  if (!j.is_string()) malformed("rationals are \"num/den\" strings");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    malformed(e.what());
  }
}

std::vector<Matrix> mats_from_json(const json& arr, const GridModule& src, const GridModule& dst,
                                   const Grid& grid, const Rational& eps, const char* what) {
  if (!arr.is_array() || arr.size() != grid.size())
    malformed(std::string(what) + " needs one matrix per grid vertex");
  std::vector<Matrix> out;
  out.reserve(grid.size());
  for (std::size_t v = 0; v < grid.size(); ++v) {
    Point x = grid.point(v);
    Point y = x;
    for (auto& c : y) c += eps;
    out.push_back(matrix_from_json(arr[v], dst.dim_at(y), src.dim_at(x), src.field()));
  }
  return out;
}

}  // namespace

json grid_to_json(const Grid& g) {
  json axes = json::array();
  for (const auto& ax : g.axes()) {
    json a = json::array();
    for (const auto& c : ax) a.push_back(to_string(c));
    axes.push_back(std::move(a));
  }
  return json{{"axes", std::move(axes)}};
}

Grid grid_from_json(const json& j) {
  const json& axes = field_of(j, "axes");
  if (!axes.is_array() || axes.empty()) malformed("axes must be a nonempty array");
  std::vector<std::vector<Rational>> ax;
  for (const auto& a : axes) {
    if (!a.is_array()) malformed("each axis must be an array");
    std::vector<Rational> c;
    for (const auto& x : a) c.push_back(rational_from_json(x));
    ax.push_back(std::move(c));
  }
  try {
    return Grid(std::move(ax));
  } catch (const std::invalid_argument& e) {
    malformed(e.what());
  }
}

json matrix_to_json(const Matrix& m) { return json(m.data()); }

Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const Field& F) {
  if (!j.is_array() || j.size() != rows * cols)
    malformed("matrix needs " + std::to_string(rows * cols) + " entries");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer() || j[i].get<long long>() < 0 || j[i].get<long long>() >= F.p())
      malformed("matrix entries must be residues in [0, p)");
    m.data()[i] = j[i].get<Elem>();
  }
  return m;
}

json module_to_json(const GridModule& M) {
  json j = grid_to_json(M.grid());
  j["p"] = M.field().p();
  j["n"] = M.n();
  j["dims"] = M.dims();
  json steps = json::array();
  for (std::size_t k = 0; k < M.n(); ++k) {
    json ax = json::array();
    for (std::size_t v = 0; v < M.grid().size(); ++v) ax.push_back(matrix_to_json(M.step(k, v)));
    steps.push_back(std::move(ax));
  }
  j["steps"] = std::move(steps);
  return j;
}

GridModule module_from_json(const json& j) {
  const json& pj = field_of(j, "p");
  if (!pj.is_number_integer() || pj.get<long long>() < 2 || pj.get<long long>() >= (1LL << 31))
    malformed("p must be a prime below 2^31");
  std::optional<Field> F;
  try {
    F.emplace(static_cast<Elem>(pj.get<long long>()));
  } catch (const std::invalid_argument& e) {
    malformed(e.what());
  }
  Grid g = grid_from_json(j);
  if (to_size(field_of(j, "n"), "n") != g.n()) malformed("n does not match the number of axes");
  const json& dj = field_of(j, "dims");
  if (!dj.is_array() || dj.size() != g.size()) malformed("dims needs one entry per grid vertex");
  std::vector<std::size_t> dims;
  for (const auto& d : dj) dims.push_back(to_size(d, "dims entry"));
  const json& sj = field_of(j, "steps");
  if (!sj.is_array() || sj.size() != g.n()) malformed("steps needs one list per axis");
  std::vector<std::vector<Matrix>> steps(g.n());
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!sj[k].is_array() || sj[k].size() != g.size())
      malformed("steps needs one matrix per vertex on every axis");
    for (std::size_t v = 0; v < g.size(); ++v) {
      bool succ = g.has_successor(v, k);
      std::size_t r = succ ? dims[v + g.stride(k)] : 0, c = succ ? dims[v] : 0;
      steps[k].push_back(matrix_from_json(sj[k][v], r, c, *F));
    }
  }
  try {
    return GridModule(std::move(g), *F, std::move(dims), std::move(steps));
  } catch (const std::invalid_argument& e) {
    malformed(e.what());
  }
}

json morphism_to_json(const ModuleMorphism& f) {
  json mats = json::array();
  for (const auto& m : f.mats) mats.push_back(matrix_to_json(m));
  return json{{"source", module_to_json(f.source)},
              {"target", module_to_json(f.target)},
              {"mats", std::move(mats)}};
}

ModuleMorphism morphism_from_json(const json& j) {
  ModuleMorphism f{module_from_json(field_of(j, "source")), module_from_json(field_of(j, "target")), {}};
  if (f.source.grid() != f.target.grid()) malformed("morphism modules must share a grid");
  f.mats = mats_from_json(field_of(j, "mats"), f.source, f.target, f.source.grid(), 0, "mats");
  return f;
}

json certificate_to_json(const InterleavingCertificate& c) {
  json f = json::array(), g = json::array();
  for (const auto& m : c.f) f.push_back(matrix_to_json(m));
  for (const auto& m : c.g) g.push_back(matrix_to_json(m));
  return json{{"eps", to_string(c.eps)},   {"M", module_to_json(c.M)}, {"N", module_to_json(c.N)},
              {"grid", grid_to_json(c.grid)}, {"f", std::move(f)},     {"g", std::move(g)}};
}

InterleavingCertificate certificate_from_json(const json& j) {
  InterleavingCertificate c;
  c.eps = rational_from_json(field_of(j, "eps"));
  if (c.eps < 0) malformed("eps must be nonnegative");
  c.M = module_from_json(field_of(j, "M"));
  c.N = module_from_json(field_of(j, "N"));
  if (c.M.n() != c.N.n() || !(c.M.field() == c.N.field())) malformed("certificate modules differ in n or p");
  c.grid = grid_from_json(field_of(j, "grid"));
  if (c.grid.n() != c.M.n()) malformed("certificate grid has the wrong n");
  c.f = mats_from_json(field_of(j, "f"), c.M, c.N, c.grid, c.eps, "f");
  c.g = mats_from_json(field_of(j, "g"), c.N, c.M, c.grid, c.eps, "g");
  return c;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) malformed("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << dump(j);
}

std::string dump(const json& j) { return j.dump() + "\n"; }

}  // namespace pm
