// Python bindings. Modules and certificates cross the boundary as JSON text in
// the library's interchange format; rationals as "num/den" strings.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "persmod/construct.hpp"
#include "persmod/decomp.hpp"
#include "persmod/errors.hpp"
#include "persmod/hom.hpp"
#include "persmod/interleave.hpp"
#include "persmod/io.hpp"
#include "persmod/kan.hpp"
#include "persmod/match.hpp"
#include "persmod/random.hpp"

namespace py = pybind11;
using namespace pm;

namespace {

GridModule mod(const std::string& s) { return module_from_json(parse_json(s)); }
std::string text(const GridModule& M) { return dump(module_to_json(M)); }
std::string text(const InterleavingCertificate& c) { return dump(certificate_to_json(c)); }
Rational rat(const std::string& s) { return parse_rational(s); }

std::vector<std::string> texts(const std::vector<GridModule>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(text(m));
  return out;
}

}  // namespace

PYBIND11_MODULE(_persmod, m) {
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<MalformedInput>(m, "MalformedInput", PyExc_ValueError);
  py::register_exception<VerificationError>(m, "VerificationError", PyExc_RuntimeError);
  py::register_exception<SearchExhausted>(m, "SearchExhausted", PyExc_RuntimeError);

  m.def("module_G", [](Elem p) { return text(module_G(Field(p))); }, py::arg("p") = 65521);
  m.def("interval_module",
        [](const std::vector<std::string>& lo, const std::vector<std::string>& hi, Elem p) {
          Point a, b;
          for (const auto& x : lo) a.push_back(rat(x));
          for (const auto& x : hi) b.push_back(rat(x));
          return text(interval_module(a, b, Field(p)));
        },
        py::arg("lo"), py::arg("hi"), py::arg("p") = 65521);
  m.def("random_module",
        [](std::size_t n, std::size_t size, std::size_t max_dim, std::uint64_t seed, Elem p) {
          return text(random_module(n, size, max_dim, seed, Field(p)));
        },
        py::arg("n"), py::arg("size"), py::arg("max_dim"), py::arg("seed") = 0, py::arg("p") = 65521);
  m.def("direct_sum", [](const std::string& A, const std::string& B) {
    auto [a, b] = common_refinement(mod(A), mod(B));
    return text(direct_sum(a, b));
  });
  m.def("validate", [](const std::string& M) {
    auto r = validate(mod(M));
    return py::make_tuple(r.ok, r.message);
  });
  m.def("hom_dim", [](const std::string& M, const std::string& N) {
    return HomSpace(mod(M), mod(N)).dim();
  });
  m.def("is_indecomposable", [](const std::string& M) { return is_indecomposable(mod(M)); });
  m.def("is_isomorphic", [](const std::string& M, const std::string& N, std::uint64_t seed) {
    return bool(is_isomorphic(mod(M), mod(N), seed));
  }, py::arg("M"), py::arg("N"), py::arg("seed") = 0);
  m.def("decompose", [](const std::string& M, std::uint64_t seed) {
    return texts(decompose(mod(M), seed).summands);
  }, py::arg("M"), py::arg("seed") = 0);
  m.def("verify_certificate", [](const std::string& c) {
    auto r = verify_certificate(certificate_from_json(parse_json(c)));
    return py::make_tuple(r.ok, r.message);
  });
  m.def("rank_lower_bound", [](const std::string& M, const std::string& N) {
    return to_string(rank_lower_bound(mod(M), mod(N)));
  });
  m.def("tack", [](const std::string& A, const std::string& B, const std::string& delta) {
    auto t = tack(mod(A), mod(B), rat(delta));
    return py::make_tuple(text(t.module), text(t.certificate));
  });
  m.def("approximate_indecomposable", [](const std::string& N, const std::string& eps, std::uint64_t seed) {
    auto a = approximate_indecomposable(mod(N), rat(eps), seed);
    return py::make_tuple(text(a.module), text(a.certificate));
  }, py::arg("N"), py::arg("eps"), py::arg("seed") = 0);
  m.def("is_eps_indecomposable", [](const std::string& M, const std::string& eps, std::uint64_t seed) {
    return is_eps_indecomposable(mod(M), rat(eps), seed).holds;
  }, py::arg("M"), py::arg("eps"), py::arg("seed") = 0);
  m.def("bottleneck_upper_bound", [](const std::string& M, const std::string& N, const std::string& eps,
                                     std::uint64_t seed) {
    auto r = bottleneck_upper_bound(mod(M), mod(N), rat(eps), seed);
    return py::make_tuple(r.matched, r.certificate ? py::object(py::str(text(*r.certificate))) : py::none());
  }, py::arg("M"), py::arg("N"), py::arg("eps"), py::arg("seed") = 0);
  m.def("instability_demo", [](const std::string& M, const std::string& delta, std::uint64_t seed) {
    auto r = instability_demo(mod(M), rat(delta), seed);
    py::dict d;
    d["N"] = text(r.N);
    d["certificate"] = text(r.certificate);
    d["bottleneck_lower"] = to_string(r.bottleneck_lower);
    d["gap"] = to_string(r.gap);
    return d;
  }, py::arg("M"), py::arg("delta"), py::arg("seed") = 0);
}
