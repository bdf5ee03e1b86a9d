// Command line front end: reads and writes the JSON module and certificate formats.
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "persmod/construct.hpp"
#include "persmod/decomp.hpp"
#include "persmod/io.hpp"
#include "persmod/kan.hpp"
#include "persmod/match.hpp"
#include "persmod/random.hpp"

using namespace pm;

namespace {

enum Exit { kOk = 0, kVerification = 1, kMalformed = 2, kPrecondition = 3 };

struct Options {
  std::optional<std::uint64_t> seed;
  std::string eps = "1/2", delta = "1";
  std::optional<Elem> p;
  std::size_t jobs = 1;
  std::string output, proof;
  std::vector<std::string> inputs;
  std::size_t n = 2, size = 4, max_dim = 3, count = 10;
};

std::uint64_t seed_of(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("PF_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw MalformedInput(std::string("PF_SEED is not an integer: ") + env);
    }
  }
  return 0;
}

Rational rational_arg(const std::string& s, const char* flag) {
  try {
    return parse_rational(s);
  } catch (const std::invalid_argument&) {
    throw MalformedInput(std::string(flag) + " expects a rational such as 1/2, got '" + s + "'");
  }
}

GridModule load_module(const Options& o, const std::string& path) {
  GridModule M = module_from_json(read_json_file(path));
  if (o.p && M.field().p() != *o.p)
    throw PreconditionError(path + " is over F_" + std::to_string(M.field().p()) + ", not F_" +
                            std::to_string(*o.p));
  return M;
}

void emit(const Options& o, const json& j) {
  if (o.output.empty()) std::cout << dump(j);
  else write_json_file(o.output, j);
}

json rationals(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& r : v) a.push_back(to_string(r));
  return a;
}

json report_json(const ValidationReport& r) {
  json j{{"ok", r.ok}};
  if (!r.ok) j["message"] = r.message;
  return j;
}

int cmd_validate(const Options& o) {
  bool all = true;
  json out = json::array();
  for (const auto& path : o.inputs) {
    auto r = validate(load_module(o, path));
    json j = report_json(r);
    j["file"] = path;
    out.push_back(j);
    all = all && r.ok;
  }
  emit(o, o.inputs.size() == 1 ? out[0] : out);
  return all ? kOk : kVerification;
}

int cmd_decompose(const Options& o) {
  GridModule M = load_module(o, o.inputs[0]);
  Decomposition d = decompose(M, seed_of(o));
  json s = json::array();
  for (const auto& X : d.summands) s.push_back(module_to_json(X));
  auto cert = iso_certificate(d.witness);
  json out{{"kind", "decompose"}, {"summands", s}, {"certificate", certificate_to_json(cert)}};
  if (!o.proof.empty()) write_json_file(o.proof, out["certificate"]);
  emit(o, out);
  return kOk;
}

int cmd_tack(const Options& o) {
  GridModule A = load_module(o, o.inputs[0]), B = load_module(o, o.inputs[1]);
  Rational delta = rational_arg(o.delta, "--delta");
  auto t = tack(A, B, delta);
  json out{{"kind", "tack"},
           {"delta", to_string(delta)},
           {"eps0", to_string(t.eps0)},
           {"module", module_to_json(t.module)},
           {"certificate", certificate_to_json(t.certificate)}};
  if (!o.proof.empty()) {
    json chain = json::array();
    for (const auto& c : t.stages) chain.push_back(certificate_to_json(c));
    write_json_file(o.proof, json{{"kind", "chain"}, {"chain", chain}});
  }
  emit(o, out);
  return kOk;
}

json approx_json(const Approximation& a, const Rational& eps) {
  return json{{"kind", "approx-indec"},
              {"eps", to_string(eps)},
              {"summands", a.summands.size()},
              {"accumulated", rationals(a.accumulated)},
              {"module", module_to_json(a.module)},
              {"certificate", certificate_to_json(a.certificate)}};
}

int cmd_approx(const Options& o) {
  GridModule N = load_module(o, o.inputs[0]);
  Rational eps = rational_arg(o.eps, "--eps");
  auto a = approximate_indecomposable(N, eps, seed_of(o), [](std::size_t i, std::size_t k) {
    std::cerr << "tacking " << i << "/" << k << "\n";
  });
  json out = approx_json(a, eps);
  if (!o.proof.empty()) write_json_file(o.proof, out["certificate"]);
  emit(o, out);
  return kOk;
}

int cmd_match(const Options& o) {
  GridModule M = load_module(o, o.inputs[0]), N = load_module(o, o.inputs[1]);
  Rational eps = rational_arg(o.eps, "--eps");
  auto r = bottleneck_upper_bound(M, N, eps, seed_of(o));
  json edges = json::array(), obs = json::array(), pairs = json::array();
  for (const auto& e : r.edges)
    edges.push_back(json{{"left", e.left},
                         {"right", e.right},
                         {"kind", e.kind},
                         {"certificate", certificate_to_json(e.certificate)}});
  for (const auto& b : r.obstructions)
    obs.push_back(json{{"left", b.left}, {"right", b.right}, {"bound", to_string(b.bound)}});
  for (const auto& [a, b] : r.pairs)
    pairs.push_back(json{{"left", a ? json(*a) : json()}, {"right", b ? json(*b) : json()}});
  json out{{"kind", "match"},       {"eps", to_string(eps)}, {"matched", r.matched},
           {"left", r.left.size()}, {"right", r.right.size()}, {"pairs", pairs},
           {"edges", edges},        {"obstructions", obs}};
  if (r.certificate) out["certificate"] = certificate_to_json(*r.certificate);
  if (!o.proof.empty() && r.certificate) write_json_file(o.proof, out["certificate"]);
  emit(o, out);
  return kOk;
}

// Re-checks any output of this tool from the file alone.
struct Checker {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  std::optional<InterleavingCertificate> cert(const json& j, const std::string& what) {
    auto c = certificate_from_json(j);
    auto r = verify_certificate(c);
    expect(r.ok, what + ": " + r.message);
    if (!r.ok) return std::nullopt;
    return c;
  }

  void run(const json& j) {
    if (j.contains("dims")) {
      auto r = validate(module_from_json(j));
      expect(r.ok, "module: " + r.message);
      return;
    }
    if (j.contains("f")) {
      cert(j, "certificate");
      return;
    }
    std::string kind = j.value("kind", "");
    if (kind == "decompose") {
      auto c = cert(j.at("certificate"), "witness");
      std::vector<GridModule> parts;
      for (const auto& s : j.at("summands")) {
        parts.push_back(module_from_json(s));
        expect(is_indecomposable(parts.back()), "summand is not indecomposable");
      }
      if (c) {
        expect(c->eps == 0, "witness is not an isomorphism");
        expect(same_extension(c->N, direct_sum(parts, c->N.grid(), c->N.field())),
               "witness target is not the sum of the summands");
      }
    } else if (kind == "tack" || kind == "approx-indec") {
      GridModule M = module_from_json(j.at("module"));
      expect(is_indecomposable(M), "module is not indecomposable");
      auto c = cert(j.at("certificate"), "certificate");
      if (c) {
        expect(same_extension(c->N, M), "certificate does not end at the module");
        if (kind == "tack")
          expect(c->eps < parse_rational(j.at("delta").get<std::string>()), "eps >= delta");
        else
          expect(c->eps <= parse_rational(j.at("eps").get<std::string>()), "eps above the bound");
      }
    } else if (kind == "match") {
      Rational eps = parse_rational(j.at("eps").get<std::string>());
      for (const auto& e : j.at("edges")) {
        auto c = cert(e.at("certificate"), "edge certificate");
        if (c) expect(c->eps <= eps, "edge certificate above eps");
      }
      if (j.at("matched").get<bool>()) {
        expect(j.contains("certificate"), "matched without an assembled certificate");
        if (j.contains("certificate")) {
          auto c = cert(j.at("certificate"), "assembled certificate");
          if (c) expect(c->eps <= eps, "assembled certificate above eps");
        }
      }
    } else if (kind == "chain") {
      std::optional<InterleavingCertificate> prev;
      for (const auto& s : j.at("chain")) {
        auto c = cert(s, "chain stage");
        if (c && prev) expect(same_extension(prev->N, c->M), "chain stages do not meet");
        prev = c;
      }
    } else {
      throw MalformedInput("certify: unrecognized document");
    }
  }
};

int cmd_certify(const Options& o) {
  bool all = true;
  json out = json::array();
  for (const auto& path : o.inputs) {
    Checker ch;
    ch.run(read_json_file(path));
    out.push_back(json{{"file", path}, {"ok", ch.failures.empty()}, {"failures", ch.failures}});
    all = all && ch.failures.empty();
  }
  emit(o, o.inputs.size() == 1 ? out[0] : out);
  return all ? kOk : kVerification;
}

int cmd_gadget(const Options& o) {
  emit(o, module_to_json(module_G(Field(o.p.value_or(Field::kDefaultPrime)))));
  return kOk;
}

int cmd_random(const Options& o) {
  if (o.n == 0 || o.size == 0 || o.max_dim == 0) throw PreconditionError("random needs positive bounds");
  Field F(o.p.value_or(Field::kDefaultPrime));
  emit(o, module_to_json(random_module(o.n, o.size, o.max_dim, seed_of(o), F)));
  return kOk;
}

// approximate_indecomposable over seeded random modules; one summary line each.
int cmd_corpus(const Options& o) {
  Rational eps = rational_arg(o.eps, "--eps");
  std::uint64_t base = seed_of(o);
  std::vector<json> rows(o.count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err;
  auto work = [&] {
    for (std::size_t i; (i = next++) < o.count;) {
      std::uint64_t s = base + i;
      auto t0 = std::chrono::steady_clock::now();
      json row{{"seed", s}};
      try {
        GridModule N = random_module(o.n, o.size, o.max_dim, s);
        auto a = approximate_indecomposable(N, eps, s);
        bool ok = verify_certificate(a.certificate).ok && a.certificate.eps <= eps &&
                  is_indecomposable(a.module);
        row["ok"] = ok;
        row["summands"] = a.summands.size();
        row["eps"] = to_string(a.certificate.eps);
        if (!ok) failed = true;
      } catch (const std::exception& e) {
        row["ok"] = false;
        row["error"] = e.what();
        failed = true;
      }
      row["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::lock_guard<std::mutex> lk(err);
      rows[i] = row;
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::max<std::size_t>(o.jobs, 1); ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  emit(o, json(rows));
  return failed ? kVerification : kOk;
}

void diagnose(const char* kind, const std::string& msg) {
  std::cerr << json{{"error", kind}, {"message", msg}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact tools for multi-parameter persistence modules over finite grids"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "random seed (falls back to PF_SEED, then 0)");
    c->add_option("--p", o.p, "expected field characteristic");
    c->add_option("--output", o.output, "write the result here instead of stdout");
  };
  auto files = [&](CLI::App* c, int count) {
    c->add_option("inputs", o.inputs, "module files")->required()->expected(count);
  };

  auto* v = app.add_subcommand("validate", "check shapes and commutativity");
  common(v);
  v->add_option("inputs", o.inputs, "module files")->required();
  auto* d = app.add_subcommand("decompose", "split into indecomposables with a witness isomorphism");
  common(d);
  files(d, 1);
  d->add_option("--emit-proof", o.proof, "write the witness certificate here");
  auto* t = app.add_subcommand("tack", "glue two indecomposables into one");
  common(t);
  files(t, 2);
  t->add_option("--delta", o.delta, "bound on the certificate eps");
  t->add_option("--emit-proof", o.proof, "write the certificate chain here");
  auto* a = app.add_subcommand("approx-indec", "approximate by an indecomposable module");
  common(a);
  files(a, 1);
  a->add_option("--eps", o.eps, "interleaving budget");
  a->add_option("--emit-proof", o.proof, "write the certificate here");
  auto* m = app.add_subcommand("match", "search for an eps-matching of the decompositions");
  common(m);
  files(m, 2);
  m->add_option("--eps", o.eps, "matching eps");
  m->add_option("--emit-proof", o.proof, "write the assembled certificate here");
  auto* c = app.add_subcommand("certify", "re-verify a module, certificate or output of this tool");
  common(c);
  c->add_option("inputs", o.inputs, "files")->required();
  auto* g = app.add_subcommand("gadget", "write the gadget module G");
  common(g);
  auto* r = app.add_subcommand("random", "write a seeded random module");
  common(r);
  r->add_option("--n", o.n, "number of parameters");
  r->add_option("--size", o.size, "grid points per axis");
  r->add_option("--max-dim", o.max_dim, "largest pointwise dimension");
  auto* k = app.add_subcommand("corpus", "approximate a run of seeded random modules");
  common(k);
  k->add_option("--count", o.count, "number of modules");
  k->add_option("--n", o.n, "number of parameters");
  k->add_option("--size", o.size, "grid points per axis");
  k->add_option("--max-dim", o.max_dim, "largest pointwise dimension");
  k->add_option("--eps", o.eps, "interleaving budget");
  k->add_option("--jobs", o.jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diagnose("usage", e.what());
    return kMalformed;
  }

  try {
    if (*v) return cmd_validate(o);
    if (*d) return cmd_decompose(o);
    if (*t) return cmd_tack(o);
    if (*a) return cmd_approx(o);
    if (*m) return cmd_match(o);
    if (*c) return cmd_certify(o);
    if (*g) return cmd_gadget(o);
    if (*r) return cmd_random(o);
    if (*k) return cmd_corpus(o);
  } catch (const MalformedInput& e) {
    diagnose("malformed", e.what());
    return kMalformed;
  } catch (const json::exception& e) {
    diagnose("malformed", e.what());
    return kMalformed;
  } catch (const PreconditionError& e) {
    diagnose("precondition", e.what());
    return kPrecondition;
  } catch (const VerificationError& e) {
    diagnose("verification", e.what());
    return kVerification;
  } catch (const SearchExhausted& e) {
    diagnose("search-exhausted", e.what());
    return kVerification;
  } catch (const std::invalid_argument& e) {
    diagnose("precondition", e.what());
    return kPrecondition;
  } catch (const std::exception& e) {
    diagnose("error", e.what());
    return kVerification;
  }
  return kOk;
}
