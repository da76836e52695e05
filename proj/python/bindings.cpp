#include "bvk/certificate.hpp"
#include "bvk/cli.hpp"
#include "bvk/errors.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace bvk;

namespace {

// Python ints of any size go through decimal strings.
py::int_ to_py(const BigInt& x) { return py::int_(py::str(x.str())); }

py::list to_py(const IntVector& v) {
  py::list out;
  for (const auto& x : v) out.append(to_py(x));
  return out;
}

py::dict spectrum_dict(const SupernaturalTruncation& s) {
  py::dict d;
  for (const auto& e : s.entries) {
    py::object value;
    if (e.kind == ValuationKind::Infinity)
      value = py::float_(std::numeric_limits<double>::infinity());
    else
      value = py::int_(e.value);
    d[to_py(e.p)] = value;
  }
  return d;
}

// Verdict plus the canonical certificate text (None when Unknown).
template <class Result, class Certify>
py::dict verdict(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b, const Result& r,
                 const ClassifyBounds& bounds, Certify certify) {
  py::dict d;
  d["verdict"] = to_string(r.verdict);
  d["certificate"] = py::none();
  if (r.verdict != Verdict::Unknown) d["certificate"] = py::str(certificate_text(certify(a, b, r, bounds)));
  return d;
}

ClassifyBounds bounds_of(std::size_t depth, std::size_t max_level, unsigned primes) {
  ClassifyBounds b;
  b.depth = depth;
  b.max_level = max_level;
  b.prime_cutoff = primes;
  return b;
}

}  // namespace

PYBIND11_MODULE(_bvkit, m) {
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<CapabilityError>(m, "CapabilityError", PyExc_RuntimeError);

  py::class_<OrderedBratteliDiagram>(m, "Diagram")
      .def_static("parse", &parse_diagram, py::arg("text"))
      .def_static("load", &load_diagram, py::arg("path"))
      .def("serialize", &serialize_diagram)
      .def_property_readonly("is_stationary", &OrderedBratteliDiagram::is_stationary)
      .def("vertex_count", &OrderedBratteliDiagram::vertex_count, py::arg("level"))
      .def("heights", [](const OrderedBratteliDiagram& d, std::size_t level) { return to_py(d.heights(level)); },
           py::arg("level"))
      .def("__repr__", [](const OrderedBratteliDiagram& d) { return "Diagram(" + serialize_diagram(d) + ")"; });

  m.def("frobenius", &frobenius, py::arg("generators"));
  m.def("represent", &represent, py::arg("d"), py::arg("generators"));

  m.def(
      "divides_unit",
      [](const OrderedBratteliDiagram& d, long long n, std::size_t depth) {
        auto r = divides_unit(DimGroup(d), BigInt(n), depth);
        return py::make_tuple(to_string(r.verdict), r.level);
      },
      py::arg("diagram"), py::arg("n"), py::arg("depth") = 40);

  m.def(
      "periodic_spectrum",
      [](const OrderedBratteliDiagram& d, unsigned primes, std::size_t depth) {
        SpectrumBounds b;
        b.prime_cutoff = primes;
        b.depth = depth;
        auto s = periodic_spectrum(DimGroup(d), b);
        return py::make_tuple(spectrum_dict(s), s.complete);
      },
      py::arg("diagram"), py::arg("primes") = 97, py::arg("depth") = 40);

  m.def(
      "classify_weak",
      [](const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b, std::size_t depth, std::size_t max_level,
         unsigned primes) {
        auto bounds = bounds_of(depth, max_level, primes);
        return verdict(a, b, decide_weak(DimGroup(a), DimGroup(b), bounds), bounds, certify_weak);
      },
      py::arg("a"), py::arg("b"), py::arg("depth") = 40, py::arg("max_level") = 12, py::arg("primes") = 97);
  m.def(
      "classify_tau",
      [](const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b, std::size_t depth, std::size_t max_level,
         unsigned primes) {
        auto bounds = bounds_of(depth, max_level, primes);
        return verdict(a, b, decide_tau(DimGroup(a), DimGroup(b), bounds), bounds, certify_tau);
      },
      py::arg("a"), py::arg("b"), py::arg("depth") = 40, py::arg("max_level") = 12, py::arg("primes") = 97);
  m.def(
      "classify_k",
      [](const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b, std::size_t depth, std::size_t max_level,
         unsigned primes) {
        auto bounds = bounds_of(depth, max_level, primes);
        return verdict(a, b, decide_k_conjugacy(DimGroup(a), DimGroup(b), bounds), bounds, certify_k_conjugacy);
      },
      py::arg("a"), py::arg("b"), py::arg("depth") = 40, py::arg("max_level") = 12, py::arg("primes") = 97);

  m.def(
      "verify_certificate",
      [](const std::string& text) {
        auto c = verify_certificate(text);
        return py::make_tuple(c.ok, c.claim, c.reason);
      },
      py::arg("text"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int status = cli::run(args, out, err);
        return py::make_tuple(status, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line front end in-process; returns (status, stdout, stderr).");
}
