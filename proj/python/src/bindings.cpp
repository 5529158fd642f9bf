#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "matdens/core.hpp"
#include "matdens/error.hpp"
#include "matdens/flag.hpp"
#include "matdens/limit.hpp"
#include "matdens/minimizer.hpp"
#include "matdens/sdp.hpp"
#include "matdens/search.hpp"

namespace py = pybind11;
using namespace matdens;

namespace {

// Matrices cross the boundary as inline strings ("0 0;0 1") or nested lists.
SymbolMatrix to_matrix(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return SymbolMatrix::parse_inline(obj.cast<std::string>());
  return SymbolMatrix::from_rows(obj.cast<std::vector<std::vector<Symbol>>>());
}

std::vector<std::vector<Symbol>> to_rows(const SymbolMatrix& m) {
  std::vector<std::vector<Symbol>> rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) rows[i].assign(m.row(i).begin(), m.row(i).end());
  return rows;
}

py::object to_fraction(const ExactFraction& f) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(f.to_string());
}

py::int_ to_int(const BigInt& v) {
  const std::string digits = v.get_str();
  return py::reinterpret_steal<py::int_>(PyLong_FromString(digits.c_str(), nullptr, 10));
}

py::dict report_dict(const VerificationReport& rep) {
  py::dict d;
  d["D"] = to_int(rep.D);
  d["trCM"] = to_int(rep.trCM);
  d["epsilon"] = to_fraction(rep.epsilon);
  d["f_upper"] = to_fraction(rep.f_upper);
  d["min_diagonal"] = to_int(rep.min_diagonal);
  d["M"] = rep.scale_M;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact submatrix pattern densities, extremal searches and flag-algebra certificates.";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<VerificationError>(m, "VerificationError", PyExc_RuntimeError);

  m.def("count_pattern", [](const py::object& H, const py::object& M) {
    return to_int(count_pattern(to_matrix(H), to_matrix(M)));
  }, py::arg("pattern"), py::arg("matrix"));
  m.def("density", [](const py::object& H, const py::object& M) { return to_fraction(density(to_matrix(H), to_matrix(M))); },
        py::arg("pattern"), py::arg("matrix"));
  m.def("canonical_form", [](const py::object& H) { return to_rows(canonical_form(to_matrix(H))); }, py::arg("pattern"));
  m.def("density_isomorphic", [](const py::object& a, const py::object& b) {
    return density_isomorphic(to_matrix(a), to_matrix(b));
  });
  m.def("is_monotone", [](const py::object& M) { return is_monotone(to_matrix(M)); });
  m.def("hasse_diagram", [](std::size_t h, std::size_t k) {
    const auto d = hasse_diagram(h, k);
    py::list nodes;
    for (const auto& n : d.nodes) nodes.append(to_rows(n));
    py::dict out;
    out["nodes"] = nodes;
    out["edges"] = d.edges;
    out["dot"] = d.to_dot();
    return out;
  }, py::arg("h"), py::arg("max_symbols"));

  m.def("f_exact", [](const py::object& H, std::size_t n, bool monotone, double budget, unsigned workers) {
    SearchOptions o;
    o.monotone_only = monotone;
    o.budget = budget;
    o.workers = workers;
    const SymbolMatrix pattern = to_matrix(H);
    SearchResult r;
    {
      py::gil_scoped_release release;
      r = f_exact(pattern, n, o);
    }
    return py::make_tuple(to_fraction(r.best_value), to_rows(r.witness));
  }, py::arg("pattern"), py::arg("n"), py::arg("monotone") = false, py::arg("budget") = 5e9, py::arg("workers") = 0);
  m.def("ferrers_optimum", [](std::size_t n) {
    const auto r = ferrers_optimum(n);
    return py::make_tuple(to_fraction(r.normalized()), r.zero_counts);
  }, py::arg("n"));

  m.def("eval_gstar", &eval_gstar, py::arg("x"));
  m.def("functional_F_gstar", [](double tol) {
    const auto r = functional_F_gstar(tol);
    return py::make_tuple(r.value, r.error_estimate);
  }, py::arg("tolerance") = 1e-9);
  m.def("functional_F_step", [](const std::vector<double>& breakpoints, const std::vector<double>& values) {
    StepFunction g;
    g.breakpoints = breakpoints;
    g.values = values;
    return functional_F(g);
  }, py::arg("breakpoints"), py::arg("values"));
  m.def("kenyon_canonical", [] { return kenyon_objective(AtomicMeasure::canonical()); });
  m.def("sample_matrix", [](std::size_t n) { return to_rows(sample_matrix(n)); }, py::arg("n"));

  m.def("theorem2_matrix", [](std::size_t h) { return to_rows(theorem2_matrix(h)); }, py::arg("h"));
  m.def("minimizer_bound", [](std::size_t h) { return to_fraction(minimizer_bound(h)); }, py::arg("h"));
  m.def("max_word_density", [](const std::string& w, std::size_t n) {
    const auto r = max_word_density(parse_word(w), n);
    return py::make_tuple(to_fraction(r.value), word_to_string(r.witness));
  }, py::arg("word"), py::arg("n"));

  m.def("flag_count", [](const py::object& type, std::size_t r, std::size_t c) {
    return enumerate_flags(FlagType{to_matrix(type)}, r, c).size();
  }, py::arg("type"), py::arg("r"), py::arg("c"));
  m.def("double_counting_check", [](const py::object& H, std::size_t r, std::size_t c, const py::object& M) {
    return double_counting_check(to_matrix(H), r, c, to_matrix(M));
  });

  py::class_<SdpProblem>(m, "SdpProblem")
      .def_property_readonly("m", &SdpProblem::m)
      .def_readonly("block_sizes", &SdpProblem::block_sizes)
      .def_readonly("a", &SdpProblem::a)
      .def_property_readonly("variable_count", &SdpProblem::variable_count)
      .def("to_sdpa", &to_sdpa)
      .def("write", [](const SdpProblem& p, const std::string& path) { write_sdpa(p, path); });
  m.def("assemble_sdp", [](const py::object& H) {
    const SymbolMatrix pattern = to_matrix(H);
    py::gil_scoped_release release;
    return assemble_sdp(pattern);
  }, py::arg("pattern") = "0 0;0 1");
  m.def("read_sdpa", &read_sdpa, py::arg("path"));
  m.def("parse_sdpa", &parse_sdpa, py::arg("text"));
  m.def("zero_multiplier_bound", [](const SdpProblem& p) { return report_dict(zero_multiplier_report(p)); });
  m.def("verify_identity_certificate", [](const SdpProblem& p, long D) {
    return report_dict(verify_certificate(p, identity_certificate(p.block_sizes, BigInt(D))));
  }, py::arg("problem"), py::arg("D") = 1'000'000);
  m.def("verify_certificate_file", [](const SdpProblem& p, const std::string& path) {
    const auto cert = read_certificate(path);
    VerificationReport rep;
    {
      py::gil_scoped_release release;
      rep = verify_certificate(p, cert);
    }
    return report_dict(rep);
  }, py::arg("problem"), py::arg("certificate_path"));
}
