#include "qpe/accounting.hpp"
#include "qpe/certify.hpp"
#include "qpe/estimators.hpp"
#include "qpe/extractor.hpp"
#include "qpe/inner_max.hpp"
#include "qpe/mintrials.hpp"
#include "qpe/models.hpp"
#include "qpe/pef.hpp"
#include "qpe/protocols.hpp"
#include "qpe/renyi.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qpe;

PYBIND11_MODULE(_qpe, m) {
  m.doc() = "Quantum probability estimation core";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::enum_<Family>(m, "Family").value("E", Family::E).value("W", Family::W).value("P", Family::P);
  py::enum_<TrialRole>(m, "TrialRole")
      .value("qef", TrialRole::qef)
      .value("qefp", TrialRole::qefp)
      .value("pef", TrialRole::pef)
      .value("candidate", TrialRole::candidate)
      .value("estimator", TrialRole::estimator);

  py::class_<TrialDistribution>(m, "TrialDistribution")
      .def(py::init<int, int, std::vector<double>, std::string>(), py::arg("c_bits"), py::arg("z_bits"),
           py::arg("probs"), py::arg("tag") = "")
      .def_readonly("c_bits", &TrialDistribution::c_bits)
      .def_readonly("z_bits", &TrialDistribution::z_bits)
      .def_readonly("probs", &TrialDistribution::probs)
      .def_readonly("tag", &TrialDistribution::tag)
      .def("prob", &TrialDistribution::prob)
      .def("input_prob", &TrialDistribution::input_prob);

  py::class_<TrialFunction>(m, "TrialFunction")
      .def(py::init<int, int, double, std::vector<double>, TrialRole, bool>(), py::arg("c_bits"), py::arg("z_bits"),
           py::arg("beta"), py::arg("values"), py::arg("role") = TrialRole::candidate, py::arg("with_t") = false)
      .def_readonly("beta", &TrialFunction::beta)
      .def_readonly("values", &TrialFunction::values)
      .def_readwrite("role", &TrialFunction::role)
      .def("__call__", &TrialFunction::operator(), py::arg("c"), py::arg("z"), py::arg("t") = 0)
      .def("scaled", &TrialFunction::scaled);

  py::class_<BellConfig>(m, "BellConfig")
      .def_static("uniform", &BellConfig::uniform, py::arg("k"), py::arg("theta") = std::vector<double>{})
      .def_readonly("k", &BellConfig::k);

  py::class_<FamilyMember>(m, "FamilyMember")
      .def_readonly("nu", &FamilyMember::nu)
      .def_readonly("state", &FamilyMember::state)
      .def_readonly("angles", &FamilyMember::angles)
      .def_readonly("chsh", &FamilyMember::chsh);
  m.def("family_member", &family_member, py::arg("family"), py::arg("param"), py::arg("seed") = 7);
  m.def("chsh_value", &chsh_value);

  m.def(
      "renyi_power",
      [](const CMat& rho, const CMat& sigma, double alpha, bool petz) {
        return renyi_power(HermitianOperator(rho), HermitianOperator(sigma), RenyiOrder(alpha),
                           petz ? RenyiKind::petz : RenyiKind::sandwiched);
      },
      py::arg("rho"), py::arg("sigma"), py::arg("alpha"), py::arg("petz") = false);

  m.def(
      "inner_max_tau",
      [](const TrialFunction& F, const BellConfig& cfg, double tol) {
        const auto r = inner_max_tau(F, cfg, tol);
        return py::make_tuple(r.value, r.tau, r.upper_bound);
      },
      py::arg("F"), py::arg("config"), py::arg("tol") = 1e-9);

  py::class_<CertificationResult>(m, "CertificationResult")
      .def_readonly("f_lower", &CertificationResult::f_lower)
      .def_readonly("f_upper", &CertificationResult::f_upper)
      .def_readonly("witness_theta", &CertificationResult::witness_theta)
      .def_readonly("witness_tau", &CertificationResult::witness_tau)
      .def_readonly("regions", &CertificationResult::regions)
      .def_readonly("gap_flag", &CertificationResult::gap_flag);
  m.def(
      "certify_fmax",
      [](const TrialFunction& F, const BellConfig& cfg, double gap, long long budget, int threads) {
        CertifyOptions o;
        o.gap_target = gap;
        o.budget = budget;
        o.threads = threads;
        return certify_fmax(F, cfg, o);
      },
      py::arg("F"), py::arg("config"), py::arg("gap") = 1e-4, py::arg("budget") = 200000, py::arg("threads") = 1);

  py::class_<PefResult>(m, "PefResult")
      .def_readonly("F", &PefResult::F)
      .def_readonly("rate", &PefResult::rate)
      .def_readonly("rate_bits", &PefResult::rate_bits)
      .def_readonly("gap", &PefResult::gap);
  m.def(
      "optimize_pef_polytope", [](const TrialDistribution& nu, double beta) { return optimize_pef_polytope(nu, beta); },
      py::arg("nu"), py::arg("beta"));

  m.def("iota0", &iota0);
  m.def(
      "binary_model",
      [](double p, double q, double beta) {
        const auto r = binary_model(p, q, beta);
        return py::make_tuple(r.f, r.logprob_rate, r.rate_limit);
      },
      py::arg("p"), py::arg("q"), py::arg("beta"));

  py::class_<ErrorBudget>(m, "ErrorBudget")
      .def(py::init([](double eps, double eps_x, double kappa, double kappa_bar) {
             ErrorBudget b{eps, eps_x, kappa, kappa_bar};
             b.validate();
             return b;
           }),
           py::arg("epsilon") = 1e-6, py::arg("epsilon_x") = 0.0, py::arg("kappa") = 1.0, py::arg("kappa_bar") = 1.0)
      .def_readonly("epsilon", &ErrorBudget::epsilon)
      .def_readonly("kappa", &ErrorBudget::kappa);
  m.def("n_min_qef", &n_min_qef, py::arg("g_bits"), py::arg("beta"), py::arg("budget"));
  m.def("n_min_eat_from_ee", &n_min_eat_from_ee, py::arg("g_bits"), py::arg("k_inf"), py::arg("N"),
        py::arg("budget"));
  m.def("r_max_qef", &r_max_qef);
  m.def("r_max_eat", &r_max_eat);
  m.def("prefactor_ratio", &prefactor_ratio, py::arg("N"), py::arg("k_inf"), py::arg("n"), py::arg("budget"));

  py::class_<MintrialsRow>(m, "MintrialsRow")
      .def_readonly("i_hat", &MintrialsRow::i_hat)
      .def_readonly("beta", &MintrialsRow::beta)
      .def_readonly("n_qef", &MintrialsRow::n_qef)
      .def_readonly("n_eat_F", &MintrialsRow::n_eat_F)
      .def_property_readonly("ratio", &MintrialsRow::ratio);
  m.def(
      "mintrials_for",
      [](const TrialDistribution& nu, double epsilon, double kappa, bool certify) {
        MintrialsOptions o;
        o.budget.epsilon = epsilon;
        o.budget.kappa = kappa;
        o.certify = certify;
        return mintrials_for(nu, o);
      },
      py::arg("nu"), py::arg("epsilon") = 1e-6, py::arg("kappa") = 1.0, py::arg("certify") = true);

  m.def("toeplitz_extract", &toeplitz_extract, py::arg("input"), py::arg("seed"), py::arg("k_o"));
}
