// Python bindings for the xover core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "xover/analysis.hpp"
#include "xover/construction.hpp"
#include "xover/information.hpp"
#include "xover/planning.hpp"
#include "xover/simulation.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

xover::SequenceWeights weights_by_name(const std::string& name) {
    if (name == "alternating") return xover::default_weights();
    if (name == "uniform") return xover::uniform_weights();
    throw xover::ValidationError("unknown weight set '" + name + "': expected alternating or uniform");
}

xover::Transform transform_from(const std::optional<double>& log_shift) {
    return log_shift ? xover::Transform::log_shift(*log_shift) : xover::Transform::identity();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Optimal two-treatment multi-period crossover designs for weekly attendance schedules";

    py::register_exception<xover::ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<xover::ComputationError>(m, "ComputationError", PyExc_RuntimeError);

    py::enum_<xover::Schedule>(m, "Schedule")
        .value("THRICE_WEEKLY", xover::Schedule::ThriceWeekly)
        .value("TWICE_WEEKLY", xover::Schedule::TwiceWeekly);

    py::class_<xover::Design>(m, "Design")
        .def_readonly("weeks", &xover::Design::weeks)
        .def_property_readonly("n3", &xover::Design::n_thrice)
        .def_property_readonly("n2", &xover::Design::n_twice)
        .def_property_readonly("m", &xover::Design::observations)
        .def_property_readonly("patients",
                               [](const xover::Design& d) {
                                   std::vector<std::string> ids;
                                   for (const auto& p : d.plans) ids.push_back(p.patient_id);
                                   return ids;
                               })
        .def("allocations",
             [](const xover::Design& d) {
                 // {patient_id: [["H","A","H"], ...]}
                 py::dict out;
                 for (const auto& p : d.plans) {
                     py::list weeks;
                     for (const auto& wk : p.weeks) {
                         py::list seq;
                         for (auto t : wk.treatments()) seq.append(std::string(1, xover::to_char(t)));
                         weeks.append(seq);
                     }
                     out[py::str(p.patient_id)] = weeks;
                 }
                 return out;
             })
        .def("to_json", [](const xover::Design& d) { return xover::design_to_json(d); })
        .def_static("from_json", [](const std::string& s) { return xover::design_from_json(s); })
        .def("save", [](const xover::Design& d, const std::filesystem::path& p) { xover::write_design(d, p); },
             "path"_a)
        .def_static("load", [](const std::filesystem::path& p) { return xover::read_design(p); }, "path"_a)
        .def("__eq__", [](const xover::Design& a, const xover::Design& b) { return a == b; })
        .def("__repr__", [](const xover::Design& d) {
            return "<Design weeks=" + std::to_string(d.weeks) + " n3=" + std::to_string(d.n_thrice()) +
                   " n2=" + std::to_string(d.n_twice()) + " m=" + std::to_string(d.observations()) + ">";
        });

    py::class_<xover::ImbalanceCounts>(m, "ImbalanceCounts")
        .def_readonly("mon_thrice", &xover::ImbalanceCounts::mon_thrice)
        .def_readonly("wed_thrice", &xover::ImbalanceCounts::wed_thrice)
        .def_readonly("fri_thrice", &xover::ImbalanceCounts::fri_thrice)
        .def_readonly("fri_twice", &xover::ImbalanceCounts::fri_twice)
        .def_readonly("mon_twice", &xover::ImbalanceCounts::mon_twice)
        .def_property_readonly("contracted", [](const xover::ImbalanceCounts& q) {
            const auto c = q.contracted();
            return py::make_tuple(c[0], c[1], c[2], c[3]);
        });

    py::class_<xover::InformationReport>(m, "InformationReport")
        .def_readonly("m", &xover::InformationReport::m)
        .def_readonly("info_full", &xover::InformationReport::info_full)
        .def_readonly("info_reduced", &xover::InformationReport::info_reduced)
        .def_readonly("info_closed", &xover::InformationReport::info_closed)
        .def_readonly("orthogonal", &xover::InformationReport::orthogonal)
        .def_readonly("patient_balanced", &xover::InformationReport::patient_balanced)
        .def_readonly("optimal", &xover::InformationReport::optimal)
        .def_readonly("imbalance", &xover::InformationReport::imbalance)
        .def("to_json", [](const xover::InformationReport& r) { return r.to_json(); })
        .def("__repr__", [](const xover::InformationReport& r) {
            return "<InformationReport m=" + std::to_string(r.m) +
                   " info_full=" + std::to_string(r.info_full) +
                   " optimal=" + std::string(r.optimal ? "True" : "False") + ">";
        });

    py::class_<xover::TrialDataset>(m, "TrialDataset")
        .def_readonly("weeks", &xover::TrialDataset::weeks)
        .def_property_readonly("patients", &xover::TrialDataset::patients)
        .def_property_readonly("n_complete", &xover::TrialDataset::complete_count)
        .def("records",
             [](const xover::TrialDataset& d) {
                 // (patient_id, week, day, treatment, y-or-None) tuples
                 py::list out;
                 for (const auto& r : d.records)
                     out.append(py::make_tuple(r.patient_id, r.week, std::string(xover::to_string(r.day)),
                                               std::string(1, xover::to_char(r.treatment)),
                                               r.y ? py::cast(*r.y) : py::none()));
                 return out;
             })
        .def("drop_final_observations",
             [](xover::TrialDataset& d, const std::string& patient_id, int count) {
                 int remaining = count;
                 for (auto it = d.records.rbegin(); it != d.records.rend() && remaining > 0; ++it)
                     if (it->patient_id == patient_id && it->y) {
                         it->y.reset();
                         --remaining;
                     }
                 if (remaining > 0)
                     throw xover::ValidationError("patient '" + patient_id + "' has fewer observations");
             },
             "patient_id"_a, "count"_a, "Mark the last `count` responses of a patient as missing.")
        .def("to_csv", [](const xover::TrialDataset& d) { return xover::trial_csv_string(d); })
        .def_static("from_csv", [](const std::string& s) { return xover::trial_from_csv_string(s); })
        .def("save", [](const xover::TrialDataset& d, const std::filesystem::path& p) {
                 xover::write_trial_csv(d, p);
             }, "path"_a)
        .def_static("load", [](const std::filesystem::path& p) { return xover::read_trial_csv(p); }, "path"_a)
        .def("__len__", [](const xover::TrialDataset& d) { return d.records.size(); });

    py::class_<xover::FitResult>(m, "FitResult")
        .def_readonly("tau_hat", &xover::FitResult::tau_hat)
        .def_readonly("se", &xover::FitResult::se)
        .def_property_readonly("ci95",
                               [](const xover::FitResult& f) { return py::make_tuple(f.ci_lo, f.ci_hi); })
        .def_readonly("p_value", &xover::FitResult::p_value)
        .def_readonly("dof", &xover::FitResult::dof)
        .def_readonly("sigma_hat", &xover::FitResult::sigma_hat)
        .def_readonly("info_realized", &xover::FitResult::info_realized)
        .def_readonly("reference", &xover::FitResult::reference)
        .def_property_readonly("transform",
                               [](const xover::FitResult& f) { return f.transform.label(); })
        .def("residuals",
             [](const xover::FitResult& f) {
                 py::list out;
                 for (const auto& r : f.residuals)
                     out.append(py::make_tuple(r.patient_id, r.week, std::string(xover::to_string(r.day)),
                                               r.fitted, r.residual));
                 return out;
             })
        .def("export_residuals",
             [](const xover::FitResult& f, const std::filesystem::path& p) { xover::export_residuals(f, p); },
             "path"_a)
        .def("__repr__", [](const xover::FitResult& f) {
            return "<FitResult tau_hat=" + std::to_string(f.tau_hat) + " se=" + std::to_string(f.se) +
                   " p=" + std::to_string(f.p_value) + ">";
        });

    py::class_<xover::RandomizationResult>(m, "RandomizationResult")
        .def_readonly("p", &xover::RandomizationResult::p)
        .def_readonly("observed_abs_tau", &xover::RandomizationResult::observed_abs_tau)
        .def_readonly("replicates", &xover::RandomizationResult::replicates)
        .def_readonly("failures", &xover::RandomizationResult::failures)
        .def("__repr__", [](const xover::RandomizationResult& r) {
            return "<RandomizationResult p=" + std::to_string(r.p) + " replicates=" +
                   std::to_string(r.replicates) + ">";
        });

    m.def("required_observations",
          [](double tau0, double sigma, double alpha, double power) {
              return xover::required_observations({tau0, sigma, alpha, power, 1, 0});
          },
          "tau0"_a, "sigma"_a, "alpha"_a = 0.05, "power"_a = 0.80,
          "Observations needed to detect semi-difference tau0 at the given size and power.");
    m.def("required_weeks", &xover::required_weeks, "m"_a, "n3"_a, "n2"_a, "round_even"_a = true);
    m.def("estimator_variance", &xover::estimator_variance, "weeks"_a, "n3"_a, "n2"_a, "sigma"_a);

    m.def("construct_design",
          [](int n3, int n2, int weeks, std::uint64_t seed, const std::string& weights) {
              return xover::construct_design(n3, n2, weeks, weights_by_name(weights), seed);
          },
          "n3"_a, "n2"_a, "weeks"_a, "seed"_a, "weights"_a = "alternating",
          "Randomized optimal design; weights: 'alternating' or 'uniform'.");

    m.def("verdict", &xover::verdict, "design"_a,
          "Information values and the optimality verdict for a design.");

    m.def("simulate_trial",
          [](const xover::Design& design, double tau, double sigma, std::uint64_t seed,
             const std::optional<std::array<double, 4>>& pi, const std::vector<double>& patient_effects,
             std::optional<double> rho, bool miss_final, double miss_prob) {
              xover::ModelParams params;
              params.tau = tau;
              params.sigma = sigma;
              if (pi) params.period_effects = *pi;
              params.patient_effects = patient_effects;
              const auto err = rho ? xover::ErrorModel::ar1(sigma, *rho) : xover::ErrorModel::iid(sigma);
              return xover::simulate_trial(design, params, err,
                                           xover::MissingnessSpec{miss_final, miss_prob}, xover::Rng(seed));
          },
          "design"_a, "tau"_a, "sigma"_a, "seed"_a, "pi"_a = std::nullopt,
          "patient_effects"_a = std::vector<double>{}, "rho"_a = std::nullopt, "miss_final"_a = false,
          "miss_prob"_a = 0.0);

    m.def("variance_mc",
          [](const xover::Design& design, double tau, double sigma, int reps, std::uint64_t seed,
             std::optional<double> rho) {
              xover::ModelParams params;
              params.tau = tau;
              params.sigma = sigma;
              const auto err = rho ? xover::ErrorModel::ar1(sigma, *rho) : xover::ErrorModel::iid(sigma);
              return xover::variance_mc(design, params, err, reps, xover::Rng(seed));
          },
          "design"_a, "tau"_a, "sigma"_a, "reps"_a, "seed"_a, "rho"_a = std::nullopt,
          "Empirical variance of tau_hat over repeated simulated trials.");

    m.def("fit_model",
          [](const xover::TrialDataset& data, std::optional<double> log_shift) {
              return xover::fit_model(data, transform_from(log_shift));
          },
          "data"_a, "log_shift"_a = std::nullopt);

    m.def("randomization_test",
          [](const xover::TrialDataset& data, int n_rep, std::uint64_t seed, const std::string& weights,
             std::optional<double> log_shift) {
              int n3 = 0, n2 = 0;
              for (const auto& id : data.patients())
                  (data.schedules.at(id) == xover::Schedule::ThriceWeekly ? n3 : n2) += 1;
              const xover::RandomizationScheme scheme{n3, n2, data.weeks, weights_by_name(weights)};
              return xover::randomization_test(data, scheme, n_rep, xover::Rng(seed),
                                               transform_from(log_shift));
          },
          "data"_a, "n_rep"_a, "seed"_a, "weights"_a = "alternating", "log_shift"_a = std::nullopt,
          "Re-randomization test using the construction scheme inferred from the data.");
}
