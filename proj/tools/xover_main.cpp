// xover: construct, verify, plan, simulate and analyze two-treatment
// multi-period crossover trials on weekly attendance schedules.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "xover/analysis.hpp"
#include "xover/construction.hpp"
#include "xover/information.hpp"
#include "xover/planning.hpp"
#include "xover/simulation.hpp"

namespace {

using json = nlohmann::ordered_json;

struct PlanArgs {
    double tau0 = 0.0, sigma = 0.0, alpha = 0.05, power = 0.80;
    int n3 = 0, n2 = 0;
    bool even = false;
    std::string format = "text";
};

struct ConstructArgs {
    int n3 = 0, n2 = 0, weeks = 0;
    std::uint64_t seed = 0;
    std::string weights = "alternating";
    std::string out;
};

struct VerifyArgs {
    std::string design_file;
    std::string dump_matrices;
    std::string format = "text";
};

struct SimulateArgs {
    std::string design_file;
    double tau = 0.0, sigma = 1.0;
    std::optional<double> rho;
    std::vector<double> pi;
    double xi_sd = 0.0;
    bool miss_final = false;
    double miss_prob = 0.0;
    int reps = 1;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "text";
};

struct AnalyzeArgs {
    std::string data_file;
    std::optional<double> log_shift;
    int randomization = 0;
    std::optional<std::uint64_t> seed;
    std::string weights = "alternating";
    std::string residuals_out;
    std::string format = "text";
};

xover::SequenceWeights weights_by_name(const std::string& name) {
    if (name == "alternating") return xover::default_weights();
    if (name == "uniform") return xover::uniform_weights();
    throw xover::ValidationError("unknown weight set '" + name + "': expected alternating or uniform");
}

void emit(const json& j, const std::string& format, std::ostream& os) {
    if (format == "json") {
        os << j.dump(2) << '\n';
        return;
    }
    for (const auto& [key, value] : j.items())
        os << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
}

int run_plan(const PlanArgs& a) {
    const xover::PlanInputs inputs{a.tau0, a.sigma, a.alpha, a.power, a.n3, a.n2};
    const int m = xover::required_observations(inputs);
    const int w = xover::required_weeks(m, a.n3, a.n2, a.even);
    const double variance = xover::estimator_variance(w, a.n3, a.n2, a.sigma);
    emit(json{{"m", m},
              {"weeks", w},
              {"observations_per_week", 3 * a.n3 + 2 * a.n2},
              {"projected_variance", variance},
              {"projected_se", std::sqrt(variance)}},
         a.format, std::cout);
    return 0;
}

int run_construct(const ConstructArgs& a) {
    const xover::Design design =
        xover::construct_design(a.n3, a.n2, a.weeks, weights_by_name(a.weights), a.seed);
    if (a.out.empty())
        std::cout << xover::design_to_json(design) << '\n';
    else
        xover::write_design(design, a.out);
    return 0;
}

int run_verify(const VerifyArgs& a) {
    const xover::Design design = xover::read_design(a.design_file);
    const xover::InformationReport report = xover::verdict(design);
    if (!a.dump_matrices.empty()) {
        const std::filesystem::path dir(a.dump_matrices);
        std::filesystem::create_directories(dir);
        xover::write_matrix_csv(xover::treatment_vector(design), dir / "treatment_vector.csv");
        xover::write_matrix_csv(xover::period_matrix(design), dir / "period_matrix.csv");
        xover::write_matrix_csv(xover::patient_matrix(design), dir / "patient_matrix.csv");
    }
    if (a.format == "json") {
        std::cout << report.to_json() << '\n';
    } else {
        const auto c = report.imbalance.contracted();
        std::cout << "m: " << report.m << '\n'
                  << "info_full: " << report.info_full << '\n'
                  << "info_reduced: " << report.info_reduced << '\n'
                  << "info_closed: " << report.info_closed << '\n'
                  << "imbalance (contracted): [" << c[0] << ", " << c[1] << ", " << c[2] << ", " << c[3]
                  << "]\n"
                  << "orthogonal: " << (report.orthogonal ? "true" : "false") << '\n'
                  << "patient_balanced: " << (report.patient_balanced ? "true" : "false") << '\n'
                  << "optimal: " << (report.optimal ? "true" : "false") << '\n';
    }
    return 0;
}

int run_simulate(const SimulateArgs& a) {
    const xover::Design design = xover::read_design(a.design_file);

    xover::ModelParams params;
    params.tau = a.tau;
    params.sigma = a.sigma;
    if (!a.pi.empty()) {
        if (a.pi.size() != 4)
            throw xover::ValidationError("--pi needs exactly 4 values (mon3 wed3 fri mon2)");
        for (std::size_t k = 0; k < 4; ++k) params.period_effects[k] = a.pi[k];
    }
    xover::Rng root(a.seed);
    if (a.xi_sd > 0.0)
        params.patient_effects = xover::draw_patient_effects(
            static_cast<int>(design.plans.size()), a.xi_sd, root.stream(0xef));

    const xover::ErrorModel err =
        a.rho ? xover::ErrorModel::ar1(a.sigma, *a.rho) : xover::ErrorModel::iid(a.sigma);

    if (a.reps <= 1) {
        const xover::MissingnessSpec miss{a.miss_final, a.miss_prob};
        const xover::TrialDataset data = xover::simulate_trial(design, params, err, miss, root.stream(1));
        if (a.out.empty())
            xover::write_trial_csv(data, std::cout);
        else
            xover::write_trial_csv(data, std::filesystem::path(a.out));
        return 0;
    }

    const xover::McSummary s = xover::simulate_fit_summary(design, params, err, a.reps, root.stream(1));
    emit(json{{"reps", s.reps},
              {"mean_tau_hat", s.mean_tau_hat},
              {"empirical_variance", s.variance_tau_hat},
              {"tau", a.tau},
              {"sigma", a.sigma}},
         a.format, std::cout);
    return 0;
}

int run_analyze(const AnalyzeArgs& a) {
    const xover::TrialDataset data = xover::read_trial_csv(a.data_file);
    const xover::Transform transform =
        a.log_shift ? xover::Transform::log_shift(*a.log_shift) : xover::Transform::identity();
    const xover::FitResult fit = xover::fit_model(data, transform);

    json out{{"tau_hat", fit.tau_hat},
             {"se", fit.se},
             {"ci95", {fit.ci_lo, fit.ci_hi}},
             {"p_value", fit.p_value},
             {"dof", fit.dof},
             {"sigma_hat", fit.sigma_hat},
             {"n_complete", data.complete_count()},
             {"transform", fit.transform.label()},
             {"reference", fit.reference}};

    if (a.randomization > 0) {
        if (!a.seed)
            throw xover::ValidationError("--seed is required with --randomization");
        int n3 = 0, n2 = 0;
        for (const auto& id : data.patients())
            (data.schedules.at(id) == xover::Schedule::ThriceWeekly ? n3 : n2) += 1;
        const xover::RandomizationScheme scheme{n3, n2, data.weeks, weights_by_name(a.weights)};
        const xover::RandomizationResult r =
            xover::randomization_test(data, scheme, a.randomization, xover::Rng(*a.seed), transform);
        out["randomization"] = json{{"p", r.p},
                                    {"replicates", r.replicates},
                                    {"failures", r.failures},
                                    {"observed_abs_tau", r.observed_abs_tau}};
    }

    if (!a.residuals_out.empty()) xover::export_residuals(fit, a.residuals_out);

    emit(out, a.format, std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "xover: optimal two-treatment multi-period crossover designs for weekly "
        "attendance schedules (thrice-weekly Mon/Wed/Fri, twice-weekly Mon/Fri)"};
    app.require_subcommand(1);
    app.footer(
        "File formats:\n"
        "  design JSON   {\"weeks\": w, \"plans\": [{\"patient_id\": \"p1\",\n"
        "                \"sessions_per_week\": 3, \"weeks\": [[\"H\",\"A\",\"H\"], ...]}, ...]}\n"
        "                sessions_per_week 3 = Mon/Wed/Fri, 2 = Mon/Fri; treatments \"H\"/\"A\".\n"
        "  trial CSV     header patient_id,week,day,treatment,y; day Mon|Wed|Fri;\n"
        "                treatment H|A; empty y = missing response.\n"
        "  residuals CSV patient_id,week,day,fitted,residual,nq_position, sorted by residual.\n"
        "  matrix CSV    first line rows,cols; then row-major values.\n"
        "\n"
        "Exit codes: 0 success, 1 invalid input or files, 2 computation failure.");

    PlanArgs plan_args;
    auto* plan = app.add_subcommand(
        "plan", "Sample-size and trial-length arithmetic for a two-sided test");
    plan->add_option("--tau0", plan_args.tau0, "Semi-treatment difference to detect (half the H-A difference)")
        ->required();
    plan->add_option("--sigma", plan_args.sigma, "Planning residual s.d.")->required();
    plan->add_option("--alpha", plan_args.alpha, "Two-sided size")->capture_default_str();
    plan->add_option("--power", plan_args.power, "Power")->capture_default_str();
    plan->add_option("--n3", plan_args.n3, "Thrice-weekly patients")->required();
    plan->add_option("--n2", plan_args.n2, "Twice-weekly patients")->required();
    plan->add_flag("--even", plan_args.even, "Round weeks up to the next even value");
    plan->add_option("--format", plan_args.format, "Output format: text|json")->capture_default_str()
        ->check(CLI::IsMember({"text", "json"}));

    ConstructArgs construct_args;
    auto* construct = app.add_subcommand("construct", "Construct a randomized optimal design");
    construct->add_option("--n3", construct_args.n3, "Thrice-weekly patients")->required();
    construct->add_option("--n2", construct_args.n2, "Twice-weekly patients")->required();
    construct->add_option("--weeks", construct_args.weeks, "Trial length in weeks (even)")->required();
    construct->add_option("--seed", construct_args.seed, "RNG seed")->required();
    construct->add_option("--weights", construct_args.weights,
                          "Sequence weights: alternating|uniform")->capture_default_str()
        ->check(CLI::IsMember({"alternating", "uniform"}));
    construct->add_option("-o,--out", construct_args.out, "Output design file (default stdout)");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "Verify the optimality of a design file");
    verify->add_option("--design", verify_args.design_file, "Design JSON file")->required();
    verify->add_option("--dump-matrices", verify_args.dump_matrices,
                       "Write the treatment/period/patient design matrices as CSV into this directory");
    verify->add_option("--format", verify_args.format, "Output format: text|json")->capture_default_str()
        ->check(CLI::IsMember({"text", "json"}));

    SimulateArgs simulate_args;
    auto* simulate = app.add_subcommand(
        "simulate", "Simulate trial data under the fixed-effects model (CSV), or with --reps > 1 "
                    "summarize the estimator over repeated simulated trials (JSON)");
    simulate->add_option("--design", simulate_args.design_file, "Design JSON file")->required();
    simulate->add_option("--tau", simulate_args.tau, "True semi-treatment effect")->required();
    simulate->add_option("--sigma", simulate_args.sigma, "Residual s.d.")->required();
    simulate->add_option("--rho", simulate_args.rho, "AR(1) autocorrelation of residuals within patient");
    simulate->add_option("--pi", simulate_args.pi, "Period effects: mon3 wed3 fri mon2")->expected(4);
    simulate->add_option("--xi-sd", simulate_args.xi_sd, "Draw patient effects from N(0, sd^2)");
    simulate->add_flag("--miss-final", simulate_args.miss_final,
                       "Drop the final observation of every thrice-weekly patient");
    simulate->add_option("--miss-prob", simulate_args.miss_prob, "Independent per-cell loss probability");
    simulate->add_option("--reps", simulate_args.reps, "Simulated trials (1 emits the dataset)")->capture_default_str();
    simulate->add_option("--seed", simulate_args.seed, "RNG seed")->required();
    simulate->add_option("-o,--out", simulate_args.out, "Output CSV file (default stdout)");
    simulate->add_option("--format", simulate_args.format, "Summary format: text|json")->capture_default_str()
        ->check(CLI::IsMember({"text", "json"}));

    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand("analyze", "Least-squares fit and optional randomization test");
    analyze->add_option("--data", analyze_args.data_file, "Trial data CSV")->required();
    analyze->add_option("--log-shift", analyze_args.log_shift, "Fit log(y + k) instead of y");
    analyze->add_option("--randomization", analyze_args.randomization,
                        "Number of re-randomizations for the randomization test");
    analyze->add_option("--seed", analyze_args.seed, "RNG seed (required with --randomization)");
    analyze->add_option("--weights", analyze_args.weights,
                        "Re-randomization sequence weights: alternating|uniform")->capture_default_str()
        ->check(CLI::IsMember({"alternating", "uniform"}));
    analyze->add_option("--residuals-out", analyze_args.residuals_out, "Write residual diagnostics CSV");
    analyze->add_option("--format", analyze_args.format, "Output format: text|json")->capture_default_str()
        ->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
        if (plan->parsed()) return run_plan(plan_args);
        if (construct->parsed()) return run_construct(construct_args);
        if (verify->parsed()) return run_verify(verify_args);
        if (simulate->parsed()) return run_simulate(simulate_args);
        if (analyze->parsed()) return run_analyze(analyze_args);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const xover::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const xover::ComputationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
