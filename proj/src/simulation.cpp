#include "xover/simulation.hpp"

#include <cmath>

#include "xover/analysis.hpp"

namespace xover {

void ErrorModel::validate() const {
    if (!(sigma > 0.0)) throw ValidationError("sigma must be > 0");
    if (kind == Kind::Ar1 && !(std::abs(rho) < 1.0))
        throw ValidationError("AR(1) requires |rho| < 1");
}

void MissingnessSpec::validate() const {
    if (!(random_loss_prob >= 0.0 && random_loss_prob < 1.0))
        throw ValidationError("random_loss_prob must lie in [0,1)");
}

std::vector<double> draw_patient_effects(int n, double sd, Rng rng) {
    if (n < 0) throw ValidationError("patient count must be >= 0");
    if (sd < 0.0) throw ValidationError("patient effect s.d. must be >= 0");
    std::vector<double> xi(static_cast<std::size_t>(n));
    for (auto& v : xi) v = sd * rng.normal();
    return xi;
}

TrialDataset simulate_trial(const Design& design, const ModelParams& params, const ErrorModel& err,
                            const MissingnessSpec& miss, Rng rng) {
    require_valid(design);
    params.validate();
    err.validate();
    miss.validate();
    if (!params.patient_effects.empty() &&
        params.patient_effects.size() != design.plans.size())
        throw ValidationError("patient_effects must be empty (all zero) or have one entry per patient (" +
                              std::to_string(design.plans.size()) + "), got " +
                              std::to_string(params.patient_effects.size()));

    TrialDataset data;
    data.weeks = design.weeks;

    for (std::size_t i = 0; i < design.plans.size(); ++i) {
        const auto& plan = design.plans[i];
        data.schedules.emplace(plan.patient_id, plan.schedule);
        const double xi = params.patient_effects.empty() ? 0.0 : params.patient_effects[i];
        const auto days = attendance_days(plan.schedule);

        Rng noise = rng.stream(2 * static_cast<std::uint64_t>(i));
        Rng loss = rng.stream(2 * static_cast<std::uint64_t>(i) + 1);

        const int sessions = design.weeks * sessions_per_week(plan.schedule);
        double prev_eps = 0.0;
        int session = 0;
        for (int w = 0; w < design.weeks; ++w) {
            const auto& seq = plan.weeks[static_cast<std::size_t>(w)];
            for (int k = 0; k < seq.length(); ++k, ++session) {
                double eps;
                if (err.kind == ErrorModel::Kind::Iid) {
                    eps = err.sigma * noise.normal();
                } else if (session == 0) {
                    eps = err.sigma * noise.normal();  // stationary start
                } else {
                    eps = err.rho * prev_eps +
                          err.sigma * std::sqrt(1.0 - err.rho * err.rho) * noise.normal();
                }
                prev_eps = eps;

                const Day d = days[static_cast<std::size_t>(k)];
                const Treatment t = seq.at(k);
                const double mean = params.tau * signed_value(t) +
                                    params.period_effects[static_cast<std::size_t>(
                                        period_class(plan.schedule, d))] +
                                    xi;

                bool missing = false;
                if (miss.final_period_loss && plan.schedule == Schedule::ThriceWeekly &&
                    session == sessions - 1)
                    missing = true;
                if (miss.random_loss_prob > 0.0 && loss.uniform01() < miss.random_loss_prob)
                    missing = true;

                data.records.push_back({plan.patient_id, w + 1, d, t,
                                        missing ? std::nullopt : std::optional<double>(mean + eps)});
            }
        }
    }
    return data;
}

McSummary simulate_fit_summary(const Design& design, const ModelParams& params, const ErrorModel& err,
                               int reps, Rng rng) {
    if (reps < 2) throw ValidationError("need at least 2 replicates");
    std::vector<double> taus;
    taus.reserve(static_cast<std::size_t>(reps));
    for (int rep = 0; rep < reps; ++rep) {
        const TrialDataset data =
            simulate_trial(design, params, err, MissingnessSpec{}, rng.stream(static_cast<std::uint64_t>(rep)));
        taus.push_back(fit_model(data).tau_hat);
    }

    McSummary s;
    s.reps = reps;
    double sum = 0.0;
    for (double t : taus) sum += t;
    s.mean_tau_hat = sum / reps;
    double ss = 0.0;
    for (double t : taus) ss += (t - s.mean_tau_hat) * (t - s.mean_tau_hat);
    s.variance_tau_hat = ss / (reps - 1);
    return s;
}

double variance_mc(const Design& design, const ModelParams& params, const ErrorModel& err,
                   int reps, Rng rng) {
    return simulate_fit_summary(design, params, err, reps, rng).variance_tau_hat;
}

}  // namespace xover
