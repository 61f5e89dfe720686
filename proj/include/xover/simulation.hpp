#pragma once

#include "xover/design.hpp"
#include "xover/rng.hpp"
#include "xover/trial_data.hpp"

namespace xover {

// Residual model: independent draws or a stationary AR(1) process over a
// patient's chronological session sequence (calendar gaps between sessions
// are not modelled).
struct ErrorModel {
    enum class Kind { Iid, Ar1 };
    Kind kind = Kind::Iid;
    double sigma = 1.0;
    double rho = 0.0;

    static ErrorModel iid(double sigma) { return {Kind::Iid, sigma, 0.0}; }
    static ErrorModel ar1(double sigma, double rho) { return {Kind::Ar1, sigma, rho}; }
    void validate() const;  // sigma > 0; |rho| < 1 for AR(1)
};

struct MissingnessSpec {
    bool final_period_loss = false;  // drop the last observation of every thrice-weekly patient
    double random_loss_prob = 0.0;   // independent per-cell loss probability

    void validate() const;
};

// Fixed patient effects drawn from N(0, sd^2).
std::vector<double> draw_patient_effects(int n, double sd, Rng rng);

// Responses y = tau*allocation + period effect + patient effect + residual
// for every design cell; cells selected by `miss` keep their row with the
// response marked missing. Patient k uses RNG substreams 2k (residuals) and
// 2k+1 (missingness).
TrialDataset simulate_trial(const Design& design, const ModelParams& params, const ErrorModel& err,
                            const MissingnessSpec& miss, Rng rng);

struct McSummary {
    int reps = 0;
    double mean_tau_hat = 0.0;
    double variance_tau_hat = 0.0;
};

// Empirical distribution of the treatment-effect estimate over independent
// simulated trials (replicate r uses substream r, so results do not depend
// on evaluation order). Fit failures propagate.
McSummary simulate_fit_summary(const Design& design, const ModelParams& params, const ErrorModel& err,
                               int reps, Rng rng);

// Empirical variance of the estimate (the headline Monte Carlo check).
double variance_mc(const Design& design, const ModelParams& params, const ErrorModel& err,
                   int reps, Rng rng);

}  // namespace xover
