#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "xover/construction.hpp"
#include "xover/rng.hpp"
#include "xover/trial_data.hpp"

namespace xover {

// Response transform applied before fitting.
struct Transform {
    enum class Kind { Identity, LogShift };
    Kind kind = Kind::Identity;
    double shift = 0.0;

    static Transform identity() { return {}; }
    static Transform log_shift(double k) { return {Kind::LogShift, k}; }

    double apply(double y) const;  // throws ValidationError if y + shift <= 0
    std::string label() const;     // "identity" or "log_shift(k)"
};

struct ResidualRow {
    std::string patient_id;
    int week = 0;
    Day day = Day::Mon;
    double fitted = 0.0;
    double residual = 0.0;
};

struct FitResult {
    double tau_hat = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double p_value = 1.0;
    int dof = 0;
    double sigma_hat = 0.0;       // residual s.d. on the analysis scale
    double info_realized = 0.0;   // information for tau in the realized (complete-record) design
    Transform transform;
    std::string reference = "t";  // reference distribution used for CI and p
    std::vector<ResidualRow> residuals;  // complete records, analysis scale
};

// Ordinary least squares for the fixed-effects model on the complete records:
// response ~ treatment + period class + patient. The shared Friday period
// class is the dropped reference by default; any choice gives the same
// tau_hat because the patient columns span the dropped indicator. Throws
// EstimationError when the treatment contrast is confounded.
FitResult fit_model(const TrialDataset& data, const Transform& transform = Transform::identity(),
                    int drop_period_class = 2);

// Re-randomization scheme: fresh designs drawn by the same construction the
// trial used.
struct RandomizationScheme {
    int n3 = 0;
    int n2 = 0;
    int weeks = 0;
    SequenceWeights weights = default_weights();
};

struct RandomizationResult {
    double p = 1.0;
    double observed_abs_tau = 0.0;
    int replicates = 0;  // replicates that produced a statistic
    int failures = 0;    // replicate fits that were not estimable
};

// Randomization test of "no treatment effect": responses stay attached to
// their (patient, week, day) slots while each replicate re-draws the
// allocation from the scheme and refits. p uses the add-one convention
// (1 + #{|t*| >= |t_obs|}) / (1 + R). More than 5% replicate failures abort.
RandomizationResult randomization_test(const TrialDataset& data, const RandomizationScheme& scheme,
                                       int n_rep, Rng rng,
                                       const Transform& transform = Transform::identity());

// CSV of residuals sorted by value: patient_id,week,day,fitted,residual,
// nq_position with the Blom plotting position (i - 3/8) / (n + 1/4).
void export_residuals(const FitResult& fit, const std::filesystem::path& path);

}  // namespace xover
