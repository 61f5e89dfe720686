#include "xover/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include <boost/math/distributions/students_t.hpp>

#include "xover/information.hpp"
#include "xover/matrices.hpp"

namespace xover {

double Transform::apply(double y) const {
    if (kind == Kind::Identity) return y;
    const double shifted = y + shift;
    if (!(shifted > 0.0))
        throw ValidationError("log transform requires y + k > 0; got y=" + std::to_string(y) +
                              " with k=" + std::to_string(shift));
    return std::log(shifted);
}

std::string Transform::label() const {
    if (kind == Kind::Identity) return "identity";
    return "log_shift(" + std::to_string(shift) + ")";
}

namespace {

constexpr double kEstimabilityRelTol = 1e-8;

struct FitRows {
    std::vector<std::size_t> record_index;  // complete records only
    Vector a;        // treatment column
    Matrix nuisance; // reduced period classes | patient indicators
    Vector y;        // transformed response
};

FitRows assemble(const TrialDataset& data, const Transform& transform, int drop_period_class) {
    if (drop_period_class < 0 || drop_period_class >= kPeriodClasses)
        throw ValidationError("drop_period_class must lie in 0..3");
    data.check_consistency();

    const auto ids = data.patients();
    std::map<std::string, int> patient_col;
    for (const auto& id : ids) patient_col.emplace(id, static_cast<int>(patient_col.size()));

    FitRows rows;
    for (std::size_t i = 0; i < data.records.size(); ++i)
        if (data.records[i].y) rows.record_index.push_back(i);

    const auto n = static_cast<Eigen::Index>(rows.record_index.size());
    if (n == 0) throw EstimationError("no complete records to fit");

    const Eigen::Index period_cols = kPeriodClasses - 1;
    rows.a.resize(n);
    rows.y.resize(n);
    rows.nuisance = Matrix::Zero(n, period_cols + static_cast<Eigen::Index>(ids.size()));

    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& rec = data.records[rows.record_index[static_cast<std::size_t>(r)]];
        rows.a(r) = signed_value(rec.treatment);
        rows.y(r) = transform.apply(*rec.y);
        const int cls = period_class(data.schedules.at(rec.patient_id), rec.day);
        if (cls != drop_period_class) {
            const int col = cls < drop_period_class ? cls : cls - 1;
            rows.nuisance(r, col) = 1.0;
        }
        rows.nuisance(r, period_cols + patient_col.at(rec.patient_id)) = 1.0;
    }
    return rows;
}

}  // namespace

FitResult fit_model(const TrialDataset& data, const Transform& transform, int drop_period_class) {
    const FitRows rows = assemble(data, transform, drop_period_class);
    const auto n = rows.a.size();

    // Partitioned least squares: project the nuisance span out of both the
    // treatment column and the response.
    const Matrix u_n = orthonormal_basis(rows.nuisance);
    const Vector ua = u_n.transpose() * rows.a;
    const Vector uy = u_n.transpose() * rows.y;
    const double info = std::max(0.0, rows.a.squaredNorm() - ua.squaredNorm());
    if (info <= kEstimabilityRelTol * static_cast<double>(n))
        throw EstimationError("tau not estimable: treatment allocation is confounded with "
                              "period and patient effects in the complete records");

    const double tau_hat = (rows.a.dot(rows.y) - ua.dot(uy)) / info;

    Matrix x(n, 1 + rows.nuisance.cols());
    x << rows.a, rows.nuisance;
    const Matrix u_x = orthonormal_basis(x);
    const Vector fitted = u_x * (u_x.transpose() * rows.y);
    const Vector resid = rows.y - fitted;
    const int dof = static_cast<int>(n - u_x.cols());
    if (dof < 1) throw EstimationError("no residual degrees of freedom (n = rank of the model)");

    FitResult fit;
    fit.tau_hat = tau_hat;
    fit.dof = dof;
    fit.info_realized = info;
    fit.transform = transform;
    fit.sigma_hat = std::sqrt(resid.squaredNorm() / dof);
    fit.se = fit.sigma_hat / std::sqrt(info);

    if (fit.se > 0.0) {
        const boost::math::students_t_distribution<double> t_dist(dof);
        const double t = tau_hat / fit.se;
        fit.p_value = 2.0 * boost::math::cdf(boost::math::complement(t_dist, std::abs(t)));
        const double tq = boost::math::quantile(t_dist, 0.975);
        fit.ci_lo = tau_hat - tq * fit.se;
        fit.ci_hi = tau_hat + tq * fit.se;
    } else {
        // Noise-free data: the point estimate is exact.
        fit.p_value = tau_hat == 0.0 ? 1.0 : 0.0;
        fit.ci_lo = fit.ci_hi = tau_hat;
    }

    fit.residuals.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& rec = data.records[rows.record_index[static_cast<std::size_t>(r)]];
        fit.residuals.push_back({rec.patient_id, rec.week, rec.day, fitted(r), resid(r)});
    }
    return fit;
}

RandomizationResult randomization_test(const TrialDataset& data, const RandomizationScheme& scheme,
                                       int n_rep, Rng rng, const Transform& transform) {
    if (n_rep < 0) throw ValidationError("replicate count must be >= 0");
    scheme.weights.validate();
    data.check_consistency();

    std::vector<std::string> thrice_ids, twice_ids;
    for (const auto& id : data.patients()) {
        (data.schedules.at(id) == Schedule::ThriceWeekly ? thrice_ids : twice_ids).push_back(id);
    }
    if (static_cast<int>(thrice_ids.size()) != scheme.n3 ||
        static_cast<int>(twice_ids.size()) != scheme.n2 || data.weeks != scheme.weeks)
        throw ValidationError("dataset is not compatible with the re-randomization scheme: scheme has N3=" +
                              std::to_string(scheme.n3) + ", N2=" + std::to_string(scheme.n2) + ", w=" +
                              std::to_string(scheme.weeks) + "; data has N3=" +
                              std::to_string(thrice_ids.size()) + ", N2=" + std::to_string(twice_ids.size()) +
                              ", w=" + std::to_string(data.weeks));

    RandomizationResult result;
    const FitResult observed = fit_model(data, transform);
    result.observed_abs_tau = std::abs(observed.tau_hat);

    // Day position within a week, per schedule.
    auto day_index = [](Schedule s, Day d) {
        const auto days = attendance_days(s);
        for (std::size_t k = 0; k < days.size(); ++k)
            if (days[k] == d) return static_cast<int>(k);
        throw ValidationError("day not in schedule");
    };

    int count_ge = 0;
    for (int rep = 0; rep < n_rep; ++rep) {
        const Design redesign =
            construct_design(scheme.n3, scheme.n2, scheme.weeks, scheme.weights,
                             rng.stream(static_cast<std::uint64_t>(rep)));
        // Constructed plans are thrice-weekly first; map them onto the
        // dataset's patients in order of appearance within each schedule.
        std::map<std::string, const PatientPlan*> plan_of;
        for (std::size_t i = 0; i < thrice_ids.size(); ++i) plan_of[thrice_ids[i]] = &redesign.plans[i];
        for (std::size_t i = 0; i < twice_ids.size(); ++i)
            plan_of[twice_ids[i]] = &redesign.plans[thrice_ids.size() + i];

        TrialDataset overlay = data;
        for (auto& rec : overlay.records) {
            const PatientPlan* plan = plan_of.at(rec.patient_id);
            rec.treatment = plan->weeks[static_cast<std::size_t>(rec.week - 1)].at(
                day_index(plan->schedule, rec.day));
        }

        try {
            const FitResult refit = fit_model(overlay, transform);
            ++result.replicates;
            if (std::abs(refit.tau_hat) >= result.observed_abs_tau) ++count_ge;
        } catch (const EstimationError&) {
            ++result.failures;
        }
    }

    if (n_rep > 0 && result.failures > 0.05 * n_rep)
        throw ComputationError("randomization test aborted: " + std::to_string(result.failures) + " of " +
                               std::to_string(n_rep) + " replicate fits were not estimable");

    result.p = (1.0 + count_ge) / (1.0 + result.replicates);
    return result;
}

void export_residuals(const FitResult& fit, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write residuals file: " + path.string());

    std::vector<const ResidualRow*> rows;
    rows.reserve(fit.residuals.size());
    for (const auto& r : fit.residuals) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(),
              [](const ResidualRow* a, const ResidualRow* b) { return a->residual < b->residual; });

    auto fmt = [](double v) {
        std::array<char, 32> buf{};
        auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        return std::string(buf.data(), ptr);
    };

    const double n = static_cast<double>(rows.size());
    out << "patient_id,week,day,fitted,residual,nq_position\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double position = (static_cast<double>(i + 1) - 0.375) / (n + 0.25);  // Blom
        out << rows[i]->patient_id << ',' << rows[i]->week << ',' << to_string(rows[i]->day) << ','
            << fmt(rows[i]->fitted) << ',' << fmt(rows[i]->residual) << ',' << fmt(position) << '\n';
    }
}

}  // namespace xover
