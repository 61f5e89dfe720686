#include "xover/matrices.hpp"

#include <charconv>
#include <fstream>

namespace xover {

std::vector<const PatientPlan*> canonical_patients(const Design& design) {
    std::vector<const PatientPlan*> order;
    order.reserve(design.plans.size());
    for (const auto& p : design.plans)
        if (p.schedule == Schedule::ThriceWeekly) order.push_back(&p);
    for (const auto& p : design.plans)
        if (p.schedule == Schedule::TwiceWeekly) order.push_back(&p);
    return order;
}

namespace {

// Visits allocation cells in canonical row order.
template <class F>
void for_each_cell(const Design& design, F&& f) {
    Eigen::Index row = 0;
    int patient = 0;
    for (const PatientPlan* plan : canonical_patients(design)) {
        const auto days = attendance_days(plan->schedule);
        for (int w = 0; w < static_cast<int>(plan->weeks.size()); ++w) {
            const auto& seq = plan->weeks[static_cast<std::size_t>(w)];
            for (int k = 0; k < seq.length(); ++k) {
                f(row, patient, *plan, days[static_cast<std::size_t>(k)], seq.at(k));
                ++row;
            }
        }
        ++patient;
    }
}

}  // namespace

Vector treatment_vector(const Design& design) {
    require_valid(design);
    Vector a(design.observations());
    for_each_cell(design, [&](Eigen::Index row, int, const PatientPlan&, Day, Treatment t) {
        a(row) = signed_value(t);
    });
    return a;
}

Matrix period_matrix(const Design& design) {
    require_valid(design);
    Matrix b1 = Matrix::Zero(design.observations(), kPeriodClasses);
    for_each_cell(design, [&](Eigen::Index row, int, const PatientPlan& plan, Day d, Treatment) {
        b1(row, period_class(plan.schedule, d)) = 1.0;
    });
    return b1;
}

Matrix patient_matrix(const Design& design) {
    require_valid(design);
    Matrix b2 = Matrix::Zero(design.observations(), static_cast<Eigen::Index>(design.plans.size()));
    for_each_cell(design, [&](Eigen::Index row, int patient, const PatientPlan&, Day, Treatment) {
        b2(row, patient) = 1.0;
    });
    return b2;
}

ImbalanceCounts imbalance_counts(const Design& design) {
    require_valid(design);
    ImbalanceCounts q;
    for_each_cell(design, [&](Eigen::Index, int, const PatientPlan& plan, Day d, Treatment t) {
        const int s = signed_value(t);
        if (plan.schedule == Schedule::ThriceWeekly) {
            if (d == Day::Mon) q.mon_thrice += s;
            else if (d == Day::Wed) q.wed_thrice += s;
            else q.fri_thrice += s;
        } else {
            if (d == Day::Mon) q.mon_twice += s;
            else q.fri_twice += s;
        }
    });
    return q;
}

std::vector<std::int64_t> patient_imbalances(const Design& design) {
    require_valid(design);
    std::vector<std::int64_t> counts(design.plans.size(), 0);
    for_each_cell(design, [&](Eigen::Index, int patient, const PatientPlan&, Day, Treatment t) {
        counts[static_cast<std::size_t>(patient)] += signed_value(t);
    });
    return counts;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

PeriodGramInverse period_gram_inverse(int n3, int n2, int weeks) {
    if (weeks < 1) throw ValidationError("weeks must be >= 1");
    if (n3 < 0 || n2 < 0 || n3 + n2 < 1) throw ValidationError("need at least one patient");
    PeriodGramInverse r;
    const double w = weeks;
    const std::array<int, 4> strata{n3, n3, n3 + n2, n2};
    for (int k = 0; k < 4; ++k) {
        if (strata[static_cast<std::size_t>(k)] > 0)
            r.mat(k, k) = 1.0 / (w * strata[static_cast<std::size_t>(k)]);
        else
            r.degenerate = true;  // empty stratum: generalized-inverse zero
    }
    return r;
}

PeriodGramInverse period_gram_inverse(const Design& design) {
    require_valid(design);
    return period_gram_inverse(design.n_thrice(), design.n_twice(), design.weeks);
}

namespace {

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

}  // namespace

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write matrix file: " + path.string());
    out << m.rows() << ',' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

}  // namespace xover
