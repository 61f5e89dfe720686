#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "xover/construction.hpp"
#include "xover/information.hpp"

using namespace xover;
namespace xt = xover::testing;

namespace {

Matrix join(const Matrix& l, const Matrix& r) {
    Matrix x(l.rows(), l.cols() + r.cols());
    x << l, r;
    return x;
}

}  // namespace

TEST_CASE("projector of a constant column is the mean projector") {
    const Matrix p = projector(Matrix::Ones(4, 1));
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) CHECK(p(i, j) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("projector of the identity is the identity; of zero is zero") {
    CHECK(projector(Matrix::Identity(5, 5)).isApprox(Matrix::Identity(5, 5), 1e-12));
    CHECK(projector(Matrix::Zero(4, 2)).isZero(0.0));
    CHECK(projector(Matrix(4, 0)).isZero(0.0));
}

TEST_CASE("projector axioms hold for a period matrix") {
    const Design d = xt::design_from_strings(Schedule::ThriceWeekly, 2, {{"AHA", "HAH"}});
    Design mixed = d;
    {
        PatientPlan twice;
        twice.patient_id = "p9";
        twice.schedule = Schedule::TwiceWeekly;
        twice.weeks = {WeekSequence::from_string(Schedule::TwiceWeekly, "AH"),
                       WeekSequence::from_string(Schedule::TwiceWeekly, "HA")};
        mixed.plans.push_back(twice);
    }
    const Matrix b1 = period_matrix(mixed);
    const Matrix p = projector(b1);
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((p * b1 - b1).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(p.trace() == doctest::Approx(4.0).epsilon(1e-10));  // rank(B1) = 4
}

TEST_CASE("confounded designs carry zero full information") {
    // One thrice-weekly patient, all H: the treatment column is the patient column.
    const Design d = xt::all_h_design(1, 0, 2);
    CHECK(info_full(d) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(info_reduced(d) == doctest::Approx(0.0).epsilon(1e-9));  // 6 - (1/2)(4+4+4)
    CHECK(info_closed(d) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("constructed design at the planning scale attains info m = 160") {
    const Design d = construct_design(4, 2, 10, default_weights(), 77);
    CHECK(info_full(d) == doctest::Approx(160.0).epsilon(1e-9));
    CHECK(info_reduced(d) == doctest::Approx(160.0).epsilon(1e-9));
    CHECK(info_closed(d) == 160.0);
}

TEST_CASE("balanced dual-pair week attains m for a single patient") {
    const Design d = xt::design_from_strings(Schedule::ThriceWeekly, 2, {{"AAH", "HHA"}});
    CHECK(info_reduced(d) == doctest::Approx(6.0).epsilon(1e-9));
    CHECK(info_full(d) == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("zero contracted imbalance with an imbalanced patient loses full information") {
    // Two thrice-weekly patients, one all-H and one all-A: every day column
    // cancels (q = 0) yet the treatment column lies in the patient span.
    const Design d = xt::design_from_strings(Schedule::ThriceWeekly, 2, {{"HHH", "HHH"}, {"AAA", "AAA"}});
    CHECK(imbalance_counts(d).all_zero());
    CHECK(patient_imbalances(d) == std::vector<std::int64_t>{6, -6});
    CHECK(info_reduced(d) == doctest::Approx(12.0).epsilon(1e-9));
    CHECK(info_full(d) == doctest::Approx(0.0).epsilon(1e-9));
    // A^T B2 = (6,-6) while A^T P(B1) B2 = 0: the orthogonality condition fails.
    CHECK_FALSE(check_orthogonality(d));
    const InformationReport rep = verdict(d);
    CHECK_FALSE(rep.optimal);
    CHECK_FALSE(rep.orthogonal);
}

TEST_CASE("closed form handles mixed imbalance and empty strata") {
    // Thrice patient with Monday imbalance +2, twice patient balanced:
    // m=10, info = 10 - (1/2)(4/1) = 8.
    Design d = xt::design_from_strings(Schedule::ThriceWeekly, 2, {{"HAH", "HHA"}});
    PatientPlan twice;
    twice.patient_id = "p2";
    twice.schedule = Schedule::TwiceWeekly;
    twice.weeks = {WeekSequence::from_string(Schedule::TwiceWeekly, "AH"),
                   WeekSequence::from_string(Schedule::TwiceWeekly, "HA")};
    d.plans.push_back(twice);

    const ImbalanceCounts q = imbalance_counts(d);
    CHECK(q.contracted() == std::array<std::int64_t, 4>{2, 0, 0, 0});
    CHECK(info_closed(d) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(info_reduced(d) == doctest::Approx(8.0).epsilon(1e-9));

    // Zero quadratic form gives m back.
    CHECK(info_closed_form(10, ImbalanceCounts{}, 1, 1, 2) == 10.0);

    // Nonzero imbalance in an empty stratum cannot come from a design.
    ImbalanceCounts impossible;
    impossible.mon_twice = 2;
    CHECK_THROWS_AS(info_closed_form(6, impossible, 1, 0, 2), ComputationError);
}

TEST_CASE("orthogonality condition: constructed and constant designs pass") {
    CHECK(check_orthogonality(construct_design(3, 1, 4, default_weights(), 5)));
    // A constant treatment column lies in the period span, so both sides of
    // the condition coincide at the patient column sums.
    CHECK(check_orthogonality(xt::all_h_design(2, 1, 2)));
}

TEST_CASE("closed-form projection entries match brute force") {
    Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const int n3 = static_cast<int>(rng.below(5));
        const int n2 = static_cast<int>(rng.below(4));
        const int w = 1 + static_cast<int>(rng.below(6));
        if (n3 + n2 == 0) continue;
        const Design d = xt::random_design(n3, n2, w, rng);

        const Vector a = treatment_vector(d);
        const Matrix b1 = period_matrix(d);
        const Matrix b2 = patient_matrix(d);
        const Eigen::RowVectorXd brute = a.transpose() * projector(b1) * b2;

        const auto [thrice_entry, twice_entry] = projected_patient_entries(d);
        for (int i = 0; i < n3 + n2; ++i) {
            const double want = i < n3 ? thrice_entry : twice_entry;
            CHECK(std::abs(brute(i) - want) < 1e-10);
        }
    }
}

TEST_CASE("projection identity for the two-block nuisance") {
    Rng rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        const int n3 = static_cast<int>(rng.below(4));
        const int n2 = static_cast<int>(rng.below(3));
        const int w = 1 + static_cast<int>(rng.below(4));
        if (n3 + n2 == 0) continue;
        const Design d = xt::random_design(n3, n2, w, rng);

        const Matrix b1 = period_matrix(d);
        const Matrix b2 = patient_matrix(d);
        const auto m = b1.rows();
        const Matrix identity = Matrix::Identity(m, m);

        const Matrix lhs = identity - projector(join(b1, b2));
        const Matrix perp_b1 = identity - projector(b1);
        const Matrix rhs = perp_b1 - projector(perp_b1 * b2);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("information ordering and the two reduced routes agree across a sweep") {
    Rng rng(43);
    int covered = 0;
    for (int n3 = 0; n3 <= 5; ++n3)
        for (int n2 = 0; n2 <= 3; ++n2)
            for (int w = 1; w <= 6; ++w) {
                if (n3 + n2 == 0) continue;
                const Design d = xt::random_design(n3, n2, w, rng);
                const double full = info_full(d);
                const double reduced = info_reduced(d);
                const double closed = info_closed(d);
                const double m = static_cast<double>(d.observations());
                CHECK(full <= reduced + 1e-9);
                CHECK(reduced <= m + 1e-9);
                CHECK(std::abs(reduced - closed) < 1e-9);
                ++covered;
            }
    CHECK(covered == 138);
}

TEST_CASE("verdict agrees with the projector route on random and constructed designs") {
    Rng rng(44);
    for (int trial = 0; trial < 150; ++trial) {
        const int n3 = static_cast<int>(rng.below(4));
        const int n2 = static_cast<int>(rng.below(3));
        if (n3 + n2 == 0) continue;
        const int w = 1 + static_cast<int>(rng.below(4));

        // verdict() itself throws if the integer conditions and the
        // projection cross-check ever disagree.
        const InformationReport r1 = verdict(xt::random_design(n3, n2, w, rng));
        CHECK(r1.optimal == (std::abs(r1.info_full - static_cast<double>(r1.m)) < 1e-6));

        const int even_w = 2 * (1 + static_cast<int>(rng.below(3)));
        const InformationReport r2 =
            verdict(construct_design(n3, n2, even_w, default_weights(), rng.next_u64()));
        CHECK(r2.optimal);
    }
}

TEST_CASE("all-H design is not optimal and has no contrast") {
    const InformationReport rep = verdict(xt::all_h_design(2, 1, 2));
    CHECK_FALSE(rep.optimal);
    CHECK(rep.info_full == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rep.orthogonal);  // both sides of the condition vanish together
    CHECK_FALSE(rep.patient_balanced);
}

TEST_CASE("opposite Friday imbalances cancel in the contracted vector but not in balance") {
    // q3_F = +2 against q2_F = -2: contracted q = 0, so the reduced-model
    // information attains m, but the patients cannot be balanced.
    Design d = xt::design_from_strings(Schedule::ThriceWeekly, 2, {{"HAH", "AHH"}});
    PatientPlan twice;
    twice.patient_id = "p2";
    twice.schedule = Schedule::TwiceWeekly;
    twice.weeks = {WeekSequence::from_string(Schedule::TwiceWeekly, "HA"),
                   WeekSequence::from_string(Schedule::TwiceWeekly, "AA")};
    d.plans.push_back(twice);

    const ImbalanceCounts q = imbalance_counts(d);
    CHECK(q.fri_thrice == 2);
    CHECK(q.fri_twice == -2);
    CHECK(q.all_zero());

    const InformationReport rep = verdict(d);
    CHECK(rep.info_reduced == doctest::Approx(static_cast<double>(rep.m)).epsilon(1e-9));
    CHECK_FALSE(rep.patient_balanced);
    CHECK_FALSE(rep.optimal);
    CHECK(rep.info_full < rep.info_reduced - 0.1);
}

TEST_CASE("information report serializes to JSON") {
    const auto text = verdict(construct_design(1, 1, 2, default_weights(), 3)).to_json();
    CHECK(text.find("\"optimal\": true") != std::string::npos);
    CHECK(text.find("\"info_full\"") != std::string::npos);
    CHECK(text.find("\"contracted\"") != std::string::npos);
}
