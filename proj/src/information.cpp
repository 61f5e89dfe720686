#include "xover/information.hpp"

#include <cmath>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

namespace xover {

namespace {

constexpr double kRankRelTol = 1e-12;
// Floor under the relative rule: a matrix that is zero in exact arithmetic
// (e.g. patient columns projected out of the period span) comes back as
// ~1e-15 roundoff, and a purely relative cutoff would keep that noise as a
// spurious direction. Genuine singular values of these indicator-derived
// matrices are never below ~1e-3.
constexpr double kRankAbsTol = 1e-8;
constexpr double kOrthogonalityTol = 1e-9;
constexpr double kVerdictTol = 1e-6;

Matrix joined(const Matrix& left, const Matrix& right) {
    Matrix x(left.rows(), left.cols() + right.cols());
    x << left, right;
    return x;
}

}  // namespace

Matrix orthonormal_basis(const Matrix& x) {
    if (x.cols() == 0) return Matrix(x.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? std::max(kRankRelTol * sv(0), kRankAbsTol) : 0.0;
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    return svd.matrixU().leftCols(rank);
}

Matrix projector(const Matrix& x) {
    const Matrix u = orthonormal_basis(x);
    if (u.cols() == 0) return Matrix::Zero(x.rows(), x.rows());
    return u * u.transpose();
}

double residual_information(const Vector& a, const Matrix& nuisance) {
    const Matrix u = orthonormal_basis(nuisance);
    const double projected = (u.transpose() * a).squaredNorm();
    return std::max(0.0, a.squaredNorm() - projected);
}

double info_full(const Design& design) {
    const Vector a = treatment_vector(design);
    return residual_information(a, joined(period_matrix(design), patient_matrix(design)));
}

double info_reduced(const Design& design) {
    const Vector a = treatment_vector(design);
    return residual_information(a, period_matrix(design));
}

double info_closed_form(std::int64_t m, const ImbalanceCounts& q, int n3, int n2, int weeks) {
    if (weeks < 1) throw ValidationError("weeks must be >= 1");
    const auto c = q.contracted();
    const std::array<std::int64_t, 4> strata{n3, n3, static_cast<std::int64_t>(n3) + n2, n2};
    double quad = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        if (strata[k] == 0) {
            if (c[k] != 0)
                throw ComputationError("internal inconsistency: nonzero imbalance " +
                                       std::to_string(c[k]) + " in an empty stratum");
            continue;  // 0^2/0 = 0
        }
        quad += static_cast<double>(c[k]) * static_cast<double>(c[k]) / static_cast<double>(strata[k]);
    }
    return static_cast<double>(m) - quad / static_cast<double>(weeks);
}

double info_closed(const Design& design) {
    require_valid(design);
    return info_closed_form(design.observations(), imbalance_counts(design),
                            design.n_thrice(), design.n_twice(), design.weeks);
}

std::pair<double, double> projected_patient_entries(const Design& design) {
    const PeriodGramInverse r = period_gram_inverse(design);
    const auto c = imbalance_counts(design).contracted();
    Eigen::Vector4d q;
    for (int k = 0; k < 4; ++k) q(k) = static_cast<double>(c[static_cast<std::size_t>(k)]);
    const double w = design.weeks;
    // Columns of B1^T B2 are w*(1,1,1,0) for thrice-weekly patients and
    // w*(0,0,1,1) for twice-weekly ones.
    const Eigen::Vector4d thrice_col = w * Eigen::Vector4d(1, 1, 1, 0);
    const Eigen::Vector4d twice_col = w * Eigen::Vector4d(0, 0, 1, 1);
    const Eigen::RowVector4d qr = q.transpose() * r.mat;
    return {qr * thrice_col, qr * twice_col};
}

bool check_orthogonality(const Design& design) {
    const Vector a = treatment_vector(design);
    const Matrix periods = period_matrix(design);
    const Matrix patients = patient_matrix(design);
    const Matrix u = orthonormal_basis(periods);
    const Vector projected_a = u * (u.transpose() * a);  // P(B1) a
    const Eigen::RowVectorXd lhs = a.transpose() * patients;
    const Eigen::RowVectorXd rhs = projected_a.transpose() * patients;
    return (lhs - rhs).cwiseAbs().maxCoeff() < kOrthogonalityTol;
}

InformationReport verdict(const Design& design) {
    require_valid(design);

    InformationReport rep;
    rep.m = design.observations();
    rep.imbalance = imbalance_counts(design);
    rep.patient_balanced = true;
    for (std::int64_t d : patient_imbalances(design))
        if (d != 0) rep.patient_balanced = false;

    rep.info_full = info_full(design);
    rep.info_reduced = info_reduced(design);
    rep.info_closed = info_closed(design);
    rep.orthogonal = check_orthogonality(design);
    rep.optimal = rep.imbalance.all_zero() && rep.patient_balanced;

    // The integer conditions and the projection route must agree.
    const bool attains_m = std::abs(rep.info_full - static_cast<double>(rep.m)) < kVerdictTol;
    if (rep.optimal != attains_m)
        throw ComputationError("internal inconsistency: balance conditions say optimal=" +
                               std::string(rep.optimal ? "true" : "false") + " but info_full=" +
                               std::to_string(rep.info_full) + " with m=" + std::to_string(rep.m));
    return rep;
}

std::string InformationReport::to_json(int indent) const {
    const auto c = imbalance.contracted();
    nlohmann::ordered_json j{
        {"m", m},
        {"info_full", info_full},
        {"info_reduced", info_reduced},
        {"info_closed", info_closed},
        {"orthogonal", orthogonal},
        {"patient_balanced", patient_balanced},
        {"optimal", optimal},
        {"imbalance",
         {{"mon_thrice", imbalance.mon_thrice},
          {"wed_thrice", imbalance.wed_thrice},
          {"fri_thrice", imbalance.fri_thrice},
          {"fri_twice", imbalance.fri_twice},
          {"mon_twice", imbalance.mon_twice},
          {"contracted", {c[0], c[1], c[2], c[3]}}}},
    };
    return j.dump(indent);
}

}  // namespace xover
