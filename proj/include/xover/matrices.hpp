#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "xover/design.hpp"

namespace xover {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Canonical row/column order used by every design matrix: all thrice-weekly
// patients first (in plan order), then twice-weekly; within a patient the
// rows run chronologically, week-major with days in attendance order. The
// information values are order-invariant; the canonical order just makes the
// matrices reproducible byte for byte.
std::vector<const PatientPlan*> canonical_patients(const Design& design);

// m x 1 treatment allocation column, entries +1 (H) / -1 (A).
Vector treatment_vector(const Design& design);

// m x 4 period-class indicator matrix (columns follow period_class()).
Matrix period_matrix(const Design& design);

// m x (N3+N2) patient indicator matrix, columns in canonical patient order.
Matrix patient_matrix(const Design& design);

// H-minus-A allocation counts per (day, schedule) stratum, accumulated in
// integer arithmetic. contracted() is the 4-vector matching the period-matrix
// columns: (mon_thrice, wed_thrice, fri_thrice + fri_twice, mon_twice); it
// equals treatment_vector^T * period_matrix.
struct ImbalanceCounts {
    std::int64_t mon_thrice = 0;
    std::int64_t wed_thrice = 0;
    std::int64_t fri_thrice = 0;
    std::int64_t fri_twice = 0;
    std::int64_t mon_twice = 0;

    std::array<std::int64_t, 4> contracted() const {
        return {mon_thrice, wed_thrice, fri_thrice + fri_twice, mon_twice};
    }
    bool all_zero() const {
        const auto c = contracted();
        return c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0;
    }
};

ImbalanceCounts imbalance_counts(const Design& design);

// H-minus-A count per patient in canonical order; equals
// treatment_vector^T * patient_matrix.
std::vector<std::int64_t> patient_imbalances(const Design& design);

// Kronecker product.
Matrix kron(const Matrix& a, const Matrix& b);

// Generalized inverse of the period Gram matrix w*diag(N3, N3, N3+N2, N2):
// diagonal entries 1/(w*N) on populated strata, 0 where a stratum is empty
// (degenerate flags that case).
struct PeriodGramInverse {
    Eigen::Matrix4d mat = Eigen::Matrix4d::Zero();
    bool degenerate = false;
};

PeriodGramInverse period_gram_inverse(const Design& design);
PeriodGramInverse period_gram_inverse(int n3, int n2, int weeks);

// CSV dump for external audit: first line "rows,cols", then row-major values.
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);

}  // namespace xover
