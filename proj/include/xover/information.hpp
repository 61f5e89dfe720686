#pragma once

#include <string>
#include <utility>

#include "xover/matrices.hpp"

namespace xover {

// Treatment information under the fixed-effects model, reported in sigma^2
// units ("effective observations"): an optimal design attains exactly m.
struct InformationReport {
    std::int64_t m = 0;
    double info_full = 0.0;     // nuisance = periods and patients
    double info_reduced = 0.0;  // nuisance = periods only; >= info_full
    double info_closed = 0.0;   // closed form m - q^T R q; == info_reduced
    bool orthogonal = false;        // treatment column orthogonal to the
                                    // patient columns after period adjustment
    bool patient_balanced = false;  // every patient has equal H and A counts
    bool optimal = false;
    ImbalanceCounts imbalance;

    std::string to_json(int indent = 2) const;
};

// Orthonormal basis of col(X) from a rank-revealing SVD; singular values
// below max(1e-12 * largest, 1e-8) count as zero. The absolute floor makes
// matrices that vanish in exact arithmetic (roundoff residue ~1e-15) project
// to zero instead of onto a noise direction.
Matrix orthonormal_basis(const Matrix& x);

// m x m orthogonal projector onto col(X): symmetric, idempotent, P X = X.
// The zero matrix projects to zero.
Matrix projector(const Matrix& x);

// A^T (I - P(N)) A for a column a and nuisance matrix N, via the thin basis
// (never forms the m x m projector).
double residual_information(const Vector& a, const Matrix& nuisance);

double info_full(const Design& design);
double info_reduced(const Design& design);

// m - (1/w) * (qm3^2/N3 + qw3^2/N3 + (qf3+qf2)^2/(N3+N2) + qm2^2/N2), with
// the 0^2/0 = 0 convention on empty strata. A nonzero imbalance attributed to
// an empty stratum is an internal inconsistency (impossible for a design).
double info_closed(const Design& design);
double info_closed_form(std::int64_t m, const ImbalanceCounts& q, int n3, int n2, int weeks);

// True iff A^T B2 equals A^T P(B1) B2 componentwise within 1e-9, i.e. the
// treatment column is orthogonal to the period-adjusted patient columns;
// equivalently info_full == info_reduced.
bool check_orthogonality(const Design& design);

// Closed form for the entries of A^T P(B1) B2: one value per schedule,
// q^T R (B1^T B2 column) with the column equal to w*(1,1,1,0) resp.
// w*(0,0,1,1). Returns {thrice-weekly entry, twice-weekly entry}.
std::pair<double, double> projected_patient_entries(const Design& design);

// Optimality verdict: the exact integer conditions (contracted imbalance zero
// and every patient balanced) decide, and the projection route cross-checks
// that optimal <=> |info_full - m| < 1e-6.
InformationReport verdict(const Design& design);

}  // namespace xover
