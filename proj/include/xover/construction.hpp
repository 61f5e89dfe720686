#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "xover/design.hpp"
#include "xover/rng.hpp"

namespace xover {

// Selection probabilities over the base week-sequences (those starting
// with A): thrice-weekly (AAA, AAH, AHH, AHA) and twice-weekly (AA, AH).
struct SequenceWeights {
    std::array<double, 4> thrice{};
    std::array<double, 2> twice{};

    void validate() const;  // nonnegative, each set sums to 1 within 1e-12
};

// Default weights favour rapidly alternating sequences, which keeps the
// design efficient when residuals within a patient are positively
// autocorrelated: thrice {1/10, 1/5, 1/5, 1/2}, twice {1/5, 4/5}.
SequenceWeights default_weights();
SequenceWeights uniform_weights();

const std::array<WeekSequence, 4>& base_sequences(Schedule s);  // thrice set
const std::array<WeekSequence, 2>& base_sequences_twice();

WeekSequence draw_base_sequence(Schedule schedule, const SequenceWeights& weights, Rng& rng);

// One patient's randomized plan over an even number of weeks: w/2 base
// sequences drawn independently with replacement from the weighted set, each
// paired with its dual, and the resulting w week labels uniformly permuted.
// Guarantees equal H/A totals per patient and equal H/A counts in every
// attendance-day column.
PatientPlan construct_patient_plan(std::string patient_id, Schedule schedule, int weeks,
                                   const SequenceWeights& weights, Rng rng);

// Independent per-patient plans (thrice-weekly patients first, ids p1..pN).
// Patient k draws from substream k of the seed, so adding a patient leaves
// the other plans unchanged. The result is always an optimal design.
Design construct_design(int n3, int n2, int weeks, const SequenceWeights& weights, Rng root);
Design construct_design(int n3, int n2, int weeks, const SequenceWeights& weights, std::uint64_t seed);

}  // namespace xover
