#include "xover/construction.hpp"

#include <cmath>

namespace xover {

void SequenceWeights::validate() const {
    double sum3 = 0.0, sum2 = 0.0;
    for (double p : thrice) {
        if (p < 0.0) throw ValidationError("sequence weights must be nonnegative");
        sum3 += p;
    }
    for (double p : twice) {
        if (p < 0.0) throw ValidationError("sequence weights must be nonnegative");
        sum2 += p;
    }
    if (std::abs(sum3 - 1.0) > 1e-12 || std::abs(sum2 - 1.0) > 1e-12)
        throw ValidationError("sequence weights must sum to 1 for each schedule");
}

SequenceWeights default_weights() {
    return {{0.1, 0.2, 0.2, 0.5}, {0.2, 0.8}};
}

SequenceWeights uniform_weights() {
    return {{0.25, 0.25, 0.25, 0.25}, {0.5, 0.5}};
}

const std::array<WeekSequence, 4>& base_sequences(Schedule s) {
    static const std::array<WeekSequence, 4> thrice{
        WeekSequence::from_string(Schedule::ThriceWeekly, "AAA"),
        WeekSequence::from_string(Schedule::ThriceWeekly, "AAH"),
        WeekSequence::from_string(Schedule::ThriceWeekly, "AHH"),
        WeekSequence::from_string(Schedule::ThriceWeekly, "AHA"),
    };
    if (s != Schedule::ThriceWeekly)
        throw ValidationError("base_sequences(Schedule) holds the thrice-weekly set; "
                              "use base_sequences_twice() for twice-weekly");
    return thrice;
}

const std::array<WeekSequence, 2>& base_sequences_twice() {
    static const std::array<WeekSequence, 2> twice{
        WeekSequence::from_string(Schedule::TwiceWeekly, "AA"),
        WeekSequence::from_string(Schedule::TwiceWeekly, "AH"),
    };
    return twice;
}

WeekSequence draw_base_sequence(Schedule schedule, const SequenceWeights& weights, Rng& rng) {
    if (schedule == Schedule::ThriceWeekly)
        return base_sequences(schedule)[rng.categorical(weights.thrice)];
    return base_sequences_twice()[rng.categorical(weights.twice)];
}

PatientPlan construct_patient_plan(std::string patient_id, Schedule schedule, int weeks,
                                   const SequenceWeights& weights, Rng rng) {
    if (weeks < 2 || weeks % 2 != 0)
        throw ValidationError("weeks must be even and >= 2 (round the trial length up to the "
                              "next even number of weeks), got " + std::to_string(weeks));
    weights.validate();

    PatientPlan plan;
    plan.patient_id = std::move(patient_id);
    plan.schedule = schedule;
    plan.weeks.reserve(static_cast<std::size_t>(weeks));
    for (int k = 0; k < weeks / 2; ++k) {
        WeekSequence base = draw_base_sequence(schedule, weights, rng);
        plan.weeks.push_back(dual(base));  // dual first; order erased by the shuffle below
        plan.weeks.push_back(std::move(base));
    }
    rng.shuffle(plan.weeks);
    return plan;
}

Design construct_design(int n3, int n2, int weeks, const SequenceWeights& weights, Rng root) {
    if (n3 < 0 || n2 < 0 || n3 + n2 < 1) throw ValidationError("need at least one patient");
    Design d;
    d.weeks = weeks;
    // Substreams are keyed by (schedule, index within schedule), so growing
    // either patient group leaves every existing plan's draws unchanged.
    const Rng thrice_root = root.stream(0);
    const Rng twice_root = root.stream(1);
    int id = 1;
    for (int i = 0; i < n3; ++i, ++id)
        d.plans.push_back(construct_patient_plan("p" + std::to_string(id), Schedule::ThriceWeekly,
                                                 weeks, weights, thrice_root.stream(static_cast<std::uint64_t>(i))));
    for (int i = 0; i < n2; ++i, ++id)
        d.plans.push_back(construct_patient_plan("p" + std::to_string(id), Schedule::TwiceWeekly,
                                                 weeks, weights, twice_root.stream(static_cast<std::uint64_t>(i))));
    return d;
}

Design construct_design(int n3, int n2, int weeks, const SequenceWeights& weights, std::uint64_t seed) {
    return construct_design(n3, n2, weeks, weights, Rng(seed));
}

}  // namespace xover
