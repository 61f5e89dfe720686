#pragma once

#include <string>
#include <vector>

#include "xover/design.hpp"
#include "xover/rng.hpp"

namespace xover::testing {

// Arbitrary (usually non-optimal) design with coin-flip allocations.
inline Design random_design(int n3, int n2, int weeks, Rng& rng) {
    Design d;
    d.weeks = weeks;
    int id = 1;
    auto add = [&](Schedule s, int count) {
        for (int i = 0; i < count; ++i, ++id) {
            PatientPlan plan;
            plan.patient_id = "p" + std::to_string(id);
            plan.schedule = s;
            for (int w = 0; w < weeks; ++w) {
                std::vector<Treatment> t;
                for (int k = 0; k < sessions_per_week(s); ++k)
                    t.push_back(rng.below(2) ? Treatment::H : Treatment::A);
                plan.weeks.emplace_back(s, std::move(t));
            }
            d.plans.push_back(std::move(plan));
        }
    };
    add(Schedule::ThriceWeekly, n3);
    add(Schedule::TwiceWeekly, n2);
    return d;
}

// Single-schedule design built from explicit week strings, one patient per
// outer vector entry.
inline Design design_from_strings(Schedule s, int weeks,
                                  const std::vector<std::vector<std::string>>& patients) {
    Design d;
    d.weeks = weeks;
    int id = 1;
    for (const auto& weeks_text : patients) {
        PatientPlan plan;
        plan.patient_id = "p" + std::to_string(id++);
        plan.schedule = s;
        for (const auto& text : weeks_text) plan.weeks.push_back(WeekSequence::from_string(s, text));
        d.plans.push_back(std::move(plan));
    }
    return d;
}

inline Design all_h_design(int n3, int n2, int weeks) {
    Design d;
    d.weeks = weeks;
    int id = 1;
    auto add = [&](Schedule s, int count) {
        for (int i = 0; i < count; ++i, ++id) {
            PatientPlan plan;
            plan.patient_id = "p" + std::to_string(id);
            plan.schedule = s;
            for (int w = 0; w < weeks; ++w)
                plan.weeks.emplace_back(s, std::vector<Treatment>(
                                               static_cast<std::size_t>(sessions_per_week(s)), Treatment::H));
            d.plans.push_back(std::move(plan));
        }
    };
    add(Schedule::ThriceWeekly, n3);
    add(Schedule::TwiceWeekly, n2);
    return d;
}

}  // namespace xover::testing
