#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xover/error.hpp"

namespace xover {

// Two-treatment coding: H maps to +1, A to -1. Every downstream sign
// convention inherits this.
enum class Treatment : std::uint8_t { H, A };

inline int signed_value(Treatment t) { return t == Treatment::H ? +1 : -1; }
inline Treatment dual(Treatment t) { return t == Treatment::H ? Treatment::A : Treatment::H; }
inline char to_char(Treatment t) { return t == Treatment::H ? 'H' : 'A'; }
Treatment treatment_from_char(char c);  // throws ValidationError on anything but 'H'/'A'

enum class Day : std::uint8_t { Mon, Wed, Fri };

std::string_view to_string(Day d);
Day day_from_string(std::string_view s);  // throws ValidationError

// A patient attends either three times (Mon/Wed/Fri) or twice (Mon/Fri) per
// week. These are the only representable patterns; equivalent shifted
// patterns (Tue/Thu/Sat) are normalized onto these labels.
enum class Schedule : std::uint8_t { ThriceWeekly, TwiceWeekly };

inline int sessions_per_week(Schedule s) { return s == Schedule::ThriceWeekly ? 3 : 2; }
std::span<const Day> attendance_days(Schedule s);
Schedule schedule_from_sessions(int sessions);  // throws ValidationError unless 2 or 3

// Index of the period class a (schedule, day) cell belongs to.
// Classes: 0 = thrice-weekly Monday, 1 = thrice-weekly Wednesday,
// 2 = Friday (shared between both schedules: each Monday session follows the
// preceding Friday), 3 = twice-weekly Monday.
int period_class(Schedule s, Day d);
inline constexpr int kPeriodClasses = 4;

// One week of allocations for one patient; length equals the schedule's
// sessions per week.
class WeekSequence {
public:
    WeekSequence(Schedule schedule, std::vector<Treatment> treatments);
    static WeekSequence from_string(Schedule schedule, std::string_view text);  // e.g. "AHA"

    Schedule schedule() const { return schedule_; }
    const std::vector<Treatment>& treatments() const { return treatments_; }
    Treatment at(int i) const { return treatments_.at(static_cast<std::size_t>(i)); }
    int length() const { return static_cast<int>(treatments_.size()); }
    std::string str() const;

    bool operator==(const WeekSequence&) const = default;

private:
    Schedule schedule_;
    std::vector<Treatment> treatments_;
};

// Element-wise treatment swap; an involution.
WeekSequence dual(const WeekSequence& s);

struct PatientPlan {
    std::string patient_id;
    Schedule schedule = Schedule::ThriceWeekly;
    std::vector<WeekSequence> weeks;

    // H-count minus A-count over the whole plan.
    std::int64_t allocation_imbalance() const;

    bool operator==(const PatientPlan&) const = default;
};

// A complete allocation for all patients over `weeks` weeks.
struct Design {
    int weeks = 0;
    std::vector<PatientPlan> plans;

    int n_thrice() const;
    int n_twice() const;
    // Number of allocation cells actually present (for a structurally valid
    // design this equals weeks * (3*n_thrice + 2*n_twice)).
    std::int64_t observations() const;

    bool operator==(const Design&) const = default;
};

// Fixed-effects model parameters used by simulation and analysis.
// period_effects are indexed by period class (see period_class above).
struct ModelParams {
    double tau = 0.0;
    std::array<double, kPeriodClasses> period_effects{};
    std::vector<double> patient_effects;  // one per patient in plan order; empty = all zero
    double sigma = 1.0;

    void validate() const;  // sigma > 0
};

struct ValidationIssue {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool structurally_valid() const;  // no Error-severity issues
    bool empty() const { return issues.empty(); }
    std::vector<std::string> errors() const;
    std::vector<std::string> warnings() const;
};

// Lists every invariant violation. Per-patient allocation imbalance is a
// warning here; optimality verdicts treat it as disqualifying.
ValidationReport validate_design(const Design& design);

// Throws ValidationError collecting all Error-severity messages.
void require_valid(const Design& design);

// JSON design file:
//   {"weeks": w, "plans": [{"patient_id": "...", "sessions_per_week": 3,
//                           "weeks": [["H","A","H"], ...]}, ...]}
// Day labels are implicit in the schedule. read(write(d)) == d.
Design read_design(const std::filesystem::path& path);
void write_design(const Design& design, const std::filesystem::path& path);
std::string design_to_json(const Design& design, int indent = 2);
Design design_from_json(std::string_view text);

}  // namespace xover
