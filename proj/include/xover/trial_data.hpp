#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xover/design.hpp"

namespace xover {

// One observation slot: the allocation is always known; the response may be
// missing (empty y in the CSV).
struct TrialRecord {
    std::string patient_id;
    int week = 0;  // 1-based
    Day day = Day::Mon;
    Treatment treatment = Treatment::H;
    std::optional<double> y;

    bool operator==(const TrialRecord&) const = default;
};

struct TrialDataset {
    int weeks = 0;
    std::vector<TrialRecord> records;
    std::map<std::string, Schedule> schedules;

    // Patient ids in order of first appearance.
    std::vector<std::string> patients() const;
    int complete_count() const;

    // (patient, week, day) unique; weeks in range; day consistent with the
    // patient's schedule. Throws ValidationError.
    void check_consistency() const;

    bool operator==(const TrialDataset&) const = default;
};

// All allocation cells of a design with missing responses, chronological per
// patient in plan order.
TrialDataset dataset_from_design(const Design& design);

// CSV: header "patient_id,week,day,treatment,y"; day in {Mon,Wed,Fri};
// treatment in {H,A}; empty y = missing. A patient's schedule is derived from
// the days present (any Wed record => thrice-weekly).
TrialDataset read_trial_csv(const std::filesystem::path& path);
void write_trial_csv(const TrialDataset& data, const std::filesystem::path& path);
void write_trial_csv(const TrialDataset& data, std::ostream& out);
std::string trial_csv_string(const TrialDataset& data);
TrialDataset trial_from_csv_string(const std::string& text);

}  // namespace xover
