#include "xover/design.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace xover {

namespace {

constexpr std::array<Day, 3> kThriceDays{Day::Mon, Day::Wed, Day::Fri};
constexpr std::array<Day, 2> kTwiceDays{Day::Mon, Day::Fri};

}  // namespace

Treatment treatment_from_char(char c) {
    switch (c) {
        case 'H': return Treatment::H;
        case 'A': return Treatment::A;
        default:
            throw ValidationError(std::string("unknown treatment code '") + c + "': expected 'H' or 'A'");
    }
}

std::string_view to_string(Day d) {
    switch (d) {
        case Day::Mon: return "Mon";
        case Day::Wed: return "Wed";
        case Day::Fri: return "Fri";
    }
    return "?";
}

Day day_from_string(std::string_view s) {
    if (s == "Mon") return Day::Mon;
    if (s == "Wed") return Day::Wed;
    if (s == "Fri") return Day::Fri;
    throw ValidationError("unknown day label '" + std::string(s) + "': expected Mon, Wed or Fri");
}

std::span<const Day> attendance_days(Schedule s) {
    if (s == Schedule::ThriceWeekly) return kThriceDays;
    return kTwiceDays;
}

Schedule schedule_from_sessions(int sessions) {
    if (sessions == 3) return Schedule::ThriceWeekly;
    if (sessions == 2) return Schedule::TwiceWeekly;
    throw ValidationError("sessions_per_week must be 2 or 3, got " + std::to_string(sessions));
}

int period_class(Schedule s, Day d) {
    if (s == Schedule::ThriceWeekly) {
        switch (d) {
            case Day::Mon: return 0;
            case Day::Wed: return 1;
            case Day::Fri: return 2;
        }
    } else {
        switch (d) {
            case Day::Mon: return 3;
            case Day::Fri: return 2;  // Friday class shared between schedules
            case Day::Wed: break;
        }
    }
    throw ValidationError("day " + std::string(to_string(d)) + " is not part of the patient's schedule");
}

WeekSequence::WeekSequence(Schedule schedule, std::vector<Treatment> treatments)
    : schedule_(schedule), treatments_(std::move(treatments)) {
    const int expected = sessions_per_week(schedule_);
    if (static_cast<int>(treatments_.size()) != expected) {
        throw ValidationError("week sequence length " + std::to_string(treatments_.size()) +
                              " does not match schedule (" + std::to_string(expected) + " sessions per week)");
    }
}

WeekSequence WeekSequence::from_string(Schedule schedule, std::string_view text) {
    std::vector<Treatment> t;
    t.reserve(text.size());
    for (char c : text) t.push_back(treatment_from_char(c));
    return WeekSequence(schedule, std::move(t));
}

std::string WeekSequence::str() const {
    std::string s;
    s.reserve(treatments_.size());
    for (Treatment t : treatments_) s.push_back(to_char(t));
    return s;
}

WeekSequence dual(const WeekSequence& s) {
    std::vector<Treatment> swapped;
    swapped.reserve(s.treatments().size());
    for (Treatment t : s.treatments()) swapped.push_back(dual(t));
    return WeekSequence(s.schedule(), std::move(swapped));
}

std::int64_t PatientPlan::allocation_imbalance() const {
    std::int64_t sum = 0;
    for (const auto& wk : weeks)
        for (Treatment t : wk.treatments()) sum += signed_value(t);
    return sum;
}

int Design::n_thrice() const {
    int n = 0;
    for (const auto& p : plans) n += (p.schedule == Schedule::ThriceWeekly) ? 1 : 0;
    return n;
}

int Design::n_twice() const {
    int n = 0;
    for (const auto& p : plans) n += (p.schedule == Schedule::TwiceWeekly) ? 1 : 0;
    return n;
}

std::int64_t Design::observations() const {
    std::int64_t m = 0;
    for (const auto& p : plans)
        for (const auto& wk : p.weeks) m += wk.length();
    return m;
}

void ModelParams::validate() const {
    if (!(sigma > 0.0)) throw ValidationError("sigma must be > 0");
}

bool ValidationReport::structurally_valid() const {
    for (const auto& i : issues)
        if (i.severity == ValidationIssue::Severity::Error) return false;
    return true;
}

std::vector<std::string> ValidationReport::errors() const {
    std::vector<std::string> out;
    for (const auto& i : issues)
        if (i.severity == ValidationIssue::Severity::Error) out.push_back(i.message);
    return out;
}

std::vector<std::string> ValidationReport::warnings() const {
    std::vector<std::string> out;
    for (const auto& i : issues)
        if (i.severity == ValidationIssue::Severity::Warning) out.push_back(i.message);
    return out;
}

ValidationReport validate_design(const Design& design) {
    ValidationReport report;
    auto error = [&](std::string msg) {
        report.issues.push_back({ValidationIssue::Severity::Error, std::move(msg)});
    };
    auto warning = [&](std::string msg) {
        report.issues.push_back({ValidationIssue::Severity::Warning, std::move(msg)});
    };

    if (design.weeks < 1) error("weeks must be >= 1, got " + std::to_string(design.weeks));
    if (design.plans.empty()) error("design has no patients");

    std::set<std::string> seen;
    for (const auto& plan : design.plans) {
        if (!seen.insert(plan.patient_id).second)
            error("duplicate patient id '" + plan.patient_id + "'");

        if (static_cast<int>(plan.weeks.size()) != design.weeks)
            error("patient '" + plan.patient_id + "': plan length != w (" +
                  std::to_string(plan.weeks.size()) + " weeks vs w=" + std::to_string(design.weeks) + ")");

        for (std::size_t k = 0; k < plan.weeks.size(); ++k) {
            if (plan.weeks[k].schedule() != plan.schedule) {
                error("patient '" + plan.patient_id + "': week " + std::to_string(k + 1) +
                      " does not match the patient's schedule");
            }
        }

        const std::int64_t imbalance = plan.allocation_imbalance();
        if (imbalance != 0)
            warning("patient '" + plan.patient_id + "': patient imbalance = " +
                    std::to_string(std::abs(imbalance)));
    }
    return report;
}

void require_valid(const Design& design) {
    const auto report = validate_design(design);
    if (report.structurally_valid()) return;
    std::ostringstream msg;
    msg << "invalid design:";
    for (const auto& e : report.errors()) msg << "\n  - " << e;
    throw ValidationError(msg.str());
}

namespace {

using json = nlohmann::ordered_json;

json plan_to_json(const PatientPlan& plan) {
    json weeks = json::array();
    for (const auto& wk : plan.weeks) {
        json seq = json::array();
        for (Treatment t : wk.treatments()) seq.push_back(std::string(1, to_char(t)));
        weeks.push_back(std::move(seq));
    }
    return json{{"patient_id", plan.patient_id},
                {"sessions_per_week", sessions_per_week(plan.schedule)},
                {"weeks", std::move(weeks)}};
}

PatientPlan plan_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("design file: each plan must be an object");
    if (!j.contains("patient_id") || !j.contains("sessions_per_week") || !j.contains("weeks"))
        throw ValidationError("design file: plan requires patient_id, sessions_per_week and weeks");

    PatientPlan plan;
    if (j["patient_id"].is_string())
        plan.patient_id = j["patient_id"].get<std::string>();
    else if (j["patient_id"].is_number_integer())
        plan.patient_id = std::to_string(j["patient_id"].get<std::int64_t>());
    else
        throw ValidationError("design file: patient_id must be a string or integer");

    if (!j["sessions_per_week"].is_number_integer())
        throw ValidationError("design file: sessions_per_week must be an integer");
    plan.schedule = schedule_from_sessions(j["sessions_per_week"].get<int>());

    if (!j["weeks"].is_array())
        throw ValidationError("design file: plan 'weeks' must be an array of treatment arrays");
    for (const auto& wk : j["weeks"]) {
        if (!wk.is_array())
            throw ValidationError("design file: each week must be an array of treatment codes");
        std::vector<Treatment> treatments;
        for (const auto& cell : wk) {
            if (!cell.is_string() || cell.get<std::string>().size() != 1)
                throw ValidationError("design file: treatments must be single-character strings \"H\"/\"A\"");
            treatments.push_back(treatment_from_char(cell.get<std::string>()[0]));
        }
        if (static_cast<int>(treatments.size()) != sessions_per_week(plan.schedule))
            throw ValidationError("design file: patient '" + plan.patient_id + "' has a week of length " +
                                  std::to_string(treatments.size()) + " but attends " +
                                  std::to_string(sessions_per_week(plan.schedule)) + " times per week");
        plan.weeks.emplace_back(plan.schedule, std::move(treatments));
    }
    return plan;
}

}  // namespace

std::string design_to_json(const Design& design, int indent) {
    json j{{"weeks", design.weeks}, {"plans", json::array()}};
    for (const auto& plan : design.plans) j["plans"].push_back(plan_to_json(plan));
    return j.dump(indent);
}

Design design_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("design file: JSON parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("weeks") || !j.contains("plans"))
        throw ValidationError("design file: expected an object with 'weeks' and 'plans'");
    if (!j["weeks"].is_number_integer())
        throw ValidationError("design file: 'weeks' must be an integer");
    if (!j["plans"].is_array())
        throw ValidationError("design file: 'plans' must be an array");

    Design d;
    d.weeks = j["weeks"].get<int>();
    for (const auto& pj : j["plans"]) d.plans.push_back(plan_from_json(pj));
    return d;
}

Design read_design(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open design file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return design_from_json(buf.str());
}

void write_design(const Design& design, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write design file: " + path.string());
    out << design_to_json(design) << '\n';
}

}  // namespace xover
