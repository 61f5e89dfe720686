#include "xover/trial_data.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace xover {

std::vector<std::string> TrialDataset::patients() const {
    std::vector<std::string> order;
    std::set<std::string> seen;
    for (const auto& r : records)
        if (seen.insert(r.patient_id).second) order.push_back(r.patient_id);
    return order;
}

int TrialDataset::complete_count() const {
    int n = 0;
    for (const auto& r : records) n += r.y.has_value() ? 1 : 0;
    return n;
}

void TrialDataset::check_consistency() const {
    std::set<std::tuple<std::string, int, Day>> keys;
    for (const auto& r : records) {
        if (r.week < 1 || r.week > weeks)
            throw ValidationError("record for patient '" + r.patient_id + "' has week " +
                                  std::to_string(r.week) + " outside 1.." + std::to_string(weeks));
        const auto it = schedules.find(r.patient_id);
        if (it == schedules.end())
            throw ValidationError("no schedule for patient '" + r.patient_id + "'");
        bool day_ok = false;
        for (Day d : attendance_days(it->second)) day_ok = day_ok || d == r.day;
        if (!day_ok)
            throw ValidationError("patient '" + r.patient_id + "' has a record on " +
                                  std::string(to_string(r.day)) + " which is not in their schedule");
        if (!keys.insert({r.patient_id, r.week, r.day}).second)
            throw ValidationError("duplicate record for patient '" + r.patient_id + "', week " +
                                  std::to_string(r.week) + ", " + std::string(to_string(r.day)));
    }
}

TrialDataset dataset_from_design(const Design& design) {
    require_valid(design);
    TrialDataset data;
    data.weeks = design.weeks;
    for (const auto& plan : design.plans) {
        data.schedules.emplace(plan.patient_id, plan.schedule);
        const auto days = attendance_days(plan.schedule);
        for (int w = 0; w < design.weeks; ++w) {
            const auto& seq = plan.weeks[static_cast<std::size_t>(w)];
            for (int k = 0; k < seq.length(); ++k)
                data.records.push_back({plan.patient_id, w + 1, days[static_cast<std::size_t>(k)],
                                        seq.at(k), std::nullopt});
        }
    }
    return data;
}

namespace {

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

namespace {

TrialDataset read_trial_stream(std::istream& in, const std::string& origin) {
    TrialDataset data;
    std::string line;
    int lineno = 0;
    std::set<std::string> has_wed;

    if (!std::getline(in, line))
        throw ValidationError("trial data file is empty: " + origin);
    ++lineno;
    if (split_csv_line(line) != std::vector<std::string>{"patient_id", "week", "day", "treatment", "y"})
        throw ValidationError("trial data file: expected header 'patient_id,week,day,treatment,y'");

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw ValidationError("trial data line " + std::to_string(lineno) + ": expected 5 fields, got " +
                                  std::to_string(fields.size()));
        TrialRecord rec;
        rec.patient_id = fields[0];
        if (rec.patient_id.empty())
            throw ValidationError("trial data line " + std::to_string(lineno) + ": empty patient_id");

        auto [p, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), rec.week);
        if (ec != std::errc() || p != fields[1].data() + fields[1].size())
            throw ValidationError("trial data line " + std::to_string(lineno) + ": bad week '" + fields[1] + "'");

        try {
            rec.day = day_from_string(fields[2]);
            if (fields[3].size() != 1)
                throw ValidationError("expected a single treatment character");
            rec.treatment = treatment_from_char(fields[3][0]);
        } catch (const ValidationError& e) {
            throw ValidationError("trial data line " + std::to_string(lineno) + ": " + e.what());
        }

        if (!fields[4].empty()) {
            double y = 0.0;
            auto [py, ecy] = std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), y);
            if (ecy != std::errc() || py != fields[4].data() + fields[4].size())
                throw ValidationError("trial data line " + std::to_string(lineno) + ": bad response '" +
                                      fields[4] + "'");
            rec.y = y;
        }

        if (rec.day == Day::Wed) has_wed.insert(rec.patient_id);
        data.weeks = std::max(data.weeks, rec.week);
        data.records.push_back(std::move(rec));
    }

    for (const auto& r : data.records) {
        const Schedule s = has_wed.contains(r.patient_id) ? Schedule::ThriceWeekly : Schedule::TwiceWeekly;
        data.schedules.emplace(r.patient_id, s);
    }
    data.check_consistency();
    return data;
}

}  // namespace

TrialDataset read_trial_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open trial data file: " + path.string());
    return read_trial_stream(in, path.string());
}

TrialDataset trial_from_csv_string(const std::string& text) {
    std::istringstream in(text);
    return read_trial_stream(in, "<string>");
}

void write_trial_csv(const TrialDataset& data, std::ostream& out) {
    out << "patient_id,week,day,treatment,y\n";
    for (const auto& r : data.records) {
        out << r.patient_id << ',' << r.week << ',' << to_string(r.day) << ',' << to_char(r.treatment) << ',';
        if (r.y) out << format_double(*r.y);
        out << '\n';
    }
}

void write_trial_csv(const TrialDataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write trial data file: " + path.string());
    write_trial_csv(data, out);
}

std::string trial_csv_string(const TrialDataset& data) {
    std::ostringstream out;
    write_trial_csv(data, out);
    return out.str();
}

}  // namespace xover
