#include "mindpalace/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <sstream>

#include "mindpalace/error.hpp"

namespace mindpalace {

using nlohmann::json;

namespace {

void check_sigma(int sigma) {
    if (sigma < 1 || sigma > 5) throw ValidationError("score must lie in 1..5, got " + std::to_string(sigma));
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

double correctness(int sigma) {
    check_sigma(sigma);
    return (sigma - 1) * 25.0;
}

double exploration_efficiency_fraction(int sigma, double p, double l) {
    check_sigma(sigma);
    if (p < 0.0 || l < 0.0) throw ValidationError("path lengths must be nonnegative");
    double base = (sigma - 1) / 4.0;
    if (l == 0.0 && p == 0.0) return base;
    return base * l / std::max(l, p);
}

double exploration_efficiency(int sigma, double p, double l) {
    return exploration_efficiency_fraction(sigma, p, l) * 100.0;
}

int retrieval_count(const std::vector<json>& trace) {
    return static_cast<int>(std::count_if(trace.begin(), trace.end(), [](const json& r) {
        return r.is_object() && r.value("event", "") == "retrieve";
    }));
}

SummaryRow aggregate(const std::vector<EvalRecord>& records, std::string label) {
    if (records.empty()) throw ValidationError("cannot aggregate zero records");
    SummaryRow row;
    row.label = std::move(label);
    row.count = records.size();
    for (auto& r : records) {
        row.correctness += correctness(r.sigma);
        row.efficiency += exploration_efficiency_fraction(r.sigma, r.p, r.l);
        row.retrievals += r.retrieved_images;
    }
    double n = static_cast<double>(records.size());
    row.correctness /= n;
    row.efficiency /= n;
    row.retrievals /= n;
    return row;
}

std::string render_row(const SummaryRow& row) {
    return fixed(row.correctness, 1) + "% | " + fixed(row.efficiency, 2) + " | " + fixed(row.retrievals, 2);
}

std::string render_table(const std::vector<SummaryRow>& rows, const std::string& title) {
    std::size_t width = 5;
    for (auto& r : rows) width = std::max(width, r.label.size());
    std::ostringstream os;
    os << title << "\n";
    os << std::string(width, ' ') << " |   n | correct | effic. | images\n";
    for (auto& r : rows) {
        os << r.label << std::string(width - r.label.size(), ' ') << " | ";
        auto n = std::to_string(r.count);
        os << std::string(n.size() < 3 ? 3 - n.size() : 0, ' ') << n << " | " << render_row(r) << "\n";
    }
    return os.str();
}

std::string render_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream os;
    os << "label,count,correctness_pct,efficiency,retrievals\n";
    for (auto& r : rows) {
        os << r.label << "," << r.count << "," << fixed(r.correctness, 3) << "," << fixed(r.efficiency, 4) << ","
           << fixed(r.retrievals, 3) << "\n";
    }
    return os.str();
}

json to_json(const EvalRecord& r) {
    return {{"question_id", r.question_id},
            {"agent", r.agent},
            {"qtype", r.qtype},
            {"sigma", r.sigma},
            {"correctness", correctness(r.sigma)},
            {"efficiency", exploration_efficiency_fraction(r.sigma, r.p, r.l)},
            {"p", r.p},
            {"l", r.l},
            {"retrieved_images", r.retrieved_images},
            {"explored_viewpoints", r.explored_viewpoints},
            {"answer", r.answer},
            {"error", r.error},
            {"stops", r.stops},
            {"timestamp", {{"wall_time_s", r.wall_time}, {"finished_at", r.finished_at}}}};
}

EvalRecord record_from_json(const json& j) {
    EvalRecord r;
    try {
        r.question_id = j.at("question_id").get<std::string>();
        r.agent = j.at("agent").get<std::string>();
        r.qtype = j.value("qtype", "");
        r.sigma = j.at("sigma").get<int>();
        r.p = j.at("p").get<double>();
        r.l = j.at("l").get<double>();
        r.retrieved_images = j.at("retrieved_images").get<int>();
        r.explored_viewpoints = j.value("explored_viewpoints", 0);
        r.answer = j.value("answer", "");
        r.error = j.value("error", "");
        r.stops = j.value("stops", 0);
        if (j.contains("timestamp")) {
            r.wall_time = j["timestamp"].value("wall_time_s", 0.0);
            r.finished_at = j["timestamp"].value("finished_at", "");
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad result record: ") + e.what());
    }
    check_sigma(r.sigma);
    return r;
}

std::vector<EvalRecord> read_results(std::istream& in) {
    std::vector<EvalRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ValidationError("results line " + std::to_string(n) + " is not JSON");
        out.push_back(record_from_json(j));
    }
    return out;
}

void write_results(std::ostream& out, const std::vector<EvalRecord>& records) {
    for (auto& r : records) out << to_json(r).dump() << "\n";
}

}  // namespace mindpalace
