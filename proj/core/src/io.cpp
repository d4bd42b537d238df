#include "eventflow/io.hpp"

#include "eventflow/error.hpp"
#include "eventflow/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace eventflow::io {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& what) {
    throw IoError("io", what);
}

double to_double(const std::string& text, const std::string& where) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first < last && *first == ' ') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) bad(fmt::format("{}: '{}' is not a number", where, text));
    return v;
}

/// Header-checked table: maps required column names to indices.
struct Table {
    std::vector<CsvRow> rows;  // without header
    std::map<std::string, std::size_t, std::less<>> index;
    std::string name;

    std::size_t col(std::string_view column) const {
        const auto it = index.find(column);
        if (it == index.end()) bad(fmt::format("{}: missing column '{}'", name, column));
        return it->second;
    }
    bool has(std::string_view column) const { return index.contains(column); }
};

Table read_table(const std::string& text, std::string name, std::initializer_list<std::string_view> required) {
    auto rows = parse_csv(text);
    if (rows.empty()) bad(fmt::format("{}: empty file", name));
    Table t;
    t.name = std::move(name);
    for (std::size_t i = 0; i < rows[0].size(); ++i) t.index.emplace(text::trim(rows[0][i]), i);
    for (auto column : required) t.col(column);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() == 1 && rows[r][0].empty()) continue;
        if (rows[r].size() != rows[0].size()) {
            bad(fmt::format("{}: line {} has {} fields, header has {}", t.name, r + 1, rows[r].size(), rows[0].size()));
        }
        t.rows.push_back(std::move(rows[r]));
    }
    return t;
}

std::vector<std::string> jsonl_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        lines.push_back(line);
    }
    return lines;
}

json parse_line(const std::string& line, std::size_t number, std::string_view what) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        bad(fmt::format("{} line {}: {}", what, number, e.what()));
    }
}

template <typename F>
auto guarded(std::string_view what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        bad(fmt::format("{}: {}", what, e.what()));
    }
}

}  // namespace

std::vector<CsvRow> parse_csv(const std::string& text) {
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        any = true;
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else {
            field.push_back(c);
        }
    }
    if (quoted) bad("csv: unterminated quoted field");
    if (any) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string csv_line(const CsvRow& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(row[i]);
    }
    out.push_back('\n');
    return out;
}

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds negative zero
    return fmt::format("{}", v);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad(fmt::format("cannot open {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) bad(fmt::format("cannot read {}", path.string()));
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) bad(fmt::format("cannot create directory {}: {}", dir.string(), ec.message()));
    const fs::path tmp = dir / fmt::format(".{}.tmp{}", path.filename().string(), ::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) bad(fmt::format("cannot write {}", tmp.string()));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) bad(fmt::format("cannot write {}", tmp.string()));
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        bad(fmt::format("cannot move {} into place: {}", path.string(), ec.message()));
    }
}

json read_json(const fs::path& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        bad(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::string dump_json(const json& doc) {
    return doc.dump(2) + "\n";
}

std::vector<RawEvent> parse_raw_events_jsonl(const std::string& text) {
    std::vector<RawEvent> out;
    const auto lines = jsonl_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const json j = parse_line(lines[i], i + 1, "events_raw.jsonl");
        guarded("events_raw.jsonl", [&] {
            RawEvent e;
            e.event_id = j.at("event_id").get<std::string>();
            e.title = j.value("title", std::string{});
            e.raw_time_text = j.at("raw_time_text").get<std::string>();
            e.venue_text = j.value("venue_text", std::string{});
            e.raw_description = j.value("raw_description", std::string{});
            const auto source = parse_event_source(j.value("source", std::string{"dedicated-site"}));
            if (!source) bad(fmt::format("events_raw.jsonl line {}: unknown source", i + 1));
            e.source = *source;
            out.push_back(std::move(e));
            return 0;
        });
    }
    return out;
}

std::string raw_events_jsonl(const std::vector<RawEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        const json j{{"event_id", e.event_id},
                     {"title", e.title},
                     {"raw_time_text", e.raw_time_text},
                     {"venue_text", e.venue_text},
                     {"raw_description", e.raw_description},
                     {"source", to_string(e.source)}};
        out += j.dump() + "\n";
    }
    return out;
}

json events_to_json(const std::vector<Event>& events) {
    json out = json::array();
    for (const auto& e : events) {
        json sessions = json::array();
        for (const auto& s : e.sessions) {
            sessions.push_back({{"sub_id", s.sub_id},
                                {"start", format_datetime(s.start, true)},
                                {"end", format_datetime(s.end, true)}});
        }
        out.push_back({{"event_id", e.event_id},
                       {"title", e.title},
                       {"event_type", to_string(e.event_type)},
                       {"summary", e.summary},
                       {"venue", e.venue},
                       {"sessions", sessions}});
    }
    return out;
}

std::vector<Event> events_from_json(const json& doc) {
    return guarded("events.json", [&] {
        if (!doc.is_array()) bad("events.json: expected an array of events");
        std::vector<Event> out;
        for (const auto& j : doc) {
            Event e;
            e.event_id = j.at("event_id").get<std::string>();
            e.title = j.value("title", std::string{});
            const auto type = parse_event_type(j.at("event_type").get<std::string>());
            if (!type) bad(fmt::format("events.json: event {} has an unknown type", e.event_id));
            e.event_type = *type;
            e.summary = j.value("summary", std::string{});
            e.venue = j.value("venue", std::string{});
            for (const auto& s : j.at("sessions")) {
                EventSession session;
                session.event_id = e.event_id;
                session.sub_id = s.at("sub_id").get<int>();
                session.start = parse_datetime(s.at("start").get<std::string>());
                session.end = parse_datetime(s.at("end").get<std::string>());
                e.sessions.push_back(session);
            }
            out.push_back(std::move(e));
        }
        return out;
    });
}

std::vector<Post> parse_posts_jsonl(const std::string& text) {
    std::vector<Post> out;
    const auto lines = jsonl_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const json j = parse_line(lines[i], i + 1, "posts.jsonl");
        guarded("posts.jsonl", [&] {
            Post p;
            p.post_id = j.at("post_id").get<std::string>();
            p.author_id = j.value("author_id", std::string{});
            p.title = j.value("title", std::string{});
            p.content = j.value("content", std::string{});
            p.hashtags = j.value("hashtags", std::vector<std::string>{});
            p.geotags = j.value("geotags", std::vector<std::string>{});
            p.created_at = parse_datetime(j.at("created_at").get<std::string>());
            p.likes = j.at("likes").get<std::int64_t>();
            p.collects = j.at("collects").get<std::int64_t>();
            if (p.likes < 0 || p.collects < 0) bad(fmt::format("posts.jsonl line {}: negative counts", i + 1));
            out.push_back(std::move(p));
            return 0;
        });
    }
    return out;
}

std::string posts_jsonl(const std::vector<Post>& posts) {
    std::string out;
    for (const auto& p : posts) {
        const json j{{"post_id", p.post_id},
                     {"author_id", p.author_id},
                     {"title", p.title},
                     {"content", p.content},
                     {"hashtags", p.hashtags},
                     {"geotags", p.geotags},
                     {"created_at", format_datetime(p.created_at, true)},
                     {"likes", p.likes},
                     {"collects", p.collects}};
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<RelevanceLabel> parse_relevance_csv(const std::string& text) {
    const Table t = read_table(text, "relevance.csv", {"event_id", "post_id", "related"});
    std::vector<RelevanceLabel> out;
    for (const auto& r : t.rows) {
        const std::string flag = text::trim(r[t.col("related")]);
        if (flag != "0" && flag != "1") bad(fmt::format("relevance.csv: related must be 0 or 1, got '{}'", flag));
        out.push_back(RelevanceLabel{r[t.col("event_id")], r[t.col("post_id")], flag == "1"});
    }
    return out;
}

std::string relevance_csv(const std::vector<RelevanceLabel>& labels) {
    std::string out = "event_id,post_id,related\n";
    for (const auto& l : labels) out += csv_line({l.event_id, l.post_id, l.related ? "1" : "0"});
    return out;
}

std::string popularity_csv(const std::vector<Event>& events, const std::vector<PopularityMetrics>& metrics) {
    if (events.size() != metrics.size()) throw PreconditionError("io", "metrics must be aligned with events");
    std::string out = "event_id,sub_id,overall,promotional,womp\n";
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& m = metrics[i];
        for (std::size_t k = 0; k < events[i].sessions.size(); ++k) {
            out += csv_line({events[i].event_id, std::to_string(events[i].sessions[k].sub_id), format_number(m.overall),
                             format_number(m.promotional), format_number(m.wom_per_session.at(k))});
        }
    }
    return out;
}

std::vector<FlowRecord> parse_flows_csv(const std::string& text) {
    const Table t = read_table(text, "flows.csv", {"date", "arrivals"});
    const bool segmented = t.has("segment");
    std::vector<FlowRecord> out;
    for (const auto& r : t.rows) {
        FlowRecord f;
        f.date = parse_date(text::trim(r[t.col("date")]));
        f.arrivals = to_double(r[t.col("arrivals")], "flows.csv");
        if (segmented) f.segment = r[t.col("segment")];
        out.push_back(std::move(f));
    }
    return out;
}

std::string flows_csv(const std::vector<FlowRecord>& flows) {
    const bool segmented = std::any_of(flows.begin(), flows.end(), [](const FlowRecord& f) { return !f.segment.empty(); });
    std::string out = segmented ? "date,arrivals,segment\n" : "date,arrivals\n";
    for (const auto& f : flows) {
        CsvRow row{format_date(f.date), format_number(f.arrivals)};
        if (segmented) row.push_back(f.segment);
        out += csv_line(row);
    }
    return out;
}

std::vector<WeatherRecord> parse_weather_csv(const std::string& text) {
    const Table t = read_table(text, "weather.csv", {"date", "rainfall_mm", "tmax_c", "typhoon"});
    std::vector<WeatherRecord> out;
    for (const auto& r : t.rows) {
        WeatherRecord w;
        w.date = parse_date(text::trim(r[t.col("date")]));
        w.rainfall_mm = to_double(r[t.col("rainfall_mm")], "weather.csv");
        w.tmax_c = to_double(r[t.col("tmax_c")], "weather.csv");
        const std::string typhoon = text::trim(r[t.col("typhoon")]);
        if (typhoon != "0" && typhoon != "1") bad(fmt::format("weather.csv: typhoon must be 0 or 1, got '{}'", typhoon));
        w.typhoon = typhoon == "1";
        out.push_back(w);
    }
    return out;
}

std::string weather_csv(const std::vector<WeatherRecord>& weather) {
    std::string out = "date,rainfall_mm,tmax_c,typhoon\n";
    for (const auto& w : weather) {
        out += csv_line({format_date(w.date), format_number(w.rainfall_mm), format_number(w.tmax_c), w.typhoon ? "1" : "0"});
    }
    return out;
}

CalendarContext parse_holidays_csv(const std::string& text) {
    const Table t = read_table(text, "holidays.csv", {"start", "end", "name", "kind"});
    CalendarContext cal;
    if (t.rows.empty()) bad("holidays.csv: no holiday spans");
    int first_year = 0;
    int last_year = 0;
    bool seen = false;
    for (const auto& r : t.rows) {
        HolidaySpan span{r[t.col("name")], parse_date(text::trim(r[t.col("start")])), parse_date(text::trim(r[t.col("end")]))};
        const std::string kind = text::trim(r[t.col("kind")]);
        if (kind == "public") {
            cal.holidays.push_back(span);
        } else if (kind == "school") {
            cal.school_vacations.push_back(span);
        } else {
            bad(fmt::format("holidays.csv: kind must be public or school, got '{}'", kind));
        }
        const int y0 = static_cast<int>(std::chrono::year_month_day(span.start).year());
        const int y1 = static_cast<int>(std::chrono::year_month_day(span.end).year());
        first_year = seen ? std::min(first_year, y0) : y0;
        last_year = seen ? std::max(last_year, y1) : y1;
        seen = true;
    }
    cal.coverage_start = make_date(first_year, 1, 1);
    cal.coverage_end = make_date(last_year, 12, 31);
    try {
        cal.validate();
    } catch (const Error& e) {
        bad(fmt::format("holidays.csv: {}", e.what()));
    }
    return cal;
}

std::string holidays_csv(const CalendarContext& calendar) {
    std::string out = "start,end,name,kind\n";
    for (const auto& h : calendar.holidays) out += csv_line({format_date(h.start), format_date(h.end), h.name, "public"});
    for (const auto& h : calendar.school_vacations) {
        out += csv_line({format_date(h.start), format_date(h.end), h.name, "school"});
    }
    return out;
}

std::string features_csv(const FeatureMatrix& fm) {
    CsvRow header{"date"};
    header.insert(header.end(), fm.columns.begin(), fm.columns.end());
    header.push_back("arrivals");
    std::string out = csv_line(header);
    for (std::size_t r = 0; r < fm.rows(); ++r) {
        CsvRow row{format_date(fm.dates[r])};
        for (std::size_t c = 0; c < fm.cols(); ++c) {
            row.push_back(format_number(fm.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
        }
        row.push_back(format_number(fm.target[r]));
        out += csv_line(row);
    }
    return out;
}

FeatureMatrix parse_features_csv(const std::string& text) {
    auto rows = parse_csv(text);
    if (rows.empty()) bad("features csv: empty file");
    const CsvRow& header = rows[0];
    if (header.size() < 3 || header.front() != "date" || header.back() != "arrivals") {
        bad("features csv: header must start with date and end with arrivals");
    }
    const std::vector<std::string> columns(header.begin() + 1, header.end() - 1);
    FeatureMatrix fm;
    bool matched = false;
    for (int k = 1; k <= 5 && !matched; ++k) {
        for (bool split : {false, true}) {
            const auto fs = static_cast<FeatureSet>(k);
            if (feature_columns(fs, split) == columns) {
                fm.feature_set = fs;
                matched = true;
                break;
            }
        }
    }
    if (!matched) bad("features csv: columns do not match any feature set");
    fm.columns = columns;
    fm.trend_column = fm.column_index("wma_change_rate");
    std::vector<CsvRow> body;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() == 1 && rows[r][0].empty()) continue;
        if (rows[r].size() != header.size()) bad(fmt::format("features csv: line {} has {} fields", r + 1, rows[r].size()));
        body.push_back(std::move(rows[r]));
    }
    fm.values.resize(static_cast<Eigen::Index>(body.size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t r = 0; r < body.size(); ++r) {
        fm.dates.push_back(parse_date(body[r][0]));
        for (std::size_t c = 0; c < columns.size(); ++c) {
            fm.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = to_double(body[r][c + 1], "features csv");
        }
        fm.target.push_back(to_double(body[r].back(), "features csv"));
    }
    return fm;
}

std::string grid_results_csv(const GridResult& result) {
    std::string out = "learning_rate,max_depth,n_estimators,weight_decay,mae,r2,best\n";
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& r = result.rows[i];
        out += csv_line({format_number(r.params.learning_rate), std::to_string(r.params.max_depth),
                         std::to_string(r.params.n_estimators), format_number(r.params.weight_decay),
                         format_number(r.mae), r.r2 ? format_number(*r.r2) : "", i == result.best ? "1" : "0"});
    }
    return out;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::string out = "feature_set,columns,scored_days,mae,r2\n";
    for (const auto& r : rows) {
        out += csv_line({std::string(to_string(r.feature_set)), std::to_string(r.columns), std::to_string(r.scored),
                         format_number(r.mae), r.r2 ? format_number(*r.r2) : ""});
    }
    return out;
}

std::string shap_values_csv(const ShapResult& shap, const std::vector<Date>& dates) {
    if (dates.size() != static_cast<std::size_t>(shap.values.rows())) {
        throw PreconditionError("io", "one date per attributed sample expected");
    }
    CsvRow header{"date"};
    header.insert(header.end(), shap.features.begin(), shap.features.end());
    std::string out = csv_line(header);
    for (std::size_t r = 0; r < dates.size(); ++r) {
        CsvRow row{format_date(dates[r])};
        for (Eigen::Index c = 0; c < shap.values.cols(); ++c) {
            row.push_back(format_number(shap.values(static_cast<Eigen::Index>(r), c)));
        }
        out += csv_line(row);
    }
    return out;
}

std::string summary_points_csv(const ImportanceReport& report, const std::vector<Date>& dates) {
    std::string out = "rank,feature,date,feature_value,shap_value\n";
    std::map<std::string, std::size_t> rank;
    for (std::size_t i = 0; i < report.ranking.size(); ++i) rank.emplace(report.ranking[i].feature, i + 1);
    for (const auto& p : report.points) {
        out += csv_line({std::to_string(rank.at(p.feature)), p.feature, format_date(dates.at(p.sample)),
                         format_number(p.feature_value), format_number(p.contribution)});
    }
    return out;
}

}  // namespace eventflow::io
