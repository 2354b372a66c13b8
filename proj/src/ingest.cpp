#include "rstgcn/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace rstgcn {

Minutes make_minutes(std::chrono::year_month_day date, int hour, int minute) {
    return std::chrono::time_point_cast<std::chrono::minutes>(std::chrono::sys_days(date)) + std::chrono::hours(hour) +
           std::chrono::minutes(minute);
}

std::string format_timestamp(Minutes t) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day ymd(day);
    const auto tod = t - day;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.count() / 60), static_cast<int>(tod.count() % 60));
    return buf;
}

} // namespace rstgcn

namespace rstgcn::ingest {

namespace {

using std::chrono::minutes;

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

bool is_placeholder(const std::string& s) {
    const std::string l = lower(s);
    return l.empty() || l == "-" || l == "--" || l == "n/a" || l == "na" || l == "source" || l == "destination" ||
           l == "start" || l == "end";
}

int parse_int(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("expected a number");
    int v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("bad number '" + std::string(s) + "'");
        v = v * 10 + (c - '0');
    }
    return v;
}

double parse_distance(const std::string& text) {
    std::string digits;
    for (char c : text) {
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') digits += c;
        else if (std::isalpha(static_cast<unsigned char>(c)) || std::isspace(static_cast<unsigned char>(c))) continue;
        else throw std::invalid_argument("bad distance '" + text + "'");
    }
    if (digits.empty()) throw std::invalid_argument("missing distance");
    std::size_t used = 0;
    const double d = std::stod(digits, &used);
    if (used != digits.size() || d < 0.0) throw std::invalid_argument("bad distance '" + text + "'");
    return d;
}

} // namespace

std::optional<std::chrono::year_month_day> parse_date(std::string_view raw) {
    const std::string text = trim(raw);
    if (text.empty()) return std::nullopt;
    using namespace std::chrono;
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        const year_month_day ymd{year(parse_int(text.substr(0, 4))), month(static_cast<unsigned>(parse_int(text.substr(5, 2)))),
                                 day(static_cast<unsigned>(parse_int(text.substr(8, 2))))};
        if (!ymd.ok()) throw std::invalid_argument("invalid date '" + text + "'");
        return ymd;
    }
    std::istringstream is(text);
    std::string d, m, y;
    if (!(is >> d >> m >> y)) throw std::invalid_argument("unrecognized date '" + text + "'");
    static constexpr std::array<const char*, 12> kMonths{"jan", "feb", "mar", "apr", "may", "jun",
                                                         "jul", "aug", "sep", "oct", "nov", "dec"};
    const std::string mm = lower(m).substr(0, 3);
    const auto it = std::find_if(kMonths.begin(), kMonths.end(), [&](const char* k) { return mm == k; });
    if (it == kMonths.end()) throw std::invalid_argument("unrecognized month in '" + text + "'");
    const year_month_day ymd{year(parse_int(y)), month(static_cast<unsigned>(it - kMonths.begin() + 1)),
                             day(static_cast<unsigned>(parse_int(d)))};
    if (!ymd.ok()) throw std::invalid_argument("invalid date '" + text + "'");
    return ymd;
}

std::optional<std::chrono::minutes> parse_clock(std::string_view raw) {
    const std::string text = trim(raw);
    if (is_placeholder(text)) return std::nullopt;
    std::string clock = text;
    std::string suffix;
    if (const auto sp = text.find(' '); sp != std::string::npos) {
        clock = text.substr(0, sp);
        suffix = lower(trim(text.substr(sp + 1)));
    }
    const auto colon = clock.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("bad time '" + text + "'");
    int h = parse_int(clock.substr(0, colon));
    const int m = parse_int(clock.substr(colon + 1));
    if (m > 59) throw std::invalid_argument("bad time '" + text + "'");
    if (suffix.empty()) {
        if (h > 23) throw std::invalid_argument("bad time '" + text + "'");
    } else if (suffix == "am" || suffix == "pm") {
        if (h > 12) throw std::invalid_argument("bad time '" + text + "'");
        if (h == 12) h = 0;
        if (suffix == "pm") h += 12;
    } else {
        throw std::invalid_argument("bad time suffix in '" + text + "'");
    }
    return std::chrono::minutes(h * 60 + m);
}

std::optional<int> parse_delay(std::string_view raw) {
    const std::string text = lower(trim(raw));
    if (is_placeholder(text)) return std::nullopt;
    if (text == "on time" || text == "right time" || text == "rt" || text == "0m late") return 0;
    std::istringstream is(text);
    std::string tok;
    int total = 0;
    int sign = 0;
    bool any = false;
    while (is >> tok) {
        if (tok == "late") {
            sign = 1;
        } else if (tok == "early") {
            sign = -1;
        } else if (tok.size() >= 2 && (tok.back() == 'm' || tok.back() == 'h')) {
            const int v = parse_int(tok.substr(0, tok.size() - 1));
            total += tok.back() == 'h' ? 60 * v : v;
            any = true;
        } else {
            throw std::invalid_argument("bad delay '" + std::string(raw) + "'");
        }
    }
    if (!any || sign == 0) throw std::invalid_argument("bad delay '" + std::string(raw) + "'");
    return sign * total;
}

namespace {

struct RawRow {
    RunRecord record;
    std::optional<minutes> sched_arr, act_arr, sched_dep, act_dep;
    std::size_t line = 0;
};

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    const std::string want = lower(name);
    for (std::size_t i = 0; i < header.size(); ++i)
        if (lower(header[i]) == want) return i;
    throw std::runtime_error("records CSV: missing column '" + name + "'");
}

// Nearest absolute time with the given clock reading to `target`.
Minutes nearest_with_clock(Minutes target, minutes clock) {
    const auto day0 = std::chrono::floor<std::chrono::days>(target);
    Minutes best{};
    bool have = false;
    for (int d = -1; d <= 1; ++d) {
        const Minutes cand = std::chrono::time_point_cast<minutes>(day0 + std::chrono::days(d)) + clock;
        if (!have || std::chrono::abs(cand - target) < std::chrono::abs(best - target)) {
            best = cand;
            have = true;
        }
    }
    return best;
}

// Resolves clock readings of one run into absolute timestamps. Scheduled times
// roll over to the next day whenever they would go backwards along the route;
// actual times land on the day closest to schedule + reported delay.
bool resolve_run(std::vector<RawRow*>& run, std::vector<std::string>& errors) {
    std::stable_sort(run.begin(), run.end(),
                     [](const RawRow* a, const RawRow* b) { return a->record.distance_km < b->record.distance_km; });
    const auto start = std::chrono::time_point_cast<minutes>(std::chrono::sys_days(run.front()->record.date));
    Minutes last = start;
    std::chrono::days offset{0};
    auto place = [&](minutes clock) {
        Minutes t = start + offset + clock;
        while (t < last) {
            offset += std::chrono::days(1);
            t = start + offset + clock;
        }
        last = t;
        return t;
    };
    bool ok = true;
    for (RawRow* row : run) {
        RunRecord& r = row->record;
        if (row->sched_arr) r.sched_arr = place(*row->sched_arr);
        if (row->sched_dep) r.sched_dep = place(*row->sched_dep);
        auto actual = [&](const std::optional<Minutes>& sched, const std::optional<minutes>& clock,
                          std::optional<int>& delay, std::optional<Minutes>& out, const char* what) {
            if (!clock) return true;
            const Minutes anchor = sched ? *sched + minutes(delay.value_or(0)) : start + offset + *clock;
            out = nearest_with_clock(anchor, *clock);
            if (!sched) return true;
            const int diff = static_cast<int>((*out - *sched).count());
            if (!delay) {
                delay = diff;
            } else if (std::abs(diff - *delay) > 1) {
                errors.push_back("line " + std::to_string(row->line) + ": " + what +
                                 " delay disagrees with scheduled/actual times");
                return false;
            }
            return true;
        };
        const bool good = actual(r.sched_arr, row->act_arr, r.arr_delay_min, r.act_arr, "arrival") &&
                          actual(r.sched_dep, row->act_dep, r.dep_delay_min, r.act_dep, "departure");
        if (!good) {
            row->line = 0;
            ok = false;
        }
    }
    return ok;
}

} // namespace

ParseResult parse_records(std::istream& in, const RecordFormat& format) {
    ParseResult result;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_csv(line);
            break;
        }
    }
    if (header.empty()) return result;
    const std::size_t c_date = column(header, format.date), c_no = column(header, format.train_no),
                      c_name = column(header, format.train_name), c_code = column(header, format.station_code),
                      c_station = column(header, format.station_name), c_dist = column(header, format.distance),
                      c_sa = column(header, format.sched_arr), c_aa = column(header, format.act_arr),
                      c_ad = column(header, format.arr_delay), c_sd = column(header, format.sched_dep),
                      c_dd_act = column(header, format.act_dep), c_dd = column(header, format.dep_delay);
    const std::size_t needed = std::max({c_date, c_no, c_name, c_code, c_station, c_dist, c_sa, c_aa, c_ad, c_sd,
                                         c_dd_act, c_dd}) + 1;

    std::vector<RawRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++result.rows;
        try {
            const auto f = split_csv(line);
            if (f.size() < needed) throw std::invalid_argument("expected " + std::to_string(needed) + " fields");
            RawRow row;
            row.line = line_no;
            RunRecord& r = row.record;
            const auto date = parse_date(f[c_date]);
            if (!date) throw std::invalid_argument("missing date");
            r.date = *date;
            r.train_no = f[c_no];
            r.train_name = f[c_name];
            r.station_code = f[c_code];
            r.station_name = f[c_station];
            if (r.train_no.empty() || r.station_code.empty()) throw std::invalid_argument("missing train or station");
            r.distance_km = parse_distance(f[c_dist]);
            row.sched_arr = parse_clock(f[c_sa]);
            row.act_arr = parse_clock(f[c_aa]);
            r.arr_delay_min = parse_delay(f[c_ad]);
            row.sched_dep = parse_clock(f[c_sd]);
            row.act_dep = parse_clock(f[c_dd_act]);
            r.dep_delay_min = parse_delay(f[c_dd]);
            rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            ++result.rejected;
            result.errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }

    std::map<std::pair<std::chrono::sys_days, std::string>, std::vector<RawRow*>> runs;
    for (auto& row : rows) runs[{std::chrono::sys_days(row.record.date), row.record.train_no}].push_back(&row);
    for (auto& [key, run] : runs) resolve_run(run, result.errors);

    for (auto& row : rows) {
        if (row.line == 0) {
            ++result.rejected;
            continue;
        }
        result.records.push_back(std::move(row.record));
    }
    if (result.rows > 0 && 10 * result.rejected > result.rows) {
        std::string msg = "records CSV: " + std::to_string(result.rejected) + " of " + std::to_string(result.rows) +
                          " rows rejected (limit 10%)";
        if (!result.errors.empty()) msg += "; first error: " + result.errors.front();
        throw std::runtime_error(msg);
    }
    return result;
}

ParseResult parse_records_file(const std::string& path, const RecordFormat& format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read records file '" + path + "'");
    return parse_records(in, format);
}

std::string records_csv_header() {
    return "Date,Train No.,Train Name,Code,Station,Dist.,Sch. Arr.,Act. Arr.,Arr. Delay,Sch. Dep.,Act. Dep.,Dep. Delay";
}

namespace {

std::string clock_text(const std::optional<Minutes>& t) {
    if (!t) return "-";
    const auto tod = (*t - std::chrono::floor<std::chrono::days>(*t)).count();
    int h = static_cast<int>(tod / 60);
    const int m = static_cast<int>(tod % 60);
    const char* suffix = h >= 12 ? "PM" : "AM";
    h %= 12;
    if (h == 0) h = 12;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d %s", h, m, suffix);
    return buf;
}

std::string delay_text(const std::optional<int>& d) {
    if (!d) return "-";
    if (*d == 0) return "On Time";
    return std::to_string(std::abs(*d)) + (*d > 0 ? "M Late" : "M Early");
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + '"';
}

} // namespace

std::string to_csv_row(const RunRecord& r) {
    static constexpr std::array<const char*, 12> kMonths{"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                         "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    std::ostringstream os;
    os << static_cast<unsigned>(r.date.day()) << ' ' << kMonths[static_cast<unsigned>(r.date.month()) - 1] << ' '
       << static_cast<int>(r.date.year()) << ',' << csv_field(r.train_no) << ',' << csv_field(r.train_name) << ','
       << csv_field(r.station_code) << ',' << csv_field(r.station_name) << ',';
    char dist[32];
    std::snprintf(dist, sizeof dist, "%g KM", r.distance_km);
    os << dist << ',' << clock_text(r.sched_arr) << ',' << clock_text(r.act_arr) << ',' << delay_text(r.arr_delay_min)
       << ',' << clock_text(r.sched_dep) << ',' << clock_text(r.act_dep) << ',' << delay_text(r.dep_delay_min);
    return os.str();
}

FeatureCube FeatureCube::zeros(std::size_t stations, std::size_t slots, Minutes t_start) {
    FeatureCube cube;
    cube.X = Tensor({stations, kChannelCount, slots});
    cube.Y = Tensor({stations, slots});
    cube.mask = Tensor({stations, slots});
    cube.t_start = t_start;
    return cube;
}

void FeatureCube::validate() const {
    if (X.rank() != 3) throw std::logic_error("feature cube: X must be N×F×T");
    const std::size_t n = stations(), t = slots();
    require_shape(Y, {n, t}, "feature cube Y");
    require_shape(mask, {n, t}, "feature cube mask");
    if (!station_codes.empty() && station_codes.size() != n) throw std::logic_error("feature cube: station list size");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < t; ++s) {
            if (X.at(i, 0, s) != Y.at(i, s)) throw std::logic_error("feature cube: X[:,0,:] differs from Y");
            const double m = mask.at(i, s);
            if (m != 0.0 && m != 1.0) throw std::logic_error("feature cube: mask must be 0/1");
            for (std::size_t c = 0; c < std::min<std::size_t>(features(), 4); ++c) {
                if (X.at(i, c, s) < 0.0) throw std::logic_error("feature cube: negative delay channel");
            }
            if (m == 0.0 && (X.at(i, kAvgArrDelay, s) != 0.0 || X.at(i, kTotArrDelay, s) != 0.0)) {
                throw std::logic_error("feature cube: masked-out cell with arrival delay");
            }
        }
    }
}

double hourly_headway(std::span<const Minutes> arrivals, double default_h) {
    if (arrivals.size() < 2) return default_h;
    std::int64_t gaps = 0;
    for (std::size_t i = 1; i < arrivals.size(); ++i) gaps += (arrivals[i] - arrivals[i - 1]).count();
    return static_cast<double>(gaps) / (60.0 * static_cast<double>(arrivals.size() - 1));
}

FeatureCube hourly_features(const std::vector<RunRecord>& records, const railnet::RailGraph& graph, Minutes t_start,
                            std::size_t slots, const FeatureOptions& options) {
    if (slots == 0) throw std::invalid_argument("hourly_features: need at least one slot");
    const std::size_t n = graph.station_count();
    FeatureCube cube = FeatureCube::zeros(n, slots, t_start);
    for (const auto& s : graph.stations) cube.station_codes.push_back(s.code);

    std::unordered_map<std::string, std::size_t> index;
    for (const auto& s : graph.stations) index.emplace(s.code, s.index);

    struct Cell {
        std::int64_t arr_sum = 0, dep_sum = 0;
        std::size_t arr_count = 0, dep_count = 0;
        std::vector<Minutes> headway_times;
    };
    std::vector<Cell> cells(n * slots);
    auto slot_of = [&](Minutes t) -> std::optional<std::size_t> {
        if (t < t_start) return std::nullopt;
        const auto s = static_cast<std::size_t>((t - t_start).count() / 60);
        if (s >= slots) return std::nullopt;
        return s;
    };
    auto clamp_delay = [](const std::optional<int>& d, const std::optional<Minutes>& sched,
                          const Minutes& act) -> std::int64_t {
        std::int64_t v = d ? *d : (sched ? (act - *sched).count() : 0);
        return std::max<std::int64_t>(v, 0);
    };

    for (const auto& r : records) {
        const auto it = index.find(r.station_code);
        if (it == index.end()) {
            throw std::invalid_argument("hourly_features: station '" + r.station_code + "' is not in the graph");
        }
        const std::size_t node = it->second;
        if (r.act_arr && (r.arr_delay_min || r.sched_arr)) {
            if (const auto s = slot_of(*r.act_arr)) {
                Cell& c = cells[node * slots + *s];
                c.arr_sum += clamp_delay(r.arr_delay_min, r.sched_arr, *r.act_arr);
                ++c.arr_count;
                if (options.headway_source == HeadwaySource::Actual) c.headway_times.push_back(*r.act_arr);
            }
        }
        if (options.headway_source == HeadwaySource::Scheduled && r.sched_arr && r.act_arr) {
            if (const auto s = slot_of(*r.sched_arr)) cells[node * slots + *s].headway_times.push_back(*r.sched_arr);
        }
        if (r.act_dep && (r.dep_delay_min || r.sched_dep)) {
            if (const auto s = slot_of(*r.act_dep)) {
                Cell& c = cells[node * slots + *s];
                c.dep_sum += clamp_delay(r.dep_delay_min, r.sched_dep, *r.act_dep);
                ++c.dep_count;
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < slots; ++s) {
            Cell& c = cells[i * slots + s];
            if (c.arr_count > 0) {
                const double avg = static_cast<double>(c.arr_sum) / (60.0 * static_cast<double>(c.arr_count));
                cube.X.at(i, kAvgArrDelay, s) = avg;
                cube.X.at(i, kTotArrDelay, s) = static_cast<double>(c.arr_sum) / 60.0;
                cube.Y.at(i, s) = avg;
                cube.mask.at(i, s) = 1.0;
            }
            if (c.dep_count > 0) {
                cube.X.at(i, kAvgDepDelay, s) = static_cast<double>(c.dep_sum) / (60.0 * static_cast<double>(c.dep_count));
                cube.X.at(i, kTotDepDelay, s) = static_cast<double>(c.dep_sum) / 60.0;
            }
            std::sort(c.headway_times.begin(), c.headway_times.end());
            cube.X.at(i, kHeadway, s) = hourly_headway(c.headway_times, options.default_headway_h);
        }
    }
    return cube;
}

namespace {

DelaySummary summarize(std::vector<double> minutes_values, std::size_t cells) {
    DelaySummary s;
    s.masked_cells = minutes_values.size();
    s.mask_density = cells ? static_cast<double>(s.masked_cells) / static_cast<double>(cells) : 0.0;
    if (minutes_values.empty()) return s;
    double total = 0.0;
    for (double v : minutes_values) total += v;
    s.mean_min = total / static_cast<double>(minutes_values.size());
    std::sort(minutes_values.begin(), minutes_values.end());
    const std::size_t k = minutes_values.size();
    s.median_min = k % 2 ? minutes_values[k / 2] : 0.5 * (minutes_values[k / 2 - 1] + minutes_values[k / 2]);
    s.max_min = minutes_values.back();
    return s;
}

} // namespace

CubeStats cube_stats(const FeatureCube& cube, const railnet::RailGraph* graph) {
    const std::size_t n = cube.Y.dim(0), t = cube.Y.dim(1);
    std::vector<double> all;
    std::map<std::string, std::vector<double>> per_zone;
    std::map<std::string, std::size_t> zone_cells;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string* zone = graph && i < graph->station_count() ? &graph->stations[i].zone : nullptr;
        if (zone) {
            per_zone[*zone];
            zone_cells[*zone] += t;
        }
        for (std::size_t s = 0; s < t; ++s) {
            if (cube.mask.at(i, s) == 0.0) continue;
            const double v = cube.Y.at(i, s) * 60.0;
            all.push_back(v);
            if (zone) per_zone[*zone].push_back(v);
        }
    }
    CubeStats stats;
    stats.overall = summarize(std::move(all), n * t);
    for (auto& [zone, values] : per_zone) stats.zones[zone] = summarize(std::move(values), zone_cells[zone]);
    return stats;
}

nlohmann::json to_json(const CubeStats& stats) {
    auto one = [](const DelaySummary& s) {
        return nlohmann::json{{"masked_cells", s.masked_cells}, {"mask_density", s.mask_density},
                              {"mean_delay_min", s.mean_min},   {"median_delay_min", s.median_min},
                              {"max_delay_min", s.max_min}};
    };
    nlohmann::json doc{{"overall", one(stats.overall)}, {"zones", nlohmann::json::object()}};
    for (const auto& [zone, s] : stats.zones) doc["zones"][zone] = one(s);
    return doc;
}

namespace {

template <typename T>
void write_pod(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    out.write(bytes, sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    char bytes[sizeof(T)];
    if (!in.read(bytes, sizeof(T))) throw std::runtime_error("cube file truncated");
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

} // namespace

nlohmann::json cube_sidecar(const FeatureCube& cube) {
    nlohmann::json channels = nlohmann::json::array();
    for (std::size_t c = 0; c < cube.features(); ++c) {
        channels.push_back({{"index", c}, {"name", c < kChannelNames.size() ? kChannelNames[c] : "extra"}, {"unit", "hours"}});
    }
    return {{"N", cube.stations()},
            {"F", cube.features()},
            {"T", cube.slots()},
            {"t_start", format_timestamp(cube.t_start)},
            {"slot_width_hours", 1},
            {"channels", channels},
            {"target", {{"name", "avg_arr_delay"}, {"unit", "hours"}}},
            {"mask", "1 where the station-hour has at least one arrival"},
            {"layout", "u64 N, u64 F, u64 T, i64 t_start_unix_seconds; f64 X[N][F][T]; f64 Y[N][T]; u8 mask[N][T]"},
            {"stations", cube.station_codes}};
}

void save_cube(const FeatureCube& cube, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write cube file '" + path + "'");
    write_pod<std::uint64_t>(out, cube.stations());
    write_pod<std::uint64_t>(out, cube.features());
    write_pod<std::uint64_t>(out, cube.slots());
    write_pod<std::int64_t>(out, std::chrono::duration_cast<std::chrono::seconds>(cube.t_start.time_since_epoch()).count());
    for (double v : cube.X.data()) write_pod(out, v);
    for (double v : cube.Y.data()) write_pod(out, v);
    for (double v : cube.mask.data()) write_pod<std::uint8_t>(out, v != 0.0 ? 1 : 0);
    if (!out) throw std::runtime_error("failed writing cube file '" + path + "'");
    std::ofstream side(path + ".json");
    if (!side) throw std::runtime_error("cannot write cube sidecar '" + path + ".json'");
    side << cube_sidecar(cube).dump(2) << '\n';
}

FeatureCube load_cube(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read cube file '" + path + "'");
    const auto n = read_pod<std::uint64_t>(in);
    const auto f = read_pod<std::uint64_t>(in);
    const auto t = read_pod<std::uint64_t>(in);
    const auto start = read_pod<std::int64_t>(in);
    if (n == 0 || f == 0 || t == 0 || n * f * t > (std::uint64_t{1} << 34)) {
        throw std::runtime_error("cube file '" + path + "': implausible header");
    }
    FeatureCube cube;
    cube.t_start = Minutes(std::chrono::duration_cast<std::chrono::minutes>(std::chrono::seconds(start)));
    cube.X = Tensor({n, f, t});
    cube.Y = Tensor({n, t});
    cube.mask = Tensor({n, t});
    for (double& v : cube.X.storage()) v = read_pod<double>(in);
    for (double& v : cube.Y.storage()) v = read_pod<double>(in);
    for (double& v : cube.mask.storage()) v = read_pod<std::uint8_t>(in) ? 1.0 : 0.0;
    std::ifstream side(path + ".json");
    if (side) {
        const auto doc = nlohmann::json::parse(side, nullptr, false);
        if (!doc.is_discarded() && doc.contains("stations")) cube.station_codes = doc["stations"].get<std::vector<std::string>>();
    }
    return cube;
}

} // namespace rstgcn::ingest
