#pragma once

#include <chrono>
#include <optional>
#include <string>

namespace rstgcn {

/// Minute-resolution absolute timestamp (UTC-naive; the data carries local railway time).
using Minutes = std::chrono::sys_time<std::chrono::minutes>;

/// One train-at-station observation, one row of a running-status table.
struct RunRecord {
    std::chrono::year_month_day date{};
    std::string train_no;
    std::string train_name;
    std::string station_code;
    std::string station_name;
    double distance_km = 0.0;
    std::optional<Minutes> sched_arr;
    std::optional<Minutes> act_arr;
    std::optional<Minutes> sched_dep;
    std::optional<Minutes> act_dep;
    std::optional<int> arr_delay_min;
    std::optional<int> dep_delay_min;
};

Minutes make_minutes(std::chrono::year_month_day date, int hour, int minute);
std::string format_timestamp(Minutes t);

} // namespace rstgcn
