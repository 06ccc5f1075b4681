#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "wfexact/series.hpp"

namespace wf {

// Shortest round-trip decimal form of a double (17 significant digits).
std::string format_double(double v);

// CSV with a header row `time,x1[,x2,...]`; provenance (tool version and the
// full configuration echo) rides in leading `#` comment lines.
void write_series_csv(const std::string& path, const ObservationSeries& series,
                      const std::map<std::string, std::string>& config_echo);

// Parses the CSV form above; `#` lines are ignored.  Errors carry row numbers.
ObservationSeries read_series_csv(const std::string& path);

// Result JSON: pretty-printed, keys sorted, with version and config echo.
void write_result_json(const std::string& path, nlohmann::json payload,
                       const std::map<std::string, std::string>& config_echo);

}  // namespace wf
