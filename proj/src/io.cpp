#include "wfexact/io.hpp"

#include "wfexact/version.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace wf {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_series_csv(const std::string& path, const ObservationSeries& series,
                      const std::map<std::string, std::string>& config_echo) {
    series.validate();
    std::ofstream out(path, std::ios::binary);  // '\n' newlines on every platform
    if (!out) throw DataError("csv: cannot open " + path + " for writing");
    out << "# wfexact " << WFEXACT_VERSION << "\n";
    for (const auto& [k, v] : config_echo) out << "# config " << k << " = " << v << "\n";
    out << "time";
    for (int k = 1; k <= series.loci; ++k) out << ",x" << k;
    out << "\n";
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        out << format_double(series.times[i]);
        for (int k = 0; k < series.loci; ++k)
            out << ',' << format_double(series.values[i * series.loci + k]);
        out << "\n";
    }
    if (!out) throw DataError("csv: write failed for " + path);
}

ObservationSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("csv: cannot open " + path);
    ObservationSeries series;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header_seen) {
            if (cells.empty() || cells[0] != "time")
                throw DataError("csv: " + path + ":" + std::to_string(lineno) +
                                ": expected header starting with 'time'");
            series.loci = static_cast<int>(cells.size()) - 1;
            if (series.loci < 1)
                throw DataError("csv: " + path + ": header needs at least one state column");
            header_seen = true;
            continue;
        }
        if (static_cast<int>(cells.size()) != series.loci + 1)
            throw DataError("csv: " + path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(series.loci + 1) + " columns");
        try {
            series.times.push_back(std::stod(cells[0]));
            for (int k = 1; k <= series.loci; ++k) series.values.push_back(std::stod(cells[k]));
        } catch (const std::exception&) {
            throw DataError("csv: " + path + ":" + std::to_string(lineno) +
                            ": non-numeric cell");
        }
        for (int k = 0; k < series.loci; ++k) {
            double v = series.values[series.values.size() - series.loci + k];
            if (!(v > 0.0 && v < 1.0))
                throw DataError("csv: " + path + ":" + std::to_string(lineno) +
                                ": observation at the boundary or outside (0,1)");
        }
    }
    if (!header_seen) throw DataError("csv: " + path + ": no header row");
    try {
        series.validate();
    } catch (const DataError& e) {
        throw DataError("csv: " + path + ": " + e.what());
    }
    return series;
}

void write_result_json(const std::string& path, nlohmann::json payload,
                       const std::map<std::string, std::string>& config_echo) {
    payload["version"] = WFEXACT_VERSION;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : config_echo) cfg[k] = v;
    payload["config"] = std::move(cfg);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("json: cannot open " + path + " for writing");
    out << payload.dump(2) << "\n";
    if (!out) throw DataError("json: write failed for " + path);
}

}  // namespace wf
