#pragma once

#include <span>
#include <vector>

#include "wfexact/errors.hpp"

namespace wf {

// Discrete observations of an L-locus path, including the time-0 state.
struct ObservationSeries {
    int loci = 1;
    std::vector<double> times;   // strictly increasing, times[0] == 0
    std::vector<double> values;  // (times.size() x loci), row-major, interior

    int increments() const { return static_cast<int>(times.size()) - 1; }
    std::span<const double> state(int i) const {
        return {values.data() + static_cast<std::size_t>(i) * loci,
                static_cast<std::size_t>(loci)};
    }
    void validate() const {
        if (loci < 1) throw DataError("series: loci must be >= 1");
        if (times.size() < 2) throw DataError("series: need at least one increment");
        if (times[0] != 0.0) throw DataError("series: first time must be 0");
        if (values.size() != times.size() * static_cast<std::size_t>(loci))
            throw DataError("series: value count does not match times x loci");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw DataError("series: times must be strictly increasing (row " +
                                std::to_string(i) + ")");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!(values[i] > 0.0 && values[i] < 1.0))
                throw DataError("series: observation at boundary or outside (0,1) (row " +
                                std::to_string(i / loci) + ")");
    }
};

}  // namespace wf
