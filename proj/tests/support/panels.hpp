#pragma once

#include <sstream>
#include <string>

#include "cinglear/dataset.hpp"

namespace cinglear::oracle {

/// Small synthetic panel for fast pipeline tests.
inline SyntheticPanel small_panel(int n_days = 60, int hours = 4, int support = 3,
                                  std::uint64_t seed = 11, double noise = 0.5) {
    SyntheticSpec spec;
    spec.n_days = n_days;
    spec.hours_per_day = hours;
    spec.exogenous_names = {"load", "solar"};
    spec.support = support;
    spec.noise_sigma = noise;
    spec.coef_scale = 3.0;
    spec.seed = seed;
    return generate_synthetic(spec);
}

inline CsvSchema price_only_schema(int hours = 24) {
    CsvSchema schema;
    schema.exogenous.clear();
    schema.hours_per_day = hours;
    return schema;
}

/// `days` days of hourly rows `timestamp,lmp` where lmp = 100 d + h.
inline std::string hourly_csv(int days, int hours = 24, int skip_day = -1, int skip_hour = -1) {
    std::ostringstream out;
    out << "timestamp,lmp\n";
    for (int d = 0; d < days; ++d)
        for (int h = 0; h < hours; ++h) {
            if (d == skip_day && h == skip_hour) continue;
            out << "2024-03-" << (d + 1 < 10 ? "0" : "") << d + 1 << 'T' << (h < 10 ? "0" : "") << h
                << ":00:00," << 100 * d + h << '\n';
        }
    return out.str();
}

} // namespace cinglear::oracle
