#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdiqkd/sweep.hpp"

namespace mdiqkd {

/// One CSV row; column order is fixed.
struct CurveRecord {
    double distance_km = 0.0;
    double key_rate = 0.0;
    double alpha_star = 0.0;
    double delta_cap = 0.0;
    double delta_y_prime_bound = 0.0;
    double gain = 0.0;
    double qber = 0.0;

    bool operator==(const CurveRecord&) const = default;
};

inline constexpr const char* kCsvHeader =
    "distance_km,key_rate,alpha_star,delta_cap,delta_y_prime_bound,gain,qber";

inline CurveRecord to_record(const KeyRatePoint& p) {
    return {p.total_distance_km, p.key_rate,          p.alpha_star, p.delta_cap,
            p.delta_y_prime_bound, p.gain, p.qber};
}

namespace detail {

// 17 significant digits: enough for an exact double round trip.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_csv(std::ostream& out, std::span<const CurveRecord> records) {
    out << kCsvHeader << "\n";
    for (const CurveRecord& r : records) {
        out << detail::fmt17(r.distance_km) << ',' << detail::fmt17(r.key_rate) << ','
            << detail::fmt17(r.alpha_star) << ',' << detail::fmt17(r.delta_cap) << ','
            << detail::fmt17(r.delta_y_prime_bound) << ',' << detail::fmt17(r.gain) << ','
            << detail::fmt17(r.qber) << "\n";
    }
}

inline std::vector<CurveRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty input");
    if (line != kCsvHeader) throw std::runtime_error("read_csv: unexpected header: " + line);
    std::vector<CurveRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        double v[7];
        for (int i = 0; i < 7; ++i) {
            if (!std::getline(ss, field, ','))
                throw std::runtime_error("read_csv: short row: " + line);
            v[i] = std::stod(field);
        }
        records.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
    }
    return records;
}

struct RunSummary {
    bool any_positive = false;
    double cutoff_km = 0.0;    ///< largest grid distance with a positive rate
    double peak_rate = 0.0;
    double peak_rate_km = 0.0;
};

inline RunSummary summarize(std::span<const CurveRecord> records) {
    RunSummary s;
    for (const CurveRecord& r : records) {
        if (r.key_rate > 0.0) {
            s.any_positive = true;
            s.cutoff_km = r.distance_km;
            if (r.key_rate > s.peak_rate) {
                s.peak_rate = r.key_rate;
                s.peak_rate_km = r.distance_km;
            }
        }
    }
    return s;
}

}  // namespace mdiqkd
