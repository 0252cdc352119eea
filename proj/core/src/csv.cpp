#include "mcair/csv.hpp"

#include <cmath>
#include <cstdio>

namespace mcair {

namespace {

// NaN marks "not applicable" (the second parameter of an independent
// source); it renders as an empty CSV field.
std::string field(double value) {
    return std::isnan(value) ? std::string() : format_g9(value);
}

std::string history_bits(uint32_t word, int memory) {
    std::string s;
    for (int k = 0; k + 1 < memory; ++k) s.push_back(char('0' + ((word >> k) & 1u)));
    return s;  // oldest symbol first
}

}  // namespace

std::string format_g9(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void write_sweep_csv(std::ostream& os, const std::string& scenario,
                     const std::vector<SweepPoint>& points) {
    os << "t_sym,scenario,M,capacity_bits_per_s,mi_bits_per_use,tau,param1,param2\n";
    for (const SweepPoint& pt : points) {
        if (pt.skipped) continue;
        const CapacityResult& r = pt.result;
        os << format_g9(pt.t_sym) << ',' << scenario << ',' << r.memory << ','
           << format_g9(r.air) << ',' << format_g9(r.mi) << ',' << format_g9(r.tau) << ','
           << format_g9(r.param1) << ',' << field(r.param2) << '\n';
    }
}

void write_surface_csv(std::ostream& os, const Surface& surface) {
    os << "param1,param2,tau,air\n";
    for (const SurfacePoint& pt : surface.points)
        os << format_g9(pt.param1) << ',' << field(pt.param2) << ',' << format_g9(pt.tau)
           << ',' << format_g9(pt.air) << '\n';
}

void write_transitions_csv(std::ostream& os, const TransitionTable& table) {
    os << "history,s,p_hat0,p_hat1\n";
    for (uint32_t w = 0; w < table.histories(); ++w)
        for (int s = 0; s <= 1; ++s) {
            const double p1 = table.entry(w, s, 1);
            os << history_bits(w, table.memory) << ',' << s << ',' << format_g9(1.0 - p1)
               << ',' << format_g9(p1) << '\n';
        }
}

void write_transitions_csv(std::ostream& os, const EmpiricalTransitions& table) {
    os << "history,s,p_hat0,p_hat1\n";
    const size_t n_hist = table.n_cell.size() / 2;
    for (size_t w = 0; w < n_hist; ++w)
        for (int s = 0; s <= 1; ++s) {
            const double p1 = table.p1_hat(w * 2 + size_t(s));
            os << history_bits(uint32_t(w), table.memory) << ',' << s << ','
               << format_g9(1.0 - p1) << ',' << format_g9(p1) << '\n';
        }
}

}  // namespace mcair
