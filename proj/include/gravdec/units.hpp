// units.hpp — natural-unit system (hbar = c = 1) with SI conversion helpers

#pragma once

namespace gravdec {

// All internal computation runs with hbar = c = 1.  A Scales object fixes the
// SI value of one internal unit of length; the time and mass units follow from
// c and hbar.  Conversions are plain multiplications and round-trip exactly
// to floating-point precision.
struct Scales {
    double hbar = 1.0; // internal action unit (always 1)
    double c = 1.0;    // internal speed unit (always 1)

    // SI value of one internal unit
    double length_si = 1.0; // metres
    double time_si = 1.0;   // seconds
    double mass_si = 1.0;   // kilograms

    static constexpr double kHbarSI = 1.054571817e-34; // J s
    static constexpr double kSpeedSI = 299792458.0;    // m / s

    static Scales natural() { return Scales{}; }

    // Natural units anchored so that one internal length equals l0 metres.
    static Scales si(double l0_m = 1.0) {
        Scales s;
        s.length_si = l0_m;
        s.time_si = l0_m / kSpeedSI;
        s.mass_si = kHbarSI / (kSpeedSI * kSpeedSI * s.time_si);
        return s;
    }

    double to_si_length(double x) const { return x * length_si; }
    double from_si_length(double x) const { return x / length_si; }
    double to_si_time(double t) const { return t * time_si; }
    double from_si_time(double t) const { return t / time_si; }
    double to_si_mass(double m) const { return m * mass_si; }
    double from_si_mass(double m) const { return m / mass_si; }
    double to_si_energy(double e) const { return e * kHbarSI / time_si; }
    double from_si_energy(double e) const { return e * time_si / kHbarSI; }
};

} // namespace gravdec
