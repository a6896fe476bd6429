#pragma once

#include <stdexcept>
#include <string>

namespace sfwm {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Vacuum wavelength. I/O is in nanometers, computation in SI meters;
/// the conversion happens here and nowhere else.
class Wavelength {
public:
    static Wavelength from_nm(double value_nm) { return Wavelength(value_nm * 1e-9); }
    static Wavelength from_um(double value_um) { return Wavelength(value_um * 1e-6); }
    static Wavelength from_m(double value_m) { return Wavelength(value_m); }

    double nm() const { return m_ * 1e9; }
    double um() const { return m_ * 1e6; }
    double m() const { return m_; }

    friend bool operator==(Wavelength a, Wavelength b) { return a.m_ == b.m_; }
    friend bool operator<(Wavelength a, Wavelength b) { return a.m_ < b.m_; }

private:
    explicit Wavelength(double meters) : m_(meters) {
        if (!(m_ > 0.0))
            throw std::invalid_argument("wavelength must be strictly positive, got " +
                                        std::to_string(m_) + " m");
    }
    double m_;
};

}  // namespace sfwm
