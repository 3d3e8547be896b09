#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace rcnlin {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) {
    double s = 0.0;
    for (double v : a)
        s += v * v;
    return std::sqrt(s);
}

inline double norm1(std::span<const double> a) {
    double s = 0.0;
    for (double v : a)
        s += std::fabs(v);
    return s;
}

inline double norm_inf(std::span<const double> a) {
    double s = 0.0;
    for (double v : a)
        s = std::fmax(s, std::fabs(v));
    return s;
}

inline Vector scaled(std::span<const double> a, double c) {
    Vector out(a.begin(), a.end());
    for (double& v : out)
        v *= c;
    return out;
}

/// Angle in [0, pi] between a and b, computed as atan2(|a_perp|, a.b) so it
/// stays accurate for nearly parallel vectors. Both must be nonzero.
inline double angle_between(std::span<const double> a, std::span<const double> b) {
    const double nb = norm2(b);
    double along = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        along += a[i] * b[i] / nb;
    double perp2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = a[i] - along * b[i] / nb;
        perp2 += r * r;
    }
    return std::atan2(std::sqrt(perp2), along);
}

} // namespace rcnlin
