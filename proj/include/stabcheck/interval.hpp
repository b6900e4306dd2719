#ifndef STABCHECK_INTERVAL_HPP
#define STABCHECK_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace stabcheck {

/// Closed interval [lo, hi] with conservative (slack-inflated) arithmetic.
/// Every operation widens its result by a relative factor of 1e-12 plus a
/// tiny absolute term, so true ranges are always enclosed.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double v) : lo(v), hi(v) {}
    Interval(double a, double b) : lo(a), hi(b) {
        if (lo > hi) std::swap(lo, hi);
    }

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    double rad() const { return 0.5 * (hi - lo); }
    double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
    // Smallest absolute value attained on the interval.
    double mig() const {
        if (lo <= 0.0 && 0.0 <= hi) return 0.0;
        return std::min(std::abs(lo), std::abs(hi));
    }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains_zero() const { return contains(0.0); }
    bool subset_of(const Interval& o) const { return o.lo <= lo && hi <= o.hi; }
    bool strictly_inside(const Interval& o) const { return o.lo < lo && hi < o.hi; }
    bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

namespace detail {
constexpr double kSlackRel = 1e-12;
constexpr double kSlackAbs = 1e-300;

inline Interval inflate(Interval r) {
    const double d = r.mag() * kSlackRel + kSlackAbs;
    r.lo -= d;
    r.hi += d;
    return r;
}
} // namespace detail

inline Interval operator+(const Interval& a, const Interval& b) {
    return detail::inflate({a.lo + b.lo, a.hi + b.hi});
}
inline Interval operator-(const Interval& a, const Interval& b) {
    return detail::inflate({a.lo - b.hi, a.hi - b.lo});
}
inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator*(const Interval& a, const Interval& b) {
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return detail::inflate({std::min(std::min(p1, p2), std::min(p3, p4)),
                            std::max(std::max(p1, p2), std::max(p3, p4))});
}

/// Division; caller must ensure 0 is not in b (checked by evaluators).
inline Interval operator/(const Interval& a, const Interval& b) {
    const Interval inv{1.0 / b.hi, 1.0 / b.lo};
    return a * inv;
}

inline Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

inline Interval intersect(const Interval& a, const Interval& b) {
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

inline Interval ipow(const Interval& a, long n) {
    if (n == 0) return {1.0, 1.0};
    if (n < 0) {
        // caller must exclude 0 before calling with a negative exponent
        Interval p = ipow(a, -n);
        return Interval{1.0, 1.0} / p;
    }
    if (n % 2 == 0) {
        const double m = a.mag(), s = a.mig();
        return detail::inflate({std::pow(s, double(n)), std::pow(m, double(n))});
    }
    return detail::inflate({std::pow(a.lo, double(n)), std::pow(a.hi, double(n))});
}

inline Interval isqrt(const Interval& a) {
    // precondition a.lo >= 0
    return detail::inflate({std::sqrt(std::max(0.0, a.lo)), std::sqrt(std::max(0.0, a.hi))});
}

inline Interval iabs(const Interval& a) {
    return {a.mig(), a.mag()};
}

namespace detail {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;

inline bool has_multiple_of(double period, double offset, double a, double b) {
    // is there an integer k with offset + k*period in [a, b]?
    const double ka = std::ceil((a - offset) / period);
    const double kb = std::floor((b - offset) / period);
    return ka <= kb;
}
} // namespace detail

inline Interval icos(const Interval& a) {
    if (a.width() >= detail::kTwoPi) return {-1.0, 1.0};
    double lo = std::min(std::cos(a.lo), std::cos(a.hi));
    double hi = std::max(std::cos(a.lo), std::cos(a.hi));
    if (detail::has_multiple_of(detail::kTwoPi, 0.0, a.lo, a.hi)) hi = 1.0;
    if (detail::has_multiple_of(detail::kTwoPi, detail::kPi, a.lo, a.hi)) lo = -1.0;
    Interval r = detail::inflate({lo - 1e-15, hi + 1e-15});
    return intersect(r, {-1.0, 1.0});
}

inline Interval isin(const Interval& a) {
    return icos(Interval{a.lo - detail::kPi / 2.0, a.hi - detail::kPi / 2.0});
}

/// Axis-aligned box: one closed finite interval per dimension.
struct IntervalBox {
    std::vector<Interval> dims;

    IntervalBox() = default;
    explicit IntervalBox(std::vector<Interval> d) : dims(std::move(d)) {
        for (const auto& iv : dims)
            if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
                throw std::invalid_argument("IntervalBox: intervals must be finite with lo <= hi");
    }
    static IntervalBox cube(std::size_t n, double lo, double hi) {
        return IntervalBox(std::vector<Interval>(n, Interval{lo, hi}));
    }

    std::size_t size() const { return dims.size(); }
    const Interval& operator[](std::size_t i) const { return dims[i]; }
    Interval& operator[](std::size_t i) { return dims[i]; }

    std::size_t widest_dim() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < dims.size(); ++i)
            if (dims[i].width() > dims[best].width()) best = i;
        return best;
    }
    double max_width() const {
        double w = 0.0;
        for (const auto& d : dims) w = std::max(w, d.width());
        return w;
    }
    // Euclidean diameter of the box.
    double diameter() const {
        double s = 0.0;
        for (const auto& d : dims) s += d.width() * d.width();
        return std::sqrt(s);
    }
    std::vector<double> midpoint() const {
        std::vector<double> m(dims.size());
        for (std::size_t i = 0; i < dims.size(); ++i) m[i] = dims[i].mid();
        return m;
    }
    bool contains(const std::vector<double>& p) const {
        if (p.size() != dims.size()) return false;
        for (std::size_t i = 0; i < dims.size(); ++i)
            if (!dims[i].contains(p[i])) return false;
        return true;
    }
    std::pair<IntervalBox, IntervalBox> split(std::size_t dim) const {
        IntervalBox a = *this, b = *this;
        const double m = dims[dim].mid();
        a.dims[dim].hi = m;
        b.dims[dim].lo = m;
        return {a, b};
    }
};

} // namespace stabcheck

#endif
