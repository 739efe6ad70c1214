#pragma once

#include <climits>
#include <cstddef>
#include <string>
#include <vector>

#include "hitchin/scalar.hpp"

namespace hitchin {

inline bool ring_exact_zero(const Rational& q) { return q == 0; }
inline bool ring_exact_zero(const Scalar& s) { return s.is_exact_zero(); }
inline bool ring_exact_one(const Rational& q) { return q == 1; }
inline bool ring_exact_one(const Scalar& s) { return s == Scalar::one(); }
inline Rational ring_inverse(const Rational& q) { return rat_div(Rational(1), q); }
inline Scalar ring_inverse(const Scalar& s) { return s.inverse(); }

// Truncated Laurent series in the spectral coordinate z over a coefficient
// ring C:  sum_{e >= lo} c[e-lo] · z^e,  with every coefficient of exponent
// <= valid known (kExact = the series is an exact Laurent polynomial).
template <class C>
class Laurent {
  public:
    static constexpr int kExact = INT_MAX;

    Laurent() = default;
    explicit Laurent(C constant) : Laurent(std::move(constant), 0) {}
    Laurent(C coeff, int exponent) : lo_(exponent) {
        if (!ring_exact_zero(coeff)) c_.push_back(std::move(coeff));
        normalize();
    }
    Laurent(int lo, std::vector<C> coeffs, int valid = kExact) : lo_(lo), c_(std::move(coeffs)), valid_(valid) { normalize(); }

    static Laurent zero() { return Laurent(); }
    static Laurent one() { return Laurent(C(1)); }
    static Laurent z(int exponent = 1) { return Laurent(C(1), exponent); }

    bool is_exact() const { return valid_ == kExact; }
    bool is_exact_zero() const { return c_.empty() && is_exact(); }
    int valid_up_to() const { return valid_; } // inclusive
    int lowest() const { return lo_; }
    const std::vector<C>& coeffs() const { return c_; }

    C coeff(int e) const {
        if (e > valid_) throw PrecisionExhausted("z^" + std::to_string(e) + " coefficient is outside the known range");
        if (c_.empty() || e < lo_ || e >= hi_excl()) return C{};
        return c_[static_cast<std::size_t>(e - lo_)];
    }

    C residue() const { return coeff(-1); }

    Laurent shifted(int k) const {
        Laurent r = *this;
        r.lo_ += k;
        if (r.valid_ != kExact) r.valid_ += k;
        if (r.c_.empty()) r.lo_ = r.valid_ == kExact ? 0 : r.valid_ + 1;
        return r;
    }

    // Drop all information above exponent hi (marks it unknown).
    Laurent clipped(int hi) const {
        Laurent r = *this;
        r.valid_ = std::min(r.valid_, hi);
        r.normalize();
        return r;
    }

    friend Laurent operator-(const Laurent& a) {
        Laurent r = a;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend Laurent operator+(const Laurent& a, const Laurent& b) { return combined(a, b, false); }
    friend Laurent operator-(const Laurent& a, const Laurent& b) { return combined(a, b, true); }

    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        if (a.is_exact_zero() || b.is_exact_zero()) return Laurent();
        const int valid = sat_min(sat_add(a.valid_, b.val_floor()), sat_add(b.valid_, a.val_floor()));
        Laurent r;
        r.valid_ = valid;
        if (!a.c_.empty() && !b.c_.empty()) {
            r.lo_ = a.lo_ + b.lo_;
            const int hi = valid == kExact ? a.hi_excl() + b.hi_excl() - 1 : valid + 1;
            if (hi > r.lo_) {
                r.c_.assign(static_cast<std::size_t>(hi - r.lo_), C{});
                for (std::size_t i = 0; i < a.c_.size(); ++i) {
                    if (ring_exact_zero(a.c_[i])) continue;
                    for (std::size_t j = 0; j < b.c_.size(); ++j) {
                        const int e = a.lo_ + static_cast<int>(i) + b.lo_ + static_cast<int>(j);
                        if (e >= hi) break;
                        auto& slot = r.c_[static_cast<std::size_t>(e - r.lo_)];
                        slot = slot + a.c_[i] * b.c_[j];
                    }
                }
            }
        } else {
            r.lo_ = valid == kExact ? 0 : valid + 1;
        }
        r.normalize();
        return r;
    }

    friend Laurent operator*(const Laurent& a, const C& s) { return a * Laurent(s); }
    friend Laurent operator*(const C& s, const Laurent& a) { return a * Laurent(s); }

    // Reciprocal, computed through `terms` coefficients past the leading one.
    Laurent inverse(int terms) const {
        if (c_.empty()) {
            if (is_exact()) throw DivisionByZero("exact zero series");
            throw PrecisionExhausted("leading series coefficient is outside the known range");
        }
        const std::size_t rel_known = is_exact() ? c_.size() : static_cast<std::size_t>(valid_ - lo_ + 1);
        const C u0inv = ring_inverse(c_[0]);
        int out_valid;
        std::size_t out_terms;
        if (is_exact() && c_.size() == 1) {
            out_terms = 1;
            out_valid = kExact;
        } else {
            out_terms = std::max<std::size_t>(1, static_cast<std::size_t>(terms));
            if (!is_exact()) out_terms = std::min(out_terms, rel_known);
            out_valid = -lo_ + static_cast<int>(out_terms) - 1;
        }
        std::vector<C> s(out_terms);
        s[0] = u0inv;
        for (std::size_t m = 1; m < out_terms; ++m) {
            C acc{};
            for (std::size_t i = 1; i <= m && i < c_.size(); ++i) acc = acc + c_[i] * s[m - i];
            acc = acc * u0inv;
            s[m] = -acc;
        }
        return Laurent(-lo_, std::move(s), out_valid);
    }

    // Square root of a series with constant coefficient exactly 1, through
    // `terms` coefficients.
    Laurent sqrt_unit(int terms) const {
        if (c_.empty() || lo_ != 0 || !ring_exact_one(c_[0]))
            throw NotUnitConstant("square root requires a series with constant coefficient 1");
        const Rational half(1, 2);
        std::size_t out_terms = std::max<std::size_t>(1, static_cast<std::size_t>(terms));
        if (!is_exact()) out_terms = std::min(out_terms, static_cast<std::size_t>(valid_ + 1));
        std::vector<C> s(out_terms);
        s[0] = C(1);
        for (std::size_t m = 1; m < out_terms; ++m) {
            C acc = m < c_.size() ? c_[m] : C{};
            for (std::size_t j = 1; j < m; ++j) acc = acc - s[j] * s[m - j];
            s[m] = acc * half;
        }
        const int out_valid = static_cast<int>(out_terms) - 1;
        return Laurent(0, std::move(s), out_valid);
    }

    friend bool operator==(const Laurent& a, const Laurent& b) {
        return a.lo_ == b.lo_ && a.valid_ == b.valid_ && a.c_ == b.c_;
    }

  private:
    static int sat_add(int a, int b) {
        if (a == kExact || b == kExact) return kExact;
        const long long r = static_cast<long long>(a) + b;
        return r >= kExact ? kExact : static_cast<int>(r);
    }
    static int sat_min(int a, int b) { return a < b ? a : b; }

    int hi_excl() const { return lo_ + static_cast<int>(c_.size()); }

    int val_floor() const {
        if (!c_.empty()) return lo_;
        return valid_ == kExact ? 0 : valid_ + 1;
    }

    static Laurent combined(const Laurent& a, const Laurent& b, bool subtract) {
        Laurent r;
        r.valid_ = sat_min(a.valid_, b.valid_);
        const bool ae = a.c_.empty(), be = b.c_.empty();
        if (ae && be) {
            r.lo_ = r.valid_ == kExact ? 0 : r.valid_ + 1;
            r.normalize();
            return r;
        }
        const int lo = ae ? b.lo_ : (be ? a.lo_ : std::min(a.lo_, b.lo_));
        int hi = std::max(ae ? lo : a.hi_excl(), be ? lo : b.hi_excl());
        if (r.valid_ != kExact) hi = std::min(hi, r.valid_ + 1);
        r.lo_ = lo;
        if (hi > lo) {
            r.c_.assign(static_cast<std::size_t>(hi - lo), C{});
            for (int e = lo; e < hi; ++e) {
                const C x = (!ae && e >= a.lo_ && e < a.hi_excl()) ? a.c_[static_cast<std::size_t>(e - a.lo_)] : C{};
                const C y = (!be && e >= b.lo_ && e < b.hi_excl()) ? b.c_[static_cast<std::size_t>(e - b.lo_)] : C{};
                r.c_[static_cast<std::size_t>(e - lo)] = subtract ? C(x - y) : C(x + y);
            }
        }
        r.normalize();
        return r;
    }

    void normalize() {
        if (valid_ != kExact && hi_excl() > valid_ + 1) {
            const int keep = valid_ + 1 - lo_;
            c_.resize(keep > 0 ? static_cast<std::size_t>(keep) : 0);
        }
        std::size_t lead = 0;
        while (lead < c_.size() && ring_exact_zero(c_[lead])) ++lead;
        if (lead > 0) {
            c_.erase(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(lead));
            lo_ += static_cast<int>(lead);
        }
        while (!c_.empty() && ring_exact_zero(c_.back())) c_.pop_back();
        if (c_.empty()) lo_ = valid_ == kExact ? 0 : valid_ + 1;
    }

    int lo_ = 0;
    std::vector<C> c_;
    int valid_ = kExact;
};

} // namespace hitchin
