#pragma once

#include <algorithm>
#include <climits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hitchin/jet.hpp"

namespace hitchin {

// Budget for coefficients kept when inverting an exact multi-term expansion
// (the only operation whose exact result is an infinite series).  Thread-local
// so independent trials can tune it; the retry wrapper doubles it on demand.
inline int& eps_budget() {
    thread_local int budget = 4;
    return budget;
}

struct EpsBudgetGuard {
    explicit EpsBudgetGuard(int n) : saved(eps_budget()) { eps_budget() = n; }
    ~EpsBudgetGuard() { eps_budget() = saved; }
    int saved;
};

// Re-runs `fn` with a doubled coefficient budget whenever a truncated window
// turned out too small.  The limits taken here are first-order removable, so
// the default budget practically always suffices; this is cheap insurance.
template <class F>
auto with_eps_retry(F&& fn) {
    for (int budget = eps_budget();; budget *= 2) {
        try {
            EpsBudgetGuard guard(budget);
            return fn();
        } catch (const PrecisionExhausted&) {
            if (budget > 64) throw;
        }
    }
}

// Truncated Laurent expansion in the limit parameter eps with Jet
// coefficients: the value  sum_{k >= lo} c[k-lo] · eps^k  known for all
// exponents < unknown_from (kExact means exact, i.e. known everywhere).
//
// Canonical form: the leading stored coefficient is a nonzero jet; an exact
// zero stores no coefficients; a truncated expansion whose known window is
// entirely zero stores no coefficients and lo == unknown_from.
class Scalar {
  public:
    static constexpr int kExact = INT_MAX;

    Scalar() = default;
    explicit Scalar(Rational value) : Scalar(Jet(std::move(value))) {}
    explicit Scalar(const Jet& j) {
        if (!j.is_zero()) c_.push_back(j);
    }
    explicit Scalar(long value) : Scalar(Rational(value)) {}

    static Scalar zero() { return Scalar(); }
    static Scalar one() { return Scalar(Rational(1)); }
    // The coordinate function `var` at the value `value`.
    static Scalar seeded(Rational value, VarId var) { return Scalar(Jet::seeded(std::move(value), var)); }
    static Scalar eps(int k = 1) { return monomial(Jet(Rational(1)), k); }
    static Scalar monomial(Jet coeff, int exponent) {
        Scalar s;
        s.lo_ = exponent;
        if (!coeff.is_zero()) c_push(s, std::move(coeff));
        s.normalize();
        return s;
    }
    // Substitution used for a limit variable v: the value eps, carrying the
    // jet of v so partial derivatives in the v-direction survive the limit.
    static Scalar limit_seed(VarId var) {
        Scalar s;
        s.lo_ = 0;
        s.c_.push_back(Jet(Rational(0), Jet::Grad{{var, Rational(1)}}));
        s.c_.push_back(Jet(Rational(1)));
        return s;
    }

    bool is_exact() const { return unknown_ == kExact; }
    bool is_exact_zero() const { return c_.empty() && is_exact(); }
    int known_up_to() const { return unknown_; } // exclusive; kExact = everywhere

    // Coefficient of eps^e; requires e inside the known window.
    Jet coeff(int e) const {
        if (e >= unknown_) throw PrecisionExhausted("coefficient at eps^" + std::to_string(e) + " is outside the known window");
        if (c_.empty() || e < lo_ || e >= lo_ + static_cast<int>(c_.size())) return Jet();
        return c_[static_cast<std::size_t>(e - lo_)];
    }

    // Lowest exponent carrying a nonzero known coefficient, if any.
    std::optional<int> valuation() const {
        if (c_.empty()) return std::nullopt;
        return lo_;
    }

    // Lowest exponent whose coefficient has a nonzero value part (not just a
    // gradient); such a coefficient is invertible in the jet ring.
    std::optional<int> unit_order() const {
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (c_[i].has_value()) return lo_ + static_cast<int>(i);
        return std::nullopt;
    }

    // The eps -> 0 limit.  Every known negative-power coefficient must vanish
    // identically (value and gradient); a nonzero one is a genuine pole.
    Jet take_limit() const {
        if (!c_.empty() && lo_ < 0) throw LimitDoesNotExist("nonzero coefficient at eps^" + std::to_string(lo_));
        if (unknown_ <= 0) throw PrecisionExhausted("eps^0 coefficient is outside the known window");
        return coeff(0);
    }

    friend Scalar operator-(const Scalar& a) {
        Scalar r = a;
        for (auto& j : r.c_) j = -j;
        return r;
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) { return combined(a, b, false); }
    friend Scalar operator-(const Scalar& a, const Scalar& b) { return combined(a, b, true); }

    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        if (a.is_exact_zero() || b.is_exact_zero()) return Scalar();
        // The product is known below min over {a,b} of (window bound of one
        // factor + valuation of the other).
        const int unknown = sat_min(sat_add(a.unknown_, b.val_floor()), sat_add(b.unknown_, a.val_floor()));
        Scalar r;
        r.unknown_ = unknown;
        if (!a.c_.empty() && !b.c_.empty()) {
            r.lo_ = a.lo_ + b.lo_;
            const int hi = unknown == kExact ? a.hi_excl() + b.hi_excl() - 1 : unknown;
            if (hi > r.lo_) {
                r.c_.assign(static_cast<std::size_t>(hi - r.lo_), Jet());
                for (std::size_t i = 0; i < a.c_.size(); ++i) {
                    if (a.c_[i].is_zero()) continue;
                    for (std::size_t j = 0; j < b.c_.size(); ++j) {
                        const int e = a.lo_ + static_cast<int>(i) + b.lo_ + static_cast<int>(j);
                        if (e >= hi) break;
                        r.c_[static_cast<std::size_t>(e - r.lo_)] = r.c_[static_cast<std::size_t>(e - r.lo_)] + a.c_[i] * b.c_[j];
                    }
                }
            }
        } else {
            r.lo_ = unknown == kExact ? 0 : unknown;
        }
        r.normalize();
        return r;
    }

    friend Scalar operator*(const Scalar& a, const Rational& q) { return a * Scalar(q); }
    friend Scalar operator*(const Rational& q, const Scalar& a) { return a * Scalar(q); }

    // Exact reciprocal.  Coefficients below the unit order have zero value
    // part, so that nilpotent head N satisfies N^2 = 0 in the jet ring and
    //   (N + U)^{-1} = U^{-1} − U^{-1} N U^{-1}
    // exactly.  Only an exact multi-term U forces truncation (to the budget).
    Scalar inverse() const {
        if (is_exact_zero()) throw DivisionByZero("exact zero expansion");
        const std::optional<int> unit = unit_order();
        if (!unit) {
            if (is_exact()) throw NotInvertible("expansion has no value-bearing coefficient (nilpotent)");
            throw PrecisionExhausted("no value-bearing coefficient inside the known window");
        }
        const int k = *unit;
        // Relative coefficients of U = eps^k (u0 + u1 eps + ...).
        const std::size_t head = static_cast<std::size_t>(k - lo_);
        const std::size_t known = c_.size() - head;
        // Pure-gradient coefficients above the unit order square to zero, so
        // the inverse series terminates and remains exact.
        bool tail_nilpotent = true;
        for (std::size_t i = head + 1; i < c_.size(); ++i)
            if (c_[i].has_value()) tail_nilpotent = false;
        std::size_t terms;
        int inv_unknown;
        if (is_exact()) {
            if (tail_nilpotent) {
                terms = known;
                inv_unknown = kExact;
            } else {
                terms = static_cast<std::size_t>(std::max(eps_budget(), 1));
                inv_unknown = sat_add(-k, static_cast<int>(terms));
            }
        } else {
            terms = static_cast<std::size_t>(unknown_ - k);
            inv_unknown = unknown_ - 2 * k;
        }
        const Jet u0inv = c_[head].inverse();
        std::vector<Jet> s(terms);
        s[0] = u0inv;
        for (std::size_t m = 1; m < terms; ++m) {
            Jet acc;
            for (std::size_t i = 1; i <= m; ++i) {
                if (head + i >= c_.size()) break;
                acc = acc + c_[head + i] * s[m - i];
            }
            s[m] = -(u0inv * acc);
        }
        Scalar uinv;
        uinv.lo_ = -k;
        uinv.c_ = std::move(s);
        uinv.unknown_ = inv_unknown;
        uinv.normalize();
        if (head == 0) return uinv;
        Scalar nil;
        nil.lo_ = lo_;
        nil.c_.assign(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(head));
        nil.unknown_ = kExact;
        nil.normalize();
        return uinv - uinv * (nil * uinv);
    }

    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }

    Scalar pow(unsigned e) const {
        Scalar r = Scalar::one();
        for (unsigned i = 0; i < e; ++i) r = r * *this;
        return r;
    }

    // Identical known data (same window and coefficients).
    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.lo_ == b.lo_ && a.unknown_ == b.unknown_ && a.c_ == b.c_;
    }

  private:
    static void c_push(Scalar& s, Jet j) { s.c_.push_back(std::move(j)); }

    static int sat_add(int a, int b) {
        if (a == kExact || b == kExact) return kExact;
        const long long r = static_cast<long long>(a) + b;
        return r >= kExact ? kExact : static_cast<int>(r);
    }
    static int sat_min(int a, int b) { return a < b ? a : b; }

    int hi_excl() const { return lo_ + static_cast<int>(c_.size()); }

    // Lower bound on the true valuation: the first stored exponent, or the
    // window bound when every known coefficient vanishes.
    int val_floor() const {
        if (!c_.empty()) return lo_;
        return unknown_ == kExact ? 0 : unknown_; // exact zero: floor irrelevant, caller short-circuits
    }

    static Scalar combined(const Scalar& a, const Scalar& b, bool subtract) {
        Scalar r;
        r.unknown_ = sat_min(a.unknown_, b.unknown_);
        const bool ae = a.c_.empty(), be = b.c_.empty();
        if (ae && be) {
            r.lo_ = r.unknown_ == kExact ? 0 : r.unknown_;
            r.normalize();
            return r;
        }
        const int lo = ae ? b.lo_ : (be ? a.lo_ : std::min(a.lo_, b.lo_));
        int hi = std::max(ae ? lo : a.hi_excl(), be ? lo : b.hi_excl());
        if (r.unknown_ != kExact) hi = std::min(hi, r.unknown_);
        r.lo_ = lo;
        if (hi > lo) {
            r.c_.assign(static_cast<std::size_t>(hi - lo), Jet());
            for (int e = lo; e < hi; ++e) {
                const Jet x = (!ae && e >= a.lo_ && e < a.hi_excl()) ? a.c_[static_cast<std::size_t>(e - a.lo_)] : Jet();
                const Jet y = (!be && e >= b.lo_ && e < b.hi_excl()) ? b.c_[static_cast<std::size_t>(e - b.lo_)] : Jet();
                r.c_[static_cast<std::size_t>(e - lo)] = subtract ? x - y : x + y;
            }
        }
        r.normalize();
        return r;
    }

    void normalize() {
        // Clip to the known window.
        if (unknown_ != kExact && hi_excl() > unknown_) {
            const int keep = unknown_ - lo_;
            c_.resize(keep > 0 ? static_cast<std::size_t>(keep) : 0);
        }
        std::size_t lead = 0;
        while (lead < c_.size() && c_[lead].is_zero()) ++lead;
        if (lead > 0) {
            c_.erase(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(lead));
            lo_ += static_cast<int>(lead);
        }
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
        if (c_.empty()) lo_ = unknown_ == kExact ? 0 : unknown_;
    }

    int lo_ = 0;
    std::vector<Jet> c_;
    int unknown_ = kExact;
};

} // namespace hitchin
