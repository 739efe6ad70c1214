#pragma once

#include <utility>
#include <vector>

#include "hitchin/rational.hpp"
#include "hitchin/varid.hpp"

namespace hitchin {

// First-order jet: an exact value together with its exact first partials.
// The gradient is a sparse map kept as a VarId-sorted vector without zero
// entries; an absent key is a zero partial.
class Jet {
  public:
    using Grad = std::vector<std::pair<VarId, Rational>>;

    Jet() = default;
    explicit Jet(Rational value) : v_(std::move(value)) {}
    Jet(Rational value, Grad grad) : v_(std::move(value)), g_(std::move(grad)) {}

    static Jet constant(Rational value) { return Jet(std::move(value)); }
    // The jet of the coordinate function `var` evaluated at `value`.
    static Jet seeded(Rational value, VarId var) { return Jet(std::move(value), Grad{{var, Rational(1)}}); }

    const Rational& value() const { return v_; }
    const Grad& grad() const { return g_; }

    bool is_zero() const { return v_ == 0 && g_.empty(); }
    bool has_value() const { return v_ != 0; }

    Rational partial(VarId var) const {
        for (const auto& [id, q] : g_)
            if (id == var) return q;
        return Rational(0);
    }

    friend bool operator==(const Jet& a, const Jet& b) { return a.v_ == b.v_ && a.g_ == b.g_; }

    friend Jet operator-(const Jet& a) {
        Grad g;
        g.reserve(a.g_.size());
        for (const auto& [id, q] : a.g_) g.emplace_back(id, -q);
        return Jet(-a.v_, std::move(g));
    }

    friend Jet operator+(const Jet& a, const Jet& b) { return merged(a, b, /*subtract=*/false); }
    friend Jet operator-(const Jet& a, const Jet& b) { return merged(a, b, /*subtract=*/true); }

    friend Jet operator*(const Jet& a, const Jet& b) {
        // Leibniz rule: d(ab) = a·db + b·da.
        Grad g;
        g.reserve(a.g_.size() + b.g_.size());
        auto ia = a.g_.begin(), ib = b.g_.begin();
        while (ia != a.g_.end() || ib != b.g_.end()) {
            if (ib == b.g_.end() || (ia != a.g_.end() && ia->first < ib->first)) {
                if (b.v_ != 0) g.emplace_back(ia->first, ia->second * b.v_);
                ++ia;
            } else if (ia == a.g_.end() || ib->first < ia->first) {
                if (a.v_ != 0) g.emplace_back(ib->first, ib->second * a.v_);
                ++ib;
            } else {
                Rational q = ia->second * b.v_ + ib->second * a.v_;
                if (q != 0) g.emplace_back(ia->first, std::move(q));
                ++ia, ++ib;
            }
        }
        return Jet(a.v_ * b.v_, std::move(g));
    }

    friend Jet operator*(const Jet& a, const Rational& c) {
        if (c == 0) return Jet();
        Grad g;
        g.reserve(a.g_.size());
        for (const auto& [id, q] : a.g_) g.emplace_back(id, q * c);
        return Jet(a.v_ * c, std::move(g));
    }
    friend Jet operator*(const Rational& c, const Jet& a) { return a * c; }

    // 1/(v + g) = 1/v − g/v²; needs a nonzero value part.
    Jet inverse() const {
        if (v_ == 0) throw DivisionByZero("jet with zero value part");
        const Rational inv = Rational(1) / v_;
        const Rational m = -inv * inv;
        Grad g;
        g.reserve(g_.size());
        for (const auto& [id, q] : g_) g.emplace_back(id, q * m);
        return Jet(inv, std::move(g));
    }

    friend Jet operator/(const Jet& a, const Jet& b) { return a * b.inverse(); }

  private:
    static Jet merged(const Jet& a, const Jet& b, bool subtract) {
        Grad g;
        g.reserve(a.g_.size() + b.g_.size());
        auto ia = a.g_.begin(), ib = b.g_.begin();
        while (ia != a.g_.end() || ib != b.g_.end()) {
            if (ib == b.g_.end() || (ia != a.g_.end() && ia->first < ib->first)) {
                g.emplace_back(*ia++);
            } else if (ia == a.g_.end() || ib->first < ia->first) {
                g.emplace_back(ib->first, subtract ? -ib->second : ib->second);
                ++ib;
            } else {
                Rational q = subtract ? Rational(ia->second - ib->second) : Rational(ia->second + ib->second);
                if (q != 0) g.emplace_back(ia->first, std::move(q));
                ++ia, ++ib;
            }
        }
        return Jet(subtract ? Rational(a.v_ - b.v_) : Rational(a.v_ + b.v_), std::move(g));
    }

    Rational v_{0};
    Grad g_;
};

} // namespace hitchin
