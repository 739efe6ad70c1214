#pragma once

#include <array>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "hitchin/curve.hpp"

namespace hitchin {

// A rational point of the extended phase space for n = 2g marked points:
// pole positions a_s, section values b_s, eigenvalues kappa_s, the rank-1
// residue data alpha_{rs}, beta_{rs} (rows r = 1,2), and the curve
// coefficients p_1..p_{2g+1}.
//
// The last two points carry the gauge: alpha_{2g-1} = (1,0), alpha_{2g} =
// (0,1), and the matching beta components beta_{1,2g-1}, beta_{2,2g} vanish.
struct PhasePoint {
    int genus = 2;
    std::vector<Rational> a, b, kappa;
    std::array<std::vector<Rational>, 2> alpha, beta; // [row-1][point-1]
    std::vector<Rational> p;

    int points() const { return 2 * genus; }
    int gauge_point(int which) const { return 2 * genus - 1 + which; } // which = 0, 1

    const Rational& at(VarId v) const { return const_cast<PhasePoint*>(this)->at(v); }
    Rational& at(VarId v) {
        const auto s = static_cast<std::size_t>(v.idx);
        switch (v.kind) {
            case VarKind::A: return a.at(s - 1);
            case VarKind::B: return b.at(s - 1);
            case VarKind::Kappa: return kappa.at(s - 1);
            case VarKind::Alpha: return alpha.at(static_cast<std::size_t>(v.row - 1)).at(s - 1);
            case VarKind::Beta: return beta.at(static_cast<std::size_t>(v.row - 1)).at(s - 1);
            case VarKind::P: return p.at(s - 1);
        }
        throw BadInput("unknown variable kind");
    }

    // Extends alpha/beta arrays that omit the two gauge points: the alpha
    // frame is the identity, the added beta components default to zero.
    void fill_gauge() {
        const auto n = static_cast<std::size_t>(points());
        const auto g1 = static_cast<std::size_t>(gauge_point(0)) - 1, g2 = static_cast<std::size_t>(gauge_point(1)) - 1;
        const auto extend = [n](std::array<std::vector<Rational>, 2>& rows) {
            bool did = false;
            for (auto& row : rows)
                if (row.size() + 2 == n) {
                    row.resize(n, Rational(0));
                    did = true;
                }
            return did;
        };
        if (extend(alpha) && alpha[0].size() == n && alpha[1].size() == n) {
            alpha[0][g1] = 1;
            alpha[1][g1] = 0;
            alpha[0][g2] = 0;
            alpha[1][g2] = 1;
        }
        extend(beta); // zero-filled components already satisfy orthogonality
    }

    void validate() const {
        if (genus < 1) throw BadInput("genus must be at least 1");
        const auto n = static_cast<std::size_t>(points());
        if (a.size() != n || b.size() != n || kappa.size() != n) throw BadInput("a, b, kappa must each have 2*genus entries");
        for (const auto& row : alpha)
            if (row.size() != n) throw BadInput("alpha rows must have 2*genus entries");
        for (const auto& row : beta)
            if (row.size() != n) throw BadInput("beta rows must have 2*genus entries");
        if (p.size() != static_cast<std::size_t>(2 * genus + 1)) throw BadInput("p must have 2*genus+1 entries");
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = s + 1; t < n; ++t)
                if (a[s] == a[t]) throw DuplicateNodes("pole positions a_" + std::to_string(s + 1) + " and a_" + std::to_string(t + 1) + " coincide");
        const auto g1 = static_cast<std::size_t>(gauge_point(0)) - 1, g2 = static_cast<std::size_t>(gauge_point(1)) - 1;
        if (alpha[0][g1] != 1 || alpha[1][g1] != 0 || alpha[0][g2] != 0 || alpha[1][g2] != 1)
            throw BadInput("gauge points must carry the unit alpha frame");
        if (beta[0][g1] != 0 || beta[1][g2] != 0) throw BadInput("gauge-orthogonal beta components must vanish");
    }

    CurveSpec curve(bool seed = true) const {
        std::vector<Scalar> ps;
        for (int m = 1; m <= 2 * genus + 1; ++m) {
            const Rational& v = p[static_cast<std::size_t>(m - 1)];
            ps.push_back(seed ? Scalar::seeded(v, var_p(m)) : Scalar(v));
        }
        return make_curve(genus, std::move(ps));
    }
};

inline nlohmann::ordered_json to_json(const PhasePoint& pt) {
    const auto list = [](const std::vector<Rational>& v) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& q : v) arr.push_back(rat_str(q));
        return arr;
    };
    const auto pairs = [&](const std::array<std::vector<Rational>, 2>& rows) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (std::size_t s = 0; s < rows[0].size(); ++s)
            arr.push_back(nlohmann::ordered_json::array({rat_str(rows[0][s]), rat_str(rows[1][s])}));
        return arr;
    };
    nlohmann::ordered_json j;
    j["curve"] = {{"genus", pt.genus}, {"p", list(pt.p)}};
    j["a"] = list(pt.a);
    j["b"] = list(pt.b);
    j["alpha"] = pairs(pt.alpha);
    j["beta"] = pairs(pt.beta);
    j["kappa"] = list(pt.kappa);
    return j;
}

inline PhasePoint point_from_json(const nlohmann::json& j) {
    const auto list = [](const nlohmann::json& arr) {
        if (!arr.is_array()) throw BadInput("expected an array of rational strings");
        std::vector<Rational> v;
        v.reserve(arr.size());
        for (const auto& e : arr) v.push_back(rat_parse(e.get<std::string>()));
        return v;
    };
    const auto pairs = [&](const nlohmann::json& arr) {
        if (!arr.is_array()) throw BadInput("expected an array of component pairs");
        std::array<std::vector<Rational>, 2> rows;
        for (const auto& e : arr) {
            const std::vector<Rational> pair = list(e);
            if (pair.size() != 2) throw BadInput("each point entry must have exactly two components");
            rows[0].push_back(pair[0]);
            rows[1].push_back(pair[1]);
        }
        return rows;
    };
    PhasePoint pt;
    try {
        pt.genus = j.at("curve").at("genus").get<int>();
        pt.p = list(j.at("curve").at("p"));
        pt.a = list(j.at("a"));
        pt.b = list(j.at("b"));
        pt.alpha = pairs(j.at("alpha"));
        pt.beta = pairs(j.at("beta"));
        pt.kappa = list(j.at("kappa"));
    } catch (const nlohmann::json::exception& e) {
        throw BadInput(std::string("malformed phase point: ") + e.what());
    }
    pt.fill_gauge(); // gauge entries may be omitted
    pt.validate();
    return pt;
}

// Nonzero rational with numerator in ±[1, bound] and denominator in [1, 10].
inline Rational sample_rational(std::mt19937_64& rng, long bound) {
    if (bound < 1) throw BadInput("sampling bound must be positive");
    const long num = 1 + static_cast<long>(rng() % static_cast<unsigned long>(bound));
    const long den = 1 + static_cast<long>(rng() % 10);
    const bool neg = (rng() & 1) != 0;
    return rat(neg ? -num : num, den);
}

// Deterministic sample of a generic gauge-fixed phase point: pairwise
// distinct pole positions, everything else unconstrained nonzero rationals.
// The leading curve coefficients p_1..p_{2g-3} default to zero (overridable);
// the rest are random.
inline PhasePoint sample_point(int genus, std::mt19937_64& rng, long bound = 100,
                               const std::map<int, Rational>* p_override = nullptr) {
    if (genus < 1) throw BadInput("genus must be at least 1");
    PhasePoint pt;
    pt.genus = genus;
    const int n = pt.points();
    for (int s = 0; s < n; ++s) {
        for (;;) {
            const Rational cand = sample_rational(rng, bound);
            bool fresh = true;
            for (const auto& prev : pt.a)
                if (prev == cand) fresh = false;
            if (fresh) {
                pt.a.push_back(cand);
                break;
            }
        }
    }
    for (int s = 0; s < n; ++s) pt.b.push_back(sample_rational(rng, bound));
    for (int s = 0; s < n; ++s) pt.kappa.push_back(sample_rational(rng, bound));
    for (auto* rows : {&pt.alpha, &pt.beta})
        for (auto& row : *rows)
            for (int s = 0; s < n; ++s) row.push_back(sample_rational(rng, bound));
    const auto g1 = static_cast<std::size_t>(pt.gauge_point(0)) - 1, g2 = static_cast<std::size_t>(pt.gauge_point(1)) - 1;
    pt.alpha[0][g1] = 1;
    pt.alpha[1][g1] = 0;
    pt.alpha[0][g2] = 0;
    pt.alpha[1][g2] = 1;
    pt.beta[0][g1] = 0;
    pt.beta[1][g2] = 0;
    for (int m = 1; m <= 2 * genus + 1; ++m) {
        Rational val = m <= 2 * genus - 3 ? Rational(0) : sample_rational(rng, bound);
        if (p_override) {
            if (const auto it = p_override->find(m); it != p_override->end()) val = it->second;
        }
        pt.p.push_back(val);
    }
    return pt;
}

// The evaluation context: every variable of interest mapped to an exact
// expansion (a constant, a seeded coordinate, or a limit substitution).
struct SymbolicPoint {
    int genus = 2;
    std::map<VarId, Scalar> vals;

    const Scalar& at(VarId v) const {
        const auto it = vals.find(v);
        if (it == vals.end()) throw BadInput("no value bound for " + var_name(v));
        return it->second;
    }
    bool has(VarId v) const { return vals.find(v) != vals.end(); }
    void set(VarId v, Scalar s) { vals[v] = std::move(s); }

    CurveSpec curve() const {
        std::vector<Scalar> ps;
        for (int m = 1; m <= 2 * genus + 1; ++m) ps.push_back(at(var_p(m)));
        return make_curve(genus, std::move(ps));
    }
};

// Binds every coordinate of `pt`, seeding each with its own derivative
// direction (except the gauge-fixed alpha frame, which stays numeric exactly
// as in a symbolic session with unit gauge vectors).  With seed = false
// everything is a plain constant.
inline SymbolicPoint bind_point(const PhasePoint& pt, bool seed = true) {
    pt.validate();
    SymbolicPoint sp;
    sp.genus = pt.genus;
    const int n = pt.points();
    const auto put = [&](VarId v, const Rational& q, bool s) { sp.set(v, s ? Scalar::seeded(q, v) : Scalar(q)); };
    for (int s = 1; s <= n; ++s) {
        const bool gauge = s == pt.gauge_point(0) || s == pt.gauge_point(1);
        put(var_a(s), pt.a[static_cast<std::size_t>(s - 1)], seed);
        put(var_b(s), pt.b[static_cast<std::size_t>(s - 1)], seed);
        put(var_kappa(s), pt.kappa[static_cast<std::size_t>(s - 1)], seed);
        for (int r = 1; r <= 2; ++r) {
            put(var_alpha(r, s), pt.alpha[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(s - 1)], seed && !gauge);
            put(var_beta(r, s), pt.beta[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(s - 1)], seed);
        }
    }
    for (int m = 1; m <= 2 * pt.genus + 1; ++m) put(var_p(m), pt.p[static_cast<std::size_t>(m - 1)], seed);
    return sp;
}

} // namespace hitchin
