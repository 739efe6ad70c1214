#pragma once

#include <complex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hitchin/phase.hpp"
#include "hitchin/report.hpp"
#include "hitchin/scalar.hpp"

namespace hitchin {

// The universal integrable system of interpolation data: n pairwise distinct
// nodes a_1..a_n carrying values kappa_1..kappa_n, the coefficients F_0 ..
// F_{n-1} of the unique interpolating polynomial viewed as functions on that
// 2n-dimensional space, and the multipliers M_k tying a-gradients to
// kappa-gradients.  Everything is templated over the coefficient field so the
// same formulas run exactly (Rational, Scalar) and numerically (complex).

inline bool node_gap_vanishes(const Rational& gap) { return gap == 0; }
inline bool node_gap_vanishes(const Scalar& gap) {
    return gap.is_exact_zero() || gap.coeff(0).value() == 0;
}
inline bool node_gap_vanishes(const std::complex<double>& gap) {
    return std::abs(gap) < 1e-9;
}

template <class K>
void guard_node_gap(const K& gap) {
    if (node_gap_vanishes(gap)) throw DuplicateNodes("interpolation nodes coincide");
}
inline void guard_node_gap(const std::complex<double>& gap) {
    if (node_gap_vanishes(gap)) throw SingularityApproached("interpolation nodes closer than 1e-9");
}

template <class K>
struct NodeData {
    std::vector<K> a;      // nodes
    std::vector<K> kappa;  // values at the nodes

    int n() const { return static_cast<int>(a.size()); }

    void validate() const {
        if (a.empty() || a.size() != kappa.size())
            throw BadInput("node data needs matching, non-empty node and value lists");
        for (std::size_t s = 0; s < a.size(); ++s)
            for (std::size_t t = s + 1; t < a.size(); ++t) guard_node_gap(K(a[s] - a[t]));
    }
};

template <class K>
struct LagrangeCoeffs {
    std::vector<K> F;  // F[i] multiplies x^i
};

// Coefficients of the basis polynomial f_s(x) = prod_{j != s} (x - a_j) /
// prod_{j != s} (a_s - a_j); s is 1-based.  Expanding the product (rather
// than solving a linear system) follows the structure used to prove the
// gradient identities, so the checks exercise the same algebraic path.
template <class K>
std::vector<K> lagrange_basis(const NodeData<K>& d, int s) {
    const int n = d.n();
    if (s < 1 || s > n) throw BadInput("basis index out of range");
    std::vector<K> poly{K(1)};
    K den = K(1);
    for (int j = 1; j <= n; ++j) {
        if (j == s) continue;
        const K& aj = d.a[j - 1];
        std::vector<K> next(poly.size() + 1, K(0));
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i + 1] = next[i + 1] + poly[i];
            next[i] = next[i] - aj * poly[i];
        }
        poly = std::move(next);
        const K gap = K(d.a[s - 1] - aj);
        guard_node_gap(gap);
        den = den * gap;
    }
    const K scale = K(1) / den;
    for (auto& c : poly) c = c * scale;
    return poly;
}

template <class K>
LagrangeCoeffs<K> lagrange_coeffs(const NodeData<K>& d) {
    d.validate();
    const int n = d.n();
    LagrangeCoeffs<K> out;
    out.F.assign(n, K(0));
    for (int s = 1; s <= n; ++s) {
        const std::vector<K> basis = lagrange_basis(d, s);
        for (int i = 0; i < n; ++i) out.F[i] = out.F[i] + d.kappa[s - 1] * basis[i];
    }
    return out;
}

template <class K>
K interpolant_eval(const LagrangeCoeffs<K>& c, const K& x) {
    K acc = K(0);
    for (auto it = c.F.rbegin(); it != c.F.rend(); ++it) acc = acc * x + *it;
    return acc;
}

// Independent oracle: solve the Vandermonde system V F = kappa directly.
template <class K>
LagrangeCoeffs<K> vandermonde_coeffs(const NodeData<K>& d) {
    d.validate();
    const int n = d.n();
    std::vector<std::vector<K>> m(n, std::vector<K>(n + 1, K(0)));
    for (int s = 0; s < n; ++s) {
        K pw = K(1);
        for (int i = 0; i < n; ++i) {
            m[s][i] = pw;
            pw = pw * d.a[s];
        }
        m[s][n] = d.kappa[s];
    }
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (!node_gap_vanishes(m[r][col])) { pivot = r; break; }
        if (pivot < 0) throw SingularSystem("Vandermonde system is singular");
        std::swap(m[col], m[pivot]);
        const K inv = K(1) / m[col][col];
        for (int c = col; c <= n; ++c) m[col][c] = m[col][c] * inv;
        for (int r = 0; r < n; ++r) {
            if (r == col || node_gap_vanishes(m[r][col])) continue;
            const K factor = m[r][col];
            for (int c = col; c <= n; ++c) m[r][c] = m[r][c] - factor * m[col][c];
        }
    }
    LagrangeCoeffs<K> out;
    out.F.reserve(n);
    for (int r = 0; r < n; ++r) out.F.push_back(m[r][n]);
    return out;
}

// Hyperelliptic curve through the sampled points: coefficients p_1..p_{2g+1}
// of  y^2 = x^{2g+1} + p_1 x^{2g} + ... + p_{2g+1}  with p_1 pinned to zero
// and the rest solved so (a_s, b_s) lies on the curve for every s.  The
// remainder  b^2 - a^{2g+1}  restricted to the 2g nodes has degree at most
// 2g - 1, so its interpolant's monomial coefficients are exactly the p's.
inline std::vector<Rational> curve_through(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    if (a.size() != b.size() || a.empty() || a.size() % 2 != 0)
        throw BadInput("curve_through needs matching lists of 2g points");
    const int genus = static_cast<int>(a.size()) / 2;
    NodeData<Rational> d;
    d.a = a;
    for (std::size_t s = 0; s < a.size(); ++s) {
        Rational pw(1);
        for (int k = 0; k < 2 * genus + 1; ++k) pw *= a[s];
        d.kappa.push_back(b[s] * b[s] - pw);
    }
    const LagrangeCoeffs<Rational> q = lagrange_coeffs(d);
    std::vector<Rational> p(static_cast<std::size_t>(2 * genus) + 1, Rational(0));
    for (int m = 2; m <= 2 * genus + 1; ++m) p[static_cast<std::size_t>(m - 1)] = q.F[static_cast<std::size_t>(2 * genus + 1 - m)];
    return p;
}

// Multiplier M_k with dF_i/da_k = M_k dF_i/dkappa_k for every i:
//   M_k = -kappa_k sum_{j!=k} 1/(a_k - a_j)
//         + sum_{s!=k} kappa_s prod_{j!=k}(a_k - a_j)
//                      / [ (a_s - a_k)^2 prod_{j!=s,k}(a_s - a_j) ].
template <class K>
K multiplier(const NodeData<K>& d, int k) {
    const int n = d.n();
    if (k < 1 || k > n) throw BadInput("multiplier index out of range");
    K gap_sum = K(0);
    K prod_k = K(1);
    for (int j = 1; j <= n; ++j) {
        if (j == k) continue;
        const K gap = K(d.a[k - 1] - d.a[j - 1]);
        guard_node_gap(gap);
        gap_sum = gap_sum + K(1) / gap;
        prod_k = prod_k * gap;
    }
    K m = K(0) - d.kappa[k - 1] * gap_sum;
    for (int s = 1; s <= n; ++s) {
        if (s == k) continue;
        const K lead = K(d.a[s - 1] - d.a[k - 1]);
        K den = lead * lead;
        for (int j = 1; j <= n; ++j) {
            if (j == s || j == k) continue;
            const K gap = K(d.a[s - 1] - d.a[j - 1]);
            guard_node_gap(gap);
            den = den * gap;
        }
        m = m + d.kappa[s - 1] * prod_k / den;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Exact verification passes over seeded node data.

// Poisson bracket over node space: {f, g} = sum_k (df/da_k dg/dkappa_k -
// df/dkappa_k dg/da_k), evaluated on first-derivative jets.
inline Rational nodes_poisson(const Jet& f, const Jet& g, int n) {
    Rational acc(0);
    for (int k = 1; k <= n; ++k)
        acc += f.partial(var_a(k)) * g.partial(var_kappa(k)) -
               f.partial(var_kappa(k)) * g.partial(var_a(k));
    return acc;
}

// Seeded NodeData with pairwise distinct rational nodes.
inline NodeData<Scalar> sample_nodes(int n, std::mt19937_64& rng, long bound = 50) {
    NodeData<Scalar> d;
    std::vector<Rational> raw;
    for (int k = 1; k <= n; ++k) {
        Rational cand = sample_rational(rng, bound);
        bool fresh = false;
        while (!fresh) {
            fresh = true;
            for (const Rational& prev : raw)
                if (prev == cand) { fresh = false; cand = sample_rational(rng, bound); break; }
        }
        raw.push_back(cand);
        d.a.push_back(Scalar::seeded(cand, var_a(k)));
    }
    for (int k = 1; k <= n; ++k) d.kappa.push_back(Scalar::seeded(sample_rational(rng, bound), var_kappa(k)));
    return d;
}

inline nlohmann::ordered_json nodes_json(const NodeData<Scalar>& d) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    nlohmann::ordered_json kappa = nlohmann::ordered_json::array();
    for (const Scalar& v : d.a) a.push_back(rat_str(v.coeff(0).value()));
    for (const Scalar& v : d.kappa) kappa.push_back(rat_str(v.coeff(0).value()));
    j["a"] = a;
    j["kappa"] = kappa;
    return j;
}

inline void require_node_count(int n) {
    if (n < 2 || n > 8) throw BadInput("node count must lie in 2..8");
}

// All pairwise brackets {F_i, F_j} vanish identically; verified exactly at
// seeded random points, with a deliberate sabotage control ({F_0, F_1 + a_1}
// must be nonzero) so a silently trivial bracket cannot pass.
inline CheckReport involution_check(int n, int trials, unsigned long seed, long bound = 50) {
    require_node_count(n);
    CheckReport rep;
    rep.check = "lagrange.involution";
    rep.n = n;
    rep.trials = trials;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    bool control_seen = false;
    for (int t = 0; t < trials && rep.pass; ++t) {
        const NodeData<Scalar> d = sample_nodes(n, rng, bound);
        const LagrangeCoeffs<Scalar> fc = lagrange_coeffs(d);
        std::vector<Jet> jets;
        jets.reserve(fc.F.size());
        for (const Scalar& f : fc.F) jets.push_back(f.take_limit());
        for (int i = 0; i < n && rep.pass; ++i)
            for (int j = i + 1; j < n; ++j) {
                const Rational br = nodes_poisson(jets[i], jets[j], n);
                if (br != 0) {
                    rep.fail("{F" + std::to_string(i) + ",F" + std::to_string(j) +
                             "} = " + rat_str(br) + " at trial " + std::to_string(t));
                    rep.counterexample = nodes_json(d);
                    break;
                }
            }
        if (rep.pass && !control_seen) {
            const Jet twisted = (fc.F[1] + d.a[0]).take_limit();
            if (nodes_poisson(jets[0], twisted, n) != 0) control_seen = true;
        }
    }
    if (rep.pass && !control_seen)
        rep.fail("sabotage control never produced a nonzero bracket; the bracket is degenerate");
    rep.recorded["sabotage_control"] = control_seen ? "nonzero" : "zero";
    return rep;
}

// dF_i/da_k = M_k dF_i/dkappa_k for every i and k; the same identity for
// arbitrary polynomials H(F_0..F_{n-1}); and the induced flow relation
// kappa_dot_k = -M_k a_dot_k under each such H.
inline CheckReport gradient_relation_check(int n, int trials, unsigned long seed, long bound = 50) {
    require_node_count(n);
    CheckReport rep;
    rep.check = "lagrange.gradient-relation";
    rep.n = n;
    rep.trials = trials;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials && rep.pass; ++t) {
        const NodeData<Scalar> d = sample_nodes(n, rng, bound);
        const LagrangeCoeffs<Scalar> fc = lagrange_coeffs(d);
        std::vector<Rational> mk;
        for (int k = 1; k <= n; ++k) mk.push_back(multiplier(d, k).take_limit().value());
        for (int i = 0; i < n && rep.pass; ++i) {
            const Jet fi = fc.F[i].take_limit();
            for (int k = 1; k <= n; ++k) {
                const Rational lhs = fi.partial(var_a(k));
                const Rational rhs = mk[k - 1] * fi.partial(var_kappa(k));
                if (lhs != rhs) {
                    rep.fail("dF" + std::to_string(i) + "/da" + std::to_string(k) + " = " +
                             rat_str(lhs) + " but M_k dF/dkappa = " + rat_str(rhs));
                    rep.counterexample = nodes_json(d);
                    break;
                }
            }
        }
        // Five random polynomials H(F_0..F_{n-1}) of total degree <= 3.
        for (int h = 0; h < 5 && rep.pass; ++h) {
            Scalar H = Scalar(sample_rational(rng, 9));
            const int terms = 1 + static_cast<int>(rng() % 4);
            for (int m = 0; m < terms; ++m) {
                Scalar mono = Scalar(sample_rational(rng, 9));
                const int degree = 1 + static_cast<int>(rng() % 3);
                for (int f = 0; f < degree; ++f) mono = mono * fc.F[rng() % n];
                H = H + mono;
            }
            const Jet hj = H.take_limit();
            for (int k = 1; k <= n; ++k) {
                const Rational da = hj.partial(var_kappa(k));       // a_dot_k
                const Rational dkappa = -hj.partial(var_a(k));      // kappa_dot_k
                if (hj.partial(var_a(k)) != mk[k - 1] * hj.partial(var_kappa(k))) {
                    rep.fail("polynomial H broke dH/da_k = M_k dH/dkappa_k at k=" + std::to_string(k));
                    rep.counterexample = nodes_json(d);
                    break;
                }
                if (dkappa != -(mk[k - 1] * da)) {
                    rep.fail("flow relation kappa_dot = -M_k a_dot failed at k=" + std::to_string(k));
                    rep.counterexample = nodes_json(d);
                    break;
                }
            }
        }
    }
    return rep;
}

} // namespace hitchin
