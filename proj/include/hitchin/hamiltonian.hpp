#pragma once

#include <functional>
#include <map>

#include "hitchin/lax.hpp"

namespace hitchin {

// H = overallSign · Residue_z[ z^w · tr(L(z)^k) · weight(z) ].  The defaults
// reproduce the rank-2 sessions for both supported genera: k = 2, w = -1,
// overall sign -1, and the plain -z^{-3}/y weight (dx_factor 1).
struct HamiltonianSpec {
    int k = 2;
    int w = -1;
    int overall_sign = -1;
    Rational dx_factor = Rational(1);

    void validate() const {
        if (k < 1) throw BadInput("the power k must be at least 1");
        if (overall_sign != 1 && overall_sign != -1) throw BadInput("overall sign must be +1 or -1");
    }
};

inline Laurent<Scalar> trace_power(const MatrixSeries& M, int k) {
    MatrixSeries P = M;
    for (int step = 1; step < k; ++step) {
        MatrixSeries next;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) next[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = P[static_cast<std::size_t>(i)][0] * M[0][static_cast<std::size_t>(j)] + P[static_cast<std::size_t>(i)][1] * M[1][static_cast<std::size_t>(j)];
        P = next;
    }
    return P[0][0] + P[1][1];
}

// The full Hamiltonian as an exact expansion (eps orders and jets ride along
// with whatever the evaluation context carries).
inline Scalar hamiltonian_scalar(const SymbolicPoint& sp, const HamiltonianSpec& spec = {}, SolveMode mode = SolveMode::Split) {
    spec.validate();
    const int g = sp.genus;
    const int lo_entry = 1 - 2 * g;                               // pole terms ~ y/x
    const int trace_top = -spec.w - 2 * g + 1;                    // highest trace exponent the residue reads
    const int entry_window = trace_top - (spec.k - 1) * lo_entry; // per-entry window that guarantees it
    const int weight_top = -1 - spec.w + spec.k * (2 * g - 1);

    const LaxCoeffs lc = solve_lax_coeffs(sp, mode);
    const MatrixSeries M = lax_series(sp, lc, entry_window);
    const Laurent<Scalar> T = trace_power(M, spec.k);
    if (T.valid_up_to() < trace_top)
        throw PrecisionExhausted("trace window is narrower than the residue needs");
    const Laurent<Scalar> wgt = weight_series(sp.curve(), weight_top, spec.dx_factor);
    const Scalar res = (T * wgt).coeff(-1 - spec.w);
    return spec.overall_sign < 0 ? -res : res;
}

// The eps-limit of the Hamiltonian: exact value plus the full gradient in
// every seeded direction.
inline Jet hamiltonian_jet(const SymbolicPoint& sp, const HamiltonianSpec& spec = {}, SolveMode mode = SolveMode::Split) {
    return hamiltonian_scalar(sp, spec, mode).take_limit();
}

// Flow components of the canonical structure  omega = sum da ^ dkappa +
// sum dalpha ^ dbeta:
//   da_s/dt     = +dH/dkappa_s      dkappa_s/dt = -dH/da_s
//   dalpha/dt   = +dH/dbeta         dbeta/dt    = -dH/dalpha
struct VectorField {
    Jet H;
    std::map<VarId, Rational> comp;

    const Rational& at(VarId v) const {
        const auto it = comp.find(v);
        if (it == comp.end()) throw BadInput("no flow component for " + var_name(v));
        return it->second;
    }
};

inline VectorField vector_field_from_jet(Jet H, int genus) {
    VectorField vf;
    for (int s = 1; s <= 2 * genus; ++s) {
        vf.comp[var_a(s)] = H.partial(var_kappa(s));
        vf.comp[var_kappa(s)] = -H.partial(var_a(s));
        for (int r = 1; r <= 2; ++r) {
            vf.comp[var_alpha(r, s)] = H.partial(var_beta(r, s));
            vf.comp[var_beta(r, s)] = -H.partial(var_alpha(r, s));
        }
    }
    vf.H = std::move(H);
    return vf;
}

inline VectorField hamiltonian_vector_field(const SymbolicPoint& sp, const HamiltonianSpec& spec = {}, SolveMode mode = SolveMode::Split) {
    return vector_field_from_jet(hamiltonian_jet(sp, spec, mode), sp.genus);
}

// Canonical Poisson bracket of two jet-evaluable observables at a point:
// {f, g} = sum_s (df/da_s dg/dkappa_s - df/dkappa_s dg/da_s)
//        + sum_{r,s} (df/dalpha_{rs} dg/dbeta_{rs} - df/dbeta_{rs} dg/dalpha_{rs}).
using Observable = std::function<Scalar(const SymbolicPoint&)>;

inline Rational poisson_bracket_jets(const Jet& f, const Jet& g, int genus) {
    Rational acc(0);
    for (int s = 1; s <= 2 * genus; ++s) {
        acc += f.partial(var_a(s)) * g.partial(var_kappa(s)) - f.partial(var_kappa(s)) * g.partial(var_a(s));
        for (int r = 1; r <= 2; ++r)
            acc += f.partial(var_alpha(r, s)) * g.partial(var_beta(r, s)) - f.partial(var_beta(r, s)) * g.partial(var_alpha(r, s));
    }
    return acc;
}

inline Rational poisson_bracket(const Observable& f, const Observable& g, const SymbolicPoint& sp) {
    return poisson_bracket_jets(f(sp).take_limit(), g(sp).take_limit(), sp.genus);
}

} // namespace hitchin
