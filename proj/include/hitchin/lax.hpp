#pragma once

#include <array>
#include <vector>

#include "hitchin/phase.hpp"

namespace hitchin {

// Matrix coefficients of the Lax operator  L(x, y) = sum_{m=0}^{g-1} L_m x^m
// + sum_s (y + b_s) alpha_s beta_s^T / (x - a_s);  the polynomial part is the
// unknown solved from the eigenvalue conditions L(a_s, b_s) alpha_s =
// kappa_s alpha_s.
struct LaxCoeffs {
    // L[m][i][j], m = 0..g-1, i/j = 0..1.
    std::vector<std::array<std::array<Scalar, 2>, 2>> L;

    const Scalar& entry(int m, int i, int j) const {
        return L.at(static_cast<std::size_t>(m))[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
    }
};

// One component of L(a_s, b_s) alpha_s as an affine-linear expression in the
// 2g unknowns of a single matrix row, ordered
//   [ l_{i1}, l_{i2}, l_{1,i,1}, l_{1,i,2}, ..., l_{g-1,i,1}, l_{g-1,i,2} ].
struct LinForm {
    std::vector<Scalar> coef;
    Scalar cst;
};

// The i-th component (i = 1, 2) of L(a_s, b_s) alpha_s with the s-th pole
// term omitted (it annihilates alpha_s by the locus orthogonality, so no
// singularity arises).  The unknown coefficients are shared between the two
// components point-wise; only the pole constant depends on i.
inline std::array<LinForm, 2> eval_lax_at_point(const SymbolicPoint& sp, int s) {
    const int g = sp.genus, n = 2 * g;
    if (s < 1 || s > n) throw BadInput("point index out of range");
    std::array<LinForm, 2> rows;
    const Scalar& as = sp.at(var_a(s));
    Scalar x_pow = Scalar::one();
    for (int i = 0; i < 2; ++i) rows[static_cast<std::size_t>(i)].coef.resize(static_cast<std::size_t>(2 * g));
    for (int m = 0; m < g; ++m) {
        for (int j = 1; j <= 2; ++j) {
            const Scalar c = sp.at(var_alpha(j, s)) * x_pow;
            rows[0].coef[static_cast<std::size_t>(2 * m + j - 1)] = c;
            rows[1].coef[static_cast<std::size_t>(2 * m + j - 1)] = c;
        }
        x_pow = x_pow * as;
    }
    for (int t = 1; t <= n; ++t) {
        if (t == s) continue;
        const Scalar dot = sp.at(var_beta(1, t)) * sp.at(var_alpha(1, s)) + sp.at(var_beta(2, t)) * sp.at(var_alpha(2, s));
        const Scalar factor = (sp.at(var_b(s)) + sp.at(var_b(t))) / (sp.at(var_a(s)) - sp.at(var_a(t)));
        const Scalar common = dot * factor;
        for (int i = 1; i <= 2; ++i)
            rows[static_cast<std::size_t>(i - 1)].cst = rows[static_cast<std::size_t>(i - 1)].cst + sp.at(var_alpha(i, t)) * common;
    }
    return rows;
}

// Exact Gaussian elimination with partial pivoting; pivots are chosen among
// invertible entries, preferring the lowest eps order so limit-bearing data
// introduces as few negative powers as possible.
inline std::vector<Scalar> solve_linear(std::vector<std::vector<Scalar>> A, std::vector<Scalar> rhs) {
    const std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = n;
        int pivot_order = 0;
        for (std::size_t r = col; r < n; ++r) {
            if (const auto u = A[r][col].unit_order()) {
                if (pivot == n || *u < pivot_order) {
                    pivot = r;
                    pivot_order = *u;
                }
            }
        }
        if (pivot == n) {
            for (std::size_t r = col; r < n; ++r)
                if (!A[r][col].is_exact()) throw PrecisionExhausted("pivot column is known only up to truncation");
            throw SingularSystem("eigenvalue system has no invertible pivot in column " + std::to_string(col + 1));
        }
        std::swap(A[col], A[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        const Scalar pinv = A[col][col].inverse();
        for (std::size_t r = col + 1; r < n; ++r) {
            if (A[r][col].is_exact_zero()) continue;
            const Scalar f = A[r][col] * pinv;
            for (std::size_t c = col; c < n; ++c) A[r][c] = A[r][c] - f * A[col][c];
            rhs[r] = rhs[r] - f * rhs[col];
        }
    }
    std::vector<Scalar> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        Scalar acc = rhs[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc = acc - A[ri][c] * x[c];
        x[ri] = acc / A[ri][ri];
    }
    return x;
}

enum class SolveMode { Split, Joint };

// Solves the 4g eigenvalue conditions for the polynomial part of L.  Split
// mode solves the two decoupled 2g-systems (one per matrix row); Joint mode
// assembles the full 4g-system.  Both give identical results; the engine
// cross-checks them as an elimination-independence property.
inline LaxCoeffs solve_lax_coeffs(const SymbolicPoint& sp, SolveMode mode = SolveMode::Split) {
    const int g = sp.genus, n = 2 * g;
    std::vector<std::array<LinForm, 2>> eqs;
    eqs.reserve(static_cast<std::size_t>(n));
    for (int s = 1; s <= n; ++s) eqs.push_back(eval_lax_at_point(sp, s));

    const auto rhs_for = [&](int i, int s) {
        return sp.at(var_kappa(s)) * sp.at(var_alpha(i, s)) - eqs[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(i - 1)].cst;
    };

    std::array<std::vector<Scalar>, 2> sol;
    if (mode == SolveMode::Split) {
        for (int i = 1; i <= 2; ++i) {
            std::vector<std::vector<Scalar>> A;
            std::vector<Scalar> rhs;
            for (int s = 1; s <= n; ++s) {
                A.push_back(eqs[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(i - 1)].coef);
                rhs.push_back(rhs_for(i, s));
            }
            sol[static_cast<std::size_t>(i - 1)] = solve_linear(std::move(A), std::move(rhs));
        }
    } else {
        const std::size_t dim = static_cast<std::size_t>(2 * n);
        std::vector<std::vector<Scalar>> A(dim, std::vector<Scalar>(dim));
        std::vector<Scalar> rhs(dim);
        for (int i = 1; i <= 2; ++i)
            for (int s = 1; s <= n; ++s) {
                const std::size_t r = static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n) + static_cast<std::size_t>(s - 1);
                const auto& form = eqs[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(i - 1)];
                for (std::size_t c = 0; c < form.coef.size(); ++c) A[r][static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n) + c] = form.coef[c];
                rhs[r] = rhs_for(i, s);
            }
        std::vector<Scalar> joint = solve_linear(std::move(A), std::move(rhs));
        sol[0].assign(joint.begin(), joint.begin() + n);
        sol[1].assign(joint.begin() + n, joint.end());
    }

    LaxCoeffs lc;
    lc.L.resize(static_cast<std::size_t>(g));
    for (int m = 0; m < g; ++m)
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j)
                lc.L[static_cast<std::size_t>(m)][static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] =
                    sol[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(2 * m + j - 1)];
    return lc;
}

// Residual of the eigenvalue condition at point s for solved coefficients:
// L(a_s, b_s) alpha_s - kappa_s alpha_s, component i = 1, 2.  Exactly zero by
// construction of the solve.
inline std::array<Scalar, 2> lax_residual(const SymbolicPoint& sp, const LaxCoeffs& lc, int s) {
    const int g = sp.genus;
    const auto eq = eval_lax_at_point(sp, s);
    std::array<Scalar, 2> res;
    for (int i = 1; i <= 2; ++i) {
        Scalar acc = eq[static_cast<std::size_t>(i - 1)].cst;
        for (int m = 0; m < g; ++m)
            for (int j = 1; j <= 2; ++j)
                acc = acc + eq[static_cast<std::size_t>(i - 1)].coef[static_cast<std::size_t>(2 * m + j - 1)] * lc.entry(m, i, j);
        res[static_cast<std::size_t>(i - 1)] = acc - sp.at(var_kappa(s)) * sp.at(var_alpha(i, s));
    }
    return res;
}

using MatrixSeries = std::array<std::array<Laurent<Scalar>, 2>, 2>;

// L(z) on the curve opening x = 1/z^2, y = y_series, with every entry valid
// through z^window.
inline MatrixSeries lax_series(const SymbolicPoint& sp, const LaxCoeffs& lc, int window) {
    const int g = sp.genus, n = 2 * g;
    const CurveSpec curve = sp.curve();
    const Laurent<Scalar> y = y_series(curve, window);
    MatrixSeries M;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Laurent<Scalar> acc;
            for (int m = 0; m < g; ++m) acc = acc + Laurent<Scalar>(lc.L[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], -2 * m);
            M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc.clipped(window);
        }
    for (int s = 1; s <= n; ++s) {
        // 1/(x - a_s) = z^2 (1 + a_s z^2 + a_s^2 z^4 + ...), truncated deep
        // enough that the product with y + b_s stays valid through z^window.
        const int geom_top = window + 2 * g + 1;
        std::vector<Scalar> gc(static_cast<std::size_t>(std::max(geom_top - 2 + 1, 1)));
        Scalar a_pow = Scalar::one();
        for (int e = 2; e <= geom_top; e += 2) {
            gc[static_cast<std::size_t>(e - 2)] = a_pow;
            a_pow = a_pow * sp.at(var_a(s));
        }
        const Laurent<Scalar> geom(2, std::move(gc), geom_top);
        const Laurent<Scalar> factor = ((y + Laurent<Scalar>(sp.at(var_b(s)))) * geom).clipped(window);
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j) {
                const Scalar weight = sp.at(var_alpha(i, s)) * sp.at(var_beta(j, s));
                if (weight.is_exact_zero()) continue;
                auto& slot = M[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
                slot = slot + factor * weight;
            }
    }
    return M;
}

} // namespace hitchin
