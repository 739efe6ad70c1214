#pragma once

#include <vector>

#include "hitchin/laurent.hpp"

namespace hitchin {

// Hyperelliptic spectral curve  y^2 = P(x),
//   P(x) = x^{2g+1} + p_1 x^{2g} + ... + p_{2g+1},
// opened at infinity in the local coordinate z with x = 1/z^2, where
//   y^2 = z^{-2(2g+1)} (1 + p_1 z^2 + p_2 z^4 + ... + p_{2g+1} z^{2(2g+1)}).
struct CurveSpec {
    int genus = 2;
    std::vector<Scalar> p; // p_1 .. p_{2g+1}

    int degree() const { return 2 * genus + 1; }
};

inline CurveSpec make_curve(int genus, std::vector<Scalar> p) {
    if (genus < 1) throw UnsupportedGenus("genus must be at least 1");
    if (static_cast<int>(p.size()) != 2 * genus + 1)
        throw BadInput("curve of genus " + std::to_string(genus) + " needs " + std::to_string(2 * genus + 1) + " coefficients");
    return CurveSpec{genus, std::move(p)};
}

// P evaluated at an arbitrary ring element.
inline Scalar curve_poly(const CurveSpec& c, const Scalar& x) {
    Scalar acc = Scalar::one();
    for (const Scalar& pm : c.p) acc = acc * x + pm;
    return acc;
}

// b^2 - P(a): zero exactly when (a, b) lies on the curve.
inline Scalar on_curve_defect(const CurveSpec& c, const Scalar& a, const Scalar& b) {
    return b * b - curve_poly(c, a);
}

// The unit series 1 + p_1 z^2 + ... + p_{2g+1} z^{2(2g+1)} (exact polynomial).
inline Laurent<Scalar> curve_unit(const CurveSpec& c) {
    std::vector<Scalar> coeffs(static_cast<std::size_t>(2 * c.degree()) + 1);
    coeffs[0] = Scalar::one();
    for (int m = 1; m <= c.degree(); ++m) coeffs[static_cast<std::size_t>(2 * m)] = c.p[static_cast<std::size_t>(m - 1)];
    return Laurent<Scalar>(0, std::move(coeffs));
}

// y(z) = z^{-(2g+1)} sqrt(1 + p_1 z^2 + ...), valid through z^order.
inline Laurent<Scalar> y_series(const CurveSpec& c, int order) {
    const int terms = order + c.degree() + 1;
    if (terms < 1) throw BadInput("requested order is below the leading exponent of y");
    return curve_unit(c).sqrt_unit(terms).shifted(-c.degree());
}

// 1/y, valid through z^order.
inline Laurent<Scalar> y_inverse_series(const CurveSpec& c, int order) {
    const int terms = order - c.degree() + 1;
    if (terms < 1) throw BadInput("requested order is below the leading exponent of 1/y");
    return curve_unit(c).sqrt_unit(terms).inverse(terms).shifted(c.degree());
}

// The residue weight  -z^{-3} / y  =  -z^{2g-2} (1 - p_1 z^2 / 2 + ...),
// valid through z^order.  The -z^{-3} factor is d(1/z^2)/dz up to the
// configurable rational dx-factor (1 by default; 2 gives the full dx).
inline Laurent<Scalar> weight_series(const CurveSpec& c, int order, const Rational& dx_factor = Rational(1)) {
    const Laurent<Scalar> w = y_inverse_series(c, order + 3).shifted(-3);
    return -(w * Scalar(dx_factor));
}

} // namespace hitchin
