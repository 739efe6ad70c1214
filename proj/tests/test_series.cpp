#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hitchin/curve.hpp"
#include "hitchin/phase.hpp"

using namespace hitchin;

namespace {
using RSeries = Laurent<Rational>;
using SSeries = Laurent<Scalar>;

RSeries rseries(int lo, std::vector<long> nums) {
    std::vector<Rational> c;
    for (long n : nums) c.emplace_back(n);
    return RSeries(lo, std::move(c));
}
} // namespace

TEST_CASE("series arithmetic over rationals", "[series]") {
    SECTION("multiplication and residue") {
        const RSeries f = rseries(-1, {3, 0, 5}); // 3/z + 5z
        const RSeries g = rseries(0, {1, 2});     // 1 + 2z
        const RSeries fg = f * g;
        REQUIRE(fg.coeff(-1) == rat(3));
        REQUIRE(fg.coeff(0) == rat(6));
        REQUIRE(fg.coeff(1) == rat(5));
        REQUIRE(fg.coeff(2) == rat(10));
        REQUIRE(f.residue() == rat(3));
        REQUIRE(rseries(0, {7}).residue() == rat(0));
    }

    SECTION("a clipped series refuses residues below its window") {
        const RSeries f = rseries(-2, {1, 4, 9}).clipped(-2);
        REQUIRE(f.coeff(-2) == rat(1));
        REQUIRE_THROWS_AS(f.residue(), PrecisionExhausted);
    }

    SECTION("inverse through a requested number of coefficients") {
        const RSeries f = rseries(1, {2, 6}); // 2z + 6z^2
        const RSeries inv = f.inverse(3);     // (1/2) z^{-1} (1 - 3z + 9z^2 - ...)
        REQUIRE(inv.coeff(-1) == rat(1, 2));
        REQUIRE(inv.coeff(0) == rat(-3, 2));
        REQUIRE(inv.coeff(1) == rat(9, 2));
        REQUIRE_THROWS_AS(inv.coeff(2), PrecisionExhausted);
        const RSeries check = f * inv;
        REQUIRE(check.coeff(0) == rat(1));
        REQUIRE(check.coeff(1) == rat(0));
        REQUIRE(check.coeff(2) == rat(0));
        REQUIRE_THROWS_AS(RSeries().inverse(2), DivisionByZero);
    }

    SECTION("square root of a unit series") {
        // sqrt(1 + p1 z^2 + p2 z^4) with p1 = 4, p2 = 12:
        // z^2 coefficient p1/2 = 2, z^4 coefficient p2/2 - p1^2/8 = 4.
        const RSeries u = rseries(0, {1, 0, 4, 0, 12});
        const RSeries s = u.sqrt_unit(5);
        REQUIRE(s.coeff(0) == rat(1));
        REQUIRE(s.coeff(2) == rat(2));
        REQUIRE(s.coeff(4) == rat(4));
        const RSeries sq = s * s;
        for (int e = 0; e <= sq.valid_up_to(); ++e) REQUIRE(sq.coeff(e) == u.coeff(e));
        REQUIRE_THROWS_AS(rseries(0, {2, 1}).sqrt_unit(3), NotUnitConstant);
        REQUIRE_THROWS_AS(rseries(1, {1}).sqrt_unit(3), NotUnitConstant);
    }

    SECTION("ring identities on random series") {
        std::mt19937_64 rng(7);
        const auto rnd = [&] {
            std::vector<Rational> c;
            for (int i = 0; i < 4; ++i) c.push_back(rat(static_cast<long>(rng() % 11) - 5, 1 + static_cast<long>(rng() % 4)));
            return RSeries(static_cast<int>(rng() % 5) - 2, std::move(c));
        };
        for (int t = 0; t < 25; ++t) {
            const RSeries a = rnd(), b = rnd(), c = rnd();
            REQUIRE((a * b) * c == a * (b * c));
            REQUIRE(a * (b + c) == a * b + a * c);
            REQUIRE((a - a).is_exact_zero());
            REQUIRE(a.shifted(3).shifted(-3) == a);
        }
    }
}

TEST_CASE("series with derivative-carrying coefficients", "[series]") {
    const VarId x = var_a(1);

    SECTION("inverse of a seeded constant carries gradient -1") {
        const SSeries f(Scalar::seeded(rat(1), x));
        const Jet inv = f.inverse(1).coeff(0).take_limit();
        REQUIRE(inv.value() == rat(1));
        REQUIRE(inv.partial(x) == rat(-1));
    }

    SECTION("derivative of a product series matches the product rule") {
        const SSeries f = SSeries(Scalar::seeded(rat(3), x)) + SSeries(Scalar::one(), 1);       // x + z
        const SSeries g = SSeries(Scalar::seeded(rat(3), x)) * SSeries(Scalar(rat(2)), 1);      // 2x z
        const Jet c1 = (f * g).coeff(1).take_limit();                                           // 2x^2 at z
        REQUIRE(c1.value() == rat(18));
        REQUIRE(c1.partial(x) == rat(12));
    }
}

TEST_CASE("spectral curve series", "[series]") {
    SECTION("genus2 weight opening") {
        const Rational p1v = rat(2, 3), p2v = rat(-5, 7);
        const CurveSpec c = make_curve(2, {Scalar::seeded(p1v, var_p(1)), Scalar::seeded(p2v, var_p(2)),
                                           Scalar(rat(1)), Scalar(rat(4)), Scalar(rat(-3))});
        const auto w = weight_series(c, 6);
        REQUIRE(w.coeff(2).take_limit().value() == rat(-1));
        REQUIRE(w.coeff(3).take_limit().is_zero());
        REQUIRE(w.coeff(4).take_limit().value() == p1v / 2);
        const Jet c6 = w.coeff(6).take_limit();
        REQUIRE(c6.value() == rat(-3) * p1v * p1v / 8 + p2v / 2);
        REQUIRE(c6.partial(var_p(1)) == rat(-3) * p1v / 4);
        REQUIRE(c6.partial(var_p(2)) == rat(1, 2));
    }

    SECTION("genus3 weight opening") {
        const Rational p1v = rat(1, 2), p2v = rat(-2), p3v = rat(3);
        std::vector<Scalar> p = {Scalar::seeded(p1v, var_p(1)), Scalar::seeded(p2v, var_p(2)), Scalar::seeded(p3v, var_p(3)),
                                 Scalar(rat(2)), Scalar(rat(-1)), Scalar(rat(5)), Scalar(rat(7))};
        const CurveSpec c = make_curve(3, std::move(p));
        const auto w = weight_series(c, 10);
        REQUIRE(w.coeff(4).take_limit().value() == rat(-1));
        REQUIRE(w.coeff(6).take_limit().value() == p1v / 2);
        REQUIRE(w.coeff(8).take_limit().value() == rat(-3) * p1v * p1v / 8 + p2v / 2);
        const Rational c10 = (rat(5) * p1v * p1v * p1v - rat(12) * p1v * p2v + rat(8) * p3v) / 16;
        REQUIRE(w.coeff(10).take_limit().value() == c10);
    }

    SECTION("y * (1/y) and y^2 against the defining polynomial") {
        const CurveSpec c = make_curve(2, {Scalar(rat(0)), Scalar(rat(2, 5)), Scalar(rat(-1)), Scalar(rat(3)), Scalar(rat(1, 2))});
        const auto y = y_series(c, 4);
        const auto yinv = y_inverse_series(c, 9);
        const auto prod = y * yinv;
        REQUIRE(prod.coeff(0) == Scalar::one());
        for (int e = 1; e <= prod.valid_up_to(); ++e) REQUIRE(prod.coeff(e).is_exact_zero());
        const auto ysq = y * y;
        const auto unit = curve_unit(c).shifted(-2 * c.degree());
        for (int e = ysq.lowest(); e <= ysq.valid_up_to(); ++e) REQUIRE(ysq.coeff(e) == unit.coeff(e));
    }

    SECTION("points on and off the curve") {
        // Solve the constant coefficient so that (a, b) = (2, 3/2) is on the curve.
        const Rational a = rat(2), b = rat(3, 2);
        const Rational p1 = rat(1), p2 = rat(-2), p3 = rat(0), p4 = rat(1, 4);
        const Rational head = rat_pow(a, 5) + p1 * rat_pow(a, 4) + p2 * rat_pow(a, 3) + p3 * a * a + p4 * a;
        const Rational p5 = b * b - head;
        const CurveSpec c = make_curve(2, {Scalar(p1), Scalar(p2), Scalar(p3), Scalar(p4), Scalar(p5)});
        const Scalar defect = on_curve_defect(c, Scalar(a), Scalar::seeded(b, var_b(1)));
        const Jet lim = defect.take_limit();
        REQUIRE(lim.value() == rat(0));
        REQUIRE(lim.partial(var_b(1)) == rat(3)); // d(b^2)/db = 2b
        const Scalar off = on_curve_defect(c, Scalar(a), Scalar(b + 1));
        REQUIRE(off.take_limit().value() != rat(0));
    }
}

TEST_CASE("phase point sampling and serialization", "[series]") {
    SECTION("deterministic and collision-free at a tight bound") {
        std::mt19937_64 r1(8), r2(8);
        const PhasePoint p1 = sample_point(2, r1, 2);
        const PhasePoint p2 = sample_point(2, r2, 2);
        p1.validate();
        REQUIRE(to_json(p1).dump() == to_json(p2).dump());
        for (std::size_t i = 0; i < p1.a.size(); ++i)
            for (std::size_t j = i + 1; j < p1.a.size(); ++j) REQUIRE(p1.a[i] != p1.a[j]);
        for (const auto& q : p1.kappa) {
            REQUIRE(q != 0);
            REQUIRE(abs(q) <= 2);
        }
        REQUIRE(p1.p[0] == 0); // leading curve coefficient pinned by default
    }

    SECTION("gauge frame at the last two points") {
        std::mt19937_64 rng(21);
        const PhasePoint pt = sample_point(3, rng, 10);
        REQUIRE(pt.alpha[0][4] == 1);
        REQUIRE(pt.alpha[1][4] == 0);
        REQUIRE(pt.alpha[0][5] == 0);
        REQUIRE(pt.alpha[1][5] == 1);
        REQUIRE(pt.beta[0][4] == 0);
        REQUIRE(pt.beta[1][5] == 0);

        PhasePoint broken = pt;
        broken.alpha[1][4] = rat(7);
        REQUIRE_THROWS_AS(broken.validate(), BadInput);

        const SymbolicPoint sp = bind_point(pt);
        const Jet gauge = sp.at(var_alpha(1, 5)).take_limit();
        REQUIRE(gauge.value() == rat(1));
        REQUIRE(gauge.grad().empty()); // gauge entries are numeric, not seeded
        REQUIRE(sp.at(var_beta(2, 6)).take_limit().partial(var_beta(2, 6)) == rat(1));
    }

    SECTION("omitted gauge entries are filled from shorter arrays") {
        std::mt19937_64 rng(33);
        const PhasePoint pt = sample_point(2, rng, 10);
        nlohmann::ordered_json j = to_json(pt);
        j["alpha"].erase(3);
        j["alpha"].erase(2);
        j["beta"].erase(3);
        j["beta"].erase(2);
        const PhasePoint back = point_from_json(nlohmann::json::parse(j.dump()));
        REQUIRE(back.alpha[0][2] == 1);
        REQUIRE(back.alpha[1][3] == 1);
        REQUIRE(back.beta[0][2] == 0);
        REQUIRE(back.beta[1][3] == 0);
        REQUIRE(back.a == pt.a);
    }

    SECTION("seeds differ, points differ") {
        std::mt19937_64 r1(8), r2(9);
        REQUIRE(to_json(sample_point(3, r1, 50)).dump() != to_json(sample_point(3, r2, 50)).dump());
    }

    SECTION("round trip through JSON") {
        std::mt19937_64 rng(123);
        const PhasePoint pt = sample_point(3, rng, 100);
        const PhasePoint back = point_from_json(nlohmann::json::parse(to_json(pt).dump()));
        REQUIRE(to_json(back) == to_json(pt));
    }

    SECTION("override of pinned curve coefficients") {
        std::mt19937_64 rng(5);
        const std::map<int, Rational> ov{{1, rat(3, 2)}};
        const PhasePoint pt = sample_point(2, rng, 10, &ov);
        REQUIRE(pt.p[0] == rat(3, 2));
    }

    SECTION("validation failures") {
        std::mt19937_64 rng(11);
        PhasePoint pt = sample_point(2, rng, 10);
        pt.a[2] = pt.a[0];
        REQUIRE_THROWS_AS(pt.validate(), DuplicateNodes);
        REQUIRE_THROWS_AS(point_from_json(nlohmann::json::parse("{\"genus\":2}")), BadInput);
    }

    SECTION("variable addressing") {
        std::mt19937_64 rng(17);
        PhasePoint pt = sample_point(2, rng, 10);
        REQUIRE(pt.at(var_alpha(2, 3)) == pt.alpha[1][2]);
        pt.at(var_kappa(4)) = rat(9);
        REQUIRE(pt.kappa[3] == rat(9));
        const SymbolicPoint sp = bind_point(pt);
        REQUIRE(sp.at(var_kappa(4)).take_limit().value() == rat(9));
        REQUIRE(sp.at(var_kappa(4)).take_limit().partial(var_kappa(4)) == rat(1));
    }
}
