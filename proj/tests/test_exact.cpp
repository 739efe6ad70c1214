#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hitchin/scalar.hpp"

using namespace hitchin;

namespace Catch {
template <>
struct StringMaker<Rational> {
    static std::string convert(const Rational& q) { return rat_str(q); }
};
template <>
struct StringMaker<Jet> {
    static std::string convert(const Jet& j) {
        std::string s = "Jet(" + rat_str(j.value());
        for (const auto& [v, d] : j.grad()) s += ", d" + var_name(v) + "=" + rat_str(d);
        return s + ")";
    }
};
} // namespace Catch

TEST_CASE("rational helpers", "[exact]") {
    REQUIRE(rat(1, 2) + rat(1, 3) == rat(5, 6));
    REQUIRE(rat(-3, 6) == rat(-1, 2));
    REQUIRE_THROWS_AS(rat(1, 0), DivisionByZero);
    REQUIRE_THROWS_AS(rat_div(rat(1), rat(0)), DivisionByZero);

    REQUIRE(rat_str(rat(-3, 6)) == "-1/2");
    REQUIRE(rat_str(rat(4, 2)) == "2");
    REQUIRE(rat_parse("5/6") == rat(5, 6));
    REQUIRE(rat_parse("-7") == rat(-7));
    REQUIRE_THROWS_AS(rat_parse("x"), BadInput);
    REQUIRE_THROWS_AS(rat_parse("1/0"), DivisionByZero);

    REQUIRE(rat_pow(rat(2, 3), 3) == rat(8, 27));
    REQUIRE(rat_pow(rat(-5), 2) == rat(25));
}

TEST_CASE("variable identifiers", "[exact]") {
    REQUIRE(var_name(var_alpha(1, 2)) == "alpha12");
    REQUIRE(var_name(var_beta(2, 5)) == "beta25");
    REQUIRE(var_name(var_kappa(3)) == "kappa3");
    REQUIRE(var_name(var_a(6)) == "a6");
    REQUIRE(var_name(var_p(4)) == "p4");

    for (const char* s : {"a1", "b6", "kappa3", "alpha12", "beta25", "p7"})
        REQUIRE(var_name(var_parse(s)) == s);

    REQUIRE_THROWS_AS(var_parse("q3"), BadInput);
    REQUIRE_THROWS_AS(var_parse("alpha"), BadInput);
    REQUIRE_THROWS_AS(var_parse("alpha92"), BadInput);
    REQUIRE_THROWS_AS(var_parse(""), BadInput);

    REQUIRE(var_a(1) < var_b(1));
    REQUIRE(var_alpha(1, 2) < var_alpha(2, 1));
    REQUIRE(var_alpha(2, 1) < var_beta(1, 1));
}

TEST_CASE("jet arithmetic and derivatives", "[exact]") {
    const VarId x = var_a(1), y = var_a(2);

    SECTION("square of a seeded coordinate") {
        const Jet f = Jet::seeded(rat(3, 2), x) * Jet::seeded(rat(3, 2), x);
        REQUIRE(f.value() == rat(9, 4));
        REQUIRE(f.partial(x) == rat(3));
        REQUIRE(f.partial(y) == rat(0));
    }

    SECTION("product rule on a bivariate monomial") {
        const Jet a = Jet::seeded(rat(2), x), b = Jet::seeded(rat(-5), y);
        const Jet f = a * a * b; // x^2 y at (2, -5)
        REQUIRE(f.value() == rat(-20));
        REQUIRE(f.partial(x) == rat(-20)); // 2xy
        REQUIRE(f.partial(y) == rat(4));   // x^2
    }

    SECTION("quotient") {
        const Jet a = Jet::seeded(rat(1), x), b = Jet::seeded(rat(3), y);
        const Jet f = (a + b) / (a - b); // (x+y)/(x-y) at (1, 3)
        REQUIRE(f.value() == rat(-2));
        REQUIRE(f.partial(x) == rat(-2 * 3, 4)); // -2y/(x-y)^2
        REQUIRE(f.partial(y) == rat(2 * 1, 4));  //  2x/(x-y)^2
    }

    SECTION("reciprocal is an exact inverse") {
        const Jet a = Jet(rat(7, 3), Jet::Grad{{x, rat(2)}, {y, rat(-1, 5)}});
        REQUIRE(a * a.inverse() == Jet(rat(1)));
        REQUIRE_THROWS_AS(Jet(rat(0), Jet::Grad{{x, rat(1)}}).inverse(), DivisionByZero);
    }

    SECTION("linearity and cancellation") {
        const Jet a = Jet(rat(2), Jet::Grad{{x, rat(1)}, {y, rat(4)}});
        const Jet b = Jet(rat(-2), Jet::Grad{{y, rat(-4)}});
        REQUIRE((a + b).partial(y) == rat(0));
        REQUIRE((a + b - a) == b);
        REQUIRE((a - a).is_zero());
    }
}

TEST_CASE("scalar expansions: windows and limits", "[exact]") {
    SECTION("constant plus eps") {
        const Scalar s = Scalar(rat(2)) + rat(3) * Scalar::eps();
        REQUIRE(s.take_limit() == Jet(rat(2)));
    }

    SECTION("eps over eps") {
        const Scalar r = Scalar::eps() / Scalar::eps();
        REQUIRE(r == Scalar::one());
        REQUIRE(r.take_limit() == Jet(rat(1)));
    }

    SECTION("five eps over eps") {
        const Scalar r = (rat(5) * Scalar::eps()) / Scalar::eps();
        REQUIRE(r.take_limit() == Jet(rat(5)));
    }

    SECTION("one over eps has no limit") {
        const Scalar r = Scalar::one() / Scalar::eps();
        REQUIRE_THROWS_AS(r.take_limit(), LimitDoesNotExist);
    }

    SECTION("exact cancellation yields exact zero") {
        const Scalar s = Scalar::eps() + Scalar(rat(4)) - Scalar::eps() - Scalar(rat(4));
        REQUIRE(s.is_exact_zero());
        REQUIRE(s.take_limit().is_zero());
    }
}

TEST_CASE("scalar limit-variable substitution", "[exact]") {
    const VarId v = var_alpha(2, 2), w = var_beta(1, 1);
    const Scalar s = Scalar::limit_seed(v); // value eps, carrying d(v)

    SECTION("limit keeps the derivative direction") {
        const Jet l = s.take_limit();
        REQUIRE(l.value() == rat(0));
        REQUIRE(l.partial(v) == rat(1));
    }

    SECTION("ratio of two limit-bound factors") {
        const Scalar q = (rat(5) * s) / s;
        REQUIRE(q.take_limit() == Jet(rat(5)));
    }

    SECTION("self-division is exactly one") {
        REQUIRE((s / s) == Scalar::one());
    }

    SECTION("square vanishes in the limit but not before") {
        const Jet l = (s * s).take_limit();
        REQUIRE(l.is_zero()); // first-order jets square to zero at eps^0
    }

    SECTION("mixed product keeps both directions") {
        const Scalar t = Scalar::seeded(rat(3), w);
        const Jet l = (s * t).take_limit();
        REQUIRE(l.value() == rat(0));
        REQUIRE(l.partial(v) == rat(3));
        REQUIRE(l.partial(w) == rat(0)); // d(w) enters only at order eps^1
    }
}

TEST_CASE("scalar truncation bookkeeping", "[exact]") {
    SECTION("inverting an exact multi-term series truncates at the budget") {
        const Scalar inv = (Scalar::one() + Scalar::eps()).inverse();
        REQUIRE(inv.known_up_to() == eps_budget());
        REQUIRE(inv.coeff(0) == Jet(rat(1)));
        REQUIRE(inv.coeff(3) == Jet(rat(-1)));
        REQUIRE_THROWS_AS(inv.coeff(eps_budget()), PrecisionExhausted);

        const Scalar prod = (Scalar::one() + Scalar::eps()) * inv;
        REQUIRE(prod.coeff(0) == Jet(rat(1)));
        REQUIRE(prod.coeff(eps_budget() - 1) == Jet());
        REQUIRE(prod.take_limit() == Jet(rat(1)));
    }

    SECTION("a certain pole wins over truncation") {
        const Scalar s = (Scalar::one() + Scalar::eps()).inverse() / Scalar::eps();
        REQUIRE_THROWS_AS(s.take_limit(), LimitDoesNotExist);
    }

    SECTION("window arithmetic under multiplication") {
        const Scalar t = (Scalar::one() + Scalar::eps()).inverse(); // known below 4
        const Scalar u = t * Scalar::eps(2);
        REQUIRE(u.known_up_to() == eps_budget() + 2);
        REQUIRE(u.coeff(2) == Jet(rat(1)));
    }

    SECTION("retry wrapper widens the budget") {
        const auto high_coeff = [] {
            const Scalar inv = (Scalar::one() + Scalar::eps()).inverse();
            return inv.coeff(7); // outside the default budget of 4
        };
        REQUIRE_THROWS_AS(high_coeff(), PrecisionExhausted);
        REQUIRE(with_eps_retry(high_coeff) == Jet(rat(-1)));
        REQUIRE(eps_budget() == 4); // guard restored the default
    }

    SECTION("nilpotent-only expansions are not invertible") {
        const Scalar n = Scalar(Jet(rat(0), Jet::Grad{{var_a(1), rat(1)}}));
        REQUIRE_THROWS_AS(n.inverse(), NotInvertible);
        REQUIRE_THROWS_AS(Scalar::zero().inverse(), DivisionByZero);
    }
}

TEST_CASE("scalar ring identities on random data", "[exact]") {
    // Small deterministic pseudo-random expansions; checks associativity,
    // distributivity and the inverse law inside the exact subring.
    std::mt19937_64 rng(42);
    const auto rnd_rat = [&] {
        const long num = static_cast<long>(rng() % 19) - 9;
        const long den = 1 + static_cast<long>(rng() % 7);
        return rat(num, den);
    };
    const auto rnd_scalar = [&] {
        Scalar s;
        for (int e = -1; e <= 1; ++e) {
            Jet j(rnd_rat(), Jet::Grad{{var_a(1), rnd_rat()}});
            s = s + Scalar::monomial(j, e);
        }
        return s;
    };
    for (int trial = 0; trial < 20; ++trial) {
        const Scalar a = rnd_scalar(), b = rnd_scalar(), c = rnd_scalar();
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE(a + b == b + a);
        if (a.unit_order()) {
            const Scalar ainv = a.inverse();
            if (ainv.is_exact()) REQUIRE(a * ainv == Scalar::one());
        }
    }
}
