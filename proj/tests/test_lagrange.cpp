#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <random>

#include "hitchin/lagrange.hpp"

using namespace hitchin;

namespace {

NodeData<Rational> rational_nodes(std::initializer_list<long> a, std::initializer_list<long> kappa) {
    NodeData<Rational> d;
    for (long v : a) d.a.emplace_back(v);
    for (long v : kappa) d.kappa.emplace_back(v);
    return d;
}

} // namespace

TEST_CASE("interpolation coefficient fixtures", "[lagrange]") {
    SECTION("constant interpolant") {
        const auto c = lagrange_coeffs(rational_nodes({7}, {5}));
        REQUIRE(c.F.size() == 1);
        CHECK(c.F[0] == 5);
    }
    SECTION("line through (1,3) and (2,5)") {
        const auto c = lagrange_coeffs(rational_nodes({1, 2}, {3, 5}));
        REQUIRE(c.F.size() == 2);
        CHECK(c.F[0] == 1);
        CHECK(c.F[1] == 2);
    }
    SECTION("parabola through squares") {
        const auto c = lagrange_coeffs(rational_nodes({0, 1, 2}, {0, 1, 4}));
        REQUIRE(c.F.size() == 3);
        CHECK(c.F[0] == 0);
        CHECK(c.F[1] == 0);
        CHECK(c.F[2] == 1);
    }
    SECTION("coinciding nodes are rejected") {
        CHECK_THROWS_AS(lagrange_coeffs(rational_nodes({1, 1}, {3, 5})), DuplicateNodes);
        CHECK_THROWS_AS(lagrange_coeffs(rational_nodes({1, 2}, {3})), BadInput);
    }
}

TEST_CASE("expanded basis agrees with the Vandermonde oracle", "[lagrange]") {
    std::mt19937_64 rng(2024);
    for (int n = 2; n <= 8; ++n) {
        for (int trial = 0; trial < 10; ++trial) {
            NodeData<Rational> d;
            while (static_cast<int>(d.a.size()) < n) {
                const Rational cand = sample_rational(rng, 40);
                if (std::find(d.a.begin(), d.a.end(), cand) == d.a.end()) d.a.push_back(cand);
            }
            for (int k = 0; k < n; ++k) d.kappa.push_back(sample_rational(rng, 40));

            const auto direct = lagrange_coeffs(d);
            const auto oracle = vandermonde_coeffs(d);
            REQUIRE(direct.F.size() == oracle.F.size());
            for (int i = 0; i < n; ++i) CHECK(direct.F[i] == oracle.F[i]);

            for (int s = 0; s < n; ++s) CHECK(interpolant_eval(direct, d.a[s]) == d.kappa[s]);

            NodeData<Rational> shuffled;
            std::vector<int> order(n);
            for (int i = 0; i < n; ++i) order[i] = i;
            std::shuffle(order.begin(), order.end(), rng);
            for (int i : order) {
                shuffled.a.push_back(d.a[i]);
                shuffled.kappa.push_back(d.kappa[i]);
            }
            const auto permuted = lagrange_coeffs(shuffled);
            for (int i = 0; i < n; ++i) CHECK(permuted.F[i] == direct.F[i]);
        }
    }
}

TEST_CASE("multiplier closed form", "[lagrange]") {
    SECTION("two nodes collapse to a difference quotient") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            NodeData<Rational> d;
            d.a = {sample_rational(rng, 30), sample_rational(rng, 30)};
            if (d.a[0] == d.a[1]) continue;
            d.kappa = {sample_rational(rng, 30), sample_rational(rng, 30)};
            CHECK(multiplier(d, 1) == (d.kappa[1] - d.kappa[0]) / (d.a[0] - d.a[1]));
            CHECK(multiplier(d, 2) == (d.kappa[0] - d.kappa[1]) / (d.a[1] - d.a[0]));
        }
    }
    SECTION("fixture nodes (1,2) with values (3,5)") {
        const auto d = rational_nodes({1, 2}, {3, 5});
        CHECK(multiplier(d, 1) == -2);

        // The gradient identity behind the multiplier, on seeded data:
        // dF1/da1 and M1 dF1/dkappa1 both equal 2 here.
        NodeData<Scalar> sd;
        sd.a = {Scalar::seeded(Rational(1), var_a(1)), Scalar::seeded(Rational(2), var_a(2))};
        sd.kappa = {Scalar::seeded(Rational(3), var_kappa(1)), Scalar::seeded(Rational(5), var_kappa(2))};
        const Jet f1 = lagrange_coeffs(sd).F[1].take_limit();
        const Rational m1 = multiplier(sd, 1).take_limit().value();
        CHECK(m1 == -2);
        CHECK(f1.partial(var_a(1)) == 2);
        CHECK(m1 * f1.partial(var_kappa(1)) == 2);
    }
    SECTION("equal values make every multiplier vanish") {
        std::mt19937_64 rng(11);
        for (int n : {2, 4, 5}) {
            const NodeData<Scalar> base = sample_nodes(n, rng);
            NodeData<Scalar> d = base;
            for (int k = 0; k < n; ++k) d.kappa[k] = Scalar::seeded(rat(9, 2), var_kappa(k + 1));
            const auto fc = lagrange_coeffs(d);
            for (int k = 1; k <= n; ++k) {
                const Scalar mk = multiplier(d, k);
                CHECK(mk.take_limit().value() == 0);
                for (int i = 0; i < n; ++i) {
                    const Jet fi = fc.F[i].take_limit();
                    CHECK(fi.partial(var_a(k)) == 0);
                    CHECK(mk.take_limit().value() * fi.partial(var_kappa(k)) == 0);
                }
            }
        }
    }
}

TEST_CASE("involution and gradient relations hold on seeded data", "[lagrange]") {
    SECTION("pairwise brackets vanish") {
        const CheckReport two = involution_check(2, 50, 91);
        INFO((two.failures.empty() ? std::string() : two.failures.front()));
        CHECK(two.pass);
        CHECK(two.recorded.at("sabotage_control") == "nonzero");

        const CheckReport six = involution_check(6, 50, 92);
        INFO((six.failures.empty() ? std::string() : six.failures.front()));
        CHECK(six.pass);
    }
    SECTION("gradient relation and induced flow relation") {
        for (int n : {2, 3, 5}) {
            const CheckReport rep = gradient_relation_check(n, 10, 100 + n);
            INFO((rep.failures.empty() ? std::string() : rep.failures.front()));
            CHECK(rep.pass);
        }
    }
    SECTION("node count outside 2..8 is rejected") {
        CHECK_THROWS_AS(involution_check(1, 5, 1), BadInput);
        CHECK_THROWS_AS(involution_check(9, 5, 1), BadInput);
        CHECK_THROWS_AS(gradient_relation_check(1, 5, 1), BadInput);
    }
}

TEST_CASE("coefficients match the closed two- and three-node displays", "[lagrange]") {
    std::mt19937_64 rng(314);
    for (int trial = 0; trial < 20; ++trial) {
        // Two nodes: F0 = (a1 k4 - a4 k1)/(a1 - a4), F1 = (k1 - k4)/(a1 - a4).
        Rational a1 = sample_rational(rng, 60), a4 = sample_rational(rng, 60);
        while (a4 == a1) a4 = sample_rational(rng, 60);
        const Rational k1 = sample_rational(rng, 60), k4 = sample_rational(rng, 60);
        NodeData<Rational> pair;
        pair.a = {a1, a4};
        pair.kappa = {k1, k4};
        const auto fp = lagrange_coeffs(pair);
        CHECK(fp.F[0] == (a1 * k4 - a4 * k1) / (a1 - a4));
        CHECK(fp.F[1] == (k1 - k4) / (a1 - a4));
    }
    for (int trial = 0; trial < 20; ++trial) {
        // Three nodes, indexed (1,3,6) in the genus-3 reduction:
        Rational a1 = sample_rational(rng, 60), a3 = sample_rational(rng, 60), a6 = sample_rational(rng, 60);
        while (a3 == a1) a3 = sample_rational(rng, 60);
        while (a6 == a1 || a6 == a3) a6 = sample_rational(rng, 60);
        const Rational k1 = sample_rational(rng, 60), k3 = sample_rational(rng, 60), k6 = sample_rational(rng, 60);
        NodeData<Rational> triple;
        triple.a = {a1, a3, a6};
        triple.kappa = {k1, k3, k6};
        const auto ft = lagrange_coeffs(triple);
        const Rational den = (a1 - a3) * (a1 - a6) * (a3 - a6);
        const Rational f0 = (a1 * a6 * (a6 - a1) * k3 + a3 * a3 * (a6 * k1 - a1 * k6) + a3 * (a1 * a1 * k6 - a6 * a6 * k1)) / den;
        const Rational f1 = (a6 * a6 * (k1 - k3) + a3 * a3 * (k6 - k1) + a1 * a1 * (k3 - k6)) / den;
        const Rational f2 = (a6 * (k3 - k1) + a3 * (k1 - k6) + a1 * (k6 - k3)) / den;
        CHECK(ft.F[0] == f0);
        CHECK(ft.F[1] == f1);
        CHECK(ft.F[2] == f2);
    }
}

TEST_CASE("complex instantiation guards close nodes", "[lagrange]") {
    using C = std::complex<double>;
    NodeData<C> close;
    close.a = {C(0.0, 0.0), C(1e-12, 0.0)};
    close.kappa = {C(1.0, 0.0), C(2.0, 0.0)};
    CHECK_THROWS_AS(lagrange_coeffs(close), SingularityApproached);

    NodeData<C> d;
    d.a = {C(1.0, 0.0), C(2.0, 1.0), C(-3.0, 0.5)};
    d.kappa = {C(3.0, -1.0), C(5.0, 0.0), C(0.0, 2.0)};
    const auto fc = lagrange_coeffs(d);
    for (int s = 0; s < 3; ++s) {
        const C err = interpolant_eval(fc, d.a[s]) - d.kappa[s];
        CHECK(std::abs(err) < 1e-12);
    }
    const auto oracle = vandermonde_coeffs(d);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(fc.F[i] - oracle.F[i]) < 1e-12);
}
