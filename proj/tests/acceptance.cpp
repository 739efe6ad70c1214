// Acceptance battery: every headline identity and integration contract, run
// at full trial counts with one PASS/FAIL line each.  Three entries probe
// printed closed forms that the engine measurably contradicts; they are
// expected to FAIL and say so.  The process exits 0 only when every entry
// lands on its documented outcome, so a regression in either direction --
// a passing identity breaking, or a documented discrepancy silently
// resolving -- turns the run red.

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "hitchin/flows.hpp"

namespace {

using namespace hitchin;

constexpr unsigned long kSeed = 20260814UL;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;
};

void absorb(Outcome& out, const CheckReport& rep, const std::vector<std::string>& keys = {}) {
    out.pass = out.pass && rep.pass;
    for (const std::string& key : keys)
        if (const auto it = rep.recorded.find(key); it != rep.recorded.end())
            out.notes.push_back(rep.check + (rep.genus ? " genus " + std::to_string(rep.genus) : "") +
                                ": " + key + " = " + it->second);
    std::size_t shown = 0;
    for (const std::string& line : rep.failures) {
        if (shown == 2) {
            out.notes.push_back(rep.check + ": ... " + std::to_string(rep.failures.size() - shown) +
                                " more failure lines");
            break;
        }
        out.notes.push_back(rep.check + ": " + line);
        ++shown;
    }
}

Outcome run_c01() {
    Outcome out;
    absorb(out, check_admissibility(2, 20, kSeed));
    return out;
}

Outcome run_c02() {
    Outcome out;
    absorb(out, check_admissibility(3, 10, kSeed));
    return out;
}

Outcome run_c03() {
    Outcome out;
    std::mt19937_64 rng(kSeed);
    for (int t = 0; t < 5 && out.pass; ++t) {
        const Rational p1 = sample_rational(rng, 50), p2 = sample_rational(rng, 50);
        const CurveSpec c = make_curve(2, {Scalar(p1), Scalar(p2), Scalar(sample_rational(rng, 50)),
                                           Scalar(sample_rational(rng, 50)), Scalar(sample_rational(rng, 50))});
        const Laurent<Scalar> w = weight_series(c, 6);
        if (w.coeff(2).take_limit().value() != -1) {
            out.pass = false;
            out.notes.push_back("z^2 coefficient is not -1 at trial " + std::to_string(t));
        }
        if (w.coeff(4).take_limit().value() != p1 / 2) {
            out.pass = false;
            out.notes.push_back("z^4 coefficient is not p1/2 at trial " + std::to_string(t));
        }
        if (w.coeff(6).take_limit().value() != Rational(-3) * p1 * p1 / 8 + p2 / 2) {
            out.pass = false;
            out.notes.push_back("z^6 coefficient is not -3 p1^2/8 + p2/2 at trial " + std::to_string(t));
        }
    }
    return out;
}

Outcome run_c04() {
    Outcome out;
    absorb(out, check_reduced_hamiltonian(2, 20, kSeed), {"sigma_H"});
    absorb(out, check_reduced_hamiltonian(3, 10, kSeed), {"sigma_H"});
    return out;
}

Outcome run_c05() {
    Outcome out;
    absorb(out, check_vector_field(20, kSeed));
    return out;
}

Outcome run_c06() {
    Outcome out;
    absorb(out, check_relations(2, 20, kSeed));
    absorb(out, check_relations(3, 10, kSeed), {"sigma", "sigma_equal_kappa_flow", "sigma_equal_kappa_alpha"});
    return out;
}

Outcome run_c07() {
    Outcome out;
    for (int n = 2; n <= 6; ++n) {
        absorb(out, involution_check(n, 50, kSeed + static_cast<unsigned long>(n)));
        absorb(out, gradient_relation_check(n, 20, kSeed + static_cast<unsigned long>(n)));
    }
    return out;
}

Outcome run_c08() {
    Outcome out;
    absorb(out, check_factorization(2, 20, kSeed, {Rational(0), rat(3, 2), Rational(-1)}),
           {"sigma_H", "p1_shift_claimed", "p1_shift_measured"});
    absorb(out, check_factorization(3, 10, kSeed, {Rational(0)}), {"sigma_H"});
    return out;
}

Outcome run_c09() {
    Outcome out;
    absorb(out, check_displays(2, 20, kSeed));
    absorb(out, check_displays(3, 20, kSeed), {"f1_display_negated"});
    return out;
}

Outcome run_c10() {
    Outcome out;
    absorb(out, check_flow_conservation(10000, 1.0),
           {"drift_F0_136", "drift_F1_136", "drift_F2_136", "richardson_coarse", "richardson_fine",
            "richardson_ratio"});
    return out;
}

Outcome run_c11() {
    Outcome out;
    absorb(out, check_flow_closed_forms("g3-equal-kappa", 10000, 1.0),
           {"sigma", "cube_root_deviation", "point_sum_max"});
    absorb(out, check_flow_closed_forms("g2-linear-kappa", 5000, 0.5),
           {"sigma_display", "claimed_affine_residual", "claimed_constancy_deviation",
            "control_line_residual", "control_circle_drift", "control_kappa_line_drift"});
    return out;
}

Outcome run_c12() {
    Outcome out;
    absorb(out, conjecture_probe(2, 20, kSeed), {"informational"});
    absorb(out, conjecture_probe(3, 10, kSeed), {"informational"});
    absorb(out, conjecture_probe(4, 3, kSeed), {"first_row", "informational"});
    return out;
}

struct Criterion {
    const char* id;
    const char* what;
    bool expect_pass;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"c01", "two-point grouping: all constrained flow directions vanish exactly (20 points)", true, run_c01},
    {"c02", "three-point grouping: all constrained flow directions vanish exactly (10 points)", true, run_c02},
    {"c03", "weight opening, two-point curve: z^2, z^4, z^6 coefficients exact in p1, p2", true, run_c03},
    {"c04", "engine Hamiltonian equals sigma_H x the closed two-/three-point forms exactly", true, run_c04},
    {"c05", "all ten two-point flow components equal their printed closed forms exactly", true, run_c05},
    {"c06", "kappa-dot/a-dot ratio relations and quadratures, cross-multiplied, exact", true, run_c06},
    {"c07", "interpolation coefficients Poisson-commute; gradient identities, n = 2..6", true, run_c07},
    {"c08", "per-group factor 2(F0 + p1 F1)F1 under shifted p1 (engine measures -p1/4)", false, run_c08},
    {"c09", "printed group coefficients: three-point middle coefficient is sign-flipped", false, run_c09},
    {"c10", "equal-eigenvalue run conserves F_i to 1e-8 and halving cuts the error 12x+", true, run_c10},
    {"c11", "cube-root law holds; the printed straight-line/log invariants do not", false, run_c11},
    {"c12", "grouping probe: two- and three-point pass, hyperelliptic-4 probe reports", true, run_c12},
};

} // namespace

int main(int argc, char** argv) {
    const char* only = argc > 1 ? argv[1] : nullptr;
    if (only && std::strcmp(only, "--list") == 0) {
        for (const Criterion& c : kCriteria) std::printf("%s  %s\n", c.id, c.what);
        return 0;
    }
    int unexpected = 0, passed = 0, documented = 0;
    bool matched = false;
    for (const Criterion& c : kCriteria) {
        if (only && std::strcmp(only, c.id) != 0) continue;
        matched = true;
        const Outcome out = c.run();
        const bool as_documented = out.pass == c.expect_pass;
        if (out.pass) {
            ++passed;
            std::printf("%s %s  %s\n", c.id, c.expect_pass ? "PASS" : "PASS (unexpected: documented as failing)",
                        c.what);
        } else {
            if (as_documented) ++documented;
            std::printf("%s %s  %s\n", c.id, c.expect_pass ? "FAIL" : "FAIL (documented)", c.what);
        }
        if (!as_documented) ++unexpected;
        for (const std::string& note : out.notes) std::printf("      %s\n", note.c_str());
    }
    if (!matched) {
        std::fprintf(stderr, "unknown criterion id %s (try --list)\n", only);
        return 2;
    }
    if (!only)
        std::printf("summary: %d pass, %d fail as documented, %d unexpected\n", passed, documented, unexpected);
    return unexpected == 0 ? 0 : 1;
}
