#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "hitchin/errors.hpp"

namespace hitchin {

// Names one dynamical variable of the canonical structure: the point data
// a_s, b_s, kappa_s, the eigenvector components alpha_{row,s}, beta_{row,s},
// and the curve coefficients p_i.  Totally ordered so sparse gradient maps
// have one deterministic layout.
enum class VarKind : std::uint8_t { A = 0, B = 1, Kappa = 2, Alpha = 3, Beta = 4, P = 5 };

struct VarId {
    VarKind kind{VarKind::A};
    std::uint8_t row{0}; // 1 or 2 for alpha/beta, 0 otherwise
    std::uint8_t idx{0}; // point index s (1-based), or i for p_i

    friend constexpr auto operator<=>(const VarId&, const VarId&) = default;
};

constexpr VarId var_a(int s) { return {VarKind::A, 0, static_cast<std::uint8_t>(s)}; }
constexpr VarId var_b(int s) { return {VarKind::B, 0, static_cast<std::uint8_t>(s)}; }
constexpr VarId var_kappa(int s) { return {VarKind::Kappa, 0, static_cast<std::uint8_t>(s)}; }
constexpr VarId var_alpha(int row, int s) { return {VarKind::Alpha, static_cast<std::uint8_t>(row), static_cast<std::uint8_t>(s)}; }
constexpr VarId var_beta(int row, int s) { return {VarKind::Beta, static_cast<std::uint8_t>(row), static_cast<std::uint8_t>(s)}; }
constexpr VarId var_p(int i) { return {VarKind::P, 0, static_cast<std::uint8_t>(i)}; }

inline std::string var_name(VarId v) {
    switch (v.kind) {
        case VarKind::A: return "a" + std::to_string(v.idx);
        case VarKind::B: return "b" + std::to_string(v.idx);
        case VarKind::Kappa: return "kappa" + std::to_string(v.idx);
        case VarKind::Alpha: return "alpha" + std::to_string(v.row) + std::to_string(v.idx);
        case VarKind::Beta: return "beta" + std::to_string(v.row) + std::to_string(v.idx);
        case VarKind::P: return "p" + std::to_string(v.idx);
    }
    return "?";
}

inline VarId var_parse(std::string_view s) {
    auto tail_int = [&](std::size_t from) -> int {
        int value = 0;
        if (from >= s.size()) throw BadInput("variable name '" + std::string(s) + "' lacks an index");
        for (std::size_t i = from; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw BadInput("variable name '" + std::string(s) + "' has a non-numeric index");
            value = value * 10 + (s[i] - '0');
        }
        return value;
    };
    if (s.starts_with("alpha") || s.starts_with("beta")) {
        const bool is_alpha = s.starts_with("alpha");
        const std::size_t base = is_alpha ? 5 : 4;
        const int both = tail_int(base);
        const int row = both / 10, idx = both % 10;
        if (row != 1 && row != 2) throw BadInput("variable name '" + std::string(s) + "' has row outside {1,2}");
        return is_alpha ? var_alpha(row, idx) : var_beta(row, idx);
    }
    if (s.starts_with("kappa")) return var_kappa(tail_int(5));
    if (s.starts_with("a")) return var_a(tail_int(1));
    if (s.starts_with("b")) return var_b(tail_int(1));
    if (s.starts_with("p")) return var_p(tail_int(1));
    throw BadInput("unknown variable name '" + std::string(s) + "'");
}

} // namespace hitchin
