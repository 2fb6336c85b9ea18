#pragma once

#include "mtn/common.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace mtn {

// Weight and Schreier-level sequences (m_j), (n_j) together with the N1/N2
// split of weight indices. Strict mode derives the minimal sequences obeying
// the growth rules; toy mode takes user lists and records every violated
// growth condition instead of hiding it.
struct ParameterSystem {
    std::vector<BigInt> m;
    std::vector<std::int64_t> n;
    bool strict_mode = false;
    std::vector<std::string> violations;

    // default split: N1 = odd indices, N2 = even indices >= 2
    bool in_N1(std::int64_t j) const { return j >= 1 && j % 2 == 1; }
    bool in_N2(std::int64_t j) const { return j >= 2 && j % 2 == 0; }

    std::size_t levels() const { return m.size(); }

    bool has_index(std::int64_t idx) const {
        return idx >= 0 && idx < static_cast<std::int64_t>(m.size());
    }

    const BigInt& m_at(std::int64_t idx) const {
        if (!has_index(idx))
            throw std::out_of_range("parameter list too short: m_" + std::to_string(idx));
        return m[static_cast<std::size_t>(idx)];
    }

    std::int64_t n_at(std::int64_t idx) const {
        if (idx < 0 || idx >= static_cast<std::int64_t>(n.size()))
            throw std::out_of_range("parameter list too short: n_" + std::to_string(idx));
        return n[static_cast<std::size_t>(idx)];
    }

    double m_double(std::int64_t idx) const { return to_double(m_at(idx)); }

    // ell_j = 3 log2(m_j) + 1
    double ell(std::int64_t idx) const { return 3.0 * log2_big(m_at(idx)) + 1.0; }

    bool strict_growth() const { return violations.empty(); }
};

// Minimal strict system: m_0 = m_1 = 2, m_{j+1} = m_j^3, n_0 = 1 and n_j the
// least integer above ell_j (n_{j-1} + 1).
inline ParameterSystem build_params_strict(std::size_t levels) {
    if (levels < 2) throw std::invalid_argument("build_params: need at least 2 levels");
    ParameterSystem P;
    P.strict_mode = true;
    P.m = {BigInt(2), BigInt(2)};
    while (P.m.size() < levels) P.m.push_back(P.m.back() * P.m.back() * P.m.back());
    P.n = {1};
    for (std::size_t j = 1; j < levels; ++j) {
        const double lj = P.ell(static_cast<std::int64_t>(j));
        const double lhs = lj * static_cast<double>(P.n.back() + 1);
        P.n.push_back(static_cast<std::int64_t>(std::floor(lhs)) + 1);
    }
    return P;
}

inline ParameterSystem build_params_toy(std::vector<BigInt> m, std::vector<std::int64_t> n) {
    if (m.size() < 3 || n.size() != m.size())
        throw std::invalid_argument("build_params: toy lists need equal length >= 3");
    for (std::size_t j = 0; j < m.size(); ++j) {
        if (m[j] < 2)
            throw std::invalid_argument("build_params: weights must be >= 2 (m_" +
                                        std::to_string(j) + ")");
        if (j > 0 && m[j] < m[j - 1])
            throw std::invalid_argument("build_params: m must be nondecreasing");
        if (n[j] < 1)
            throw std::invalid_argument("build_params: levels must be >= 1 (n_" +
                                        std::to_string(j) + ")");
        if (j > 0 && n[j] < n[j - 1])
            throw std::invalid_argument("build_params: n must be nondecreasing");
    }
    ParameterSystem P;
    P.m = std::move(m);
    P.n = std::move(n);
    if (P.m[0] != 2 || P.m[1] != 2) P.violations.push_back("m_0 = m_1 = 2 fails");
    if (P.n[0] != 1) P.violations.push_back("n_0 = 1 fails");
    for (std::size_t j = 1; j + 1 < P.m.size(); ++j) {
        if (P.m[j + 1] < P.m[j] * P.m[j] * P.m[j])
            P.violations.push_back("m_" + std::to_string(j + 1) + " >= m_" + std::to_string(j) +
                                   "^3 fails");
    }
    for (std::size_t j = 1; j < P.n.size(); ++j) {
        const double lhs = P.ell(static_cast<std::int64_t>(j)) *
                           static_cast<double>(P.n[j - 1] + 1);
        if (!(static_cast<double>(P.n[j]) > lhs))
            P.violations.push_back("n_" + std::to_string(j) + " > ell_" + std::to_string(j) +
                                   "(n_" + std::to_string(j - 1) + "+1) fails");
    }
    return P;
}

// convenience: constant-weight toy system of a given length
inline ParameterSystem toy_params_flat(std::size_t levels, std::int64_t m_val = 2,
                                       std::int64_t n_val = 1) {
    std::vector<BigInt> m(levels, BigInt(m_val));
    std::vector<std::int64_t> n(levels, n_val);
    n[0] = 1;
    return build_params_toy(std::move(m), std::move(n));
}

} // namespace mtn
