#pragma once

// Exact expectations over the beta-Hermite and beta-Laguerre tridiagonal
// models as polynomials in s = beta/2 (and the Laguerre parameter a).
//
// The characteristic polynomial is expanded through the three-term
// recurrence with the raw matrix entries as formal variables. Because the
// entries are independent, the expectation of each monomial factorizes into
// a product of single-entry moments: Gaussian moments (2j-1)!! and chi
// moments, which are rising factorials in s.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "betatrix/closed_forms.hpp"
#include "betatrix/error.hpp"
#include "betatrix/rational.hpp"

namespace betatrix {

/// Exact polynomial in s = beta/2 and a with rational coefficients.
class BetaPoly {
public:
    /// (power of s, power of a)
    using Key = std::pair<unsigned, unsigned>;

    BetaPoly() = default;

    static BetaPoly constant(const Rational& c) {
        BetaPoly p;
        p.add_term({0, 0}, c);
        return p;
    }
    static BetaPoly s() { return monomial(1, 0); }
    static BetaPoly a() { return monomial(0, 1); }
    static BetaPoly monomial(unsigned s_pow, unsigned a_pow, const Rational& c = Rational(1)) {
        BetaPoly p;
        p.add_term({s_pow, a_pow}, c);
        return p;
    }

    const std::map<Key, Rational>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    Rational coefficient(unsigned s_pow, unsigned a_pow = 0) const {
        const auto it = terms_.find({s_pow, a_pow});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(Key k, const Rational& c) {
        if (c == 0)
            return;
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    BetaPoly& operator+=(const BetaPoly& o) {
        for (const auto& [k, c] : o.terms_)
            add_term(k, c);
        return *this;
    }
    BetaPoly& operator-=(const BetaPoly& o) {
        for (const auto& [k, c] : o.terms_)
            add_term(k, -c);
        return *this;
    }
    BetaPoly& operator*=(const Rational& c) {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, v] : terms_)
            v *= c;
        return *this;
    }

    friend BetaPoly operator+(BetaPoly l, const BetaPoly& r) { return l += r; }
    friend BetaPoly operator-(BetaPoly l, const BetaPoly& r) { return l -= r; }
    friend BetaPoly operator*(BetaPoly l, const Rational& c) { return l *= c; }
    friend BetaPoly operator*(const BetaPoly& l, const BetaPoly& r) {
        BetaPoly out;
        for (const auto& [kl, cl] : l.terms_)
            for (const auto& [kr, cr] : r.terms_)
                out.add_term({kl.first + kr.first, kl.second + kr.second}, cl * cr);
        return out;
    }
    friend bool operator==(const BetaPoly& l, const BetaPoly& r) { return l.terms_ == r.terms_; }

    unsigned degree_s() const {
        unsigned d = 0;
        for (const auto& [k, c] : terms_)
            d = std::max(d, k.first);
        return d;
    }
    unsigned degree_a() const {
        unsigned d = 0;
        for (const auto& [k, c] : terms_)
            d = std::max(d, k.second);
        return d;
    }

    bool has_integer_coefficients() const {
        return std::all_of(terms_.begin(), terms_.end(),
                           [](const auto& t) { return denominator(t.second) == 1; });
    }

    double evaluate(double s_val, double a_val = 0.0) const {
        double out = 0.0;
        for (const auto& [k, c] : terms_)
            out += to_double(c) * std::pow(s_val, k.first) * std::pow(a_val, k.second);
        return out;
    }

    Rational evaluate_exact(const Rational& s_val, const Rational& a_val = Rational(0)) const {
        Rational out(0);
        for (const auto& [k, c] : terms_) {
            Rational t = c;
            for (unsigned i = 0; i < k.first; ++i)
                t *= s_val;
            for (unsigned i = 0; i < k.second; ++i)
                t *= a_val;
            out += t;
        }
        return out;
    }

    /// Text form ordered by total degree, then by power of s: "s^2+s+1".
    std::string to_string() const {
        if (terms_.empty())
            return "0";
        std::vector<std::pair<Key, Rational>> ordered(terms_.begin(), terms_.end());
        std::sort(ordered.begin(), ordered.end(), [](const auto& l, const auto& r) {
            const unsigned dl = l.first.first + l.first.second;
            const unsigned dr = r.first.first + r.first.second;
            if (dl != dr)
                return dl > dr;
            return l.first.first > r.first.first;
        });
        std::ostringstream out;
        bool first = true;
        for (const auto& [k, c] : ordered) {
            Rational mag = c < 0 ? Rational(-c) : c;
            if (c < 0)
                out << '-';
            else if (!first)
                out << '+';
            first = false;
            std::vector<std::string> factors;
            if (mag != 1 || (k.first == 0 && k.second == 0))
                factors.push_back(mag.str());
            if (k.first == 1)
                factors.emplace_back("s");
            else if (k.first > 1)
                factors.push_back("s^" + std::to_string(k.first));
            if (k.second == 1)
                factors.emplace_back("a");
            else if (k.second > 1)
                factors.push_back("a^" + std::to_string(k.second));
            for (std::size_t i = 0; i < factors.size(); ++i)
                out << (i ? "*" : "") << factors[i];
        }
        return out.str();
    }

private:
    std::map<Key, Rational> terms_;
};

/// A single-entry moment was requested at an odd power of a chi variable.
class OddMomentError : public Error {
public:
    using Error::Error;
};

/// Which random entry a moment refers to. `index` fixes its law:
///   gaussian              N(0,1) (index unused)
///   hermite_subdiagonal   chi_{index*beta} / sqrt(2)
///   laguerre_diagonal     chi_{2a - index*beta}
///   laguerre_subdiagonal  chi_{index*beta}
enum class EntryKind { gaussian, hermite_subdiagonal, laguerre_diagonal, laguerre_subdiagonal };

struct EntryMoment {
    EntryKind kind = EntryKind::gaussian;
    unsigned index = 0;
    unsigned power = 0;
    BetaPoly value;
};

/// Exact E[entry^power] as a polynomial in s (and a).
inline BetaPoly entry_moment(EntryKind kind, unsigned index, unsigned power) {
    if (kind == EntryKind::gaussian) {
        if (power % 2 == 1)
            return BetaPoly{};
        BigInt dfact = 1;
        for (unsigned j = 1; j < power; j += 2)
            dfact *= j;
        return BetaPoly::constant(Rational(dfact));
    }
    if (power % 2 == 1)
        throw OddMomentError("odd moment of a chi entry requested (power " + std::to_string(power) + ")");
    const unsigned half = power / 2;
    BetaPoly out = BetaPoly::constant(Rational(1));
    for (unsigned t = 0; t < half; ++t) {
        BetaPoly factor;
        switch (kind) {
        case EntryKind::hermite_subdiagonal:  // (index*s + t)
            factor = BetaPoly::monomial(1, 0, Rational(index)) + BetaPoly::constant(Rational(t));
            break;
        case EntryKind::laguerre_diagonal:  // 2 (a - index*s + t)
            factor = BetaPoly::monomial(0, 1, Rational(2)) - BetaPoly::monomial(1, 0, Rational(2 * index)) +
                     BetaPoly::constant(Rational(2 * t));
            break;
        case EntryKind::laguerre_subdiagonal:  // 2 (index*s + t)
            factor = BetaPoly::monomial(1, 0, Rational(2 * index)) + BetaPoly::constant(Rational(2 * t));
            break;
        case EntryKind::gaussian:
            break;
        }
        out = out * factor;
    }
    return out;
}

struct ElementarySymmetric {
    unsigned i = 0;
};
struct DeterminantPower {
    unsigned k = 1;
};
struct CharacteristicPolynomial {};

/// Ensemble (Hermite or Laguerre) and size, plus what to take the
/// expectation of.
struct MomentQuery {
    EnsembleKind ensemble = EnsembleKind::hermite;
    std::size_t size = 1;
    std::variant<ElementarySymmetric, DeterminantPower, CharacteristicPolynomial> target;
};

/// E[det(y I - S)] as a monic polynomial in y; coefficients[k] multiplies y^k.
struct ExpectedCharPoly {
    std::size_t degree = 0;
    std::vector<BetaPoly> coefficients;

    std::string to_string() const {
        std::ostringstream out;
        bool first = true;
        for (std::size_t k = degree + 1; k-- > 0;) {
            const BetaPoly& c = coefficients[k];
            if (c.is_zero())
                continue;
            std::string cs = c.to_string();
            const bool single = c.terms().size() == 1;
            std::string yterm = k == 0 ? "" : (k == 1 ? "y" : "y^" + std::to_string(k));
            if (k == 0) {
                if (!first && cs.front() != '-')
                    out << '+';
                out << cs;
            } else if (cs == "1") {
                out << (first ? "" : "+") << yterm;
            } else if (cs == "-1") {
                out << '-' << yterm;
            } else if (single) {
                if (!first && cs.front() != '-')
                    out << '+';
                out << cs << '*' << yterm;
            } else {
                out << (first ? "" : "+") << '(' << cs << ")*" << yterm;
            }
            first = false;
        }
        return first ? "0" : out.str();
    }
};

inline constexpr std::size_t kDefaultMonomialCap = 10'000'000;

namespace detail {

using Exponents = std::vector<std::uint16_t>;

struct ExponentsHash {
    std::size_t operator()(const Exponents& e) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (auto v : e)
            h = (h ^ v) * 1099511628211ull;
        return h;
    }
};

/// Tracks the running number of monomial products formed during expansion.
struct ExpansionBudget {
    std::size_t cap = kDefaultMonomialCap;
    std::size_t used = 0;

    void charge(std::size_t n) {
        used += n;
        if (used > cap)
            throw ResourceError("symbolic expansion exceeded the monomial cap (" + std::to_string(used) +
                                    " expanded monomials > cap " + std::to_string(cap) + ")",
                                used);
    }
};

/// Polynomial with integer coefficients in the formal matrix-entry variables.
class EntryPoly {
public:
    using Map = std::unordered_map<Exponents, BigInt, ExponentsHash>;

    explicit EntryPoly(std::size_t nvars) : nvars_(nvars) {}

    static EntryPoly constant(std::size_t nvars, const BigInt& c) {
        EntryPoly p(nvars);
        p.add(Exponents(nvars, 0), c);
        return p;
    }
    static EntryPoly variable(std::size_t nvars, std::size_t v, std::uint16_t power = 1) {
        Exponents e(nvars, 0);
        e[v] = power;
        EntryPoly p(nvars);
        p.add(e, 1);
        return p;
    }

    const Map& terms() const noexcept { return terms_; }
    std::size_t nvars() const noexcept { return nvars_; }

    void add(const Exponents& e, const BigInt& c) {
        if (c == 0)
            return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    void add_scaled(const EntryPoly& o, const BigInt& c) {
        for (const auto& [e, v] : o.terms_)
            add(e, v * c);
    }

    EntryPoly times(const EntryPoly& o, ExpansionBudget& budget) const {
        budget.charge(terms_.size() * o.terms_.size());
        EntryPoly out(nvars_);
        Exponents e(nvars_);
        for (const auto& [el, cl] : terms_) {
            for (const auto& [er, cr] : o.terms_) {
                for (std::size_t i = 0; i < nvars_; ++i)
                    e[i] = static_cast<std::uint16_t>(el[i] + er[i]);
                out.add(e, cl * cr);
            }
        }
        return out;
    }

private:
    std::size_t nvars_;
    Map terms_;
};

/// Formal entries of one tridiagonal model and the law of each variable.
struct FormalModel {
    std::size_t n = 0;
    std::size_t nvars = 0;
    std::vector<EntryPoly> diag;        // a_i as polynomials
    std::vector<EntryPoly> subdiag_sq;  // b_i^2 as polynomials
    std::vector<EntryKind> var_kind;
    std::vector<unsigned> var_index;
};

/// Hermite: variables g_0..g_{n-1} (diagonal), b_0..b_{n-2} (subdiagonal,
/// storage order; b_i ~ chi_{(n-1-i) beta}/sqrt 2).
inline FormalModel hermite_model(std::size_t n) {
    FormalModel f;
    f.n = n;
    f.nvars = 2 * n - 1;
    for (std::size_t i = 0; i < n; ++i) {
        f.diag.push_back(EntryPoly::variable(f.nvars, i));
        f.var_kind.push_back(EntryKind::gaussian);
        f.var_index.push_back(0);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        f.subdiag_sq.push_back(EntryPoly::variable(f.nvars, n + i, 2));
        f.var_kind.push_back(EntryKind::hermite_subdiagonal);
        f.var_index.push_back(static_cast<unsigned>(n - 1 - i));
    }
    return f;
}

/// Laguerre T = B B^T: variables x_0..x_{m-1} (B diagonal, x_i ~ chi_{2a - i beta})
/// and y_0..y_{m-2} (B subdiagonal, y_i ~ chi_{(m-1-i) beta});
/// a_0 = x_0^2, a_i = x_i^2 + y_{i-1}^2, b_i^2 = y_i^2 x_i^2.
inline FormalModel laguerre_model(std::size_t m) {
    FormalModel f;
    f.n = m;
    f.nvars = 2 * m - 1;
    for (std::size_t i = 0; i < m; ++i) {
        f.var_kind.push_back(EntryKind::laguerre_diagonal);
        f.var_index.push_back(static_cast<unsigned>(i));
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
        f.var_kind.push_back(EntryKind::laguerre_subdiagonal);
        f.var_index.push_back(static_cast<unsigned>(m - 1 - i));
    }
    for (std::size_t i = 0; i < m; ++i) {
        EntryPoly a = EntryPoly::variable(f.nvars, i, 2);
        if (i > 0)
            a.add_scaled(EntryPoly::variable(f.nvars, m + i - 1, 2), 1);
        f.diag.push_back(std::move(a));
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
        Exponents e(f.nvars, 0);
        e[i] = 2;
        e[m + i] = 2;
        EntryPoly b(f.nvars);
        b.add(e, 1);
        f.subdiag_sq.push_back(std::move(b));
    }
    return f;
}

inline FormalModel formal_model(EnsembleKind kind, std::size_t n) {
    if (n < 1)
        throw ParameterError("moment query needs size >= 1");
    switch (kind) {
    case EnsembleKind::hermite:
        return hermite_model(n);
    case EnsembleKind::laguerre:
        return laguerre_model(n);
    case EnsembleKind::jacobi:
        break;
    }
    throw ParameterError("symbolic moments exist only for the Hermite and Laguerre models");
}

/// det(y I - T) through P_k = (y - a_k) P_{k-1} - b_{k-1}^2 P_{k-2}
/// (lower-right minors); result[k] is the coefficient of y^k.
inline std::vector<EntryPoly> formal_charpoly(const FormalModel& f, ExpansionBudget& budget) {
    const std::size_t n = f.n;
    using YPoly = std::vector<EntryPoly>;
    YPoly p2;  // P_{k-2}
    YPoly p1{EntryPoly::constant(f.nvars, 1)};
    for (std::size_t k = 1; k <= n; ++k) {
        YPoly next(k + 1, EntryPoly(f.nvars));
        const EntryPoly& ak = f.diag[n - k];
        for (std::size_t d = 0; d < p1.size(); ++d) {
            next[d + 1].add_scaled(p1[d], 1);
            next[d].add_scaled(ak.times(p1[d], budget), -1);
        }
        if (k >= 2) {
            const EntryPoly& bb = f.subdiag_sq[n - k];
            for (std::size_t d = 0; d < p2.size(); ++d)
                next[d].add_scaled(bb.times(p2[d], budget), -1);
        }
        p2 = std::move(p1);
        p1 = std::move(next);
    }
    return p1;
}

/// E[poly] by independence; asserts every chi variable occurs at an even power.
class MomentSubstitution {
public:
    explicit MomentSubstitution(const FormalModel& f) : model_(f) {}

    BetaPoly expect(const EntryPoly& poly) {
        BetaPoly out;
        for (const auto& [e, c] : poly.terms()) {
            BetaPoly term = BetaPoly::constant(Rational(c));
            bool zero = false;
            for (std::size_t v = 0; v < e.size() && !zero; ++v) {
                if (e[v] == 0)
                    continue;
                if (model_.var_kind[v] != EntryKind::gaussian && e[v] % 2 != 0)
                    throw std::logic_error("chi variable at odd power in the expansion");
                const BetaPoly& mom = moment(v, e[v]);
                if (mom.is_zero())
                    zero = true;
                else
                    term = term * mom;
            }
            if (!zero)
                out += term;
        }
        return out;
    }

private:
    const BetaPoly& moment(std::size_t v, unsigned power) {
        const auto key = std::make_pair(v, power);
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(key, entry_moment(model_.var_kind[v], model_.var_index[v], power)).first;
        return it->second;
    }

    const FormalModel& model_;
    std::map<std::pair<std::size_t, unsigned>, BetaPoly> cache_;
};

} // namespace detail

/// E[e_i(lambda)] by symbolic expansion of the characteristic polynomial.
inline BetaPoly expected_elementary_symmetric(const MomentQuery& q, std::size_t cap = kDefaultMonomialCap) {
    const auto* target = std::get_if<ElementarySymmetric>(&q.target);
    if (!target)
        throw ParameterError("expected_elementary_symmetric needs an elementary-symmetric target");
    if (target->i > q.size)
        throw ParameterError("elementary symmetric index exceeds the matrix size");
    const auto model = detail::formal_model(q.ensemble, q.size);
    detail::ExpansionBudget budget{cap, 0};
    const auto cp = detail::formal_charpoly(model, budget);
    detail::MomentSubstitution sub(model);
    // det(yI - S) = sum_i (-1)^i e_i y^{n-i}
    BetaPoly out = sub.expect(cp[q.size - target->i]);
    if (target->i % 2 == 1)
        out *= Rational(-1);
    if (out.degree_s() > target->i)
        throw std::logic_error("E[e_i] exceeds degree i in s");
    return out;
}

/// E[det(S)^k]. For Hermite the result must have integer coefficients in s.
inline BetaPoly det_moment(const MomentQuery& q, std::size_t cap = kDefaultMonomialCap) {
    const auto* target = std::get_if<DeterminantPower>(&q.target);
    if (!target)
        throw ParameterError("det_moment needs a determinant-power target");
    const auto model = detail::formal_model(q.ensemble, q.size);
    detail::ExpansionBudget budget{cap, 0};
    auto cp = detail::formal_charpoly(model, budget);
    // det(S) = (-1)^n P_n(0)
    detail::EntryPoly det = cp[0];
    if (q.size % 2 == 1) {
        detail::EntryPoly neg(model.nvars);
        neg.add_scaled(det, -1);
        det = std::move(neg);
    }
    detail::EntryPoly power = detail::EntryPoly::constant(model.nvars, 1);
    for (unsigned j = 0; j < target->k; ++j)
        power = power.times(det, budget);
    detail::MomentSubstitution sub(model);
    BetaPoly out = sub.expect(power);
    if (q.ensemble == EnsembleKind::hermite && !out.has_integer_coefficients())
        throw std::logic_error("Hermite determinant moment with non-integer coefficients in s");
    return out;
}

/// E[det(yI - S)] by full symbolic expansion (valid for both models).
inline ExpectedCharPoly expected_charpoly_expanded(EnsembleKind kind, std::size_t size,
                                                   std::size_t cap = kDefaultMonomialCap) {
    const auto model = detail::formal_model(kind, size);
    detail::ExpansionBudget budget{cap, 0};
    const auto cp = detail::formal_charpoly(model, budget);
    detail::MomentSubstitution sub(model);
    ExpectedCharPoly out;
    out.degree = size;
    for (const auto& c : cp)
        out.coefficients.push_back(sub.expect(c));
    return out;
}

/// E[det(yI - S)]. Hermite uses the linear recurrence
/// E[P_k] = y E[P_{k-1}] - s (k-1) E[P_{k-2}], valid because the step-k
/// entries are independent of P_{k-1} and P_{k-2}. Laguerre entries share
/// chi variables across steps, so the full expansion is used there.
inline ExpectedCharPoly expected_charpoly(EnsembleKind kind, std::size_t size,
                                          std::size_t cap = kDefaultMonomialCap) {
    if (kind != EnsembleKind::hermite)
        return expected_charpoly_expanded(kind, size, cap);
    if (size < 1)
        throw ParameterError("moment query needs size >= 1");
    std::vector<BetaPoly> p2;
    std::vector<BetaPoly> p1{BetaPoly::constant(Rational(1))};
    for (std::size_t k = 1; k <= size; ++k) {
        std::vector<BetaPoly> next(k + 1);
        for (std::size_t d = 0; d < p1.size(); ++d)
            next[d + 1] += p1[d];
        const BetaPoly step = BetaPoly::monomial(1, 0, Rational(k - 1));
        for (std::size_t d = 0; d < p2.size(); ++d)
            next[d] -= step * p2[d];
        p2 = std::move(p1);
        p1 = std::move(next);
    }
    return {size, std::move(p1)};
}

} // namespace betatrix
