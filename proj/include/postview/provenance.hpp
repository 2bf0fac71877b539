#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "postview/catalog.hpp"

namespace postview {

using TupleSet = std::set<TupleId>;

/// A product of base-tuple variables, kept sorted (a multiset).
using Monomial = std::vector<TupleId>;

/// Element of the provenance semiring N[X]: a multiset of monomials over
/// base-tuple identifiers. Addition is multiset union, multiplication is
/// pairwise monomial concatenation.
class Polynomial {
public:
    static Polynomial zero() { return {}; }
    static Polynomial one() {
        Polynomial p;
        p.terms_[Monomial{}] = 1;
        return p;
    }
    static Polynomial var(TupleId id) {
        Polynomial p;
        p.terms_[Monomial{std::move(id)}] = 1;
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_one() const { return terms_.size() == 1 && terms_.begin()->first.empty() && terms_.begin()->second == 1; }

    /// Monomial -> multiplicity, canonically ordered.
    const std::map<Monomial, std::uint64_t>& terms() const { return terms_; }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        Polynomial out = a;
        out += b;
        return out;
    }
    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) terms_[m] += c;
        return *this;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial out;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                Monomial m;
                m.reserve(ma.size() + mb.size());
                std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
                out.terms_[std::move(m)] += ca * cb;
            }
        return out;
    }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    /// Set-style union of monomials (multiplicities capped at the larger of
    /// the two). Used for disjunctive predicates, where two true branches
    /// must not duplicate the tuple.
    Polynomial union_with(const Polynomial& o) const {
        Polynomial out = *this;
        for (const auto& [m, c] : o.terms_) {
            auto& slot = out.terms_[m];
            slot = std::max(slot, c);
        }
        return out;
    }

    TupleSet variables() const {
        TupleSet out;
        for (const auto& [m, c] : terms_) out.insert(m.begin(), m.end());
        return out;
    }

    /// Monomials expanded by multiplicity, canonical order.
    std::vector<Monomial> monomials() const {
        std::vector<Monomial> out;
        for (const auto& [m, c] : terms_)
            for (std::uint64_t i = 0; i < c; ++i) out.push_back(m);
        return out;
    }

    /// e152 + 2*e154*s1
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [m, c] : terms_) {
            if (!out.empty()) out += " + ";
            if (c != 1 || m.empty()) out += std::to_string(c);
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (i || c != 1) out += "*";
                out += m[i].to_string();
            }
        }
        return out;
    }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::map<Monomial, std::uint64_t> terms_;
};

/// Why-provenance: minimal witness sets.
using WhySet = std::set<TupleSet>;

/// Keeps only sets with no proper subset in the collection.
inline WhySet minimize(const std::set<TupleSet>& sets) {
    WhySet out;
    for (const auto& s : sets) {
        bool dominated = false;
        for (const auto& t : sets) {
            if (t.size() < s.size() && std::includes(s.begin(), s.end(), t.begin(), t.end())) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.insert(s);
    }
    return out;
}

inline WhySet why_of(const Polynomial& p) {
    std::set<TupleSet> sets;
    for (const auto& [m, c] : p.terms()) sets.insert(TupleSet(m.begin(), m.end()));
    return minimize(sets);
}

}  // namespace postview
