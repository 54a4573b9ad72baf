#pragma once

// Definition-level enumeration oracles for the value operators. These
// deliberately avoid the library's set machinery: membership is a
// linear scan, results are built element by element from the
// quantifier definitions, and relation facts are double loops.

#include <algorithm>
#include <random>
#include <vector>

#include "ebforge/value.hpp"

namespace ebtest::oracle {

using ebforge::Value;

inline bool has(const std::vector<Value>& xs, const Value& x) {
    for (const Value& e : xs)
        if (e == x) return true;
    return false;
}

inline std::vector<Value> dedup(std::vector<Value> xs) {
    std::vector<Value> out;
    for (const Value& e : xs)
        if (!has(out, e)) out.push_back(e);
    return out;
}

inline Value mkset(const std::vector<Value>& xs) { return Value::set(xs); }

inline Value set_union(const Value& a, const Value& b) {
    std::vector<Value> out = a.elems();
    for (const Value& e : b.elems())
        if (!has(out, e)) out.push_back(e);
    return mkset(out);
}

inline Value set_inter(const Value& a, const Value& b) {
    std::vector<Value> out;
    for (const Value& e : a.elems())
        if (has(b.elems(), e)) out.push_back(e);
    return mkset(out);
}

inline Value set_diff(const Value& a, const Value& b) {
    std::vector<Value> out;
    for (const Value& e : a.elems())
        if (!has(b.elems(), e)) out.push_back(e);
    return mkset(out);
}

inline bool subset(const Value& a, const Value& b) {
    for (const Value& e : a.elems())
        if (!has(b.elems(), e)) return false;
    return true;
}

inline bool proper_subset(const Value& a, const Value& b) {
    return ebtest::oracle::subset(a, b) && !ebtest::oracle::subset(b, a);
}

inline Value pow_set(const Value& s) {
    std::vector<Value> subsets{Value::set({})};
    for (const Value& e : s.elems()) {
        std::vector<Value> grown = subsets;
        for (const Value& sub : subsets) {
            std::vector<Value> bigger = sub.elems();
            bigger.push_back(e);
            grown.push_back(mkset(bigger));
        }
        subsets = dedup(grown);
    }
    return mkset(subsets);
}

inline Value cross(const Value& a, const Value& b) {
    std::vector<Value> out;
    for (const Value& x : a.elems())
        for (const Value& y : b.elems()) out.push_back(Value::pair(x, y));
    return mkset(out);
}

inline Value domain(const Value& r) {
    std::vector<Value> out;
    for (const Value& p : r.elems())
        if (!has(out, p.first())) out.push_back(p.first());
    return mkset(out);
}

inline Value range(const Value& r) {
    std::vector<Value> out;
    for (const Value& p : r.elems())
        if (!has(out, p.second())) out.push_back(p.second());
    return mkset(out);
}

inline Value inverse(const Value& r) {
    std::vector<Value> out;
    for (const Value& p : r.elems()) out.push_back(Value::pair(p.second(), p.first()));
    return mkset(out);
}

inline Value identity_on(const Value& s) {
    std::vector<Value> out;
    for (const Value& e : s.elems()) out.push_back(Value::pair(e, e));
    return mkset(out);
}

inline Value image(const Value& r, const Value& s) {
    std::vector<Value> out;
    for (const Value& p : r.elems())
        if (has(s.elems(), p.first()) && !has(out, p.second())) out.push_back(p.second());
    return mkset(out);
}

inline Value dom_restrict(const Value& s, const Value& r) {
    std::vector<Value> out;
    for (const Value& p : r.elems())
        if (has(s.elems(), p.first())) out.push_back(p);
    return mkset(out);
}

inline Value ran_restrict(const Value& s, const Value& r) {
    std::vector<Value> out;
    for (const Value& p : r.elems())
        if (has(s.elems(), p.second())) out.push_back(p);
    return mkset(out);
}

inline Value dom_subtract(const Value& s, const Value& r) {
    std::vector<Value> out;
    for (const Value& p : r.elems())
        if (!has(s.elems(), p.first())) out.push_back(p);
    return mkset(out);
}

inline Value ran_subtract(const Value& s, const Value& r) {
    std::vector<Value> out;
    for (const Value& p : r.elems())
        if (!has(s.elems(), p.second())) out.push_back(p);
    return mkset(out);
}

inline Value fcomp(const Value& f, const Value& g) {
    std::vector<Value> out;
    for (const Value& p : f.elems())
        for (const Value& q : g.elems())
            if (p.second() == q.first()) {
                Value pr = Value::pair(p.first(), q.second());
                if (!has(out, pr)) out.push_back(pr);
            }
    return mkset(out);
}

inline Value bcomp(const Value& f, const Value& g) { return ebtest::oracle::fcomp(g, f); }

inline Value override_rel(const Value& f, const Value& g) {
    std::vector<Value> out = g.elems();
    const Value gdom = domain(g);
    for (const Value& p : f.elems())
        if (!has(gdom.elems(), p.first())) out.push_back(p);
    return mkset(out);
}

inline Value dprod(const Value& f, const Value& g) {
    std::vector<Value> out;
    for (const Value& p : f.elems())
        for (const Value& q : g.elems())
            if (p.first() == q.first())
                out.push_back(Value::pair(p.first(), Value::pair(p.second(), q.second())));
    return mkset(out);
}

inline Value pprod(const Value& f, const Value& g) {
    std::vector<Value> out;
    for (const Value& p : f.elems())
        for (const Value& q : g.elems())
            out.push_back(
                Value::pair(Value::pair(p.first(), q.first()),
                            Value::pair(p.second(), q.second())));
    return mkset(out);
}

inline Value gen_union(const Value& s) {
    std::vector<Value> out;
    for (const Value& e : s.elems())
        for (const Value& x : e.elems())
            if (!has(out, x)) out.push_back(x);
    return mkset(out);
}

inline Value gen_inter(const Value& s) {
    std::vector<Value> out;
    for (const Value& x : s.elems().front().elems()) {
        bool in_all = true;
        for (const Value& e : s.elems())
            if (!has(e.elems(), x)) in_all = false;
        if (in_all) out.push_back(x);
    }
    return mkset(out);
}

// Quantifier definitions of the relation facts.
inline bool functional(const Value& r) {
    for (const Value& p : r.elems())
        for (const Value& q : r.elems())
            if (p.first() == q.first() && !(p.second() == q.second())) return false;
    return true;
}

inline bool injective_function(const Value& r) {
    if (!functional(r)) return false;
    for (const Value& p : r.elems())
        for (const Value& q : r.elems())
            if (p.second() == q.second() && !(p.first() == q.first())) return false;
    return true;
}

inline bool total_on(const Value& r, const Value& d) {
    for (const Value& x : d.elems()) {
        bool covered = false;
        for (const Value& p : r.elems())
            if (p.first() == x) covered = true;
        if (!covered) return false;
    }
    for (const Value& p : r.elems())
        if (!has(d.elems(), p.first())) return false;
    return true;
}

inline bool surjective_on(const Value& r, const Value& rng) {
    for (const Value& y : rng.elems()) {
        bool covered = false;
        for (const Value& p : r.elems())
            if (p.second() == y) covered = true;
        if (!covered) return false;
    }
    for (const Value& p : r.elems())
        if (!has(rng.elems(), p.second())) return false;
    return true;
}

inline bool relkind(ebforge::RelKind k, const Value& r, const Value& d, const Value& rng) {
    using ebforge::RelKind;
    const bool dom_sub = ebtest::oracle::subset(domain(r), d);
    const bool ran_sub = ebtest::oracle::subset(range(r), rng);
    const bool fn = functional(r);
    const bool inj = injective_function(r);
    const bool tot = total_on(r, d);
    const bool sur = surjective_on(r, rng);
    switch (k) {
    case RelKind::Rel: return dom_sub && ran_sub;
    case RelKind::Trel: return tot && ran_sub;
    case RelKind::Srel: return dom_sub && sur;
    case RelKind::Strel: return tot && sur;
    case RelKind::Pfun: return fn && dom_sub && ran_sub;
    case RelKind::Tfun: return fn && tot && ran_sub;
    case RelKind::Pinj: return inj && dom_sub && ran_sub;
    case RelKind::Tinj: return inj && tot && ran_sub;
    case RelKind::Psur: return fn && dom_sub && sur;
    case RelKind::Tsur: return fn && tot && sur;
    case RelKind::Tbij: return inj && tot && sur;
    }
    return false;
}

// Seeded generators over small universes.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    std::int64_t small_int(std::int64_t lo = 0, std::int64_t hi = 4) {
        return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    Value int_set(std::size_t max_card = 5) {
        std::vector<Value> elems;
        const std::size_t n = rng() % (max_card + 1);
        for (std::size_t i = 0; i < n; ++i) elems.push_back(Value::integer(small_int()));
        return Value::set(elems);
    }

    Value relation(std::size_t max_card = 5) {
        std::vector<Value> elems;
        const std::size_t n = rng() % (max_card + 1);
        for (std::size_t i = 0; i < n; ++i)
            elems.push_back(
                Value::pair(Value::integer(small_int(0, 2)), Value::integer(small_int(0, 2))));
        return Value::set(elems);
    }

    Value set_of_sets(std::size_t max_card = 4) {
        std::vector<Value> elems;
        const std::size_t n = rng() % (max_card + 1);
        for (std::size_t i = 0; i < n; ++i) elems.push_back(int_set(3));
        return Value::set(elems);
    }
};

} // namespace ebtest::oracle
