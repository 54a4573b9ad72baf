#include <doctest.h>

#include "oracles.hpp"

using namespace ebforge;
namespace oracle = ebtest::oracle;

namespace {

Value iset(std::initializer_list<std::int64_t> xs) {
    std::vector<Value> elems;
    for (auto x : xs) elems.push_back(Value::integer(x));
    return Value::set(elems);
}

Value rel(std::initializer_list<std::pair<std::int64_t, std::int64_t>> ps) {
    std::vector<Value> elems;
    for (auto [a, b] : ps) elems.push_back(Value::pair(Value::integer(a), Value::integer(b)));
    return Value::set(elems);
}

} // namespace

TEST_CASE("set operators match the textbook identities") {
    CHECK(set_union(iset({1, 2}), iset({2, 3})) == iset({1, 2, 3}));
    CHECK(set_inter(iset({1, 2, 3}), iset({2, 4})) == iset({2}));
    CHECK(set_diff(iset({1, 2}), iset({1, 2})) == Value::empty_set());
    CHECK(member(Value::integer(2), iset({1, 2})));
    CHECK(subset(iset({1, 3}), iset({1, 2, 3})));
    CHECK_FALSE(proper_subset(iset({1}), iset({1})));
}

TEST_CASE("pow enumerates all subsets") {
    CHECK(pow_set(Value::empty_set()) == Value::set({Value::empty_set()}));
    const Value p = pow_set(iset({1, 2}));
    CHECK(p.size() == 4);
    CHECK(member(iset({1, 2}), p));
    CHECK(member(Value::empty_set(), p));
    // |pow(S)| = 2^|S| up to the bound
    for (std::int64_t n = 0; n <= 10; ++n) {
        std::vector<Value> elems;
        for (std::int64_t i = 0; i < n; ++i) elems.push_back(Value::integer(i));
        CHECK(card(pow_set(Value::set(elems))) == (std::int64_t(1) << n));
    }
    CHECK_THROWS_AS(pow_set(interval(0, 20)), EvalError);
}

TEST_CASE("cross product") {
    CHECK(cross(iset({1}), iset({2, 3})) == rel({{1, 2}, {1, 3}}));
    CHECK(cross(Value::empty_set(), iset({1, 2})) == Value::empty_set());
    CHECK(card(cross(iset({1, 2, 3}), iset({4, 5}))) == 6);
}

TEST_CASE("relation operators") {
    CHECK(rel_inverse(rel({{1, 2}, {3, 4}})) == rel({{2, 1}, {4, 3}}));
    CHECK(rel_domain(rel({{1, 2}, {1, 3}, {2, 4}})) == iset({1, 2}));
    CHECK(identity_on(iset({5, 6})) == rel({{5, 5}, {6, 6}}));
    CHECK(rel_image(rel({{1, 2}, {1, 3}, {2, 4}}), iset({1})) == iset({2, 3}));
    CHECK(rel_image(rel({{1, 2}}), Value::empty_set()) == Value::empty_set());
    CHECK(rel_image(rel({{1, 2}, {2, 5}, {3, 9}}), iset({2, 3})) == iset({5, 9}));
}

TEST_CASE("function application and its failure modes") {
    CHECK(rel_apply(rel({{1, 10}, {2, 20}}), Value::integer(2)) == Value::integer(20));
    CHECK_THROWS_WITH_AS(rel_apply(rel({{1, 10}}), Value::integer(3)),
                         doctest::Contains("3"), EvalError);
    try {
        rel_apply(rel({{1, 10}}), Value::integer(3));
    } catch (const EvalError& e) {
        CHECK(e.code() == EvalError::Code::NotInDomain);
    }
    try {
        rel_apply(rel({{1, 10}, {1, 11}}), Value::integer(1));
    } catch (const EvalError& e) {
        CHECK(e.code() == EvalError::Code::NotFunctionalAt);
    }
}

TEST_CASE("restrictions and combinations") {
    const Value r = rel({{1, 2}, {2, 3}});
    CHECK(dom_restrict(iset({1}), r) == rel({{1, 2}}));
    CHECK(dom_subtract(Value::empty_set(), r) == r);
    CHECK(ran_subtract(iset({3}), r) == rel({{1, 2}}));
    CHECK(override_rel(rel({{1, 10}}), rel({{1, 20}, {2, 5}})) == rel({{1, 20}, {2, 5}}));
    CHECK(fcomp(rel({{1, 2}}), rel({{2, 9}})) == rel({{1, 9}}));
    CHECK(dprod(rel({{1, 2}}), rel({{1, 3}})) ==
          Value::set({Value::pair(Value::integer(1),
                                  Value::pair(Value::integer(2), Value::integer(3)))}));
}

TEST_CASE("classification facts") {
    // total bijection between {1,2} and {2,3}
    const RelationFacts f = classify_relation(rel({{1, 2}, {2, 3}}), iset({1, 2}), iset({2, 3}));
    CHECK(f.is_relation);
    CHECK(f.is_function);
    CHECK(f.is_injective);
    CHECK(f.total_on_domain);
    CHECK(f.surjective_on_range);

    CHECK_FALSE(classify_relation(rel({{1, 2}, {1, 3}}), iset({1}), iset({2, 3})).is_function);

    // partial injection shape: functional, inverse functional, dom/ran contained
    CHECK(relkind_holds(RelKind::Pinj, rel({{1, 5}}), iset({1, 2}), iset({5, 6})));
    CHECK_FALSE(relkind_holds(RelKind::Pinj, rel({{1, 5}, {2, 5}}), iset({1, 2}), iset({5, 6})));
}

TEST_CASE("aggregates") {
    CHECK(min_of(iset({3, 1, 7})) == Value::integer(1));
    CHECK(card(Value::empty_set()) == 0);
    CHECK(gen_union(Value::set({iset({1}), iset({2, 3})})) == iset({1, 2, 3}));
    CHECK_THROWS_AS(min_of(Value::empty_set()), EvalError);
    CHECK_THROWS_AS(gen_inter(Value::empty_set()), EvalError);
}

TEST_CASE("intervals") {
    CHECK(interval(1, 3) == iset({1, 2, 3}));
    CHECK(interval(5, 4) == Value::empty_set());
    CHECK(card(interval(0, 5)) == 6);
    ValueLimits tight;
    tight.interval_max_width = 10;
    CHECK_THROWS_AS(interval(0, 100, tight), EvalError);
}

TEST_CASE("floor division and mod") {
    CHECK(floor_div(6, 2) == 3);
    CHECK(floor_div(7, 2) == 3);
    CHECK(floor_div(-7, 2) == -4);
    CHECK(floor_div(7, -2) == -4);
    CHECK(floor_mod(-7, 2) == 1);  // sign follows the divisor
    CHECK(floor_mod(7, -2) == -1);
    CHECK_THROWS_AS(floor_div(1, 0), EvalError);
    CHECK_THROWS_AS(checked_mul(INT64_MAX, 2), EvalError);
    CHECK(checked_pow(2, 10) == 1024);
    CHECK_THROWS_AS(checked_pow(2, -1), EvalError);
}

TEST_CASE("canonical ordering and rendering") {
    // Int < Bool < Pair < Set; sets ordered by length then lexicographic
    CHECK(compare(Value::integer(3), Value::truth(false)) < 0);
    CHECK(compare(Value::truth(true), Value::pair(Value::integer(0), Value::integer(0))) < 0);
    CHECK(compare(iset({9}), iset({1, 2})) < 0);
    CHECK(Value::integer(12).render() == "12");
    CHECK(Value::truth(true).render() == "TRUE");
    CHECK(Value::pair(Value::integer(1), Value::integer(2)).render() == "(1 |-> 2)");
    CHECK(iset({3, 1, 2}).render() == "{1, 2, 3}");
    CHECK(Value::empty_set().render() == "{}");
    // structurally equal sets have identical representations
    CHECK(Value::set({Value::integer(2), Value::integer(1), Value::integer(2)}).render() ==
          "{1, 2}");
}

TEST_CASE("algebraic properties on random small sets") {
    oracle::Gen gen(42);
    for (int i = 0; i < 2000; ++i) {
        const Value a = gen.int_set();
        const Value b = gen.int_set();
        CHECK(card(set_union(a, b)) == card(a) + card(b) - card(set_inter(a, b)));
        CHECK(subset(set_diff(a, b), a));
        CHECK(set_inter(set_union(a, b), a) == a);
    }
    for (int i = 0; i < 2000; ++i) {
        const Value r = gen.relation();
        const Value s = gen.relation();
        CHECK(rel_inverse(rel_inverse(r)) == r);
        CHECK(rel_domain(rel_inverse(r)) == rel_range(r));
        CHECK(rel_domain(override_rel(r, s)) == set_union(rel_domain(r), rel_domain(s)));
        const Value s1 = gen.int_set(3);
        const Value s2 = gen.int_set(3);
        CHECK(rel_image(r, set_union(s1, s2)) ==
              set_union(rel_image(r, s1), rel_image(r, s2)));
        const Value dom_r = rel_domain(r);
        for (const Value& x : dom_r.elems()) {
            try {
                const Value y = rel_apply(r, x);
                CHECK(member(y, rel_image(r, Value::set({x}))));
            } catch (const EvalError&) {
                // not functional at x; nothing to check
            }
        }
    }
}

TEST_CASE("classification equals the quantifier definitions over a 3x3 universe") {
    // every relation over {0,1,2} x {0,1,2}
    const Value universe = interval(0, 2);
    const Value pairs = cross(universe, universe);
    const Value all = pow_set(pairs);
    const Value d = iset({0, 1});
    const Value rng = iset({1, 2});
    for (const Value& r : all.elems()) {
        const RelationFacts f = classify_relation(r, d, rng);
        CHECK(f.is_function == oracle::functional(r));
        CHECK(f.is_injective == oracle::injective_function(r));
        CHECK(f.total_on_domain == oracle::total_on(r, d));
        CHECK(f.surjective_on_range == oracle::surjective_on(r, rng));
        for (RelKind k :
             {RelKind::Rel, RelKind::Trel, RelKind::Srel, RelKind::Strel, RelKind::Pfun,
              RelKind::Tfun, RelKind::Pinj, RelKind::Tinj, RelKind::Psur, RelKind::Tsur,
              RelKind::Tbij})
            CHECK(relkind_holds(k, r, d, rng) == oracle::relkind(k, r, d, rng));
    }
}

TEST_CASE("operations never mutate their inputs") {
    const Value a = iset({1, 2, 3});
    const Value b = iset({2, 4});
    const Value a_copy = a;
    (void)set_union(a, b);
    (void)set_diff(a, b);
    (void)pow_set(a);
    CHECK(a == a_copy);
    CHECK(a.render() == "{1, 2, 3}");
}
