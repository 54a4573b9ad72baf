#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ebforge {

/// Raised by value operations and formula evaluation.
class EvalError : public std::runtime_error {
public:
    enum class Code {
        Type,
        NotInDomain,
        NotFunctionalAt,
        EmptyAggregate,
        BoundExceeded,
        Overflow,
        DivisionByZero,
        NegativeExponent,
        Unbound,
        Unsupported,
    };

    EvalError(Code code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Code code() const { return code_; }

private:
    Code code_;
};

/// An immutable Event-B value: integer, boolean, pair, or finite set.
/// Sets are duplicate-free and kept in a canonical total order, so two
/// equal sets always have the same representation. A relation is a set
/// whose elements are all pairs; there is no separate representation.
class Value {
public:
    enum class Kind : std::uint8_t { Int, Bool, Pair, Set };

    Value(); // Int 0

    static Value integer(std::int64_t v);
    static Value boolean(bool b);
    static Value pair(Value first, Value second);
    static Value set(std::vector<Value> elems); // canonicalizes
    static const Value& empty_set();
    static const Value& truth(bool b);

    Kind kind() const;
    bool is_int() const { return kind() == Kind::Int; }
    bool is_bool() const { return kind() == Kind::Bool; }
    bool is_pair() const { return kind() == Kind::Pair; }
    bool is_set() const { return kind() == Kind::Set; }

    std::int64_t as_int() const;
    bool as_bool() const;
    const Value& first() const;
    const Value& second() const;
    const std::vector<Value>& elems() const;

    /// True for sets all of whose elements are pairs (the empty set included).
    bool is_relation() const;

    std::size_t size() const { return elems().size(); }

    /// Canonical text: 12, TRUE, (1 |-> 2), {1, 2, 3}.
    std::string render() const;

    friend int compare(const Value& a, const Value& b);
    friend bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }
    friend bool operator!=(const Value& a, const Value& b) { return compare(a, b) != 0; }
    friend bool operator<(const Value& a, const Value& b) { return compare(a, b) < 0; }

    struct Rep;

private:
    explicit Value(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
    std::shared_ptr<const Rep> rep_;
};

struct Value::Rep {
    struct PairRep {
        Value first, second;
    };
    std::variant<std::int64_t, bool, PairRep, std::vector<Value>> v;
};

/// Facts about one relation evaluated against a candidate domain/range pair.
/// is_function implies is_relation; is_injective implies is_function.
struct RelationFacts {
    bool is_relation = false;
    bool is_function = false;
    bool is_injective = false;
    bool total_on_domain = false;
    bool surjective_on_range = false;
};

/// The relation/function kinds of the Event-B arrow family.
enum class RelKind : std::uint8_t {
    Rel,   // <->
    Trel,  // <<->
    Srel,  // <->>
    Strel, // <<->>
    Pfun,  // +->
    Tfun,  // -->
    Pinj,  // >+>
    Tinj,  // >->
    Psur,  // +>>
    Tsur,  // ->>
    Tbij,  // >->>
};

const char* relkind_name(RelKind k);

/// Size limits for the finite runtime. pow_max_base bounds the number of
/// elements a powerset argument may have; interval_max_width bounds b-a
/// in a..b; cross_max_size bounds |a|*|b|.
struct ValueLimits {
    std::size_t pow_max_base = 16;
    std::int64_t interval_max_width = 1000000;
    std::size_t cross_max_size = 1000000;
};

// Elementary set operators.
Value set_union(const Value& a, const Value& b);
Value set_inter(const Value& a, const Value& b);
Value set_diff(const Value& a, const Value& b);
bool member(const Value& x, const Value& s);
bool subset(const Value& a, const Value& b);
bool proper_subset(const Value& a, const Value& b);

Value pow_set(const Value& s, const ValueLimits& limits = {});
Value cross(const Value& a, const Value& b, const ValueLimits& limits = {});
Value interval(std::int64_t a, std::int64_t b, const ValueLimits& limits = {});

// Relation operators.
Value rel_domain(const Value& r);
Value rel_range(const Value& r);
Value rel_inverse(const Value& r);
Value identity_on(const Value& s);
Value rel_image(const Value& r, const Value& s);
Value rel_apply(const Value& r, const Value& x);
Value dom_restrict(const Value& s, const Value& r);
Value ran_restrict(const Value& s, const Value& r);
Value dom_subtract(const Value& s, const Value& r);
Value ran_subtract(const Value& s, const Value& r);
Value fcomp(const Value& f, const Value& g);
Value bcomp(const Value& f, const Value& g);
Value override_rel(const Value& f, const Value& g);
Value dprod(const Value& f, const Value& g);
Value pprod(const Value& f, const Value& g);

RelationFacts classify_relation(const Value& r, const Value& dom, const Value& rng);
bool relkind_holds(RelKind kind, const Value& r, const Value& dom, const Value& rng);

// Aggregates.
std::int64_t card(const Value& s);
Value min_of(const Value& s);
Value max_of(const Value& s);
Value gen_union(const Value& s);
Value gen_inter(const Value& s);

// Checked 64-bit arithmetic. Division and mod use floor semantics:
// the quotient rounds toward negative infinity and the remainder
// takes the sign of the divisor.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_sub(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t floor_mod(std::int64_t a, std::int64_t b);
std::int64_t checked_pow(std::int64_t a, std::int64_t b);

} // namespace ebforge
