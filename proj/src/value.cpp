#include "ebforge/value.hpp"

#include <algorithm>
#include <sstream>

namespace ebforge {

namespace {

std::shared_ptr<const Value::Rep> make_rep(Value::Rep rep) {
    return std::make_shared<const Value::Rep>(std::move(rep));
}

const std::shared_ptr<const Value::Rep>& zero_rep() {
    static const auto rep = make_rep(Value::Rep{std::int64_t(0)});
    return rep;
}

[[noreturn]] void type_error(const std::string& what, const Value& got) {
    throw EvalError(EvalError::Code::Type, "type error: expected " + what + ", got " + got.render());
}

void require_set(const Value& v, const char* who) {
    if (!v.is_set())
        throw EvalError(EvalError::Code::Type,
                        std::string("type error: ") + who + " needs a set, got " + v.render());
}

void require_relation(const Value& v, const char* who) {
    require_set(v, who);
    if (!v.is_relation())
        throw EvalError(EvalError::Code::Type,
                        std::string("type error: ") + who + " needs a relation, got " + v.render());
}

} // namespace

Value::Value() : rep_(zero_rep()) {}

Value Value::integer(std::int64_t v) {
    // Small integers dominate the workloads; intern them.
    static constexpr std::int64_t kLo = -64, kHi = 256;
    static const auto interned = [] {
        std::vector<std::shared_ptr<const Rep>> reps;
        for (std::int64_t i = kLo; i <= kHi; ++i) reps.push_back(make_rep(Rep{i}));
        return reps;
    }();
    if (v >= kLo && v <= kHi) return Value(interned[static_cast<std::size_t>(v - kLo)]);
    return Value(make_rep(Rep{v}));
}

Value Value::boolean(bool b) { return truth(b); }

const Value& Value::truth(bool b) {
    static const Value t(make_rep(Rep{true}));
    static const Value f(make_rep(Rep{false}));
    return b ? t : f;
}

Value Value::pair(Value first, Value second) {
    return Value(make_rep(Rep{Rep::PairRep{std::move(first), std::move(second)}}));
}

Value Value::set(std::vector<Value> elems) {
    std::sort(elems.begin(), elems.end(),
              [](const Value& a, const Value& b) { return compare(a, b) < 0; });
    elems.erase(std::unique(elems.begin(), elems.end(),
                            [](const Value& a, const Value& b) { return compare(a, b) == 0; }),
                elems.end());
    return Value(make_rep(Rep{std::move(elems)}));
}

const Value& Value::empty_set() {
    static const Value e = Value::set({});
    return e;
}

Value::Kind Value::kind() const { return static_cast<Kind>(rep_->v.index()); }

std::int64_t Value::as_int() const {
    if (!is_int()) type_error("an integer", *this);
    return std::get<std::int64_t>(rep_->v);
}

bool Value::as_bool() const {
    if (!is_bool()) type_error("a boolean", *this);
    return std::get<bool>(rep_->v);
}

const Value& Value::first() const {
    if (!is_pair()) type_error("a pair", *this);
    return std::get<Rep::PairRep>(rep_->v).first;
}

const Value& Value::second() const {
    if (!is_pair()) type_error("a pair", *this);
    return std::get<Rep::PairRep>(rep_->v).second;
}

const std::vector<Value>& Value::elems() const {
    if (!is_set()) type_error("a set", *this);
    return std::get<std::vector<Value>>(rep_->v);
}

bool Value::is_relation() const {
    if (!is_set()) return false;
    for (const Value& e : elems())
        if (!e.is_pair()) return false;
    return true;
}

int compare(const Value& a, const Value& b) {
    if (a.rep_ == b.rep_) return 0;
    const auto ka = a.rep_->v.index(), kb = b.rep_->v.index();
    if (ka != kb) return ka < kb ? -1 : 1;
    switch (a.kind()) {
    case Value::Kind::Int: {
        const auto x = std::get<std::int64_t>(a.rep_->v), y = std::get<std::int64_t>(b.rep_->v);
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    case Value::Kind::Bool: {
        const int x = std::get<bool>(a.rep_->v) ? 1 : 0, y = std::get<bool>(b.rep_->v) ? 1 : 0;
        return x - y;
    }
    case Value::Kind::Pair: {
        if (int c = compare(a.first(), b.first())) return c;
        return compare(a.second(), b.second());
    }
    case Value::Kind::Set: {
        const auto& xs = a.elems();
        const auto& ys = b.elems();
        if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (int c = compare(xs[i], ys[i])) return c;
        return 0;
    }
    }
    return 0;
}

std::string Value::render() const {
    switch (kind()) {
    case Kind::Int:
        return std::to_string(as_int());
    case Kind::Bool:
        return as_bool() ? "TRUE" : "FALSE";
    case Kind::Pair:
        return "(" + first().render() + " |-> " + second().render() + ")";
    case Kind::Set: {
        std::string out = "{";
        bool sep = false;
        for (const Value& e : elems()) {
            if (sep) out += ", ";
            out += e.render();
            sep = true;
        }
        return out + "}";
    }
    }
    return "?";
}

const char* relkind_name(RelKind k) {
    switch (k) {
    case RelKind::Rel: return "<->";
    case RelKind::Trel: return "<<->";
    case RelKind::Srel: return "<->>";
    case RelKind::Strel: return "<<->>";
    case RelKind::Pfun: return "+->";
    case RelKind::Tfun: return "-->";
    case RelKind::Pinj: return ">+>";
    case RelKind::Tinj: return ">->";
    case RelKind::Psur: return "+>>";
    case RelKind::Tsur: return "->>";
    case RelKind::Tbij: return ">->>";
    }
    return "?";
}

Value set_union(const Value& a, const Value& b) {
    require_set(a, "union");
    require_set(b, "union");
    std::vector<Value> out = a.elems();
    out.insert(out.end(), b.elems().begin(), b.elems().end());
    return Value::set(std::move(out));
}

Value set_inter(const Value& a, const Value& b) {
    require_set(a, "intersection");
    require_set(b, "intersection");
    std::vector<Value> out;
    for (const Value& e : a.elems())
        if (member(e, b)) out.push_back(e);
    return Value::set(std::move(out));
}

Value set_diff(const Value& a, const Value& b) {
    require_set(a, "difference");
    require_set(b, "difference");
    std::vector<Value> out;
    for (const Value& e : a.elems())
        if (!member(e, b)) out.push_back(e);
    return Value::set(std::move(out));
}

bool member(const Value& x, const Value& s) {
    require_set(s, "membership");
    const auto& es = s.elems();
    return std::binary_search(es.begin(), es.end(), x,
                              [](const Value& a, const Value& b) { return compare(a, b) < 0; });
}

bool subset(const Value& a, const Value& b) {
    require_set(a, "subset");
    require_set(b, "subset");
    for (const Value& e : a.elems())
        if (!member(e, b)) return false;
    return true;
}

bool proper_subset(const Value& a, const Value& b) {
    return subset(a, b) && a != b;
}

Value pow_set(const Value& s, const ValueLimits& limits) {
    require_set(s, "pow");
    const auto& es = s.elems();
    if (es.size() > limits.pow_max_base)
        throw EvalError(EvalError::Code::BoundExceeded,
                        "pow: base set has " + std::to_string(es.size()) +
                            " elements, limit is " + std::to_string(limits.pow_max_base));
    std::vector<Value> subsets;
    subsets.reserve(std::size_t(1) << es.size());
    for (std::size_t mask = 0; mask < (std::size_t(1) << es.size()); ++mask) {
        std::vector<Value> sub;
        for (std::size_t i = 0; i < es.size(); ++i)
            if (mask & (std::size_t(1) << i)) sub.push_back(es[i]);
        subsets.push_back(Value::set(std::move(sub)));
    }
    return Value::set(std::move(subsets));
}

Value cross(const Value& a, const Value& b, const ValueLimits& limits) {
    require_set(a, "cross");
    require_set(b, "cross");
    if (a.size() * b.size() > limits.cross_max_size)
        throw EvalError(EvalError::Code::BoundExceeded,
                        "cross: result would have " + std::to_string(a.size() * b.size()) +
                            " elements, limit is " + std::to_string(limits.cross_max_size));
    std::vector<Value> out;
    out.reserve(a.size() * b.size());
    for (const Value& x : a.elems())
        for (const Value& y : b.elems())
            out.push_back(Value::pair(x, y));
    return Value::set(std::move(out));
}

Value interval(std::int64_t a, std::int64_t b, const ValueLimits& limits) {
    if (a > b) return Value::empty_set();
    if (b - a >= limits.interval_max_width)
        throw EvalError(EvalError::Code::BoundExceeded,
                        "interval " + std::to_string(a) + ".." + std::to_string(b) +
                            " wider than limit " + std::to_string(limits.interval_max_width));
    std::vector<Value> out;
    out.reserve(std::size_t(b - a + 1));
    for (std::int64_t i = a; i <= b; ++i) out.push_back(Value::integer(i));
    return Value::set(std::move(out));
}

Value rel_domain(const Value& r) {
    require_relation(r, "dom");
    std::vector<Value> out;
    for (const Value& p : r.elems()) out.push_back(p.first());
    return Value::set(std::move(out));
}

Value rel_range(const Value& r) {
    require_relation(r, "ran");
    std::vector<Value> out;
    for (const Value& p : r.elems()) out.push_back(p.second());
    return Value::set(std::move(out));
}

Value rel_inverse(const Value& r) {
    require_relation(r, "inverse");
    std::vector<Value> out;
    for (const Value& p : r.elems()) out.push_back(Value::pair(p.second(), p.first()));
    return Value::set(std::move(out));
}

Value identity_on(const Value& s) {
    require_set(s, "id");
    std::vector<Value> out;
    for (const Value& e : s.elems()) out.push_back(Value::pair(e, e));
    return Value::set(std::move(out));
}

Value rel_image(const Value& r, const Value& s) {
    require_relation(r, "image");
    require_set(s, "image");
    std::vector<Value> out;
    for (const Value& p : r.elems())
        if (member(p.first(), s)) out.push_back(p.second());
    return Value::set(std::move(out));
}

Value rel_apply(const Value& r, const Value& x) {
    require_relation(r, "apply");
    const Value* found = nullptr;
    for (const Value& p : r.elems()) {
        if (p.first() == x) {
            if (found)
                throw EvalError(EvalError::Code::NotFunctionalAt,
                                "application: relation maps " + x.render() +
                                    " to more than one value");
            found = &p.second();
        }
    }
    if (!found)
        throw EvalError(EvalError::Code::NotInDomain,
                        "application: " + x.render() + " is not in the domain");
    return *found;
}

Value dom_restrict(const Value& s, const Value& r) {
    require_set(s, "domain restriction");
    require_relation(r, "domain restriction");
    std::vector<Value> out;
    for (const Value& p : r.elems())
        if (member(p.first(), s)) out.push_back(p);
    return Value::set(std::move(out));
}

Value ran_restrict(const Value& s, const Value& r) {
    require_set(s, "range restriction");
    require_relation(r, "range restriction");
    std::vector<Value> out;
    for (const Value& p : r.elems())
        if (member(p.second(), s)) out.push_back(p);
    return Value::set(std::move(out));
}

Value dom_subtract(const Value& s, const Value& r) {
    require_set(s, "domain subtraction");
    require_relation(r, "domain subtraction");
    std::vector<Value> out;
    for (const Value& p : r.elems())
        if (!member(p.first(), s)) out.push_back(p);
    return Value::set(std::move(out));
}

Value ran_subtract(const Value& s, const Value& r) {
    require_set(s, "range subtraction");
    require_relation(r, "range subtraction");
    std::vector<Value> out;
    for (const Value& p : r.elems())
        if (!member(p.second(), s)) out.push_back(p);
    return Value::set(std::move(out));
}

Value fcomp(const Value& f, const Value& g) {
    require_relation(f, "forward composition");
    require_relation(g, "forward composition");
    std::vector<Value> out;
    for (const Value& p : f.elems())
        for (const Value& q : g.elems())
            if (p.second() == q.first()) out.push_back(Value::pair(p.first(), q.second()));
    return Value::set(std::move(out));
}

Value bcomp(const Value& f, const Value& g) { return fcomp(g, f); }

Value override_rel(const Value& f, const Value& g) {
    require_relation(f, "override");
    require_relation(g, "override");
    const Value gdom = rel_domain(g);
    std::vector<Value> out = g.elems();
    for (const Value& p : f.elems())
        if (!member(p.first(), gdom)) out.push_back(p);
    return Value::set(std::move(out));
}

Value dprod(const Value& f, const Value& g) {
    require_relation(f, "direct product");
    require_relation(g, "direct product");
    std::vector<Value> out;
    for (const Value& p : f.elems())
        for (const Value& q : g.elems())
            if (p.first() == q.first())
                out.push_back(Value::pair(p.first(), Value::pair(p.second(), q.second())));
    return Value::set(std::move(out));
}

Value pprod(const Value& f, const Value& g) {
    require_relation(f, "parallel product");
    require_relation(g, "parallel product");
    std::vector<Value> out;
    for (const Value& p : f.elems())
        for (const Value& q : g.elems())
            out.push_back(Value::pair(Value::pair(p.first(), q.first()),
                                      Value::pair(p.second(), q.second())));
    return Value::set(std::move(out));
}

namespace {

bool functional(const Value& r) {
    const auto& es = r.elems();
    // Elements are sorted pairs, so equal first components are adjacent.
    for (std::size_t i = 1; i < es.size(); ++i)
        if (es[i].first() == es[i - 1].first()) return false;
    return true;
}

} // namespace

RelationFacts classify_relation(const Value& r, const Value& dom, const Value& rng) {
    require_set(r, "classification");
    require_set(dom, "classification");
    require_set(rng, "classification");
    RelationFacts facts;
    facts.is_relation = r.is_relation();
    if (!facts.is_relation) return facts;
    facts.is_function = functional(r);
    facts.is_injective = facts.is_function && functional(rel_inverse(r));
    facts.total_on_domain = rel_domain(r) == dom;
    facts.surjective_on_range = rel_range(r) == rng;
    return facts;
}

bool relkind_holds(RelKind kind, const Value& r, const Value& dom, const Value& rng) {
    if (!r.is_set() || !r.is_relation()) return false;
    const RelationFacts f = classify_relation(r, dom, rng);
    const bool dom_sub = subset(rel_domain(r), dom);
    const bool ran_sub = subset(rel_range(r), rng);
    switch (kind) {
    case RelKind::Rel: return dom_sub && ran_sub;
    case RelKind::Trel: return f.total_on_domain && ran_sub;
    case RelKind::Srel: return dom_sub && f.surjective_on_range;
    case RelKind::Strel: return f.total_on_domain && f.surjective_on_range;
    case RelKind::Pfun: return f.is_function && dom_sub && ran_sub;
    case RelKind::Tfun: return f.is_function && f.total_on_domain && ran_sub;
    case RelKind::Pinj: return f.is_injective && dom_sub && ran_sub;
    case RelKind::Tinj: return f.is_injective && f.total_on_domain && ran_sub;
    case RelKind::Psur: return f.is_function && dom_sub && f.surjective_on_range;
    case RelKind::Tsur: return f.is_function && f.total_on_domain && f.surjective_on_range;
    case RelKind::Tbij:
        return f.is_injective && f.total_on_domain && f.surjective_on_range;
    }
    return false;
}

std::int64_t card(const Value& s) {
    require_set(s, "card");
    return static_cast<std::int64_t>(s.size());
}

Value min_of(const Value& s) {
    require_set(s, "min");
    if (s.size() == 0)
        throw EvalError(EvalError::Code::EmptyAggregate, "min of the empty set");
    const Value& m = s.elems().front();
    if (!m.is_int()) type_error("a set of integers", s);
    return m;
}

Value max_of(const Value& s) {
    require_set(s, "max");
    if (s.size() == 0)
        throw EvalError(EvalError::Code::EmptyAggregate, "max of the empty set");
    const Value& m = s.elems().back();
    if (!m.is_int()) type_error("a set of integers", s);
    return m;
}

Value gen_union(const Value& s) {
    require_set(s, "union(S)");
    std::vector<Value> out;
    for (const Value& e : s.elems()) {
        require_set(e, "union(S) element");
        out.insert(out.end(), e.elems().begin(), e.elems().end());
    }
    return Value::set(std::move(out));
}

Value gen_inter(const Value& s) {
    require_set(s, "inter(S)");
    if (s.size() == 0)
        throw EvalError(EvalError::Code::EmptyAggregate, "inter of the empty set of sets");
    Value acc = s.elems().front();
    require_set(acc, "inter(S) element");
    for (std::size_t i = 1; i < s.size(); ++i) acc = set_inter(acc, s.elems()[i]);
    return acc;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw EvalError(EvalError::Code::Overflow, "integer overflow in addition");
    return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        throw EvalError(EvalError::Code::Overflow, "integer overflow in subtraction");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw EvalError(EvalError::Code::Overflow, "integer overflow in multiplication");
    return r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    if (b == 0) throw EvalError(EvalError::Code::DivisionByZero, "division by zero");
    if (a == INT64_MIN && b == -1)
        throw EvalError(EvalError::Code::Overflow, "integer overflow in division");
    std::int64_t q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
    if (b == 0) throw EvalError(EvalError::Code::DivisionByZero, "mod by zero");
    if (a == INT64_MIN && b == -1)
        throw EvalError(EvalError::Code::Overflow, "integer overflow in mod");
    std::int64_t r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) r += b;
    return r;
}

std::int64_t checked_pow(std::int64_t a, std::int64_t b) {
    if (b < 0)
        throw EvalError(EvalError::Code::NegativeExponent, "negative exponent");
    std::int64_t acc = 1;
    for (std::int64_t i = 0; i < b; ++i) acc = checked_mul(acc, a);
    return acc;
}

} // namespace ebforge
