#include "ebforge/ast.hpp"

#include <algorithm>
#include <cassert>

namespace ebforge {

TypePtr TypeTag::int_type() {
    static const TypePtr t = std::make_shared<TypeTag>(TypeTag{Kind::Int, "", nullptr, nullptr});
    return t;
}

TypePtr TypeTag::bool_type() {
    static const TypePtr t = std::make_shared<TypeTag>(TypeTag{Kind::Bool, "", nullptr, nullptr});
    return t;
}

TypePtr TypeTag::carrier_type(std::string name) {
    return std::make_shared<TypeTag>(TypeTag{Kind::Carrier, std::move(name), nullptr, nullptr});
}

TypePtr TypeTag::pair_type(TypePtr l, TypePtr r) {
    return std::make_shared<TypeTag>(TypeTag{Kind::Pair, "", std::move(l), std::move(r)});
}

TypePtr TypeTag::set_type(TypePtr elem) {
    return std::make_shared<TypeTag>(TypeTag{Kind::Set, "", std::move(elem), nullptr});
}

std::string TypeTag::str() const {
    switch (kind) {
    case Kind::Int: return "INT";
    case Kind::Bool: return "BOOL";
    case Kind::Carrier: return carrier;
    case Kind::Pair: return "(" + left->str() + " ** " + right->str() + ")";
    case Kind::Set: return "POW(" + left->str() + ")";
    }
    return "?";
}

bool same_type(const TypeTag& a, const TypeTag& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case TypeTag::Kind::Int:
    case TypeTag::Kind::Bool: return true;
    case TypeTag::Kind::Carrier: return a.carrier == b.carrier;
    case TypeTag::Kind::Pair:
        return same_type(*a.left, *b.left) && same_type(*a.right, *b.right);
    case TypeTag::Kind::Set: return same_type(*a.left, *b.left);
    }
    return false;
}

FormulaPtr mk_node(NodeKind kind, std::vector<FormulaPtr> kids, SourceSpan span) {
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    f->kids = std::move(kids);
    f->span = std::move(span);
    return f;
}

FormulaPtr mk_int(std::int64_t v, SourceSpan span) {
    auto f = std::make_shared<Formula>();
    f->kind = NodeKind::IntLit;
    f->int_val = v;
    f->span = std::move(span);
    return f;
}

FormulaPtr mk_bool(bool v, SourceSpan span) {
    auto f = std::make_shared<Formula>();
    f->kind = NodeKind::BoolLit;
    f->bool_val = v;
    f->span = std::move(span);
    return f;
}

FormulaPtr mk_ident(std::string name, SourceSpan span) {
    auto f = std::make_shared<Formula>();
    f->kind = NodeKind::Ident;
    f->name = std::move(name);
    f->span = std::move(span);
    return f;
}

FormulaPtr mk_binder(NodeKind kind, std::vector<std::string> binders,
                     std::vector<FormulaPtr> kids, SourceSpan span) {
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    f->binders = std::move(binders);
    f->kids = std::move(kids);
    f->span = std::move(span);
    return f;
}

FormulaPtr mk_relset(RelKind rel, FormulaPtr lhs, FormulaPtr rhs, SourceSpan span) {
    auto f = std::make_shared<Formula>();
    f->kind = NodeKind::RelSet;
    f->rel = rel;
    f->kids = {std::move(lhs), std::move(rhs)};
    f->span = std::move(span);
    return f;
}

bool same_formula(const Formula& a, const Formula& b) {
    if (a.kind != b.kind) return false;
    if (a.int_val != b.int_val || a.bool_val != b.bool_val) return false;
    if (a.name != b.name || a.binders != b.binders || a.rel != b.rel) return false;
    if (a.kids.size() != b.kids.size()) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!same_formula(*a.kids[i], *b.kids[i])) return false;
    return true;
}

bool same_formula(const FormulaPtr& a, const FormulaPtr& b) {
    if (!a || !b) return a == b;
    return same_formula(*a, *b);
}

namespace {

void free_vars_rec(const Formula& f, std::vector<std::string>& bound,
                   std::set<std::string>& out) {
    if (f.kind == NodeKind::Ident) {
        if (std::find(bound.begin(), bound.end(), f.name) == bound.end()) out.insert(f.name);
        return;
    }
    const std::size_t mark = bound.size();
    bound.insert(bound.end(), f.binders.begin(), f.binders.end());
    for (const auto& k : f.kids) free_vars_rec(*k, bound, out);
    bound.resize(mark);
}

} // namespace

std::set<std::string> free_vars(const FormulaPtr& f) {
    std::set<std::string> out;
    std::vector<std::string> bound;
    if (f) free_vars_rec(*f, bound, out);
    return out;
}

FormulaPtr substitute(const FormulaPtr& f,
                      const std::vector<std::pair<std::string, FormulaPtr>>& subst) {
    if (!f) return f;
    if (f->kind == NodeKind::Ident) {
        for (const auto& [name, repl] : subst)
            if (f->name == name) return repl;
        return f;
    }
    // A binder shadows any substitution of the same name.
    std::vector<std::pair<std::string, FormulaPtr>> inner;
    const std::vector<std::pair<std::string, FormulaPtr>>* use = &subst;
    if (!f->binders.empty()) {
        for (const auto& s : subst)
            if (std::find(f->binders.begin(), f->binders.end(), s.first) == f->binders.end())
                inner.push_back(s);
        if (inner.empty()) return f;
        use = &inner;
    }
    bool changed = false;
    std::vector<FormulaPtr> kids;
    kids.reserve(f->kids.size());
    for (const auto& k : f->kids) {
        FormulaPtr nk = substitute(k, *use);
        changed = changed || nk != k;
        kids.push_back(std::move(nk));
    }
    if (!changed) return f;
    auto g = std::make_shared<Formula>(*f);
    g->kids = std::move(kids);
    g->type = nullptr;
    return g;
}

FormulaPtr prime_vars(const FormulaPtr& f, const std::set<std::string>& names) {
    std::vector<std::pair<std::string, FormulaPtr>> subst;
    for (const auto& n : names) subst.emplace_back(n, mk_ident(primed(n)));
    return substitute(f, subst);
}

FormulaPtr expand_partition(const Formula& p) {
    assert(p.kind == NodeKind::Partition && p.kids.size() >= 1);
    const FormulaPtr& whole = p.kids[0];
    std::vector<FormulaPtr> parts(p.kids.begin() + 1, p.kids.end());
    FormulaPtr coverage;
    if (parts.empty()) {
        coverage = mk_node(NodeKind::Equal, {whole, mk_node(NodeKind::SetExt, {})});
    } else {
        FormulaPtr uni = parts[0];
        for (std::size_t i = 1; i < parts.size(); ++i)
            uni = mk_node(NodeKind::Union, {uni, parts[i]});
        coverage = mk_node(NodeKind::Equal, {whole, uni});
    }
    FormulaPtr acc = coverage;
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i + 1; j < parts.size(); ++j) {
            FormulaPtr disjoint =
                mk_node(NodeKind::Equal, {mk_node(NodeKind::Inter, {parts[i], parts[j]}),
                                          mk_node(NodeKind::SetExt, {})});
            acc = mk_node(NodeKind::And, {acc, disjoint});
        }
    return acc;
}

bool is_primed(const std::string& name) { return !name.empty() && name.back() == '\''; }

std::string primed(const std::string& name) { return name + "'"; }

std::string unprimed(const std::string& name) {
    return is_primed(name) ? name.substr(0, name.size() - 1) : name;
}

bool is_predicate_kind(NodeKind k) {
    switch (k) {
    case NodeKind::Not:
    case NodeKind::And:
    case NodeKind::Or:
    case NodeKind::Implies:
    case NodeKind::Iff:
    case NodeKind::Forall:
    case NodeKind::Exists:
    case NodeKind::Equal:
    case NodeKind::Member:
    case NodeKind::Subset:
    case NodeKind::ProperSubset:
    case NodeKind::Lt:
    case NodeKind::Le:
    case NodeKind::Gt:
    case NodeKind::Ge:
    case NodeKind::FinitePred:
    case NodeKind::Partition:
        return true;
    default:
        return false;
    }
}

// ---------------------------------------------------------------------------
// Rendering. Levels must agree with the parser's binding powers so that
// render/parse round-trips.

namespace {

constexpr int LvQuant = 1;
constexpr int LvIff = 2;
constexpr int LvImplies = 3;
constexpr int LvOr = 4;
constexpr int LvAnd = 5;
constexpr int LvNot = 6;
constexpr int LvRelPred = 7;
constexpr int LvArrow = 8;
constexpr int LvUnion = 9;
constexpr int LvInterOp = 10;
constexpr int LvCombine = 11;
constexpr int LvMaplet = 12;
constexpr int LvInterval = 13;
constexpr int LvAddSub = 14;
constexpr int LvMulDiv = 15;
constexpr int LvExpOp = 16;
constexpr int LvUnary = 17;
constexpr int LvPostfix = 18;
constexpr int LvAtom = 19;

int level_of(const Formula& f) {
    switch (f.kind) {
    case NodeKind::Forall:
    case NodeKind::Exists:
    case NodeKind::QuantUnion:
    case NodeKind::QuantInter: return LvQuant;
    case NodeKind::Iff: return LvIff;
    case NodeKind::Implies: return LvImplies;
    case NodeKind::Or: return LvOr;
    case NodeKind::And: return LvAnd;
    case NodeKind::Not: return LvNot;
    case NodeKind::Equal:
    case NodeKind::Member:
    case NodeKind::Subset:
    case NodeKind::ProperSubset:
    case NodeKind::Lt:
    case NodeKind::Le:
    case NodeKind::Gt:
    case NodeKind::Ge: return LvRelPred;
    case NodeKind::RelSet: return LvArrow;
    case NodeKind::Union:
    case NodeKind::Diff: return LvUnion;
    case NodeKind::Inter: return LvInterOp;
    case NodeKind::DomRes:
    case NodeKind::RanRes:
    case NodeKind::DomSub:
    case NodeKind::RanSub:
    case NodeKind::Ovl:
    case NodeKind::Fcomp:
    case NodeKind::Bcomp:
    case NodeKind::Dprod:
    case NodeKind::Pprod:
    case NodeKind::Cross: return LvCombine;
    case NodeKind::Maplet: return LvMaplet;
    case NodeKind::IntervalExpr: return LvInterval;
    case NodeKind::Add:
    case NodeKind::Sub: return LvAddSub;
    case NodeKind::Mul:
    case NodeKind::Div:
    case NodeKind::Mod: return LvMulDiv;
    case NodeKind::Exp: return LvExpOp;
    case NodeKind::Inverse:
    case NodeKind::Apply:
    case NodeKind::Image: return LvPostfix;
    case NodeKind::IntLit: return f.int_val < 0 ? LvUnary : LvAtom;
    default: return LvAtom;
    }
}

std::string rec(const Formula& f);

std::string at(const Formula& f, int min_level) {
    std::string s = rec(f);
    if (level_of(f) < min_level) return "(" + s + ")";
    return s;
}

std::string binary(const Formula& f, const char* op, int lv, bool right_assoc = false) {
    if (right_assoc) return at(*f.kids[0], lv + 1) + " " + op + " " + at(*f.kids[1], lv);
    return at(*f.kids[0], lv) + " " + op + " " + at(*f.kids[1], lv + 1);
}

std::string nonassoc(const Formula& f, const char* op, int lv) {
    return at(*f.kids[0], lv + 1) + " " + op + " " + at(*f.kids[1], lv + 1);
}

std::string call(const char* fn, const Formula& f) {
    std::string out = std::string(fn) + "(";
    for (std::size_t i = 0; i < f.kids.size(); ++i) {
        if (i) out += ", ";
        out += at(*f.kids[i], LvQuant);
    }
    return out + ")";
}

std::string binder_prefix(const Formula& f, const char* sigil) {
    std::string out = sigil;
    for (std::size_t i = 0; i < f.binders.size(); ++i) {
        if (i) out += ", ";
        out += f.binders[i];
    }
    return out;
}

std::string rec(const Formula& f) {
    switch (f.kind) {
    case NodeKind::Not:
        // /= and /: are rendered back as the sugared operators.
        if (f.kids[0]->kind == NodeKind::Equal)
            return nonassoc(*f.kids[0], "/=", LvRelPred);
        if (f.kids[0]->kind == NodeKind::Member)
            return nonassoc(*f.kids[0], "/:", LvRelPred);
        return "not " + at(*f.kids[0], LvNot);
    case NodeKind::And: return binary(f, "&", LvAnd);
    case NodeKind::Or: return binary(f, "or", LvOr);
    case NodeKind::Implies: return binary(f, "=>", LvImplies, true);
    case NodeKind::Iff: return binary(f, "<=>", LvIff, true);
    case NodeKind::Forall:
        return binder_prefix(f, "!") + " . " + at(*f.kids[0], LvQuant);
    case NodeKind::Exists:
        return binder_prefix(f, "#") + " . " + at(*f.kids[0], LvQuant);
    case NodeKind::Equal: return nonassoc(f, "=", LvRelPred);
    case NodeKind::Member: return nonassoc(f, ":", LvRelPred);
    case NodeKind::Subset: return nonassoc(f, "<:", LvRelPred);
    case NodeKind::ProperSubset: return nonassoc(f, "<<:", LvRelPred);
    case NodeKind::Lt: return nonassoc(f, "<", LvRelPred);
    case NodeKind::Le: return nonassoc(f, "<=", LvRelPred);
    case NodeKind::Gt: return nonassoc(f, ">", LvRelPred);
    case NodeKind::Ge: return nonassoc(f, ">=", LvRelPred);
    case NodeKind::FinitePred: return call("finite", f);
    case NodeKind::Partition: return call("partition", f);
    case NodeKind::IntLit: return std::to_string(f.int_val);
    case NodeKind::BoolLit: return f.bool_val ? "TRUE" : "FALSE";
    case NodeKind::Ident: return f.name;
    case NodeKind::Maplet: return binary(f, "|->", LvMaplet);
    case NodeKind::SetExt: {
        std::string out = "{";
        for (std::size_t i = 0; i < f.kids.size(); ++i) {
            if (i) out += ", ";
            out += at(*f.kids[i], LvQuant);
        }
        return out + "}";
    }
    case NodeKind::SetComp:
        return "{" + binder_prefix(f, "") + " . " + at(*f.kids[0], LvQuant) + " | " +
               at(*f.kids[1], LvQuant) + "}";
    case NodeKind::QuantUnion:
        return binder_prefix(f, "UNION ") + " . " + at(*f.kids[0], LvIff) + " | " +
               at(*f.kids[1], LvQuant);
    case NodeKind::QuantInter:
        return binder_prefix(f, "INTER ") + " . " + at(*f.kids[0], LvIff) + " | " +
               at(*f.kids[1], LvQuant);
    case NodeKind::IntervalExpr: return nonassoc(f, "..", LvInterval);
    case NodeKind::Add: return binary(f, "+", LvAddSub);
    case NodeKind::Sub: return binary(f, "-", LvAddSub);
    case NodeKind::Mul: return binary(f, "*", LvMulDiv);
    case NodeKind::Div: return binary(f, "/", LvMulDiv);
    case NodeKind::Mod: return binary(f, "mod", LvMulDiv);
    case NodeKind::Exp: return binary(f, "^", LvExpOp, true);
    case NodeKind::Union: return binary(f, "\\/", LvUnion);
    case NodeKind::Inter: return binary(f, "/\\", LvInterOp);
    case NodeKind::Diff: return binary(f, "\\", LvUnion);
    case NodeKind::Cross: return binary(f, "**", LvCombine);
    case NodeKind::Pow: return call("pow", f);
    case NodeKind::GenUnion: return call("union", f);
    case NodeKind::GenInter: return call("inter", f);
    case NodeKind::Dom: return call("dom", f);
    case NodeKind::Ran: return call("ran", f);
    case NodeKind::Inverse: return at(*f.kids[0], LvPostfix) + "~";
    case NodeKind::Image:
        return at(*f.kids[0], LvPostfix) + "[" + at(*f.kids[1], LvQuant) + "]";
    case NodeKind::Apply:
        return at(*f.kids[0], LvPostfix) + "(" + at(*f.kids[1], LvQuant) + ")";
    case NodeKind::DomRes: return binary(f, "<|", LvCombine);
    case NodeKind::RanRes: return binary(f, "|>", LvCombine);
    case NodeKind::DomSub: return binary(f, "<<|", LvCombine);
    case NodeKind::RanSub: return binary(f, "|>>", LvCombine);
    case NodeKind::Fcomp: return binary(f, ";", LvCombine);
    case NodeKind::Bcomp: return binary(f, "circ", LvCombine);
    case NodeKind::Ovl: return binary(f, "<+", LvCombine);
    case NodeKind::Dprod: return binary(f, "><", LvCombine);
    case NodeKind::Pprod: return binary(f, "||", LvCombine);
    case NodeKind::IdOn: return call("id", f);
    case NodeKind::Prj1: return call("prj1", f);
    case NodeKind::Prj2: return call("prj2", f);
    case NodeKind::Card: return call("card", f);
    case NodeKind::MinOf: return call("min", f);
    case NodeKind::MaxOf: return call("max", f);
    case NodeKind::RelSet: return nonassoc(f, relkind_name(f.rel), LvArrow);
    case NodeKind::Old: return call("old", f);
    }
    return "?";
}

} // namespace

std::string render(const Formula& f) { return rec(f); }

std::string render(const FormulaPtr& f) { return f ? rec(*f) : std::string(); }

} // namespace ebforge
