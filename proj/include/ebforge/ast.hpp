#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ebforge/span.hpp"
#include "ebforge/value.hpp"

namespace ebforge {

struct TypeTag;
using TypePtr = std::shared_ptr<const TypeTag>;

/// Inferred type of an identifier or formula node. Carrier sets are
/// nominal: CARRIER(D) never unifies with INT or another carrier.
struct TypeTag {
    enum class Kind : std::uint8_t { Int, Bool, Carrier, Pair, Set };
    Kind kind;
    std::string carrier; // Carrier only
    TypePtr left, right; // Pair: both; Set: left only

    static TypePtr int_type();
    static TypePtr bool_type();
    static TypePtr carrier_type(std::string name);
    static TypePtr pair_type(TypePtr l, TypePtr r);
    static TypePtr set_type(TypePtr elem);

    std::string str() const; // INT, BOOL, D, POW(INT ** D), ...
};

bool same_type(const TypeTag& a, const TypeTag& b);

enum class NodeKind : std::uint8_t {
    // predicates
    Not, And, Or, Implies, Iff, Forall, Exists,
    Equal, Member, Subset, ProperSubset,
    Lt, Le, Gt, Ge, FinitePred, Partition,
    // expressions
    IntLit, BoolLit, Ident, Maplet, SetExt, SetComp, IntervalExpr,
    Add, Sub, Mul, Div, Mod, Exp,
    Union, Inter, Diff, Cross, Pow, GenUnion, GenInter, QuantUnion, QuantInter,
    Dom, Ran, Inverse, Image, Apply, DomRes, RanRes, DomSub, RanSub,
    Fcomp, Bcomp, Ovl, Dprod, Pprod, IdOn, Prj1, Prj2, Card, MinOf, MaxOf,
    RelSet, // arrow type expression S <-> T, S --> T, ...
    Old,    // contract-only pre-state marker old(E)
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// One node of an Event-B predicate or expression tree. Binder nodes
/// (Forall/Exists/SetComp/QuantUnion/QuantInter) carry the bound names;
/// SetComp and the quantified set operators have children {pred, expr},
/// quantifiers have one child (the body).
struct Formula {
    NodeKind kind;
    std::vector<FormulaPtr> kids;
    std::int64_t int_val = 0;
    bool bool_val = false;
    std::string name; // Ident
    std::vector<std::string> binders;
    RelKind rel = RelKind::Rel;
    SourceSpan span;
    mutable TypePtr type;                       // filled in by the type checker
    mutable std::vector<TypePtr> binder_types;  // parallel to binders, ditto
};

FormulaPtr mk_node(NodeKind kind, std::vector<FormulaPtr> kids, SourceSpan span = {});
FormulaPtr mk_int(std::int64_t v, SourceSpan span = {});
FormulaPtr mk_bool(bool v, SourceSpan span = {});
FormulaPtr mk_ident(std::string name, SourceSpan span = {});
FormulaPtr mk_binder(NodeKind kind, std::vector<std::string> binders,
                     std::vector<FormulaPtr> kids, SourceSpan span = {});
FormulaPtr mk_relset(RelKind rel, FormulaPtr lhs, FormulaPtr rhs, SourceSpan span = {});

/// Structural equality; ignores spans and type annotations.
bool same_formula(const Formula& a, const Formula& b);
bool same_formula(const FormulaPtr& a, const FormulaPtr& b);

/// Identifiers not captured by any enclosing binder.
std::set<std::string> free_vars(const FormulaPtr& f);

/// Substitute free occurrences of identifiers by replacement trees.
/// Bound occurrences are left alone; capture is not checked (callers
/// substitute closed or fresh-named terms only).
FormulaPtr substitute(const FormulaPtr& f,
                      const std::vector<std::pair<std::string, FormulaPtr>>& subst);

/// Rename every free occurrence of the given identifiers to their primed form.
FormulaPtr prime_vars(const FormulaPtr& f, const std::set<std::string>& names);

/// partition(S, s1, .., sk) expanded to union coverage plus pairwise
/// disjointness.
FormulaPtr expand_partition(const Formula& partition_node);

/// Surface-syntax rendering; reparsing the result yields an equal tree.
std::string render(const FormulaPtr& f);
std::string render(const Formula& f);

bool is_primed(const std::string& name);
std::string primed(const std::string& name);
std::string unprimed(const std::string& name);

bool is_predicate_kind(NodeKind k);

} // namespace ebforge
