#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ebforge/ast.hpp"
#include "ebforge/value.hpp"

namespace ebforge {

/// How symbolic domains are made finite: carrier sets are bound to
/// concrete universes; int_range, when present, lets integer-typed
/// binders and symbols be enumerated exhaustively (finite checking);
/// when absent, integer binders need a syntactic bound in the formula.
struct Grounding {
    std::map<std::string, Value> carriers;
    std::optional<std::pair<std::int64_t, std::int64_t>> int_range;
    ValueLimits limits;

    /// interval(0, k-1) universes from per-carrier sizes.
    static Grounding from_sizes(const std::vector<std::string>& carrier_names,
                                const std::map<std::string, std::int64_t>& sizes,
                                std::int64_t default_size);
};

using Env = std::map<std::string, Value>;

/// Evaluate a formula to a value; predicates yield booleans.
/// Quantifiers, comprehensions and quantified set operators are
/// executable when each binder either has a syntactic bound (a
/// conjunct `x : E` or `x = e`), or a type whose universe the
/// grounding can enumerate; otherwise EvalError(Unsupported).
Value evaluate(const FormulaPtr& f, const Env& env, const Grounding& ground);

bool eval_bool(const FormulaPtr& f, const Env& env, const Grounding& ground);

/// All values of a type, in canonical order. Carrier types come from
/// the grounding; Int needs int_range; Set types are powersets subject
/// to the pow bound.
std::vector<Value> type_universe(const TypePtr& type, const Grounding& ground,
                                 const std::string& symbol_for_errors);

} // namespace ebforge
