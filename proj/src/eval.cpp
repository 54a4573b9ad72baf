#include "ebforge/eval.hpp"

#include <algorithm>
#include <functional>

namespace ebforge {

Grounding Grounding::from_sizes(const std::vector<std::string>& carrier_names,
                                const std::map<std::string, std::int64_t>& sizes,
                                std::int64_t default_size) {
    Grounding g;
    for (const auto& name : carrier_names) {
        auto it = sizes.find(name);
        const std::int64_t k = it == sizes.end() ? default_size : it->second;
        g.carriers[name] = interval(0, k - 1);
    }
    return g;
}

namespace {

bool symbolic_int_set(const std::string& name) {
    return name == "INT" || name == "NAT" || name == "NAT1";
}

bool in_symbolic(const std::string& name, const Value& x) {
    if (!x.is_int())
        throw EvalError(EvalError::Code::Type,
                        "type error: " + x.render() + " tested against " + name);
    if (name == "INT") return true;
    if (name == "NAT") return x.as_int() >= 0;
    return x.as_int() >= 1; // NAT1
}

class Evaluator {
public:
    Evaluator(const Env& env, const Grounding& ground) : env_(env), ground_(ground) {}

    const Value* lookup(const std::string& name) const {
        for (auto it = overlay_.rbegin(); it != overlay_.rend(); ++it)
            if (it->first == name) return &it->second;
        auto it = env_.find(name);
        return it == env_.end() ? nullptr : &it->second;
    }

    Value eval(const Formula& f) {
        switch (f.kind) {
        case NodeKind::Not:
            return Value::truth(!eval_b(*f.kids[0]));
        case NodeKind::And:
            return Value::truth(eval_b(*f.kids[0]) && eval_b(*f.kids[1]));
        case NodeKind::Or:
            return Value::truth(eval_b(*f.kids[0]) || eval_b(*f.kids[1]));
        case NodeKind::Implies:
            return Value::truth(!eval_b(*f.kids[0]) || eval_b(*f.kids[1]));
        case NodeKind::Iff:
            return Value::truth(eval_b(*f.kids[0]) == eval_b(*f.kids[1]));
        case NodeKind::Forall:
            return Value::truth(quantify(f, true));
        case NodeKind::Exists:
            return Value::truth(quantify(f, false));
        case NodeKind::Equal:
            return Value::truth(eval(*f.kids[0]) == eval(*f.kids[1]));
        case NodeKind::Member:
            return Value::truth(eval_membership(*f.kids[0], *f.kids[1]));
        case NodeKind::Subset:
            return Value::truth(eval_subset(*f.kids[0], *f.kids[1], false));
        case NodeKind::ProperSubset:
            return Value::truth(eval_subset(*f.kids[0], *f.kids[1], true));
        case NodeKind::Lt:
            return Value::truth(eval_i(*f.kids[0]) < eval_i(*f.kids[1]));
        case NodeKind::Le:
            return Value::truth(eval_i(*f.kids[0]) <= eval_i(*f.kids[1]));
        case NodeKind::Gt:
            return Value::truth(eval_i(*f.kids[0]) > eval_i(*f.kids[1]));
        case NodeKind::Ge:
            return Value::truth(eval_i(*f.kids[0]) >= eval_i(*f.kids[1]));
        case NodeKind::FinitePred: {
            const Formula& arg = *f.kids[0];
            if (arg.kind == NodeKind::Ident && symbolic_int_set(arg.name))
                return Value::truth(false);
            (void)eval_set(arg);
            return Value::truth(true);
        }
        case NodeKind::Partition: {
            FormulaPtr expanded = expand_partition(f);
            return eval(*expanded);
        }
        case NodeKind::IntLit:
            return Value::integer(f.int_val);
        case NodeKind::BoolLit:
            return Value::truth(f.bool_val);
        case NodeKind::Ident: {
            if (const Value* v = lookup(f.name)) return *v;
            auto c = ground_.carriers.find(f.name);
            if (c != ground_.carriers.end()) return c->second;
            if (f.name == "BOOL") return Value::set({Value::truth(false), Value::truth(true)});
            if (symbolic_int_set(f.name))
                throw EvalError(EvalError::Code::Unsupported,
                                f.name + " is an unbounded set and has no finite value");
            throw EvalError(EvalError::Code::Unbound, "unbound identifier '" + f.name + "'");
        }
        case NodeKind::Maplet:
            return Value::pair(eval(*f.kids[0]), eval(*f.kids[1]));
        case NodeKind::SetExt: {
            std::vector<Value> elems;
            elems.reserve(f.kids.size());
            for (const auto& k : f.kids) elems.push_back(eval(*k));
            return Value::set(std::move(elems));
        }
        case NodeKind::SetComp: {
            std::vector<Value> elems;
            DomainCache cache(f.binders.size());
            rec_bind(f, 0, f.kids[0], false, cache, [&] {
                if (eval_b(*f.kids[0])) elems.push_back(eval(*f.kids[1]));
            });
            return Value::set(std::move(elems));
        }
        case NodeKind::QuantUnion:
        case NodeKind::QuantInter: {
            std::vector<Value> sets;
            DomainCache cache(f.binders.size());
            rec_bind(f, 0, f.kids[0], false, cache, [&] {
                if (eval_b(*f.kids[0])) sets.push_back(eval(*f.kids[1]));
            });
            if (f.kind == NodeKind::QuantUnion) return gen_union(Value::set(std::move(sets)));
            return gen_inter(Value::set(std::move(sets)));
        }
        case NodeKind::IntervalExpr:
            return interval(eval_i(*f.kids[0]), eval_i(*f.kids[1]), ground_.limits);
        case NodeKind::Add:
            return Value::integer(checked_add(eval_i(*f.kids[0]), eval_i(*f.kids[1])));
        case NodeKind::Sub:
            return Value::integer(checked_sub(eval_i(*f.kids[0]), eval_i(*f.kids[1])));
        case NodeKind::Mul:
            return Value::integer(checked_mul(eval_i(*f.kids[0]), eval_i(*f.kids[1])));
        case NodeKind::Div:
            return Value::integer(floor_div(eval_i(*f.kids[0]), eval_i(*f.kids[1])));
        case NodeKind::Mod:
            return Value::integer(floor_mod(eval_i(*f.kids[0]), eval_i(*f.kids[1])));
        case NodeKind::Exp:
            return Value::integer(checked_pow(eval_i(*f.kids[0]), eval_i(*f.kids[1])));
        case NodeKind::Union:
            return set_union(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::Inter:
            return set_inter(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::Diff:
            return set_diff(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::Cross:
            return cross(eval_set(*f.kids[0]), eval_set(*f.kids[1]), ground_.limits);
        case NodeKind::Pow:
            return pow_set(eval_set(*f.kids[0]), ground_.limits);
        case NodeKind::GenUnion:
            return gen_union(eval_set(*f.kids[0]));
        case NodeKind::GenInter:
            return gen_inter(eval_set(*f.kids[0]));
        case NodeKind::Dom:
            return rel_domain(eval_set(*f.kids[0]));
        case NodeKind::Ran:
            return rel_range(eval_set(*f.kids[0]));
        case NodeKind::Inverse:
            return rel_inverse(eval_set(*f.kids[0]));
        case NodeKind::Image:
            return rel_image(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::Apply:
            return rel_apply(eval_set(*f.kids[0]), eval(*f.kids[1]));
        case NodeKind::DomRes:
            return dom_restrict(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::RanRes:
            return ran_restrict(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::DomSub:
            return dom_subtract(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::RanSub:
            return ran_subtract(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::Fcomp:
            return fcomp(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::Bcomp:
            return bcomp(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::Ovl:
            return override_rel(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::Dprod:
            return dprod(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::Pprod:
            return pprod(eval_set(*f.kids[0]), eval_set(*f.kids[1]));
        case NodeKind::IdOn:
            return identity_on(eval_set(*f.kids[0]));
        case NodeKind::Prj1:
            return eval(*f.kids[0]).first();
        case NodeKind::Prj2:
            return eval(*f.kids[0]).second();
        case NodeKind::Card:
            return Value::integer(card(eval_set(*f.kids[0])));
        case NodeKind::MinOf:
            return min_of(eval_set(*f.kids[0]));
        case NodeKind::MaxOf:
            return max_of(eval_set(*f.kids[0]));
        case NodeKind::RelSet: {
            // As a value: all relations of the kind, bounded by the pow limit.
            const Value lhs = eval_set(*f.kids[0]);
            const Value rhs = eval_set(*f.kids[1]);
            const Value all = pow_set(cross(lhs, rhs, ground_.limits), ground_.limits);
            std::vector<Value> keep;
            for (const Value& r : all.elems())
                if (relkind_holds(f.rel, r, lhs, rhs)) keep.push_back(r);
            return Value::set(std::move(keep));
        }
        case NodeKind::Old:
            throw EvalError(EvalError::Code::Unsupported,
                            "old() is a contract marker and cannot be executed");
        }
        throw EvalError(EvalError::Code::Unsupported, "unhandled construct");
    }

    bool eval_b(const Formula& f) { return eval(f).as_bool(); }

    std::int64_t eval_i(const Formula& f) { return eval(f).as_int(); }

    Value eval_set(const Formula& f) {
        Value v = eval(f);
        if (!v.is_set())
            throw EvalError(EvalError::Code::Type, "type error: expected a set, got " + v.render());
        return v;
    }

private:
    bool eval_membership(const Formula& x, const Formula& set_expr) {
        if (set_expr.kind == NodeKind::Ident && symbolic_int_set(set_expr.name))
            return in_symbolic(set_expr.name, eval(x));
        if (set_expr.kind == NodeKind::IntervalExpr) {
            // x : a .. b without building the interval
            const std::int64_t v = eval_i(x);
            return eval_i(*set_expr.kids[0]) <= v && v <= eval_i(*set_expr.kids[1]);
        }
        if (set_expr.kind == NodeKind::Pow)
            return subset(eval_set(x), eval_set(*set_expr.kids[0]));
        if (set_expr.kind == NodeKind::RelSet) return relkind_membership(x, set_expr);
        return member(eval(x), eval_set(set_expr));
    }

    bool relkind_membership(const Formula& x, const Formula& arrow) {
        const Value r = eval_set(x);
        if (!r.is_relation()) return false;
        const Formula& dexpr = *arrow.kids[0];
        const Formula& rexpr = *arrow.kids[1];
        const bool dom_symbolic = dexpr.kind == NodeKind::Ident && symbolic_int_set(dexpr.name);
        const bool ran_symbolic = rexpr.kind == NodeKind::Ident && symbolic_int_set(rexpr.name);

        const bool needs_total = arrow.rel == RelKind::Trel || arrow.rel == RelKind::Strel ||
                                 arrow.rel == RelKind::Tfun || arrow.rel == RelKind::Tinj ||
                                 arrow.rel == RelKind::Tsur || arrow.rel == RelKind::Tbij;
        const bool needs_surj = arrow.rel == RelKind::Srel || arrow.rel == RelKind::Strel ||
                                arrow.rel == RelKind::Psur || arrow.rel == RelKind::Tsur ||
                                arrow.rel == RelKind::Tbij;
        if ((dom_symbolic && needs_total) || (ran_symbolic && needs_surj))
            throw EvalError(EvalError::Code::Unsupported,
                            "totality/surjectivity against an unbounded set is not decidable "
                            "here");
        if (dom_symbolic || ran_symbolic) {
            for (const Value& p : r.elems()) {
                if (dom_symbolic && !in_symbolic(dexpr.name, p.first())) return false;
                if (ran_symbolic && !in_symbolic(rexpr.name, p.second())) return false;
            }
            // Remaining structural facts against concrete sides.
            const Value d = dom_symbolic ? rel_domain(r) : eval_set(dexpr);
            const Value rng = ran_symbolic ? rel_range(r) : eval_set(rexpr);
            return relkind_holds(arrow.rel, r, d, rng);
        }
        return relkind_holds(arrow.rel, r, eval_set(dexpr), eval_set(rexpr));
    }

    bool eval_subset(const Formula& a, const Formula& b, bool proper) {
        if (b.kind == NodeKind::Ident && symbolic_int_set(b.name)) {
            const Value av = eval_set(a);
            for (const Value& e : av.elems())
                if (!in_symbolic(b.name, e)) return false;
            if (proper) return true; // a finite set is always a proper subset of INT/NAT...
            return true;
        }
        if (proper) return proper_subset(eval_set(a), eval_set(b));
        return subset(eval_set(a), eval_set(b));
    }

    // ---- binder enumeration -------------------------------------------

    /// A conjunct `x : E` (or `x = e`) that pins down the domain of x.
    /// For universal quantification only the antecedent of a top-level
    /// implication may be used.
    FormulaPtr find_bound(const std::string& x, const FormulaPtr& pred, bool forall) {
        if (forall) {
            if (pred->kind == NodeKind::Implies) return find_in_conjuncts(x, pred->kids[0]);
            return nullptr;
        }
        return find_in_conjuncts(x, pred);
    }

    FormulaPtr find_in_conjuncts(const std::string& x, const FormulaPtr& p) {
        if (p->kind == NodeKind::And) {
            if (FormulaPtr e = find_in_conjuncts(x, p->kids[0])) return e;
            return find_in_conjuncts(x, p->kids[1]);
        }
        if (p->kind == NodeKind::Member && p->kids[0]->kind == NodeKind::Ident &&
            p->kids[0]->name == x && !free_vars(p->kids[1]).count(x))
            return p->kids[1];
        if (p->kind == NodeKind::Equal) {
            if (p->kids[0]->kind == NodeKind::Ident && p->kids[0]->name == x &&
                !free_vars(p->kids[1]).count(x))
                return mk_node(NodeKind::SetExt, {p->kids[1]});
            if (p->kids[1]->kind == NodeKind::Ident && p->kids[1]->name == x &&
                !free_vars(p->kids[0]).count(x))
                return mk_node(NodeKind::SetExt, {p->kids[0]});
        }
        return nullptr;
    }

    /// cacheable is set when the domain cannot change across iterations
    /// of the node's other binders.
    std::vector<Value> binder_domain(const Formula& node, std::size_t i,
                                     const FormulaPtr& pred, bool forall, bool& cacheable) {
        const std::string& x = node.binders[i];
        if (FormulaPtr bound = find_bound(x, pred, forall)) {
            bool ok = true;
            bool independent = true;
            for (const auto& fv : free_vars(bound)) {
                for (const auto& other : node.binders)
                    if (fv == other) independent = false;
                if (lookup(fv) || ground_.carriers.count(fv) || fv == "BOOL") continue;
                ok = false;
                break;
            }
            if (ok) {
                if (bound->kind == NodeKind::Ident && symbolic_int_set(bound->name)) {
                    // fall through to the type universe
                } else {
                    cacheable = independent;
                    return eval_set(*bound).elems();
                }
            }
        }
        TypePtr t = i < node.binder_types.size() ? node.binder_types[i] : nullptr;
        if (!t)
            throw EvalError(EvalError::Code::Unsupported,
                            "cannot finitely enumerate bound variable '" + x +
                                "': no syntactic bound and no type information");
        cacheable = true;
        return type_universe(t, ground_, x);
    }

    bool quantify(const Formula& node, bool forall) {
        bool result = forall;
        bool stop = false;
        DomainCache cache(node.binders.size());
        rec_bind(node, 0, node.kids[0], forall, cache, [&] {
            if (stop) return;
            const bool b = eval_b(*node.kids[0]);
            if (forall && !b) {
                result = false;
                stop = true;
            }
            if (!forall && b) {
                result = true;
                stop = true;
            }
        });
        return result;
    }

    using DomainCache = std::vector<std::optional<std::vector<Value>>>;

    void rec_bind(const Formula& node, std::size_t i, const FormulaPtr& pred, bool forall,
                  DomainCache& cache, const std::function<void()>& fn) {
        if (i == node.binders.size()) {
            fn();
            return;
        }
        std::vector<Value> local;
        const std::vector<Value>* domain;
        if (cache[i]) {
            domain = &*cache[i];
        } else {
            bool cacheable = false;
            local = binder_domain(node, i, pred, forall, cacheable);
            if (cacheable) {
                cache[i] = std::move(local);
                domain = &*cache[i];
            } else {
                domain = &local;
            }
        }
        const std::string& x = node.binders[i];
        overlay_.emplace_back(x, Value());
        for (const Value& v : *domain) {
            overlay_.back().second = v;
            rec_bind(node, i + 1, pred, forall, cache, fn);
        }
        overlay_.pop_back();
    }

    const Env& env_;
    std::vector<std::pair<std::string, Value>> overlay_; // binder bindings
    const Grounding& ground_;
};

} // namespace

Value evaluate(const FormulaPtr& f, const Env& env, const Grounding& ground) {
    return Evaluator(env, ground).eval(*f);
}

bool eval_bool(const FormulaPtr& f, const Env& env, const Grounding& ground) {
    return evaluate(f, env, ground).as_bool();
}

std::vector<Value> type_universe(const TypePtr& type, const Grounding& ground,
                                 const std::string& symbol) {
    switch (type->kind) {
    case TypeTag::Kind::Int: {
        if (!ground.int_range)
            throw EvalError(EvalError::Code::Unsupported,
                            "integer domain of '" + symbol + "' has no finite bound");
        std::vector<Value> out;
        for (std::int64_t i = ground.int_range->first; i <= ground.int_range->second; ++i)
            out.push_back(Value::integer(i));
        return out;
    }
    case TypeTag::Kind::Bool:
        return {Value::truth(false), Value::truth(true)};
    case TypeTag::Kind::Carrier: {
        auto it = ground.carriers.find(type->carrier);
        if (it == ground.carriers.end())
            throw EvalError(EvalError::Code::Unsupported,
                            "carrier set '" + type->carrier + "' is not grounded");
        return it->second.elems();
    }
    case TypeTag::Kind::Pair: {
        const auto ls = type_universe(type->left, ground, symbol);
        const auto rs = type_universe(type->right, ground, symbol);
        std::vector<Value> out;
        out.reserve(ls.size() * rs.size());
        for (const Value& l : ls)
            for (const Value& r : rs) out.push_back(Value::pair(l, r));
        std::sort(out.begin(), out.end());
        return out;
    }
    case TypeTag::Kind::Set: {
        const auto es = type_universe(type->left, ground, symbol);
        if (es.size() > ground.limits.pow_max_base)
            throw EvalError(EvalError::Code::BoundExceeded,
                            "domain of '" + symbol + "' needs the powerset of " +
                                std::to_string(es.size()) + " elements (limit " +
                                std::to_string(ground.limits.pow_max_base) + ")");
        return pow_set(Value::set(es), ground.limits).elems();
    }
    }
    throw EvalError(EvalError::Code::Unsupported, "unknown type");
}

} // namespace ebforge
