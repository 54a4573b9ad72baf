#include "ebforge/pogen.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <sstream>

#include "ebforge/eval.hpp"

namespace ebforge {

bool same_sequent(const Sequent& a, const Sequent& b) {
    if (a.name != b.name || a.family != b.family) return false;
    if (a.hypotheses.size() != b.hypotheses.size()) return false;
    for (std::size_t i = 0; i < a.hypotheses.size(); ++i) {
        if (a.hypotheses[i].label != b.hypotheses[i].label) return false;
        if (!same_formula(a.hypotheses[i].formula, b.hypotheses[i].formula)) return false;
    }
    if (!same_formula(a.goal, b.goal)) return false;
    if (a.free_symbols.size() != b.free_symbols.size()) return false;
    for (std::size_t i = 0; i < a.free_symbols.size(); ++i) {
        if (a.free_symbols[i].first != b.free_symbols[i].first) return false;
        if (!same_type(*a.free_symbols[i].second, *b.free_symbols[i].second)) return false;
    }
    return true;
}

namespace {

bool builtin_name(const std::string& n) {
    return n == "INT" || n == "NAT" || n == "NAT1" || n == "BOOL";
}

FormulaPtr conj(const std::vector<FormulaPtr>& parts) {
    if (parts.empty()) return mk_bool(true);
    FormulaPtr acc = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i)
        acc = mk_node(NodeKind::And, {acc, parts[i]});
    return acc;
}

FormulaPtr type_to_set_expr(const TypePtr& t) {
    switch (t->kind) {
    case TypeTag::Kind::Int: return mk_ident("INT");
    case TypeTag::Kind::Bool: return mk_ident("BOOL");
    case TypeTag::Kind::Carrier: return mk_ident(t->carrier);
    case TypeTag::Kind::Pair:
        return mk_node(NodeKind::Cross,
                       {type_to_set_expr(t->left), type_to_set_expr(t->right)});
    case TypeTag::Kind::Set: return mk_node(NodeKind::Pow, {type_to_set_expr(t->left)});
    }
    return mk_ident("INT");
}

/// Before-after predicate of one action. Deterministic assignments
/// prime the target (v' = E); SIM sequents present them unprimed.
FormulaPtr ba_formula(const Action& a, bool unprimed_det) {
    if (a.kind == Action::Kind::NonDeterministic) return a.predicate;
    FormulaPtr rhs = a.rhs;
    if (a.index) {
        FormulaPtr maplet = mk_node(NodeKind::Maplet, {a.index, a.rhs});
        rhs = mk_node(NodeKind::Ovl, {mk_ident(a.lhs), mk_node(NodeKind::SetExt, {maplet})});
    }
    const std::string lhs = unprimed_det ? a.lhs : primed(a.lhs);
    return mk_node(NodeKind::Equal, {mk_ident(lhs), rhs});
}

class PoBuilder {
public:
    PoBuilder(const Project& project, const TypedProject& types, const std::string& machine)
        : project_(project), types_(types), flat_(flatten(project, machine)) {}

    std::vector<Sequent> run() {
        split_invariants();
        theorem_pos();
        for (const Event& evt : flat_.events) event_pos(evt);
        wd_pos();
        for (Sequent& s : out_) collect_symbols(s);
        return std::move(out_);
    }

private:
    const Project& project_;
    const TypedProject& types_;
    FlatMachine flat_;
    std::vector<Labeled> abstract_invs_; // whole abstract chain
    std::vector<Labeled> own_invs_;      // declared in this machine
    std::vector<Sequent> out_;

    void split_invariants() {
        const std::size_t abstract_count =
            flat_.abstraction ? flat_.abstraction->invariants.size() : 0;
        abstract_invs_.assign(flat_.invariants.begin(),
                              flat_.invariants.begin() + abstract_count);
        own_invs_.assign(flat_.invariants.begin() + abstract_count, flat_.invariants.end());
    }

    std::vector<Labeled> axioms_and_theorems() const {
        std::vector<Labeled> out = flat_.axioms;
        out.insert(out.end(), flat_.ctx_theorems.begin(), flat_.ctx_theorems.end());
        return out;
    }

    void push(Sequent s) { out_.push_back(std::move(s)); }

    static void add(std::vector<Labeled>& hyps, const std::vector<Labeled>& items) {
        hyps.insert(hyps.end(), items.begin(), items.end());
    }

    static void add(std::vector<Labeled>& hyps, const std::string& label, FormulaPtr f) {
        hyps.push_back({label, std::move(f), false, {}});
    }

    const Event* abstract_event(const std::string& name) const {
        if (!flat_.abstraction) return nullptr;
        for (const Event& e : flat_.abstraction->events)
            if (e.name == name) return &e;
        return nullptr;
    }

    // Witnesses split by what they witness: an abstract parameter, or a
    // (primed) abstract variable.
    void split_witnesses(const Event& evt, std::vector<Labeled>& for_params,
                         std::vector<Labeled>& for_vars) const {
        for (const Witness& w : evt.witnesses) {
            bool is_param = false;
            auto it = flat_.pairing.find(evt.name);
            if (it != flat_.pairing.end()) {
                for (const auto& aname : it->second) {
                    if (const Event* ae = abstract_event(aname))
                        for (const auto& p : ae->params)
                            if (p == unprimed(w.name)) is_param = true;
                }
            }
            Labeled l{w.name, w.predicate, false, w.span};
            (is_param ? for_params : for_vars).push_back(std::move(l));
        }
    }

    void theorem_pos() {
        std::vector<Labeled> before;
        for (const Labeled& t : flat_.ctx_theorems) {
            Sequent s;
            s.name = t.label + "/THM";
            s.family = "THM";
            add(s.hypotheses, flat_.axioms);
            add(s.hypotheses, before);
            s.goal = t.formula;
            push(std::move(s));
            before.push_back(t);
        }
        // Theorem-marked invariants of this machine, with everything
        // declared before them in scope.
        for (std::size_t i = 0; i < own_invs_.size(); ++i) {
            if (!own_invs_[i].theorem) continue;
            Sequent s;
            s.name = own_invs_[i].label + "/THM";
            s.family = "THM";
            add(s.hypotheses, axioms_and_theorems());
            add(s.hypotheses, abstract_invs_);
            for (std::size_t j = 0; j < i; ++j) s.hypotheses.push_back(own_invs_[j]);
            s.goal = own_invs_[i].formula;
            push(std::move(s));
        }
    }

    void event_pos(const Event& evt) {
        const std::set<std::string> fr = frame(evt.actions);
        const bool refines = flat_.pairing.count(evt.name) > 0;
        const bool is_init = evt.is_init();

        std::vector<Labeled> param_w, var_w;
        split_witnesses(evt, param_w, var_w);

        std::vector<Labeled> primed_bas;
        for (const Action& a : evt.actions)
            primed_bas.push_back({a.label, ba_formula(a, false), false, a.span});

        // INV: own invariants whose variables the event writes.
        for (const Labeled& inv : own_invs_) {
            if (inv.theorem) continue;
            std::set<std::string> overlap;
            const auto fv = free_vars(inv.formula);
            for (const auto& v : fr)
                if (fv.count(v)) overlap.insert(v);
            if (overlap.empty()) continue;
            Sequent s;
            s.name = evt.name + "/" + inv.label + "/INV";
            s.family = "INV";
            if (is_init) {
                add(s.hypotheses, axioms_and_theorems());
                add(s.hypotheses, primed_bas);
            } else if (!flat_.abstraction) {
                add(s.hypotheses, axioms_and_theorems());
                add(s.hypotheses, own_invs_);
                add(s.hypotheses, evt.guards);
                add(s.hypotheses, primed_bas);
            } else {
                add(s.hypotheses, axioms_and_theorems());
                add(s.hypotheses, abstract_invs_);
                add(s.hypotheses, own_invs_);
                add(s.hypotheses, evt.guards);
                add(s.hypotheses, param_w);
                add(s.hypotheses, var_w);
                add(s.hypotheses, primed_bas);
            }
            s.goal = prime_vars(inv.formula, fr);
            push(std::move(s));
        }

        // Refinement families are discharged by construction for
        // extends events, so only explicit refines pairs get them.
        if (refines && !evt.extends_abstract && !is_init) {
            const auto& anames = flat_.pairing.at(evt.name);

            for (const auto& aname : anames) {
                const Event* ae = abstract_event(aname);
                if (!ae) continue;
                if (anames.size() == 1) {
                    for (const Labeled& g : ae->guards) {
                        Sequent s;
                        s.name = evt.name + "/" + g.label + "/GRD";
                        s.family = "GRD";
                        add(s.hypotheses, axioms_and_theorems());
                        add(s.hypotheses, abstract_invs_);
                        add(s.hypotheses, own_invs_);
                        add(s.hypotheses, evt.guards);
                        add(s.hypotheses, param_w);
                        s.goal = g.formula;
                        push(std::move(s));
                    }
                }
                for (const Action& aa : ae->actions) {
                    Sequent s;
                    s.name = evt.name + "/" + aa.label + "/SIM";
                    s.family = "SIM";
                    add(s.hypotheses, axioms_and_theorems());
                    add(s.hypotheses, abstract_invs_);
                    add(s.hypotheses, own_invs_);
                    add(s.hypotheses, evt.guards);
                    add(s.hypotheses, param_w);
                    add(s.hypotheses, var_w);
                    for (const Action& ca : evt.actions)
                        add(s.hypotheses, ca.label, ba_formula(ca, true));
                    s.goal = ba_formula(aa, true);
                    push(std::move(s));
                }
            }

            if (anames.size() >= 2) {
                Sequent s;
                s.name = evt.name + "/MRG";
                s.family = "MRG";
                add(s.hypotheses, axioms_and_theorems());
                add(s.hypotheses, abstract_invs_);
                add(s.hypotheses, evt.guards);
                std::vector<FormulaPtr> disj;
                for (const auto& aname : anames) {
                    if (const Event* ae = abstract_event(aname)) {
                        std::vector<FormulaPtr> gs;
                        for (const Labeled& g : ae->guards) gs.push_back(g.formula);
                        disj.push_back(conj(gs));
                    }
                }
                FormulaPtr goal = disj.empty() ? mk_bool(true) : disj[0];
                for (std::size_t i = 1; i < disj.size(); ++i)
                    goal = mk_node(NodeKind::Or, {goal, disj[i]});
                s.goal = goal;
                push(std::move(s));
            }

            for (const Labeled& w : [&] {
                     std::vector<Labeled> ws = param_w;
                     ws.insert(ws.end(), var_w.begin(), var_w.end());
                     return ws;
                 }()) {
                Sequent s;
                s.name = evt.name + "/" + w.label + "/WFIS";
                s.family = "WFIS";
                add(s.hypotheses, axioms_and_theorems());
                add(s.hypotheses, abstract_invs_);
                add(s.hypotheses, own_invs_);
                add(s.hypotheses, evt.guards);
                add(s.hypotheses, primed_bas);
                FormulaPtr goal = mk_binder(NodeKind::Exists, {w.label}, {w.formula});
                if (TypePtr wt = symbol_type(w.label)) goal->binder_types = {wt};
                s.goal = goal;
                push(std::move(s));
            }
        }

        // FIS: each non-deterministic action must have a solution.
        for (const Action& a : evt.actions) {
            if (a.kind != Action::Kind::NonDeterministic) continue;
            Sequent s;
            s.name = evt.name + "/" + a.label + "/FIS";
            s.family = "FIS";
            add(s.hypotheses, axioms_and_theorems());
            if (!is_init) {
                add(s.hypotheses, flat_.invariants);
                add(s.hypotheses, evt.guards);
            }
            std::vector<std::string> binders;
            std::vector<TypePtr> binder_types;
            bool typed = true;
            for (const auto& v : a.lhs_list) {
                binders.push_back(primed(v));
                TypePtr vt = types_.symbol_type(v);
                typed = typed && vt != nullptr;
                binder_types.push_back(vt);
            }
            FormulaPtr goal = mk_binder(NodeKind::Exists, std::move(binders), {a.predicate});
            if (typed) goal->binder_types = std::move(binder_types);
            s.goal = goal;
            push(std::move(s));
        }

        // Variant families.
        if (flat_.variant && evt.status != EventStatus::Ordinary && !is_init) {
            const TypePtr vt = flat_.variant->type;
            const bool set_variant = vt && vt->kind == TypeTag::Kind::Set;
            if (!set_variant) {
                Sequent s;
                s.name = evt.name + "/NAT";
                s.family = "NAT";
                add(s.hypotheses, axioms_and_theorems());
                add(s.hypotheses, flat_.invariants);
                add(s.hypotheses, evt.guards);
                s.goal = mk_node(NodeKind::Member, {flat_.variant, mk_ident("NAT")});
                push(std::move(s));
            }
            Sequent s;
            s.name = evt.name + "/VAR";
            s.family = "VAR";
            add(s.hypotheses, axioms_and_theorems());
            add(s.hypotheses, flat_.invariants);
            add(s.hypotheses, evt.guards);
            add(s.hypotheses, primed_bas);
            // Modified variant: frame variables replaced by their new values.
            std::vector<std::pair<std::string, FormulaPtr>> subst;
            for (const Action& a : evt.actions) {
                if (a.kind == Action::Kind::Deterministic) {
                    FormulaPtr rhs = a.rhs;
                    if (a.index) rhs = nullptr;
                    if (rhs)
                        subst.emplace_back(a.lhs, rhs);
                    else
                        subst.emplace_back(a.lhs, mk_ident(primed(a.lhs)));
                } else {
                    for (const auto& v : a.lhs_list)
                        subst.emplace_back(v, mk_ident(primed(v)));
                }
            }
            FormulaPtr modified = substitute(flat_.variant, subst);
            const bool convergent = evt.status == EventStatus::Convergent;
            NodeKind cmp;
            if (set_variant)
                cmp = convergent ? NodeKind::ProperSubset : NodeKind::Subset;
            else
                cmp = convergent ? NodeKind::Lt : NodeKind::Le;
            s.goal = mk_node(cmp, {modified, flat_.variant});
            push(std::move(s));
        }
    }

    // ---- well-definedness --------------------------------------------

    /// Context of a subterm: the binder groups above it (outermost
    /// first, with their inferred types) and the conditions that guard
    /// its evaluation (left conjuncts, implication antecedents).
    struct WdCtx {
        std::vector<std::pair<std::vector<std::string>, std::vector<TypePtr>>> binder_groups;
        std::vector<FormulaPtr> conds;
    };

    /// The local well-definedness condition, closed under the context:
    /// conds become antecedents, binder groups become universals.
    FormulaPtr close_over(const WdCtx& ctx, FormulaPtr wd) {
        for (auto it = ctx.conds.rbegin(); it != ctx.conds.rend(); ++it)
            wd = mk_node(NodeKind::Implies, {*it, wd});
        for (auto it = ctx.binder_groups.rbegin(); it != ctx.binder_groups.rend(); ++it) {
            FormulaPtr wrapped = mk_binder(NodeKind::Forall, it->first, {wd});
            wrapped->binder_types = it->second;
            wd = wrapped;
        }
        return wd;
    }

    void wd_walk(const FormulaPtr& f, WdCtx& ctx, std::vector<FormulaPtr>& out) {
        switch (f->kind) {
        case NodeKind::And:
        case NodeKind::Implies: {
            wd_walk(f->kids[0], ctx, out);
            ctx.conds.push_back(f->kids[0]);
            wd_walk(f->kids[1], ctx, out);
            ctx.conds.pop_back();
            return;
        }
        case NodeKind::Or: {
            wd_walk(f->kids[0], ctx, out);
            ctx.conds.push_back(mk_node(NodeKind::Not, {f->kids[0]}));
            wd_walk(f->kids[1], ctx, out);
            ctx.conds.pop_back();
            return;
        }
        case NodeKind::Forall:
        case NodeKind::Exists:
        case NodeKind::SetComp:
        case NodeKind::QuantUnion:
        case NodeKind::QuantInter: {
            ctx.binder_groups.emplace_back(f->binders, f->binder_types);
            wd_walk(f->kids[0], ctx, out);
            if (f->kids.size() > 1) {
                // the element expression is evaluated under the predicate
                ctx.conds.push_back(f->kids[0]);
                wd_walk(f->kids[1], ctx, out);
                ctx.conds.pop_back();
            }
            ctx.binder_groups.pop_back();
            return;
        }
        default:
            break;
        }
        // bottom-up: inner occurrences first
        for (const auto& k : f->kids) wd_walk(k, ctx, out);
        switch (f->kind) {
        case NodeKind::Apply: {
            const FormulaPtr& fn = f->kids[0];
            FormulaPtr in_dom =
                mk_node(NodeKind::Member, {f->kids[1], mk_node(NodeKind::Dom, {fn})});
            FormulaPtr functional;
            if (fn->type && fn->type->kind == TypeTag::Kind::Set &&
                fn->type->left->kind == TypeTag::Kind::Pair) {
                functional = mk_node(
                    NodeKind::Member,
                    {fn, mk_relset(RelKind::Pfun, type_to_set_expr(fn->type->left->left),
                                   type_to_set_expr(fn->type->left->right))});
            } else {
                functional = mk_bool(true);
            }
            out.push_back(close_over(ctx, mk_node(NodeKind::And, {in_dom, functional})));
            break;
        }
        case NodeKind::Div:
        case NodeKind::Mod:
            out.push_back(close_over(
                ctx, mk_node(NodeKind::Not, {mk_node(NodeKind::Equal, {f->kids[1], mk_int(0)})})));
            break;
        case NodeKind::MinOf:
        case NodeKind::MaxOf:
            out.push_back(close_over(
                ctx,
                mk_node(NodeKind::Not,
                        {mk_node(NodeKind::Equal, {f->kids[0], mk_node(NodeKind::SetExt, {})})})));
            break;
        default:
            break;
        }
    }

    void wd_push(const std::string& base_name, const FormulaPtr& formula,
                 const std::vector<Labeled>& hyps) {
        std::vector<FormulaPtr> goals;
        WdCtx ctx;
        wd_walk(formula, ctx, goals);
        std::size_t k = 0;
        for (const FormulaPtr& goal : goals) {
            Sequent s;
            s.name = base_name + "/WD";
            if (++k > 1) s.name += "@" + std::to_string(k);
            s.family = "WD";
            s.hypotheses = hyps;
            s.goal = goal;
            push(std::move(s));
        }
    }

    void wd_pos() {
        // Context items: axioms see what precedes them, theorems see all axioms.
        std::vector<Labeled> before;
        for (const Labeled& ax : flat_.axioms) {
            wd_push(ax.label, ax.formula, before);
            before.push_back(ax);
        }
        for (const Labeled& t : flat_.ctx_theorems) {
            wd_push(t.label, t.formula, before);
            before.push_back(t);
        }
        // Own invariants: axioms, theorems and the chain before them.
        std::vector<Labeled> inv_hyps = axioms_and_theorems();
        add(inv_hyps, abstract_invs_);
        for (const Labeled& inv : own_invs_) {
            wd_push(inv.label, inv.formula, inv_hyps);
            inv_hyps.push_back(inv);
        }
        // Events: guards see earlier guards; witnesses and actions see all guards.
        std::vector<Labeled> base = axioms_and_theorems();
        add(base, flat_.invariants);
        for (const Event& evt : flat_.events) {
            std::vector<Labeled> hyps = base;
            for (const Labeled& g : evt.guards) {
                wd_push(evt.name + "/" + g.label, g.formula, hyps);
                hyps.push_back(g);
            }
            for (const Witness& w : evt.witnesses)
                wd_push(evt.name + "/" + w.name, w.predicate, hyps);
            for (const Action& a : evt.actions) {
                if (a.kind == Action::Kind::Deterministic) {
                    wd_push(evt.name + "/" + a.label, a.rhs, hyps);
                    if (a.index) wd_push(evt.name + "/" + a.label, a.index, hyps);
                } else {
                    wd_push(evt.name + "/" + a.label, a.predicate, hyps);
                }
            }
        }
        if (flat_.variant) {
            std::vector<Labeled> hyps = axioms_and_theorems();
            add(hyps, flat_.invariants);
            wd_push("variant", flat_.variant, hyps);
        }
    }

    // ---- free symbols ---------------------------------------------------

    TypePtr symbol_type(const std::string& name) const {
        const std::string base = unprimed(name);
        if (TypePtr t = types_.symbol_type(base)) return t;
        // event parameters, searched across the whole chain
        const FlatMachine* cur = &flat_;
        while (cur) {
            for (const Event& e : cur->events)
                if (TypePtr t = types_.param_type(cur->name, e.name, base)) return t;
            cur = cur->abstraction.get();
        }
        return nullptr;
    }

    void collect_symbols(Sequent& s) const {
        std::set<std::string> seen;
        std::vector<std::string> order;
        auto note = [&](const FormulaPtr& f) {
            for (const auto& v : free_vars(f)) {
                if (builtin_name(v)) continue;
                if (std::find(flat_.sets.begin(), flat_.sets.end(), v) != flat_.sets.end())
                    continue; // carriers are fixed universes, not enumerated symbols
                if (seen.insert(v).second) order.push_back(v);
            }
        };
        for (const Labeled& h : s.hypotheses) note(h.formula);
        note(s.goal);
        // Constants first, then variables, then everything else in
        // first-occurrence order; primed names at the end.
        auto rank = [&](const std::string& n) {
            if (is_primed(n)) return 3;
            if (std::find(flat_.constants.begin(), flat_.constants.end(), n) !=
                flat_.constants.end())
                return 0;
            if (std::find(flat_.variables.begin(), flat_.variables.end(), n) !=
                flat_.variables.end())
                return 1;
            return 2;
        };
        std::stable_sort(order.begin(), order.end(),
                         [&](const std::string& a, const std::string& b) {
                             return rank(a) < rank(b);
                         });
        for (const auto& n : order) {
            TypePtr t = symbol_type(n);
            if (!t)
                throw TypecheckError({}, "UntypedIdentifier: '" + n + "' in sequent " + s.name);
            s.free_symbols.emplace_back(n, t);
        }
    }
};

} // namespace

std::vector<Sequent> gen_pos(const Project& project, const TypedProject& types,
                             const std::string& machine_name) {
    return PoBuilder(project, types, machine_name).run();
}

// ---------------------------------------------------------------------------
// Finite checking.

Verdict check_sequent_finite(const Sequent& seq, const CheckBounds& bounds) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict verdict;
    auto finish = [&](Verdict::Kind kind) {
        verdict.kind = kind;
        verdict.elapsed_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
        return verdict;
    };

    Grounding ground;
    ground.limits = bounds.limits;
    ground.int_range = bounds.int_range;
    std::set<std::string> carrier_names;
    auto collect_carriers = [&](const TypePtr& t, auto&& self) -> void {
        if (t->kind == TypeTag::Kind::Carrier) carrier_names.insert(t->carrier);
        if (t->left) self(t->left, self);
        if (t->right) self(t->right, self);
    };
    for (const auto& [n, t] : seq.free_symbols) collect_carriers(t, collect_carriers);
    // Carrier names can also appear directly in formulas.
    auto note_idents = [&](const FormulaPtr& f, auto&& self) -> void {
        if (f->kind == NodeKind::Ident && !builtin_name(f->name) && f->type &&
            f->type->kind == TypeTag::Kind::Set &&
            f->type->left->kind == TypeTag::Kind::Carrier &&
            f->type->left->carrier == f->name)
            carrier_names.insert(f->name);
        for (const auto& k : f->kids) self(k, self);
    };
    for (const Labeled& h : seq.hypotheses) note_idents(h.formula, note_idents);
    if (seq.goal) note_idents(seq.goal, note_idents);
    for (const auto& c : carrier_names) {
        auto it = bounds.carrier_sizes.find(c);
        const std::int64_t k = it == bounds.carrier_sizes.end() ? bounds.default_carrier_size
                                                                : it->second;
        ground.carriers[c] = interval(0, k - 1);
    }

    std::vector<std::vector<Value>> domains;
    for (const auto& [name, type] : seq.free_symbols) {
        try {
            domains.push_back(type_universe(type, ground, name));
        } catch (const EvalError&) {
            verdict.unbounded_symbol = name;
            return finish(Verdict::Kind::Unbounded);
        }
    }

    // Each hypothesis is evaluated as soon as all its symbols are bound.
    const std::size_t n = seq.free_symbols.size();
    std::vector<std::vector<FormulaPtr>> ready(n + 1);
    auto depth_of = [&](const FormulaPtr& f) {
        std::size_t depth = 0;
        for (const auto& v : free_vars(f)) {
            for (std::size_t i = 0; i < n; ++i)
                if (seq.free_symbols[i].first == v) depth = std::max(depth, i + 1);
        }
        return depth;
    };
    for (const Labeled& h : seq.hypotheses) ready[depth_of(h.formula)].push_back(h.formula);

    Env env;
    std::function<bool(std::size_t)> walk = [&](std::size_t depth) -> bool {
        ++verdict.states_checked;
        for (const FormulaPtr& h : ready[depth]) {
            try {
                if (!eval_bool(h, env, ground)) return true; // prune, keep searching
            } catch (const EvalError&) {
                return true; // undefined hypothesis: no assignment here
            }
        }
        if (depth == n) {
            bool ok;
            try {
                ok = eval_bool(seq.goal, env, ground);
            } catch (const EvalError&) {
                ok = false; // undefined goal under true hypotheses
            }
            if (ok) return true;
            for (const auto& [name, type] : seq.free_symbols) verdict.assignment[name] = env[name];
            return false;
        }
        const std::string& name = seq.free_symbols[depth].first;
        for (const Value& v : domains[depth]) {
            env[name] = v;
            if (!walk(depth + 1)) return false;
        }
        env.erase(name);
        return true;
    };

    if (!walk(0)) return finish(Verdict::Kind::Counterexample);
    return finish(Verdict::Kind::Valid);
}

// ---------------------------------------------------------------------------
// VC emission.

namespace {

const char* vc_op(NodeKind k) {
    switch (k) {
    case NodeKind::Not: return "not";
    case NodeKind::And: return "and";
    case NodeKind::Or: return "or";
    case NodeKind::Implies: return "implies";
    case NodeKind::Iff: return "iff";
    case NodeKind::Forall: return "forall";
    case NodeKind::Exists: return "exists";
    case NodeKind::Equal: return "equal";
    case NodeKind::Member: return "in";
    case NodeKind::Subset: return "subset";
    case NodeKind::ProperSubset: return "psubset";
    case NodeKind::Lt: return "lt";
    case NodeKind::Le: return "le";
    case NodeKind::Gt: return "gt";
    case NodeKind::Ge: return "ge";
    case NodeKind::FinitePred: return "finite";
    case NodeKind::Partition: return "partition";
    case NodeKind::Maplet: return "maplet";
    case NodeKind::SetExt: return "set";
    case NodeKind::SetComp: return "comp";
    case NodeKind::IntervalExpr: return "interval";
    case NodeKind::Add: return "add";
    case NodeKind::Sub: return "sub";
    case NodeKind::Mul: return "mul";
    case NodeKind::Div: return "div";
    case NodeKind::Mod: return "mod";
    case NodeKind::Exp: return "exp";
    case NodeKind::Union: return "union";
    case NodeKind::Inter: return "inter";
    case NodeKind::Diff: return "diff";
    case NodeKind::Cross: return "cross";
    case NodeKind::Pow: return "pow";
    case NodeKind::GenUnion: return "gunion";
    case NodeKind::GenInter: return "ginter";
    case NodeKind::QuantUnion: return "qunion";
    case NodeKind::QuantInter: return "qinter";
    case NodeKind::Dom: return "dom";
    case NodeKind::Ran: return "ran";
    case NodeKind::Inverse: return "inv";
    case NodeKind::Image: return "image";
    case NodeKind::Apply: return "apply";
    case NodeKind::DomRes: return "domres";
    case NodeKind::RanRes: return "ranres";
    case NodeKind::DomSub: return "domsub";
    case NodeKind::RanSub: return "ransub";
    case NodeKind::Fcomp: return "fcomp";
    case NodeKind::Bcomp: return "bcomp";
    case NodeKind::Ovl: return "ovl";
    case NodeKind::Dprod: return "dprod";
    case NodeKind::Pprod: return "pprod";
    case NodeKind::IdOn: return "id";
    case NodeKind::Prj1: return "prj1";
    case NodeKind::Prj2: return "prj2";
    case NodeKind::Card: return "card";
    case NodeKind::MinOf: return "min";
    case NodeKind::MaxOf: return "max";
    case NodeKind::RelSet: return "relset";
    case NodeKind::Old: return "old";
    default: return "?";
    }
}

const char* relkind_atom(RelKind k) {
    switch (k) {
    case RelKind::Rel: return "rel";
    case RelKind::Trel: return "trel";
    case RelKind::Srel: return "srel";
    case RelKind::Strel: return "strel";
    case RelKind::Pfun: return "pfun";
    case RelKind::Tfun: return "tfun";
    case RelKind::Pinj: return "pinj";
    case RelKind::Tinj: return "tinj";
    case RelKind::Psur: return "psur";
    case RelKind::Tsur: return "tsur";
    case RelKind::Tbij: return "tbij";
    }
    return "?";
}

void vc_formula(std::ostringstream& os, const Formula& f) {
    switch (f.kind) {
    case NodeKind::IntLit:
        os << f.int_val;
        return;
    case NodeKind::BoolLit:
        os << (f.bool_val ? "true" : "false");
        return;
    case NodeKind::Ident:
        os << f.name;
        return;
    default:
        break;
    }
    os << "(" << vc_op(f.kind);
    if (f.kind == NodeKind::RelSet) os << " " << relkind_atom(f.rel);
    if (!f.binders.empty()) {
        os << " (";
        for (std::size_t i = 0; i < f.binders.size(); ++i) {
            if (i) os << " ";
            os << f.binders[i];
        }
        os << ")";
    }
    for (const auto& k : f.kids) {
        os << " ";
        vc_formula(os, *k);
    }
    os << ")";
}

void vc_type(std::ostringstream& os, const TypeTag& t) {
    switch (t.kind) {
    case TypeTag::Kind::Int: os << "INT"; return;
    case TypeTag::Kind::Bool: os << "BOOL"; return;
    case TypeTag::Kind::Carrier: os << "(CARRIER " << t.carrier << ")"; return;
    case TypeTag::Kind::Pair:
        os << "(PAIR ";
        vc_type(os, *t.left);
        os << " ";
        vc_type(os, *t.right);
        os << ")";
        return;
    case TypeTag::Kind::Set:
        os << "(SET ";
        vc_type(os, *t.left);
        os << ")";
        return;
    }
}

} // namespace

std::string emit_vc(const Sequent& seq) {
    std::ostringstream os;
    os << "(vc \"" << seq.name << "\"\n";
    for (const auto& [name, type] : seq.free_symbols) {
        os << "  (declare " << name << " ";
        vc_type(os, *type);
        os << ")\n";
    }
    for (const Labeled& h : seq.hypotheses) {
        os << "  (assume \"" << h.label << "\" ";
        vc_formula(os, *h.formula);
        os << ")\n";
    }
    os << "  (assert ";
    vc_formula(os, *seq.goal);
    os << "))\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// VC reader.

namespace {

struct Sexp {
    std::string atom; // empty for lists
    bool is_string = false;
    std::vector<Sexp> items;
};

class SexpReader {
public:
    explicit SexpReader(const std::string& text) : text_(text) {}

    Sexp read() {
        skip();
        return read_one();
    }

private:
    void skip() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    Sexp read_one() {
        skip();
        if (pos_ >= text_.size())
            throw EvalError(EvalError::Code::Unsupported, "vc reader: unexpected end");
        if (text_[pos_] == '(') {
            ++pos_;
            Sexp list;
            for (;;) {
                skip();
                if (pos_ >= text_.size())
                    throw EvalError(EvalError::Code::Unsupported, "vc reader: missing ')'");
                if (text_[pos_] == ')') {
                    ++pos_;
                    return list;
                }
                list.items.push_back(read_one());
            }
        }
        if (text_[pos_] == '"') {
            ++pos_;
            Sexp s;
            s.is_string = true;
            while (pos_ < text_.size() && text_[pos_] != '"') s.atom += text_[pos_++];
            ++pos_;
            return s;
        }
        Sexp s;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')')
            s.atom += text_[pos_++];
        return s;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

NodeKind vc_kind(const std::string& op) {
    static const std::map<std::string, NodeKind> m = {
        {"not", NodeKind::Not}, {"and", NodeKind::And}, {"or", NodeKind::Or},
        {"implies", NodeKind::Implies}, {"iff", NodeKind::Iff}, {"forall", NodeKind::Forall},
        {"exists", NodeKind::Exists}, {"equal", NodeKind::Equal}, {"in", NodeKind::Member},
        {"subset", NodeKind::Subset}, {"psubset", NodeKind::ProperSubset},
        {"lt", NodeKind::Lt}, {"le", NodeKind::Le}, {"gt", NodeKind::Gt}, {"ge", NodeKind::Ge},
        {"finite", NodeKind::FinitePred}, {"partition", NodeKind::Partition},
        {"maplet", NodeKind::Maplet}, {"set", NodeKind::SetExt}, {"comp", NodeKind::SetComp},
        {"interval", NodeKind::IntervalExpr}, {"add", NodeKind::Add}, {"sub", NodeKind::Sub},
        {"mul", NodeKind::Mul}, {"div", NodeKind::Div}, {"mod", NodeKind::Mod},
        {"exp", NodeKind::Exp}, {"union", NodeKind::Union}, {"inter", NodeKind::Inter},
        {"diff", NodeKind::Diff}, {"cross", NodeKind::Cross}, {"pow", NodeKind::Pow},
        {"gunion", NodeKind::GenUnion}, {"ginter", NodeKind::GenInter},
        {"qunion", NodeKind::QuantUnion}, {"qinter", NodeKind::QuantInter},
        {"dom", NodeKind::Dom}, {"ran", NodeKind::Ran}, {"inv", NodeKind::Inverse},
        {"image", NodeKind::Image}, {"apply", NodeKind::Apply}, {"domres", NodeKind::DomRes},
        {"ranres", NodeKind::RanRes}, {"domsub", NodeKind::DomSub},
        {"ransub", NodeKind::RanSub}, {"fcomp", NodeKind::Fcomp}, {"bcomp", NodeKind::Bcomp},
        {"ovl", NodeKind::Ovl}, {"dprod", NodeKind::Dprod}, {"pprod", NodeKind::Pprod},
        {"id", NodeKind::IdOn}, {"prj1", NodeKind::Prj1}, {"prj2", NodeKind::Prj2},
        {"card", NodeKind::Card}, {"min", NodeKind::MinOf}, {"max", NodeKind::MaxOf},
        {"relset", NodeKind::RelSet}, {"old", NodeKind::Old},
    };
    auto it = m.find(op);
    if (it == m.end())
        throw EvalError(EvalError::Code::Unsupported, "vc reader: unknown operator " + op);
    return it->second;
}

RelKind vc_relkind(const std::string& a) {
    static const std::map<std::string, RelKind> m = {
        {"rel", RelKind::Rel},   {"trel", RelKind::Trel}, {"srel", RelKind::Srel},
        {"strel", RelKind::Strel}, {"pfun", RelKind::Pfun}, {"tfun", RelKind::Tfun},
        {"pinj", RelKind::Pinj}, {"tinj", RelKind::Tinj}, {"psur", RelKind::Psur},
        {"tsur", RelKind::Tsur}, {"tbij", RelKind::Tbij},
    };
    return m.at(a);
}

FormulaPtr sexp_formula(const Sexp& s) {
    if (!s.items.empty()) {
        const std::string& op = s.items[0].atom;
        NodeKind kind = vc_kind(op);
        std::size_t i = 1;
        RelKind rel = RelKind::Rel;
        if (kind == NodeKind::RelSet) rel = vc_relkind(s.items[i++].atom);
        std::vector<std::string> binders;
        if (kind == NodeKind::Forall || kind == NodeKind::Exists ||
            kind == NodeKind::SetComp || kind == NodeKind::QuantUnion ||
            kind == NodeKind::QuantInter) {
            for (const Sexp& b : s.items[i].items) binders.push_back(b.atom);
            ++i;
        }
        std::vector<FormulaPtr> kids;
        for (; i < s.items.size(); ++i) kids.push_back(sexp_formula(s.items[i]));
        if (kind == NodeKind::RelSet) return mk_relset(rel, kids[0], kids[1]);
        if (!binders.empty() || kind == NodeKind::Forall || kind == NodeKind::Exists)
            return mk_binder(kind, std::move(binders), std::move(kids));
        return mk_node(kind, std::move(kids));
    }
    if (s.atom == "true") return mk_bool(true);
    if (s.atom == "false") return mk_bool(false);
    if (s.atom.find_first_not_of("-0123456789") == std::string::npos &&
        (std::isdigit(static_cast<unsigned char>(s.atom[0])) ||
         (s.atom.size() > 1 && s.atom[0] == '-')))
        return mk_int(std::stoll(s.atom));
    return mk_ident(s.atom);
}

TypePtr sexp_type(const Sexp& s) {
    if (s.items.empty()) {
        if (s.atom == "INT") return TypeTag::int_type();
        if (s.atom == "BOOL") return TypeTag::bool_type();
        throw EvalError(EvalError::Code::Unsupported, "vc reader: unknown type " + s.atom);
    }
    const std::string& head = s.items[0].atom;
    if (head == "CARRIER") return TypeTag::carrier_type(s.items[1].atom);
    if (head == "PAIR") return TypeTag::pair_type(sexp_type(s.items[1]), sexp_type(s.items[2]));
    if (head == "SET") return TypeTag::set_type(sexp_type(s.items[1]));
    throw EvalError(EvalError::Code::Unsupported, "vc reader: unknown type " + head);
}

} // namespace

Sequent parse_vc(const std::string& text) {
    SexpReader reader(text);
    Sexp root = reader.read();
    Sequent seq;
    if (root.items.empty() || root.items[0].atom != "vc")
        throw EvalError(EvalError::Code::Unsupported, "vc reader: expected (vc ...)");
    seq.name = root.items[1].atom;
    const auto slash = seq.name.rfind('/');
    seq.family = slash == std::string::npos ? seq.name : seq.name.substr(slash + 1);
    const auto at = seq.family.find('@');
    if (at != std::string::npos) seq.family = seq.family.substr(0, at);
    for (std::size_t i = 2; i < root.items.size(); ++i) {
        const Sexp& item = root.items[i];
        const std::string& head = item.items[0].atom;
        if (head == "declare") {
            seq.free_symbols.emplace_back(item.items[1].atom, sexp_type(item.items[2]));
        } else if (head == "assume") {
            Labeled l;
            l.label = item.items[1].atom;
            l.formula = sexp_formula(item.items[2]);
            seq.hypotheses.push_back(std::move(l));
        } else if (head == "assert") {
            seq.goal = sexp_formula(item.items[1]);
        }
    }
    return seq;
}

} // namespace ebforge
