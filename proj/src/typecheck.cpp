#include "ebforge/typecheck.hpp"

#include <deque>
#include <functional>

namespace ebforge {

TypePtr TypedProject::symbol_type(const std::string& name) const {
    auto it = symbols.find(name);
    return it == symbols.end() ? nullptr : it->second;
}

TypePtr TypedProject::param_type(const std::string& machine, const std::string& event,
                                 const std::string& param) const {
    auto it = params.find(machine + "/" + event + "/" + param);
    return it == params.end() ? nullptr : it->second;
}

namespace {

struct Term {
    enum class K : std::uint8_t { Var, Int, Bool, Carrier, Pair, Set } k;
    int var_id = -1;       // Var
    std::string carrier;   // Carrier
    Term* a = nullptr;     // Pair left / Set element
    Term* b = nullptr;     // Pair right
    Term* bound = nullptr; // Var binding after unification
};

class Unifier {
public:
    Term* fresh() {
        arena_.push_back(Term{Term::K::Var, next_id_++, "", nullptr, nullptr, nullptr});
        return &arena_.back();
    }
    Term* int_t() { return make(Term::K::Int); }
    Term* bool_t() { return make(Term::K::Bool); }
    Term* carrier_t(const std::string& name) {
        arena_.push_back(Term{Term::K::Carrier, -1, name, nullptr, nullptr, nullptr});
        return &arena_.back();
    }
    Term* pair_t(Term* a, Term* b) {
        arena_.push_back(Term{Term::K::Pair, -1, "", a, b, nullptr});
        return &arena_.back();
    }
    Term* set_t(Term* e) {
        arena_.push_back(Term{Term::K::Set, -1, "", e, nullptr, nullptr});
        return &arena_.back();
    }

    Term* find(Term* t) {
        while (t->k == Term::K::Var && t->bound) t = t->bound;
        return t;
    }

    void unify(Term* x, Term* y, const SourceSpan& span) {
        x = find(x);
        y = find(y);
        if (x == y) return;
        if (x->k == Term::K::Var) {
            occurs_check(x, y, span);
            x->bound = y;
            return;
        }
        if (y->k == Term::K::Var) {
            occurs_check(y, x, span);
            y->bound = x;
            return;
        }
        if (x->k != y->k)
            throw TypecheckError(span, "TypeMismatch: expected " + str(x) + ", found " + str(y));
        switch (x->k) {
        case Term::K::Int:
        case Term::K::Bool:
            return;
        case Term::K::Carrier:
            if (x->carrier != y->carrier)
                throw TypecheckError(span, "TypeMismatch: expected " + str(x) + ", found " +
                                               str(y));
            return;
        case Term::K::Pair:
            unify(x->a, y->a, span);
            unify(x->b, y->b, span);
            return;
        case Term::K::Set:
            unify(x->a, y->a, span);
            return;
        case Term::K::Var:
            return; // unreachable
        }
    }

    std::string str(Term* t) {
        t = find(t);
        switch (t->k) {
        case Term::K::Var: return "?" + std::to_string(t->var_id);
        case Term::K::Int: return "INT";
        case Term::K::Bool: return "BOOL";
        case Term::K::Carrier: return t->carrier;
        case Term::K::Pair: return "(" + str(t->a) + " ** " + str(t->b) + ")";
        case Term::K::Set: return "POW(" + str(t->a) + ")";
        }
        return "?";
    }

    /// Null if the term still contains an unbound variable.
    TypePtr resolve(Term* t) {
        t = find(t);
        switch (t->k) {
        case Term::K::Var: return nullptr;
        case Term::K::Int: return TypeTag::int_type();
        case Term::K::Bool: return TypeTag::bool_type();
        case Term::K::Carrier: return TypeTag::carrier_type(t->carrier);
        case Term::K::Pair: {
            TypePtr a = resolve(t->a), b = resolve(t->b);
            return a && b ? TypeTag::pair_type(a, b) : nullptr;
        }
        case Term::K::Set: {
            TypePtr e = resolve(t->a);
            return e ? TypeTag::set_type(e) : nullptr;
        }
        }
        return nullptr;
    }

private:
    Term* make(Term::K k) {
        arena_.push_back(Term{k, -1, "", nullptr, nullptr, nullptr});
        return &arena_.back();
    }

    void occurs_check(Term* var, Term* in, const SourceSpan& span) {
        in = find(in);
        if (in == var)
            throw TypecheckError(span, "TypeMismatch: cyclic type constraint");
        if (in->k == Term::K::Pair || in->k == Term::K::Set) {
            occurs_check(var, in->a, span);
            if (in->b) occurs_check(var, in->b, span);
        }
    }

    std::deque<Term> arena_;
    int next_id_ = 0;
};

class Inference {
public:
    explicit Inference(const Project& project) : project_(project) {}

    TypedProject run() {
        declare_symbols();
        for (const Context& c : project_.contexts) {
            for (const Labeled& a : c.axioms) visit_pred(a.formula);
            for (const Labeled& t : c.theorems) visit_pred(t.formula);
        }
        for (const Machine& m : project_.machines) visit_machine(m);
        return resolve_all();
    }

private:
    const Project& project_;
    Unifier u_;
    TypedProject out_;
    std::map<std::string, Term*> globals_;
    std::map<std::string, Term*> params_; // machine/event/param
    std::vector<std::map<std::string, Term*>> binder_scopes_;
    std::vector<std::pair<const Formula*, Term*>> node_terms_;
    const Machine* cur_machine_ = nullptr;
    const Event* cur_event_ = nullptr;

    void declare_global(const std::string& name, Term* t) {
        if (globals_.count(name)) return;
        globals_[name] = t;
        out_.symbol_order.push_back(name);
    }

    void declare_symbols() {
        for (const Context& c : project_.contexts) {
            for (const auto& s : c.sets) {
                declare_global(s, u_.set_t(u_.carrier_t(s)));
                out_.carriers.insert(s);
            }
            for (const auto& k : c.constants) declare_global(k, u_.fresh());
        }
        for (const Machine& m : project_.machines)
            for (const auto& v : m.variables) declare_global(v, u_.fresh());
    }

    Term* lookup(const std::string& name, const SourceSpan& span) {
        for (auto it = binder_scopes_.rbegin(); it != binder_scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return f->second;
        }
        if (cur_machine_ && cur_event_) {
            auto f = params_.find(param_key(name));
            if (f != params_.end()) return f->second;
        }
        const std::string base = unprimed(name);
        auto g = globals_.find(base);
        if (g != globals_.end()) return g->second;
        if (cur_machine_ && cur_event_ && is_primed(name)) {
            auto f = params_.find(param_key(base));
            if (f != params_.end()) return f->second;
        }
        throw TypecheckError(span, "UntypedIdentifier: '" + name + "' is not declared");
    }

    std::string param_key(const std::string& p) const {
        return cur_machine_->name + "/" + cur_event_->name + "/" + p;
    }

    void visit_machine(const Machine& m) {
        cur_machine_ = &m;
        for (const Labeled& inv : m.invariants) visit_pred(inv.formula);
        if (m.variant) visit_expr(m.variant); // numeric or set; both admissible
        for (const Event& e : m.events) {
            cur_event_ = &e;
            for (const auto& p : e.params) {
                const std::string key = param_key(p);
                if (!params_.count(key)) {
                    params_[key] = u_.fresh();
                    out_.param_order.push_back(key);
                }
            }
            for (const Labeled& g : e.guards) visit_pred(g.formula);
            for (const Witness& w : e.witnesses) visit_witness(m, e, w);
            for (const Action& a : e.actions) visit_action(a);
            cur_event_ = nullptr;
        }
        cur_machine_ = nullptr;
    }

    void visit_witness(const Machine& m, const Event& e, const Witness& w) {
        // The witnessed name is an abstract parameter or a primed abstract
        // variable; give it a scope of its own.
        binder_scopes_.emplace_back();
        Term* t = nullptr;
        const std::string base = unprimed(w.name);
        if (auto g = globals_.find(base); g != globals_.end()) {
            t = g->second;
        } else if (!e.refines.empty()) {
            if (const Machine* am = project_.find_machine(m.refines)) {
                for (const auto& rname : e.refines) {
                    if (const Event* ae = am->find_event(rname)) {
                        for (const auto& p : ae->params)
                            if (p == base) {
                                const std::string key = am->name + "/" + ae->name + "/" + p;
                                if (!params_.count(key)) {
                                    params_[key] = u_.fresh();
                                    out_.param_order.push_back(key);
                                }
                                t = params_[key];
                            }
                    }
                }
            }
        }
        if (!t) t = u_.fresh();
        binder_scopes_.back()[w.name] = t;
        visit_pred(w.predicate);
        binder_scopes_.pop_back();
    }

    void visit_action(const Action& a) {
        if (a.kind == Action::Kind::Deterministic) {
            Term* lhs = lookup(a.lhs, a.span);
            Term* rhs = visit_expr(a.rhs);
            if (a.index) {
                Term* idx = visit_expr(a.index);
                u_.unify(lhs, u_.set_t(u_.pair_t(idx, rhs)), a.span);
            } else {
                u_.unify(lhs, rhs, a.span);
            }
        } else {
            visit_pred(a.predicate);
        }
    }

    void record(const Formula& f, Term* t) {
        node_terms_.emplace_back(&f, t);
    }

    void visit_pred(const FormulaPtr& fp) {
        const Formula& f = *fp;
        switch (f.kind) {
        case NodeKind::Not:
            visit_pred(f.kids[0]);
            break;
        case NodeKind::And:
        case NodeKind::Or:
        case NodeKind::Implies:
        case NodeKind::Iff:
            visit_pred(f.kids[0]);
            visit_pred(f.kids[1]);
            break;
        case NodeKind::Forall:
        case NodeKind::Exists: {
            binder_scopes_.emplace_back();
            std::vector<Term*> ts;
            for (const auto& b : f.binders) {
                Term* t = u_.fresh();
                binder_scopes_.back()[b] = t;
                ts.push_back(t);
            }
            visit_pred(f.kids[0]);
            annotate_binders(f, ts);
            binder_scopes_.pop_back();
            break;
        }
        case NodeKind::Equal:
            u_.unify(visit_expr(f.kids[0]), visit_expr(f.kids[1]), f.span);
            break;
        case NodeKind::Member:
            u_.unify(u_.set_t(visit_expr(f.kids[0])), visit_expr(f.kids[1]), f.span);
            break;
        case NodeKind::Subset:
        case NodeKind::ProperSubset: {
            Term* a = visit_expr(f.kids[0]);
            Term* b = visit_expr(f.kids[1]);
            u_.unify(a, b, f.span);
            u_.unify(a, u_.set_t(u_.fresh()), f.span);
            break;
        }
        case NodeKind::Lt:
        case NodeKind::Le:
        case NodeKind::Gt:
        case NodeKind::Ge:
            u_.unify(visit_expr(f.kids[0]), u_.int_t(), f.span);
            u_.unify(visit_expr(f.kids[1]), u_.int_t(), f.span);
            break;
        case NodeKind::FinitePred:
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.fresh()), f.span);
            break;
        case NodeKind::Partition: {
            Term* elem = u_.fresh();
            for (const auto& k : f.kids) u_.unify(visit_expr(k), u_.set_t(elem), f.span);
            break;
        }
        default:
            // A bare expression in predicate position must be boolean.
            u_.unify(visit_expr(fp), u_.bool_t(), f.span);
            return;
        }
        f.type = TypeTag::bool_type();
    }

    void annotate_binders(const Formula& f, const std::vector<Term*>& ts) {
        // Stash terms; final resolution happens in resolve_all.
        binder_nodes_.emplace_back(&f, ts);
    }

    Term* visit_expr(const FormulaPtr& fp) {
        const Formula& f = *fp;
        Term* t = expr_term(f);
        record(f, t);
        return t;
    }

    Term* expr_term(const Formula& f) {
        switch (f.kind) {
        case NodeKind::IntLit: return u_.int_t();
        case NodeKind::BoolLit: return u_.bool_t();
        case NodeKind::Ident: {
            if (f.name == "INT" || f.name == "NAT" || f.name == "NAT1")
                return u_.set_t(u_.int_t());
            if (f.name == "BOOL") return u_.set_t(u_.bool_t());
            return lookup(f.name, f.span);
        }
        case NodeKind::Maplet:
            return u_.pair_t(visit_expr(f.kids[0]), visit_expr(f.kids[1]));
        case NodeKind::SetExt: {
            Term* elem = u_.fresh();
            for (const auto& k : f.kids) u_.unify(visit_expr(k), elem, f.span);
            return u_.set_t(elem);
        }
        case NodeKind::SetComp: {
            binder_scopes_.emplace_back();
            std::vector<Term*> ts;
            for (const auto& b : f.binders) {
                Term* bt = u_.fresh();
                binder_scopes_.back()[b] = bt;
                ts.push_back(bt);
            }
            visit_pred(f.kids[0]);
            Term* e = visit_expr(f.kids[1]);
            annotate_binders(f, ts);
            binder_scopes_.pop_back();
            return u_.set_t(e);
        }
        case NodeKind::QuantUnion:
        case NodeKind::QuantInter: {
            binder_scopes_.emplace_back();
            std::vector<Term*> ts;
            for (const auto& b : f.binders) {
                Term* bt = u_.fresh();
                binder_scopes_.back()[b] = bt;
                ts.push_back(bt);
            }
            visit_pred(f.kids[0]);
            Term* e = visit_expr(f.kids[1]);
            u_.unify(e, u_.set_t(u_.fresh()), f.span);
            annotate_binders(f, ts);
            binder_scopes_.pop_back();
            return e;
        }
        case NodeKind::IntervalExpr:
            u_.unify(visit_expr(f.kids[0]), u_.int_t(), f.span);
            u_.unify(visit_expr(f.kids[1]), u_.int_t(), f.span);
            return u_.set_t(u_.int_t());
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div:
        case NodeKind::Mod:
        case NodeKind::Exp:
            u_.unify(visit_expr(f.kids[0]), u_.int_t(), f.span);
            u_.unify(visit_expr(f.kids[1]), u_.int_t(), f.span);
            return u_.int_t();
        case NodeKind::Union:
        case NodeKind::Inter:
        case NodeKind::Diff: {
            Term* a = visit_expr(f.kids[0]);
            u_.unify(a, visit_expr(f.kids[1]), f.span);
            u_.unify(a, u_.set_t(u_.fresh()), f.span);
            return a;
        }
        case NodeKind::Cross: {
            Term* ea = u_.fresh();
            Term* eb = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(ea), f.span);
            u_.unify(visit_expr(f.kids[1]), u_.set_t(eb), f.span);
            return u_.set_t(u_.pair_t(ea, eb));
        }
        case NodeKind::Pow: {
            Term* e = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(e), f.span);
            return u_.set_t(u_.set_t(e));
        }
        case NodeKind::GenUnion:
        case NodeKind::GenInter: {
            Term* e = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.set_t(e)), f.span);
            return u_.set_t(e);
        }
        case NodeKind::Dom: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.pair_t(a, b)), f.span);
            return u_.set_t(a);
        }
        case NodeKind::Ran: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.pair_t(a, b)), f.span);
            return u_.set_t(b);
        }
        case NodeKind::Inverse: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.pair_t(a, b)), f.span);
            return u_.set_t(u_.pair_t(b, a));
        }
        case NodeKind::Image: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.pair_t(a, b)), f.span);
            u_.unify(visit_expr(f.kids[1]), u_.set_t(a), f.span);
            return u_.set_t(b);
        }
        case NodeKind::Apply: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.pair_t(a, b)), f.span);
            u_.unify(visit_expr(f.kids[1]), a, f.span);
            return b;
        }
        case NodeKind::DomRes:
        case NodeKind::DomSub: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(a), f.span);
            Term* r = visit_expr(f.kids[1]);
            u_.unify(r, u_.set_t(u_.pair_t(a, b)), f.span);
            return r;
        }
        case NodeKind::RanRes:
        case NodeKind::RanSub: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(b), f.span);
            Term* r = visit_expr(f.kids[1]);
            u_.unify(r, u_.set_t(u_.pair_t(a, b)), f.span);
            return r;
        }
        case NodeKind::Fcomp: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            Term* c = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.pair_t(a, b)), f.span);
            u_.unify(visit_expr(f.kids[1]), u_.set_t(u_.pair_t(b, c)), f.span);
            return u_.set_t(u_.pair_t(a, c));
        }
        case NodeKind::Bcomp: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            Term* c = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.pair_t(b, c)), f.span);
            u_.unify(visit_expr(f.kids[1]), u_.set_t(u_.pair_t(a, b)), f.span);
            return u_.set_t(u_.pair_t(a, c));
        }
        case NodeKind::Ovl: {
            Term* r = visit_expr(f.kids[0]);
            u_.unify(r, visit_expr(f.kids[1]), f.span);
            u_.unify(r, u_.set_t(u_.pair_t(u_.fresh(), u_.fresh())), f.span);
            return r;
        }
        case NodeKind::Dprod: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            Term* c = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.pair_t(a, b)), f.span);
            u_.unify(visit_expr(f.kids[1]), u_.set_t(u_.pair_t(a, c)), f.span);
            return u_.set_t(u_.pair_t(a, u_.pair_t(b, c)));
        }
        case NodeKind::Pprod: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            Term* c = u_.fresh();
            Term* d = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.pair_t(a, b)), f.span);
            u_.unify(visit_expr(f.kids[1]), u_.set_t(u_.pair_t(c, d)), f.span);
            return u_.set_t(u_.pair_t(u_.pair_t(a, c), u_.pair_t(b, d)));
        }
        case NodeKind::IdOn: {
            Term* a = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(a), f.span);
            return u_.set_t(u_.pair_t(a, a));
        }
        case NodeKind::Prj1: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.pair_t(a, b), f.span);
            return a;
        }
        case NodeKind::Prj2: {
            Term* a = u_.fresh();
            Term* b = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.pair_t(a, b), f.span);
            return b;
        }
        case NodeKind::Card:
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.fresh()), f.span);
            return u_.int_t();
        case NodeKind::MinOf:
        case NodeKind::MaxOf:
            u_.unify(visit_expr(f.kids[0]), u_.set_t(u_.int_t()), f.span);
            return u_.int_t();
        case NodeKind::RelSet: {
            Term* ea = u_.fresh();
            Term* eb = u_.fresh();
            u_.unify(visit_expr(f.kids[0]), u_.set_t(ea), f.span);
            u_.unify(visit_expr(f.kids[1]), u_.set_t(eb), f.span);
            return u_.set_t(u_.set_t(u_.pair_t(ea, eb)));
        }
        case NodeKind::Old:
            return visit_expr(f.kids[0]);
        default:
            throw TypecheckError(f.span, "predicate used where an expression is expected");
        }
    }

    TypedProject resolve_all() {
        for (const auto& [name, term] : globals_) {
            TypePtr t = u_.resolve(term);
            if (!t)
                throw TypecheckError({}, "UntypedIdentifier: no constraint determines the type"
                                         " of '" + name + "'");
            out_.symbols[name] = t;
        }
        for (const auto& [key, term] : params_) {
            TypePtr t = u_.resolve(term);
            if (!t)
                throw TypecheckError({}, "UntypedIdentifier: no constraint determines the type"
                                         " of parameter '" + key + "'");
            out_.params[key] = t;
        }
        for (const auto& [node, term] : node_terms_) {
            TypePtr t = u_.resolve(term);
            if (!t)
                throw TypecheckError(node->span,
                                     "ambiguous type: no constraint determines this expression");
            node->type = t;
        }
        for (const auto& [node, terms] : binder_nodes_) {
            node->binder_types.clear();
            for (std::size_t i = 0; i < terms.size(); ++i) {
                TypePtr t = u_.resolve(terms[i]);
                if (!t)
                    throw TypecheckError(node->span, "UntypedIdentifier: bound variable '" +
                                                         node->binders[i] +
                                                         "' has no determined type");
                node->binder_types.push_back(t);
            }
        }
        return std::move(out_);
    }

    std::vector<std::pair<const Formula*, std::vector<Term*>>> binder_nodes_;
};

} // namespace

TypedProject infer_types(const Project& project) { return Inference(project).run(); }

} // namespace ebforge
