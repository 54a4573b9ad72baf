#include "ebforge/project.hpp"

#include <algorithm>
#include <functional>

namespace ebforge {

const char* status_name(EventStatus s) {
    switch (s) {
    case EventStatus::Ordinary: return "ordinary";
    case EventStatus::Convergent: return "convergent";
    case EventStatus::Anticipated: return "anticipated";
    }
    return "?";
}

const Event* Machine::find_event(const std::string& n) const {
    for (const Event& e : events)
        if (e.name == n) return &e;
    return nullptr;
}

const Context* Project::find_context(const std::string& n) const {
    for (const Context& c : contexts)
        if (c.name == n) return &c;
    return nullptr;
}

const Machine* Project::find_machine(const std::string& n) const {
    for (const Machine& m : machines)
        if (m.name == n) return &m;
    return nullptr;
}

std::set<std::string> frame(const std::vector<Action>& actions) {
    std::set<std::string> out;
    for (const Action& a : actions) {
        if (a.kind == Action::Kind::Deterministic)
            out.insert(a.lhs);
        else
            out.insert(a.lhs_list.begin(), a.lhs_list.end());
    }
    return out;
}

namespace {

class Validator {
public:
    explicit Validator(const Project& p) : project_(p) {}

    std::vector<Diagnostic> run() {
        check_toplevel_names();
        for (const Context& c : project_.contexts) check_context(c);
        for (const Machine& m : project_.machines) check_machine(m);
        check_acyclic();
        return std::move(diags_);
    }

private:
    void report(const SourceSpan& span, std::string msg) {
        diags_.push_back({span, std::move(msg)});
    }

    void check_toplevel_names() {
        std::set<std::string> seen;
        for (const Context& c : project_.contexts)
            if (!seen.insert(c.name).second)
                report(c.span, "duplicate top-level name '" + c.name + "'");
        for (const Machine& m : project_.machines)
            if (!seen.insert(m.name).second)
                report(m.span, "duplicate top-level name '" + m.name + "'");
    }

    void check_labels(const std::vector<Labeled>& items, const SourceSpan& span,
                      const std::string& where) {
        std::set<std::string> seen;
        for (const Labeled& l : items)
            if (!seen.insert(l.label).second)
                report(l.span.file.empty() ? span : l.span,
                       "duplicate label '" + l.label + "' in " + where);
    }

    // Gathers sets/constants of a context and everything it extends.
    void context_symbols(const std::string& name, std::set<std::string>& out,
                         std::set<std::string>& visited) {
        if (!visited.insert(name).second) return;
        const Context* c = project_.find_context(name);
        if (!c) return;
        for (const auto& e : c->extends) context_symbols(e, out, visited);
        out.insert(c->sets.begin(), c->sets.end());
        out.insert(c->constants.begin(), c->constants.end());
    }

    static bool builtin_symbol(const std::string& n) {
        return n == "INT" || n == "NAT" || n == "NAT1" || n == "BOOL";
    }

    void check_formula_scope(const FormulaPtr& f, const std::set<std::string>& scope,
                             const std::set<std::string>& primable, const SourceSpan& at,
                             const std::string& where) {
        if (!f) return;
        for (const std::string& v : free_vars(f)) {
            if (builtin_symbol(v)) continue;
            if (scope.count(v)) continue;
            if (is_primed(v) && primable.count(unprimed(v))) continue;
            report(at, "undeclared identifier '" + v + "' in " + where);
        }
    }

    void check_context(const Context& c) {
        for (const auto& e : c.extends)
            if (!project_.find_context(e))
                report(c.span, "context '" + c.name + "' extends unknown context '" + e + "'");
        check_labels(c.axioms, c.span, "context " + c.name);
        check_labels(c.theorems, c.span, "context " + c.name);
        std::set<std::string> scope, visited;
        context_symbols(c.name, scope, visited);
        for (const Labeled& a : c.axioms)
            check_formula_scope(a.formula, scope, {}, a.span, "axiom " + a.label);
        for (const Labeled& t : c.theorems)
            check_formula_scope(t.formula, scope, {}, t.span, "theorem " + t.label);
    }

    // Variables of a machine and all machines it refines.
    void chain_variables(const Machine& m, std::set<std::string>& out,
                         std::set<std::string>& visited) {
        if (!visited.insert(m.name).second) return;
        if (!m.refines.empty())
            if (const Machine* up = project_.find_machine(m.refines))
                chain_variables(*up, out, visited);
        out.insert(m.variables.begin(), m.variables.end());
    }

    void check_machine(const Machine& m) {
        const Machine* abstraction = nullptr;
        if (!m.refines.empty()) {
            abstraction = project_.find_machine(m.refines);
            if (!abstraction)
                report(m.span, "machine '" + m.name + "' refines unknown machine '" + m.refines + "'");
        }
        std::set<std::string> scope;
        for (const auto& s : m.sees) {
            if (!project_.find_context(s)) {
                report(m.span, "machine '" + m.name + "' sees unknown context '" + s + "'");
                continue;
            }
            std::set<std::string> visited;
            context_symbols(s, scope, visited);
        }
        std::set<std::string> vars, visited;
        chain_variables(m, vars, visited);
        scope.insert(vars.begin(), vars.end());

        check_labels(m.invariants, m.span, "machine " + m.name);
        for (const Labeled& inv : m.invariants)
            check_formula_scope(inv.formula, scope, {}, inv.span,
                                (inv.theorem ? "theorem " : "invariant ") + inv.label);
        if (m.variant)
            check_formula_scope(m.variant, scope, {}, m.span, "variant of " + m.name);

        const Event* init = m.find_event("initialisation");
        if (!init) {
            report(m.span, "machine '" + m.name + "' has no initialisation event");
        } else {
            if (!init->params.empty())
                report(init->span, "initialisation must not declare parameters");
            if (!init->guards.empty())
                report(init->span, "initialisation must not have guards");
            std::set<std::string> assigned = effective_init_frame(m);
            for (const auto& v : m.variables)
                if (!assigned.count(v))
                    report(init->span, "variable '" + v + "' is not assigned by initialisation");
        }

        std::set<std::string> event_names;
        for (const Event& e : m.events) {
            if (!event_names.insert(e.name).second)
                report(e.span, "duplicate event '" + e.name + "' in machine " + m.name);
            check_event(e, scope, vars, abstraction);
        }
    }

    std::set<std::string> effective_init_frame(const Machine& m) {
        std::set<std::string> assigned;
        const Machine* cur = &m;
        std::set<std::string> seen;
        while (cur && seen.insert(cur->name).second) {
            if (const Event* init = cur->find_event("initialisation")) {
                auto fr = frame(init->actions);
                assigned.insert(fr.begin(), fr.end());
                if (!init->extends_abstract) break;
            }
            cur = cur->refines.empty() ? nullptr : project_.find_machine(cur->refines);
        }
        return assigned;
    }

    void check_event(const Event& e, const std::set<std::string>& scope,
                     const std::set<std::string>& vars, const Machine* abstraction) {
        check_labels(e.guards, e.span, "event " + e.name);
        std::set<std::string> escope = scope;
        for (const auto& p : e.params) escope.insert(p);

        const Event* abstract_event = nullptr;
        if (!e.refines.empty()) {
            if (!abstraction) {
                report(e.span, "event '" + e.name + "' refines but machine has no abstraction");
            } else {
                for (const auto& r : e.refines) {
                    const Event* ae = abstraction->find_event(r);
                    if (!ae)
                        report(e.span, "event '" + e.name + "' refines unknown abstract event '" +
                                           r + "'");
                    else
                        abstract_event = ae;
                }
            }
            if (e.extends_abstract && e.refines.size() != 1)
                report(e.span, "event '" + e.name + "' extends exactly one abstract event");
        }

        for (const Labeled& g : e.guards)
            check_formula_scope(g.formula, escope, {}, g.span, "guard " + g.label);

        std::set<std::string> lhs_seen;
        for (const Action& a : e.actions) {
            if (a.kind == Action::Kind::Deterministic) {
                if (!lhs_seen.insert(a.lhs).second)
                    report(a.span, "variable '" + a.lhs + "' assigned twice in event " + e.name);
                if (!vars.count(a.lhs))
                    report(a.span, "assignment to non-variable '" + a.lhs + "'");
                check_formula_scope(a.rhs, escope, {}, a.span, "action " + a.label);
                if (a.index) check_formula_scope(a.index, escope, {}, a.span, "action " + a.label);
            } else {
                std::set<std::string> primable;
                for (const auto& v : a.lhs_list) {
                    if (!lhs_seen.insert(v).second)
                        report(a.span, "variable '" + v + "' assigned twice in event " + e.name);
                    if (!vars.count(v)) report(a.span, "assignment to non-variable '" + v + "'");
                    primable.insert(v);
                }
                check_formula_scope(a.predicate, escope, primable, a.span, "action " + a.label);
            }
        }

        for (const Witness& w : e.witnesses) {
            const std::string base = unprimed(w.name);
            bool mentions = free_vars(w.predicate).count(w.name) > 0;
            if (!mentions)
                report(w.span, "witness for '" + w.name + "' does not mention it");
            std::set<std::string> wscope = escope;
            wscope.insert(w.name);
            // A witness may relate the disappearing name to post-state values.
            std::set<std::string> primable = vars;
            if (abstract_event) {
                for (const auto& p : abstract_event->params) wscope.insert(p);
            }
            (void)base;
            check_formula_scope(w.predicate, wscope, primable, w.span, "witness " + w.name);
        }
    }

    void check_acyclic() {
        // sees cannot cycle (machine -> context only); check extends and refines.
        std::set<std::string> done;
        for (const Context& c : project_.contexts) {
            std::set<std::string> path;
            if (cycle_from(c.name, path, [&](const std::string& n) {
                    const Context* ctx = project_.find_context(n);
                    return ctx ? ctx->extends : std::vector<std::string>{};
                }))
                report(c.span, "cycle in context extends involving '" + c.name + "'");
        }
        for (const Machine& m : project_.machines) {
            std::set<std::string> path;
            if (cycle_from(m.name, path, [&](const std::string& n) {
                    const Machine* mm = project_.find_machine(n);
                    if (!mm || mm->refines.empty()) return std::vector<std::string>{};
                    return std::vector<std::string>{mm->refines};
                }))
                report(m.span, "cycle in machine refinement involving '" + m.name + "'");
        }
    }

    bool cycle_from(const std::string& start, std::set<std::string>& path,
                    const std::function<std::vector<std::string>(const std::string&)>& next) {
        if (!path.insert(start).second) return true;
        for (const auto& n : next(start))
            if (cycle_from(n, path, next)) return true;
        path.erase(start);
        return false;
    }

    const Project& project_;
    std::vector<Diagnostic> diags_;
};

void collect_contexts(const Project& p, const std::string& name,
                      std::vector<const Context*>& out, std::set<std::string>& visited) {
    if (!visited.insert(name).second) return;
    const Context* c = p.find_context(name);
    if (!c)
        throw EvalError(EvalError::Code::Unbound, "unknown context '" + name + "'");
    for (const auto& e : c->extends) collect_contexts(p, e, out, visited);
    out.push_back(c);
}

// Guards and actions of the abstract event followed by the concrete ones.
Event merge_extends(const Event& abstract_evt, const Event& concrete) {
    Event merged = concrete;
    merged.params.clear();
    merged.guards.clear();
    merged.actions.clear();
    merged.params = abstract_evt.params;
    for (const auto& p : concrete.params)
        if (std::find(merged.params.begin(), merged.params.end(), p) == merged.params.end())
            merged.params.push_back(p);
    merged.guards = abstract_evt.guards;
    merged.guards.insert(merged.guards.end(), concrete.guards.begin(), concrete.guards.end());
    merged.actions = abstract_evt.actions;
    merged.actions.insert(merged.actions.end(), concrete.actions.begin(),
                          concrete.actions.end());
    return merged;
}

} // namespace

std::vector<Diagnostic> validate_project(const Project& project) {
    return Validator(project).run();
}

FlatMachine flatten(const Project& project, const std::string& machine_name) {
    const Machine* m = project.find_machine(machine_name);
    if (!m)
        throw EvalError(EvalError::Code::Unbound, "unknown machine '" + machine_name + "'");

    FlatMachine flat;
    flat.name = m->name;

    std::shared_ptr<const FlatMachine> abstraction;
    if (!m->refines.empty()) {
        std::set<std::string> guard;
        const Machine* up = m;
        while (up && !up->refines.empty()) {
            if (!guard.insert(up->name).second)
                throw EvalError(EvalError::Code::Unsupported,
                                "circular refinement involving '" + up->name + "'");
            up = project.find_machine(up->refines);
        }
        abstraction = std::make_shared<FlatMachine>(flatten(project, m->refines));
    }
    flat.abstraction = abstraction;

    // Context closure: the machine's own sees plus everything inherited.
    std::vector<const Context*> ctxs;
    std::set<std::string> visited;
    if (abstraction) {
        for (const auto& s : abstraction->sets)
            if (std::find(flat.sets.begin(), flat.sets.end(), s) == flat.sets.end())
                flat.sets.push_back(s);
        flat.constants = abstraction->constants;
        flat.axioms = abstraction->axioms;
        flat.ctx_theorems = abstraction->ctx_theorems;
        for (const auto& c : abstraction->variables) flat.variables.push_back(c);
        flat.invariants = abstraction->invariants;
        // Names already collected from the abstraction's closure must not repeat.
        std::set<std::string> seen_axioms;
        for (const auto& a : flat.axioms) seen_axioms.insert(a.label);
        for (const auto& s : m->sees) collect_contexts(project, s, ctxs, visited);
        for (const Context* c : ctxs) {
            for (const auto& s : c->sets)
                if (std::find(flat.sets.begin(), flat.sets.end(), s) == flat.sets.end())
                    flat.sets.push_back(s);
            for (const auto& k : c->constants)
                if (std::find(flat.constants.begin(), flat.constants.end(), k) ==
                    flat.constants.end())
                    flat.constants.push_back(k);
            for (const auto& a : c->axioms)
                if (seen_axioms.insert(a.label).second) flat.axioms.push_back(a);
            for (const auto& t : c->theorems) {
                bool dup = false;
                for (const auto& have : flat.ctx_theorems) dup = dup || have.label == t.label;
                if (!dup) flat.ctx_theorems.push_back(t);
            }
        }
    } else {
        for (const auto& s : m->sees) collect_contexts(project, s, ctxs, visited);
        for (const Context* c : ctxs) {
            for (const auto& s : c->sets) flat.sets.push_back(s);
            for (const auto& k : c->constants) flat.constants.push_back(k);
            flat.axioms.insert(flat.axioms.end(), c->axioms.begin(), c->axioms.end());
            flat.ctx_theorems.insert(flat.ctx_theorems.end(), c->theorems.begin(),
                                     c->theorems.end());
        }
    }

    for (const auto& v : m->variables)
        if (std::find(flat.variables.begin(), flat.variables.end(), v) == flat.variables.end())
            flat.variables.push_back(v);
    flat.invariants.insert(flat.invariants.end(), m->invariants.begin(), m->invariants.end());
    flat.variant = m->variant;

    for (const Event& e : m->events) {
        Event effective = e;
        if (!e.refines.empty() && abstraction) {
            flat.pairing[e.name] = e.refines;
            if (e.extends_abstract) {
                const Event* ae = nullptr;
                for (const Event& cand : abstraction->events)
                    if (cand.name == e.refines.front()) ae = &cand;
                if (ae) effective = merge_extends(*ae, e);
            }
        } else if (e.is_init() && abstraction) {
            // Initialisations pair implicitly even without an extends clause.
            flat.pairing[e.name] = {"initialisation"};
        }
        flat.events.push_back(std::move(effective));
    }
    return flat;
}

} // namespace ebforge
