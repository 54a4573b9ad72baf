#include "ebforge/translate.hpp"

#include <algorithm>
#include <sstream>

#include "ebforge/parser.hpp"

namespace ebforge {

namespace {

FormulaPtr conj(const std::vector<FormulaPtr>& parts) {
    if (parts.empty()) return mk_bool(true);
    FormulaPtr acc = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i)
        acc = mk_node(NodeKind::And, {acc, parts[i]});
    return acc;
}

FormulaPtr old_of(FormulaPtr e) { return mk_node(NodeKind::Old, {std::move(e)}); }

/// v(i) := E  becomes  v := v <+ {i |-> E}.
FormulaPtr lower_indexed_rhs(const Action& a) {
    FormulaPtr maplet = mk_node(NodeKind::Maplet, {a.index, a.rhs});
    FormulaPtr singleton = mk_node(NodeKind::SetExt, {maplet});
    return mk_node(NodeKind::Ovl, {mk_ident(a.lhs), singleton});
}

TypePtr param_type_in_chain(const TypedProject& types, const FlatMachine& flat,
                            const std::string& event, const std::string& param) {
    const FlatMachine* cur = &flat;
    while (cur) {
        if (TypePtr t = types.param_type(cur->name, event, param)) return t;
        cur = cur->abstraction.get();
    }
    return nullptr;
}

FormulaPtr action_post(const Action& a) {
    if (a.kind == Action::Kind::Deterministic) {
        FormulaPtr rhs = a.index ? lower_indexed_rhs(a) : a.rhs;
        return mk_node(NodeKind::Equal, {mk_ident(a.lhs), old_of(rhs)});
    }
    std::vector<std::string> binders;
    std::vector<FormulaPtr> eqs;
    for (const auto& v : a.lhs_list) {
        binders.push_back(primed(v));
        eqs.push_back(mk_node(NodeKind::Equal, {mk_ident(v), mk_ident(primed(v))}));
    }
    FormulaPtr body = mk_node(NodeKind::And, {old_of(a.predicate), conj(eqs)});
    return mk_binder(NodeKind::Exists, std::move(binders), {std::move(body)});
}

} // namespace

const EventProgram* MachineProgram::find_event(const std::string& n) const {
    for (const EventProgram& e : events)
        if (e.name == n) return &e;
    return nullptr;
}

FormulaPtr MachineProgram::variant_measure() const {
    if (!variant) return nullptr;
    if (variant_is_set) return mk_node(NodeKind::Card, {variant});
    return variant;
}

ActionPlan lower_actions(const std::vector<Action>& actions) {
    ActionPlan plan;
    const std::set<std::string> assigned = frame(actions);
    std::set<std::string> reads;
    for (const Action& a : actions) {
        if (a.kind == Action::Kind::Deterministic) {
            FormulaPtr rhs = a.index ? lower_indexed_rhs(a) : a.rhs;
            for (const auto& v : free_vars(rhs))
                if (assigned.count(v)) reads.insert(v);
            plan.writes.push_back({a.lhs, rhs});
        } else {
            for (const auto& v : free_vars(a.predicate))
                if (assigned.count(unprimed(v)) && !is_primed(v)) reads.insert(v);
            plan.solves.push_back({a.lhs_list, a.predicate});
        }
    }
    plan.snapshot.assign(reads.begin(), reads.end());
    return plan;
}

namespace {

EventProgram translate_event(const Event& evt, const FlatMachine& flat,
                             const TypedProject& types, bool has_variant) {
    EventProgram ep;
    ep.name = evt.name;
    ep.status = evt.status;
    for (const auto& p : evt.params) {
        TypePtr t = param_type_in_chain(types, flat, evt.name, p);
        if (!t)
            throw TypecheckError(evt.span, "UntypedIdentifier: parameter '" + p +
                                               "' of event '" + evt.name + "'");
        ep.param_slots.push_back({p, t, false});
    }
    ep.guards = evt.guards;
    if (evt.status != EventStatus::Ordinary) {
        if (!has_variant)
            throw EvalError(EvalError::Code::Unsupported,
                            "event '" + evt.name + "' is " + status_name(evt.status) +
                                " but the machine declares no variant");
        ep.status_guard = true;
        ep.status_post = evt.status == EventStatus::Convergent ? StatusPost::StrictDecrease
                                                               : StatusPost::NonIncrease;
    }
    ep.plan = lower_actions(evt.actions);
    ep.frame_set = frame(evt.actions);
    return ep;
}

ContractDoc build_contracts(const MachineProgram& prog, const FlatMachine& flat) {
    ContractDoc doc;
    doc.static_invariants = flat.axioms;
    doc.static_theorems = flat.ctx_theorems;
    for (const auto& s : flat.sets) doc.constancy.push_back(s);
    for (const auto& c : flat.constants) doc.constancy.push_back(c);
    for (const Labeled& inv : flat.invariants)
        (inv.theorem ? doc.instance_theorems : doc.instance_invariants).push_back(inv);
    for (const WriteStep& w : prog.init_plan.writes)
        doc.initially.push_back(mk_node(NodeKind::Equal, {mk_ident(w.target), w.rhs}));
    for (const SolveStep& s : prog.init_plan.solves) {
        std::vector<std::string> binders;
        std::vector<FormulaPtr> eqs;
        for (const auto& v : s.targets) {
            binders.push_back(primed(v));
            eqs.push_back(mk_node(NodeKind::Equal, {mk_ident(v), mk_ident(primed(v))}));
        }
        doc.initially.push_back(mk_binder(NodeKind::Exists, std::move(binders),
                                          {mk_node(NodeKind::And, {s.predicate, conj(eqs)})}));
    }
    doc.variant = prog.variant;

    const FormulaPtr measure = prog.variant_measure();
    for (const Event& evt : flat.events) {
        if (evt.is_init()) continue;
        EventSpec spec;
        spec.name = evt.name;
        std::vector<FormulaPtr> req;
        for (const Labeled& g : evt.guards) req.push_back(g.formula);
        if (evt.status != EventStatus::Ordinary && measure)
            req.push_back(mk_node(NodeKind::Ge, {measure, mk_int(0)}));
        spec.requires_pred = conj(req);
        const auto fr = frame(evt.actions);
        spec.assignable.assign(fr.begin(), fr.end());
        std::vector<FormulaPtr> ens;
        for (const Action& a : evt.actions) ens.push_back(action_post(a));
        if (evt.status == EventStatus::Convergent && measure)
            ens.push_back(mk_node(NodeKind::Lt, {measure, old_of(measure)}));
        if (evt.status == EventStatus::Anticipated && measure)
            ens.push_back(mk_node(NodeKind::Le, {measure, old_of(measure)}));
        spec.ensures_pred = conj(ens);
        doc.specs.push_back(std::move(spec));
    }
    return doc;
}

} // namespace

MachineProgram translate_machine(const FlatMachine& flat, TranslateMode mode,
                                 const TypedProject& types) {
    MachineProgram prog;
    prog.name = flat.name;
    prog.mode = mode;
    prog.carrier_slots = flat.sets;
    for (const auto& c : flat.constants) {
        TypePtr t = types.symbol_type(c);
        if (!t) throw TypecheckError({}, "UntypedIdentifier: constant '" + c + "'");
        prog.constant_slots.push_back({c, t, true});
    }
    for (const auto& v : flat.variables) {
        TypePtr t = types.symbol_type(v);
        if (!t) throw TypecheckError({}, "UntypedIdentifier: variable '" + v + "'");
        prog.variable_slots.push_back({v, t, false});
    }
    prog.axioms = flat.axioms;
    prog.invariants = flat.invariants;

    const Event* init = nullptr;
    for (const Event& e : flat.events)
        if (e.is_init()) init = &e;
    if (!init)
        throw EvalError(EvalError::Code::Unsupported,
                        "machine '" + flat.name + "' has no initialisation");
    prog.init_plan = lower_actions(init->actions);

    prog.variant = flat.variant;
    if (flat.variant) {
        const TypePtr t = flat.variant->type;
        prog.variant_is_set = t && t->kind == TypeTag::Kind::Set;
    }

    for (const Event& e : flat.events) {
        if (e.is_init()) continue;
        prog.events.push_back(translate_event(e, flat, types, flat.variant != nullptr));
    }

    prog.contracts = build_contracts(prog, flat);
    return prog;
}

// ---------------------------------------------------------------------------
// EBC emission and reading.

namespace {

void emit_labeled(std::ostringstream& os, const char* kw, const Labeled& l) {
    os << "  @" << l.label << " " << kw << " " << render(l.formula) << "\n";
}

} // namespace

std::string emit_contracts(const MachineProgram& program) {
    const ContractDoc& doc = program.contracts;
    std::ostringstream os;
    os << "machine " << program.name << "\n";
    os << "STATIC-INVARIANTS\n";
    for (const Labeled& a : doc.static_invariants) emit_labeled(os, "invariant", a);
    for (const Labeled& t : doc.static_theorems) emit_labeled(os, "theorem", t);
    for (const std::string& c : doc.constancy)
        os << "  constraint " << c << " = old(" << c << ")\n";
    os << "INVARIANTS\n";
    for (const Labeled& i : doc.instance_invariants) emit_labeled(os, "invariant", i);
    for (const Labeled& t : doc.instance_theorems) emit_labeled(os, "theorem", t);
    if (doc.variant) {
        os << "VARIANT\n";
        os << "  " << render(doc.variant) << "\n";
    }
    os << "INITIALLY\n";
    for (const FormulaPtr& f : doc.initially) os << "  " << render(f) << "\n";
    for (const EventSpec& s : doc.specs) {
        os << "SPEC " << s.name << "\n";
        os << "  requires: " << render(s.requires_pred) << "\n";
        os << "  assignable: ";
        if (s.assignable.empty()) {
            os << "nothing";
        } else {
            for (std::size_t i = 0; i < s.assignable.size(); ++i) {
                if (i) os << ", ";
                os << s.assignable[i];
            }
        }
        os << "\n";
        os << "  ensures: " << render(s.ensures_pred) << "\n";
        os << "  also\n";
        os << "  requires: " << render(mk_node(NodeKind::Not, {s.requires_pred})) << "\n";
        os << "  assignable: nothing\n";
        os << "  ensures: TRUE\n";
    }
    os << "end\n";
    return os.str();
}

namespace {

std::string trimmed(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.rfind(prefix, 0) == 0;
}

} // namespace

ContractDoc parse_ebc(const std::string& text) {
    ContractDoc doc;
    std::istringstream in(text);
    std::string line;
    enum class Section { None, Static, Instance, Variant, Initially, Spec } section =
        Section::None;
    EventSpec* spec = nullptr;
    bool in_complement = false;

    auto parse_labeled = [](const std::string& body, bool theorem_kw) {
        // body looks like: @label invariant <formula> | @label theorem <formula>
        const char* kw = theorem_kw ? " theorem " : " invariant ";
        std::size_t sp = body.find(kw);
        Labeled l;
        l.label = body.substr(1, sp - 1);
        l.theorem = theorem_kw;
        l.formula = parse_formula(body.substr(sp + std::string(kw).size()));
        return l;
    };

    while (std::getline(in, line)) {
        const std::string t = trimmed(line);
        if (t.empty()) continue;
        if (starts_with(t, "machine ") || t == "end") continue;
        if (t == "STATIC-INVARIANTS") { section = Section::Static; continue; }
        if (t == "INVARIANTS") { section = Section::Instance; continue; }
        if (t == "VARIANT") { section = Section::Variant; continue; }
        if (t == "INITIALLY") { section = Section::Initially; continue; }
        if (starts_with(t, "SPEC ")) {
            doc.specs.push_back({});
            spec = &doc.specs.back();
            spec->name = trimmed(t.substr(5));
            section = Section::Spec;
            in_complement = false;
            continue;
        }
        switch (section) {
        case Section::Static:
            if (starts_with(t, "constraint ")) {
                const std::string rest = t.substr(11);
                doc.constancy.push_back(trimmed(rest.substr(0, rest.find('='))));
            } else if (t.find(" theorem ") != std::string::npos) {
                doc.static_theorems.push_back(parse_labeled(t, true));
            } else {
                doc.static_invariants.push_back(parse_labeled(t, false));
            }
            break;
        case Section::Instance:
            if (t.find(" theorem ") != std::string::npos)
                doc.instance_theorems.push_back(parse_labeled(t, true));
            else
                doc.instance_invariants.push_back(parse_labeled(t, false));
            break;
        case Section::Variant:
            doc.variant = parse_formula(t);
            break;
        case Section::Initially:
            doc.initially.push_back(parse_formula(t));
            break;
        case Section::Spec:
            if (t == "also") {
                in_complement = true;
            } else if (!in_complement && starts_with(t, "requires: ")) {
                spec->requires_pred = parse_formula(t.substr(10));
            } else if (!in_complement && starts_with(t, "assignable: ")) {
                const std::string rest = trimmed(t.substr(12));
                if (rest != "nothing") {
                    std::istringstream names(rest);
                    std::string n;
                    while (std::getline(names, n, ','))
                        spec->assignable.push_back(trimmed(n));
                }
            } else if (!in_complement && starts_with(t, "ensures: ")) {
                spec->ensures_pred = parse_formula(t.substr(9));
            }
            break;
        case Section::None:
            break;
        }
    }
    return doc;
}

} // namespace ebforge
