#include "ebforge/simulate.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace ebforge {

Env State::env() const {
    Env e = *fixed;
    for (const auto& [k, v] : vars) e[k] = v;
    return e;
}

namespace {

void hash_value(std::uint64_t& h, const Value& v) {
    auto mix = [&h](std::uint64_t x) {
        h ^= x;
        h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(v.kind()) + 0x9e);
    switch (v.kind()) {
    case Value::Kind::Int:
        mix(static_cast<std::uint64_t>(v.as_int()));
        break;
    case Value::Kind::Bool:
        mix(v.as_bool() ? 2 : 1);
        break;
    case Value::Kind::Pair:
        hash_value(h, v.first());
        hash_value(h, v.second());
        break;
    case Value::Kind::Set:
        mix(v.size());
        for (const Value& e : v.elems()) hash_value(h, e);
        break;
    }
}

} // namespace

std::uint64_t State::hash() const {
    std::uint64_t h = 1469598103934665603ull; // FNV-1a over the canonical structure
    for (const auto& [k, v] : vars) {
        for (unsigned char c : k) {
            h ^= c;
            h *= 1099511628211ull;
        }
        hash_value(h, v);
    }
    return h;
}

const char* termination_name(Termination t) {
    switch (t) {
    case Termination::Deadlock: return "deadlock";
    case Termination::StepLimit: return "steplimit";
    case Termination::Converged: return "converged";
    }
    return "?";
}

std::string Trace::render() const {
    std::ostringstream os;
    os << "seed=" << seed << "\n";
    std::size_t k = 1;
    for (const TraceEntry& e : entries) {
        os << "step " << k++ << ": " << e.event << "(";
        for (std::size_t i = 0; i < e.params.size(); ++i) {
            if (i) os << ", ";
            os << e.params[i].first << "=" << e.params[i].second.render();
        }
        os << ")";
        if (e.variant_before && e.variant_after)
            os << " variant " << *e.variant_before << "->" << *e.variant_after;
        os << "\n";
    }
    os << "termination=" << termination_name(termination) << "\n";
    return os.str();
}

std::string Trace::render_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["entries"] = nlohmann::ordered_json::array();
    std::size_t k = 1;
    for (const TraceEntry& e : entries) {
        nlohmann::ordered_json je;
        je["step"] = k++;
        je["event"] = e.event;
        nlohmann::ordered_json jp = nlohmann::ordered_json::object();
        for (const auto& [name, v] : e.params) jp[name] = v.render();
        je["params"] = jp;
        je["pre"] = e.pre_hash;
        je["post"] = e.post_hash;
        if (e.variant_before) je["variant_before"] = *e.variant_before;
        if (e.variant_after) je["variant_after"] = *e.variant_after;
        j["entries"].push_back(je);
    }
    j["termination"] = termination_name(termination);
    return j.dump(2) + "\n";
}

Simulator::Simulator(MachineProgram program, SimConfig config)
    : program_(std::move(program)), config_(std::move(config)) {
    ground_ = Grounding::from_sizes(program_.carrier_slots, config_.carrier_sizes,
                                    config_.default_carrier_size);
    ground_.int_range = config_.int_range;
    measure_ = program_.variant_measure();
}

const EventProgram& Simulator::event_or_throw(const std::string& name) const {
    const EventProgram* e = program_.find_event(name);
    if (!e)
        throw SimError(SimError::Kind::Runtime, "", name, "unknown event '" + name + "'");
    return *e;
}

std::optional<std::int64_t> Simulator::variant_value(const State& state) const {
    if (!measure_) return std::nullopt;
    return evaluate(measure_, state.env(), ground_).as_int();
}

State Simulator::init_state(const Bindings& bindings, bool solve_missing) {
    State st;
    auto fixed = std::make_shared<std::map<std::string, Value>>();
    for (const auto& name : program_.carrier_slots) (*fixed)[name] = ground_.carriers[name];

    Env env = *fixed;
    for (const auto& [name, expr] : bindings) {
        Value v = evaluate(expr, env, ground_);
        (*fixed)[name] = v;
        env[name] = v;
    }

    std::vector<const SlotInfo*> unbound;
    for (const SlotInfo& slot : program_.constant_slots)
        if (!fixed->count(slot.name)) unbound.push_back(&slot);
    if (!unbound.empty() && !solve_missing)
        throw SimError(SimError::Kind::MissingBinding, unbound.front()->name, "",
                       "constant '" + unbound.front()->name +
                           "' has no binding (use a bindings file or --solve-constants)");

    if (!unbound.empty()) {
        // Depth-first search over grounded domains, pruning with every
        // axiom whose symbols are already bound.
        std::vector<std::vector<Value>> domains;
        for (const SlotInfo* s : unbound)
            domains.push_back(type_universe(s->type, ground_, s->name));
        std::function<bool(std::size_t)> search = [&](std::size_t i) -> bool {
            if (i == unbound.size()) return true;
            for (const Value& cand : domains[i]) {
                env[unbound[i]->name] = cand;
                bool ok = true;
                for (const Labeled& ax : program_.axioms) {
                    bool ready = true;
                    for (const auto& fv : free_vars(ax.formula))
                        if (!env.count(fv) && fv != "BOOL" && fv != "INT" && fv != "NAT" &&
                            fv != "NAT1")
                            ready = false;
                    if (!ready) continue;
                    try {
                        if (!eval_bool(ax.formula, env, ground_)) ok = false;
                    } catch (const EvalError&) {
                        ok = false;
                    }
                    if (!ok) break;
                }
                if (ok && search(i + 1)) return true;
            }
            env.erase(unbound[i]->name);
            return false;
        };
        if (!search(0))
            throw SimError(SimError::Kind::AxiomViolation, "", "",
                           "no constant assignment over the grounded domains satisfies the "
                           "axioms");
        for (const SlotInfo* s : unbound) (*fixed)[s->name] = env[s->name];
    }

    if (config_.check_axioms) {
        for (const Labeled& ax : program_.axioms) {
            bool ok;
            try {
                ok = eval_bool(ax.formula, env, ground_);
            } catch (const EvalError& e) {
                throw SimError(SimError::Kind::Runtime, ax.label, "",
                               "axiom " + ax.label + ": " + e.what());
            }
            if (!ok)
                throw SimError(SimError::Kind::AxiomViolation, ax.label, "",
                               "axiom " + ax.label + " does not hold for the given constants");
        }
    }

    st.fixed = std::move(fixed);

    // Initialisation plan: writes read constants only, then solves.
    for (const WriteStep& w : program_.init_plan.writes)
        st.vars[w.target] = evaluate(w.rhs, env, ground_);
    Env env2 = st.env();
    Rng rng(config_.seed);
    for (const SolveStep& s : program_.init_plan.solves) {
        std::vector<std::vector<Value>> domains;
        for (const auto& t : s.targets) domains.push_back(solve_domain(s, t, env2));
        std::vector<std::vector<Value>> tuples;
        std::function<void(std::size_t, std::vector<Value>&)> build =
            [&](std::size_t i, std::vector<Value>& acc) {
                if (i == domains.size()) {
                    tuples.push_back(acc);
                    return;
                }
                for (const Value& v : domains[i]) {
                    acc.push_back(v);
                    build(i + 1, acc);
                    acc.pop_back();
                }
            };
        std::vector<Value> acc;
        build(0, acc);
        rng.shuffle(tuples);
        bool found = false;
        for (const auto& tuple : tuples) {
            Env trial = env2;
            for (std::size_t i = 0; i < s.targets.size(); ++i)
                trial[primed(s.targets[i])] = tuple[i];
            try {
                if (eval_bool(s.predicate, trial, ground_)) {
                    for (std::size_t i = 0; i < s.targets.size(); ++i)
                        st.vars[s.targets[i]] = tuple[i];
                    found = true;
                    break;
                }
            } catch (const EvalError&) {
                continue;
            }
        }
        if (!found)
            throw SimError(SimError::Kind::Runtime, "", "initialisation",
                           "no candidate satisfies the initialisation predicate");
    }

    if (config_.check_invariants) check_invariants(st, "initialisation", true);
    return st;
}

void Simulator::check_invariants(const State& state, const std::string& event, bool at_init) {
    const Env env = state.env();
    for (const Labeled& inv : program_.invariants) {
        bool ok;
        try {
            ok = eval_bool(inv.formula, env, ground_);
        } catch (const EvalError& e) {
            throw SimError(SimError::Kind::Runtime, inv.label, event,
                           "invariant " + inv.label + " in event " + event + ": " + e.what());
        }
        if (!ok) {
            const auto kind = at_init ? SimError::Kind::InvariantViolationAtInit
                                      : SimError::Kind::InvariantViolation;
            throw SimError(kind, inv.label, event,
                           "invariant " + inv.label + " violated" +
                               (at_init ? " at initialisation" : " by event " + event));
        }
    }
}

bool Simulator::guard_holds(const EventProgram& evt, const Env& env) {
    try {
        for (const Labeled& g : evt.guards)
            if (!eval_bool(g.formula, env, ground_)) return false;
    } catch (const EvalError& e) {
        throw SimError(SimError::Kind::Runtime, "", evt.name,
                       "guard of event " + evt.name + ": " + e.what());
    }
    if (evt.status_guard && measure_ && evaluate(measure_, env, ground_).as_int() < 0)
        return false;
    return true;
}

std::vector<Value> Simulator::param_domain(const EventProgram& evt, const SlotInfo& slot,
                                           const Env& env) {
    // Prefer a syntactic bound from the guards: a conjunct `p : E` or
    // `p = e` whose free identifiers are all state symbols.
    for (const Labeled& g : evt.guards) {
        std::vector<FormulaPtr> stack = {g.formula};
        while (!stack.empty()) {
            FormulaPtr f = stack.back();
            stack.pop_back();
            if (f->kind == NodeKind::And) {
                stack.push_back(f->kids[0]);
                stack.push_back(f->kids[1]);
                continue;
            }
            FormulaPtr domain_expr;
            if (f->kind == NodeKind::Member && f->kids[0]->kind == NodeKind::Ident &&
                f->kids[0]->name == slot.name)
                domain_expr = f->kids[1];
            if (f->kind == NodeKind::Equal) {
                if (f->kids[0]->kind == NodeKind::Ident && f->kids[0]->name == slot.name)
                    domain_expr = mk_node(NodeKind::SetExt, {f->kids[1]});
                else if (f->kids[1]->kind == NodeKind::Ident && f->kids[1]->name == slot.name)
                    domain_expr = mk_node(NodeKind::SetExt, {f->kids[0]});
            }
            if (!domain_expr) continue;
            bool closed = true;
            for (const auto& fv : free_vars(domain_expr))
                if (!env.count(fv) && fv != "BOOL") closed = false;
            if (!closed) continue;
            if (domain_expr->kind == NodeKind::Ident &&
                (domain_expr->name == "INT" || domain_expr->name == "NAT" ||
                 domain_expr->name == "NAT1"))
                continue;
            try {
                Value v = evaluate(domain_expr, env, ground_);
                if (v.is_set()) return v.elems();
            } catch (const EvalError&) {
                continue;
            }
        }
    }
    try {
        return type_universe(slot.type, ground_, slot.name);
    } catch (const EvalError& e) {
        throw SimError(SimError::Kind::UnboundedParameterDomain, slot.name, evt.name,
                       "parameter '" + slot.name + "' of event '" + evt.name +
                           "': " + e.what());
    }
}

std::vector<ParamBinding> Simulator::solve_params_impl(const EventProgram& evt,
                                                       const Env& base, Rng& rng) {
    std::vector<ParamBinding> out;
    if (evt.param_slots.empty()) {
        if (guard_holds(evt, base)) out.push_back({});
        return out;
    }
    std::vector<std::vector<Value>> domains;
    for (const SlotInfo& slot : evt.param_slots) domains.push_back(param_domain(evt, slot, base));

    if (config_.search == ParamSearch::Exhaustive) {
        std::function<void(std::size_t, Env&, ParamBinding&)> walk =
            [&](std::size_t i, Env& env, ParamBinding& acc) {
                if (i == evt.param_slots.size()) {
                    if (guard_holds(evt, env)) out.push_back(acc);
                    return;
                }
                for (const Value& v : domains[i]) {
                    env[evt.param_slots[i].name] = v;
                    acc.emplace_back(evt.param_slots[i].name, v);
                    walk(i + 1, env, acc);
                    acc.pop_back();
                    env.erase(evt.param_slots[i].name);
                }
            };
        Env env = base;
        ParamBinding acc;
        walk(0, env, acc);
        return out;
    }

    std::set<std::string> seen;
    for (int attempt = 0; attempt < config_.sample_count; ++attempt) {
        Env env = base;
        ParamBinding acc;
        bool empty_domain = false;
        for (std::size_t i = 0; i < evt.param_slots.size(); ++i) {
            if (domains[i].empty()) {
                empty_domain = true;
                break;
            }
            const Value& v = domains[i][rng.below(domains[i].size())];
            env[evt.param_slots[i].name] = v;
            acc.emplace_back(evt.param_slots[i].name, v);
        }
        if (empty_domain) break;
        if (!guard_holds(evt, env)) continue;
        std::string key;
        for (const auto& [n, v] : acc) key += n + "=" + v.render() + ";";
        if (seen.insert(key).second) out.push_back(acc);
    }
    return out;
}

std::vector<ParamBinding> Simulator::solve_params(const std::string& event,
                                                  const State& state) {
    Rng rng(config_.seed);
    const Env env = state.env();
    return solve_params_impl(event_or_throw(event), env, rng);
}

std::vector<Value> Simulator::solve_domain(const SolveStep& step, const std::string& target,
                                           const Env& pre_env) {
    // A conjunct `v' : E` or `v' = e` over pre-state symbols narrows the
    // candidate space; otherwise enumerate the target's type.
    const std::string pname = primed(target);
    std::vector<FormulaPtr> stack = {step.predicate};
    while (!stack.empty()) {
        FormulaPtr f = stack.back();
        stack.pop_back();
        if (f->kind == NodeKind::And) {
            stack.push_back(f->kids[0]);
            stack.push_back(f->kids[1]);
            continue;
        }
        FormulaPtr domain_expr;
        if (f->kind == NodeKind::Member && f->kids[0]->kind == NodeKind::Ident &&
            f->kids[0]->name == pname)
            domain_expr = f->kids[1];
        if (f->kind == NodeKind::Equal) {
            if (f->kids[0]->kind == NodeKind::Ident && f->kids[0]->name == pname)
                domain_expr = f->kids[1];
            else if (f->kids[1]->kind == NodeKind::Ident && f->kids[1]->name == pname)
                domain_expr = f->kids[0];
        }
        if (!domain_expr) continue;
        bool closed = true;
        for (const auto& fv : free_vars(domain_expr))
            if (!pre_env.count(fv) && fv != "BOOL") closed = false;
        if (!closed) continue;
        if (domain_expr->kind == NodeKind::Ident &&
            (domain_expr->name == "INT" || domain_expr->name == "NAT" ||
             domain_expr->name == "NAT1"))
            continue;
        try {
            Value v = evaluate(domain_expr, pre_env, ground_);
            if (f->kind == NodeKind::Equal) return {v};
            if (v.is_set()) return v.elems();
        } catch (const EvalError&) {
            continue;
        }
    }
    const SlotInfo* slot = nullptr;
    for (const SlotInfo& vs : program_.variable_slots)
        if (vs.name == target) slot = &vs;
    return type_universe(slot->type, ground_, target);
}

State Simulator::fire_impl(const EventProgram& evt, const ParamBinding& params,
                           const Env& base, const State& state, Rng& rng) {
    Env env = base;
    for (const auto& [n, v] : params) env[n] = v;
    if (!guard_holds(evt, env)) return state;

    const std::optional<std::int64_t> var_before = variant_value(state);

    State post = state;
    try {
        // Every right-hand side reads the pre-state environment.
        std::vector<std::pair<std::string, Value>> writes;
        for (const WriteStep& w : evt.plan.writes)
            writes.emplace_back(w.target, evaluate(w.rhs, env, ground_));
        for (const auto& [target, value] : writes) post.vars[target] = value;

        for (const SolveStep& s : evt.plan.solves) {
            std::vector<std::vector<Value>> domains;
            for (const auto& t : s.targets)
                domains.push_back(solve_domain(s, t, env));
            std::vector<std::vector<Value>> tuples;
            std::function<void(std::size_t, std::vector<Value>&)> build =
                [&](std::size_t i, std::vector<Value>& acc) {
                    if (i == domains.size()) {
                        tuples.push_back(acc);
                        return;
                    }
                    for (const Value& v : domains[i]) {
                        acc.push_back(v);
                        build(i + 1, acc);
                        acc.pop_back();
                    }
                };
            std::vector<Value> acc;
            build(0, acc);
            rng.shuffle(tuples);
            bool found = false;
            for (const auto& tuple : tuples) {
                Env trial = env;
                for (std::size_t i = 0; i < s.targets.size(); ++i)
                    trial[primed(s.targets[i])] = tuple[i];
                if (eval_bool(s.predicate, trial, ground_)) {
                    for (std::size_t i = 0; i < s.targets.size(); ++i)
                        post.vars[s.targets[i]] = tuple[i];
                    found = true;
                    break;
                }
            }
            if (!found)
                throw SimError(SimError::Kind::Runtime, s.targets.front(), evt.name,
                               "event " + evt.name +
                                   ": no candidate satisfies the before-after predicate");
        }
    } catch (const EvalError& e) {
        throw SimError(SimError::Kind::Runtime, "", evt.name,
                       "event " + evt.name + ": " + e.what());
    }
    post.step_count = state.step_count + 1;

    if (evt.status_post != StatusPost::None) {
        const std::optional<std::int64_t> var_after = variant_value(post);
        if (var_before && var_after) {
            const bool ok = evt.status_post == StatusPost::StrictDecrease
                                ? *var_after < *var_before
                                : *var_after <= *var_before;
            if (!ok)
                throw SimError(SimError::Kind::VariantViolation, "", evt.name,
                               "event " + evt.name + " must " +
                                   (evt.status_post == StatusPost::StrictDecrease
                                        ? "decrease"
                                        : "not increase") +
                                   " the variant (" + std::to_string(*var_before) + " -> " +
                                   std::to_string(*var_after) + ")");
        }
    }

    if (config_.check_invariants) check_invariants(post, evt.name, false);
    return post;
}

State Simulator::fire(const std::string& event, const ParamBinding& params,
                      const State& state) {
    Rng rng(config_.seed);
    const Env env = state.env();
    return fire_impl(event_or_throw(event), params, env, state, rng);
}

std::vector<std::pair<const EventProgram*, ParamBinding>>
Simulator::enabled_pairs(const Env& env, Rng& rng) {
    std::vector<std::pair<const EventProgram*, ParamBinding>> pairs;
    for (const EventProgram& evt : program_.events)
        for (ParamBinding& pb : solve_params_impl(evt, env, rng))
            pairs.emplace_back(&evt, std::move(pb));
    return pairs;
}

Trace Simulator::run(const Bindings& bindings, bool solve_missing) {
    Trace trace;
    trace.seed = config_.seed;
    Rng rng(config_.seed);
    State state = init_state(bindings, solve_missing);

    const bool has_convergent =
        std::any_of(program_.events.begin(), program_.events.end(),
                    [](const EventProgram& e) { return e.status == EventStatus::Convergent; });

    auto record = [&](const EventProgram& evt, const ParamBinding& params, const State& pre,
                      const State& post) {
        TraceEntry entry;
        entry.event = evt.name;
        entry.params = params;
        entry.pre_hash = pre.hash();
        entry.post_hash = post.hash();
        entry.variant_before = variant_value(pre);
        entry.variant_after = variant_value(post);
        trace.entries.push_back(std::move(entry));
    };

    if (config_.mode == TranslateMode::Sequential) {
        int idle_rounds = 0;
        while (state.step_count < config_.step_limit) {
            bool progressed = false;
            const Env env = state.env();
            for (const EventProgram& evt : program_.events) {
                for (const ParamBinding& pb : solve_params_impl(evt, env, rng)) {
                    State post = fire_impl(evt, pb, env, state, rng);
                    if (!post.same_vars(state)) {
                        record(evt, pb, state, post);
                        state = std::move(post);
                        progressed = true;
                        break;
                    }
                }
                if (progressed) break;
            }
            if (progressed) {
                idle_rounds = 0;
                continue;
            }
            if (config_.search == ParamSearch::Sampled &&
                ++idle_rounds < config_.deadlock_rounds)
                continue;
            // An enabled convergent event cannot be quiescent (it must
            // strictly decrease the variant), so reaching this point
            // with convergent events means they have all run out.
            trace.termination =
                has_convergent ? Termination::Converged : Termination::Deadlock;
            return trace;
        }
        trace.termination = Termination::StepLimit;
        return trace;
    }

    // Atomic interleaving: choose uniformly among all enabled pairs.
    int empty_rounds = 0;
    while (state.step_count < config_.step_limit) {
        const Env env = state.env();
        auto pairs = enabled_pairs(env, rng);
        if (pairs.empty()) {
            if (config_.search == ParamSearch::Sampled &&
                ++empty_rounds < config_.deadlock_rounds)
                continue;
            trace.termination = Termination::Deadlock;
            return trace;
        }
        empty_rounds = 0;
        const auto& [evt, pb] = pairs[rng.below(pairs.size())];
        State post = fire_impl(*evt, pb, env, state, rng);
        post.step_count = state.step_count + 1; // no-op firings still count as steps
        record(*evt, pb, state, post);
        state = std::move(post);
    }
    trace.termination = Termination::StepLimit;
    return trace;
}

} // namespace ebforge
