// Acceptance suite: one check per shipped guarantee, one line each.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace ebforge;
namespace oracle = ebtest::oracle;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define REQUIRE_MSG(cond, msg)                                                                 \
    do {                                                                                       \
        if (!(cond)) {                                                                         \
            std::ostringstream os_;                                                            \
            os_ << msg;                                                                        \
            throw Failure(os_.str());                                                          \
        }                                                                                      \
    } while (0)

int failures = 0;

void criterion(int number, const std::string& title, const std::function<std::string()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::string detail = body();
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream line;
        line << "PASS criterion " << number << ": " << title;
        if (!detail.empty()) line << " (" << detail;
        line << (detail.empty() ? "(" : ", ") << std::fixed;
        line.precision(2);
        line << s << "s)";
        std::cout << line.str() << "\n";
    } catch (const std::exception& e) {
        ++failures;
        std::cout << "FAIL criterion " << number << ": " << title << " -- " << e.what() << "\n";
    }
}

Value ivalue(std::int64_t v) { return Value::integer(v); }

// ---------------------------------------------------------------------------
// 1. Binary search fidelity: every strictly sorted f over 1..n (values
// drawn from 0..20), every v in ran(f); the sequential run terminates
// with f(r) = v and the three guards stay mutually exclusive.

std::string binary_search_fidelity() {
    const auto t0 = std::chrono::steady_clock::now();
    auto [p, t] = ebtest::load_checked({"bin_c0.ebc", "bin_m2.ebm"});
    MachineProgram prog = ebtest::program_for(p, t, "bin_m2");
    SimConfig config;
    config.step_limit = 64;
    // invariant preservation has its own criterion, and every f below
    // satisfies the axioms by construction
    config.check_invariants = false;
    config.check_axioms = false;
    Simulator sim(prog, config);

    std::uint64_t runs = 0;
    for (int n = 1; n <= 6; ++n) {
        std::vector<int> comb(n);
        for (int i = 0; i < n; ++i) comb[i] = i;
        for (;;) {
            std::vector<FormulaPtr> maplets;
            for (int i = 0; i < n; ++i)
                maplets.push_back(
                    mk_node(NodeKind::Maplet, {mk_int(i + 1), mk_int(comb[i])}));
            FormulaPtr fval = mk_node(NodeKind::SetExt, std::move(maplets));
            for (int vi = 0; vi < n; ++vi) {
                const int v = comb[vi];
                Bindings b = {{"n", mk_int(n)}, {"f", fval}, {"v", mk_int(v)}};
                Trace trace = sim.run(b);
                REQUIRE_MSG(trace.termination == Termination::Deadlock,
                            "run did not quiesce for n=" << n);
                // Cross-check against an independent integer replay of
                // the model: f(r) trichotomy makes the guards mutually
                // exclusive, so the fired event is fully determined.
                int pp = 1, q = n, r = (n + 1) / 2;
                for (const TraceEntry& e : trace.entries) {
                    const int fr = comb[r - 1];
                    REQUIRE_MSG(fr != v, "engine fired after the oracle found the target");
                    const char* expect = fr < v ? "inc" : "dec";
                    REQUIRE_MSG(e.event == expect, "engine fired " << e.event
                                                                   << ", oracle expects "
                                                                   << expect);
                    if (fr < v) {
                        const int r2 = (r + 1 + q) / 2;
                        pp = r + 1;
                        r = r2;
                    } else {
                        const int r2 = (pp + r - 1) / 2;
                        q = r - 1;
                        r = r2;
                    }
                }
                REQUIRE_MSG(comb[r - 1] == v, "f(r) != v after termination");
                (void)pp;
                ++runs;
            }
            // next strictly increasing combination over 0..20
            int i = n - 1;
            while (i >= 0 && comb[i] == 20 - (n - 1 - i)) --i;
            if (i < 0) break;
            ++comb[i];
            for (int j = i + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
        }
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE_MSG(s < 5.0, "exceeded the 5 s budget: " << s << "s");
    return std::to_string(runs) + " runs, all terminated on the target";
}

// ---------------------------------------------------------------------------
// 2. Simultaneous assignment: the swap oracle over 1000 random states.

std::string simultaneous_assignment() {
    Project p = parse_project({{"m.ebm", R"(
machine swapper
  variables x y
  invariants
    @t1 x : INT
    @t2 y : INT
  events
    event initialisation then @a1 x := 0 @a2 y := 0 end
    event swap then @a1 x := y @a2 y := x end
    event mix then @a1 x := y @a2 y := x + y end
end)"}});
    REQUIRE_MSG(validate_project(p).empty(), "swapper model invalid");
    TypedProject t = infer_types(p);
    Simulator sim(translate_machine(flatten(p, "swapper"), TranslateMode::Sequential, t),
                  SimConfig{});
    State st = sim.init_state({});
    std::mt19937_64 rng(2024);
    int deviations = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::int64_t x = static_cast<std::int64_t>(rng() % 2000001) - 1000000;
        const std::int64_t y = static_cast<std::int64_t>(rng() % 2000001) - 1000000;
        st.vars["x"] = ivalue(x);
        st.vars["y"] = ivalue(y);
        State s1 = sim.fire("swap", {}, st);
        if (!(s1.vars["x"] == ivalue(y) && s1.vars["y"] == ivalue(x))) ++deviations;
        State s2 = sim.fire("mix", {}, st);
        if (!(s2.vars["x"] == ivalue(y) && s2.vars["y"] == ivalue(x + y))) ++deviations;
    }
    REQUIRE_MSG(deviations == 0, deviations << " deviations from the swap oracle");
    return "1000 random states, zero deviations";
}

// ---------------------------------------------------------------------------
// 3. Mathkit oracle suite: >= 10000 randomized cases per operator over
// <= 5-element universes against the definition-level oracles.

std::string mathkit_oracles() {
    const auto t0 = std::chrono::steady_clock::now();
    oracle::Gen gen(77);
    const int N = 10000;
    std::uint64_t cases = 0;
    auto eq = [&](const Value& got, const Value& want, const char* op) {
        REQUIRE_MSG(got == want, op << ": " << got.render() << " != " << want.render());
        ++cases;
    };
    for (int i = 0; i < N; ++i) {
        const Value a = gen.int_set();
        const Value b = gen.int_set();
        eq(set_union(a, b), oracle::set_union(a, b), "union");
        eq(set_inter(a, b), oracle::set_inter(a, b), "inter");
        eq(set_diff(a, b), oracle::set_diff(a, b), "diff");
        REQUIRE_MSG(subset(a, b) == oracle::subset(a, b), "subset");
        REQUIRE_MSG(proper_subset(a, b) == oracle::proper_subset(a, b), "psubset");
        eq(pow_set(a), oracle::pow_set(a), "pow");
        eq(cross(a, b), oracle::cross(a, b), "cross");

        const Value r = gen.relation();
        const Value s = gen.relation();
        eq(rel_domain(r), oracle::domain(r), "dom");
        eq(rel_range(r), oracle::range(r), "ran");
        eq(rel_inverse(r), oracle::inverse(r), "inverse");
        eq(identity_on(a), oracle::identity_on(a), "id");
        const Value keys = gen.int_set(3);
        eq(rel_image(r, keys), oracle::image(r, keys), "image");
        eq(dom_restrict(keys, r), oracle::dom_restrict(keys, r), "domres");
        eq(ran_restrict(keys, r), oracle::ran_restrict(keys, r), "ranres");
        eq(dom_subtract(keys, r), oracle::dom_subtract(keys, r), "domsub");
        eq(ran_subtract(keys, r), oracle::ran_subtract(keys, r), "ransub");
        eq(fcomp(r, s), oracle::fcomp(r, s), "fcomp");
        eq(bcomp(r, s), oracle::bcomp(r, s), "bcomp");
        eq(override_rel(r, s), oracle::override_rel(r, s), "ovl");
        eq(dprod(r, s), oracle::dprod(r, s), "dprod");
        eq(pprod(r, s), oracle::pprod(r, s), "pprod");

        const Value ss = gen.set_of_sets();
        eq(gen_union(ss), oracle::gen_union(ss), "gunion");
        if (ss.size() > 0) eq(gen_inter(ss), oracle::gen_inter(ss), "ginter");

        const Value d = gen.int_set(3);
        const Value rng2 = gen.int_set(3);
        for (RelKind k :
             {RelKind::Rel, RelKind::Trel, RelKind::Srel, RelKind::Strel, RelKind::Pfun,
              RelKind::Tfun, RelKind::Pinj, RelKind::Tinj, RelKind::Psur, RelKind::Tsur,
              RelKind::Tbij}) {
            REQUIRE_MSG(relkind_holds(k, r, d, rng2) == oracle::relkind(k, r, d, rng2),
                        "relkind " << relkind_name(k) << " on " << r.render());
            ++cases;
        }
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE_MSG(s < 30.0, "exceeded the 30 s budget: " << s << "s");
    return std::to_string(cases) + " oracle comparisons, zero mismatches";
}

// ---------------------------------------------------------------------------
// 4. PO reproduction of the worked search model.

bool hyps_match(const Sequent& s, std::vector<const char*> expected) {
    if (s.hypotheses.size() != expected.size()) return false;
    std::vector<bool> used(expected.size(), false);
    for (const Labeled& h : s.hypotheses) {
        bool found = false;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (used[i]) continue;
            if (same_formula(h.formula, parse_formula(expected[i]))) {
                used[i] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

std::string po_reproduction() {
    const auto clock0 = std::chrono::steady_clock::now();
    auto [p0, t0] = ebtest::load_checked({"search_ctx0.ebc", "search_m0.ebm"});
    auto abs_pos = gen_pos(p0, t0, "m0_a");
    auto [p, t] = ebtest::load_checked({"search_ctx0.ebc", "search_m0.ebm", "search_m1.ebm"});
    auto pos = gen_pos(p, t, "m1_a");

    auto find = [](const std::vector<Sequent>& all, const std::string& name) -> const Sequent& {
        for (const Sequent& s : all)
            if (s.name == name) return s;
        throw Failure("missing sequent " + name);
    };

    const std::vector<const char*> base = {"n : NAT", "f : 1 .. n --> D", "v : ran(f)",
                                           "n : NAT1"};
    auto plus = [&](std::vector<const char*> extra) {
        std::vector<const char*> out = base;
        out.insert(out.end(), extra.begin(), extra.end());
        return out;
    };
    const std::vector<const char*> invs = {"i : 1 .. n", "j : 0 .. n", "v /: f[i .. j]",
                                           "v : f[(j + 1) .. n]"};
    auto plus_invs = [&](std::vector<const char*> extra) {
        std::vector<const char*> out = plus(invs);
        out.insert(out.end(), extra.begin(), extra.end());
        return out;
    };

    const Sequent& inv = find(abs_pos, "search/inv1/INV");
    REQUIRE_MSG(hyps_match(inv, plus({"i : 1 .. n", "k : 1 .. n", "f(k) = v", "i' = k"})),
                "INV hypotheses differ");
    REQUIRE_MSG(same_formula(inv.goal, parse_formula("i' : 1 .. n")), "INV goal differs");

    const Sequent& grd = find(pos, "search/grd2/GRD");
    REQUIRE_MSG(hyps_match(grd, plus_invs({"f(j + 1) = v", "j + 1 = k"})),
                "GRD hypotheses differ");
    REQUIRE_MSG(same_formula(grd.goal, parse_formula("f(k) = v")), "GRD goal differs");

    const Sequent& sim = find(pos, "search/act1/SIM");
    REQUIRE_MSG(hyps_match(sim, plus_invs({"f(j + 1) = v", "j + 1 = k", "i = j + 1"})),
                "SIM hypotheses differ");
    REQUIRE_MSG(same_formula(sim.goal, parse_formula("i = k")), "SIM goal differs");

    const Sequent& nat = find(pos, "progress/NAT");
    REQUIRE_MSG(hyps_match(nat, plus_invs({"f(j + 1) /= v"})), "NAT hypotheses differ");
    REQUIRE_MSG(same_formula(nat.goal, parse_formula("n - j : NAT")), "NAT goal differs");

    const Sequent& var = find(pos, "progress/VAR");
    REQUIRE_MSG(hyps_match(var, plus_invs({"f(j + 1) /= v", "j' = j + 1"})),
                "VAR hypotheses differ");
    REQUIRE_MSG(same_formula(var.goal, parse_formula("n - (j + 1) < n - j")),
                "VAR goal differs");

    const Sequent& wfis = find(pos, "search/k/WFIS");
    REQUIRE_MSG(hyps_match(wfis, plus_invs({"f(j + 1) = v", "i' = j + 1"})),
                "WFIS hypotheses differ");
    REQUIRE_MSG(same_formula(wfis.goal, parse_formula("#k . j + 1 = k")), "WFIS goal differs");

    CheckBounds bounds;
    bounds.carrier_sizes["D"] = 2;
    bounds.int_range = {-1, 4};
    std::uint64_t states = 0;
    for (const Sequent* s : {&inv, &grd, &sim, &nat, &var, &wfis}) {
        Verdict v = check_sequent_finite(*s, bounds);
        REQUIRE_MSG(v.kind == Verdict::Kind::Valid, s->name << " not valid at the desk bounds");
        states += v.states_checked;
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
    REQUIRE_MSG(s < 10.0, "exceeded the 10 s budget: " << s << "s");
    return "6 sequents matched and valid, " + std::to_string(states) + " states";
}

// ---------------------------------------------------------------------------
// 5. Runtime invariant preservation across the corpus, plus a broken
// action that must be flagged within 100 steps.

std::string invariant_preservation() {
    std::uint64_t steps = 0;
    auto run_model = [&](std::initializer_list<const char*> files, const char* machine,
                         const Bindings& bindings) {
        auto [p, t] = ebtest::load_checked(files);
        SimConfig config;
        config.mode = TranslateMode::Interleaving;
        config.seed = 31;
        config.step_limit = 10000;
        Simulator sim(ebtest::program_for(p, t, machine, TranslateMode::Interleaving),
                      config);
        Trace trace = sim.run(bindings); // any violation throws
        steps += trace.entries.size();
    };
    run_model({"bin_c0.ebc", "bin_m2.ebm"}, "bin_m2", ebtest::bin_bindings());
    run_model({"social_ctx.ebc", "social.ebm"}, "social", {});
    run_model({"mio_ctx1.ebc", "mio_ctx2.ebc", "mio_abstract.ebm", "mio_ref1.ebm"}, "mio_ref1",
              ebtest::mio_bindings());

    // break inc: p := q + 1 escapes inv1 (p : 1 .. n)
    std::string text = ebtest::slurp(ebtest::models_dir() + "/bin_m2.ebm");
    const auto at = text.find("@act2 p := r + 1");
    REQUIRE_MSG(at != std::string::npos, "patch site not found");
    text.replace(at, 16, "@act2 p := q + 1");
    Project broken = parse_project(
        {{"c", ebtest::slurp(ebtest::models_dir() + "/bin_c0.ebc")}, {"m", text}});
    REQUIRE_MSG(validate_project(broken).empty(), "broken model should still validate");
    TypedProject tb = infer_types(broken);
    SimConfig config;
    config.mode = TranslateMode::Interleaving;
    config.seed = 31;
    config.step_limit = 100;
    Simulator sim(translate_machine(flatten(broken, "bin_m2"), TranslateMode::Interleaving, tb),
                  config);
    try {
        sim.run(ebtest::bin_bindings());
        throw Failure("broken action was not flagged");
    } catch (const SimError& e) {
        REQUIRE_MSG(e.kind() == SimError::Kind::InvariantViolation,
                    "wrong error kind: " << e.what());
        REQUIRE_MSG(e.label() == "inv1", "expected inv1, got " << e.label());
    }
    return std::to_string(steps) + " interleaving steps, zero violations; injected fault "
                                   "flagged as inv1";
}

// ---------------------------------------------------------------------------
// 6. Variant discipline on the convergent search refinement.

std::string variant_discipline() {
    auto [p, t] = ebtest::load_checked({"search_ctx0.ebc", "search_m0.ebm", "search_m1.ebm"});
    SimConfig config;
    config.seed = 5;
    Simulator sim(ebtest::program_for(p, t, "m1_a"), config);
    int convergent_firings = 0;
    for (int target = 1; target <= 4; ++target) {
        std::ostringstream b;
        b << "n = 4\nf = {1 |-> 0, 2 |-> 1, 3 |-> 2, 4 |-> 3}\nv = " << (target - 1) << "\n";
        Trace trace = sim.run(parse_bindings(b.str(), "b"));
        for (const TraceEntry& e : trace.entries) {
            if (e.event != "progress") continue;
            REQUIRE_MSG(e.variant_after.value() < e.variant_before.value(),
                        "variant did not strictly decrease");
            ++convergent_firings;
        }
    }
    REQUIRE_MSG(convergent_firings > 0, "no convergent firings observed");

    // mutate progress into a non-decreasing action
    std::string text = ebtest::slurp(ebtest::models_dir() + "/search_m1.ebm");
    const auto at = text.find("@act1_r1 j := j + 1");
    REQUIRE_MSG(at != std::string::npos, "patch site not found");
    text.replace(at, 19, "@act1_r1 j := j");
    Project broken =
        parse_project({{"c", ebtest::slurp(ebtest::models_dir() + "/search_ctx0.ebc")},
                       {"m0", ebtest::slurp(ebtest::models_dir() + "/search_m0.ebm")},
                       {"m1", text}});
    TypedProject tb = infer_types(broken);
    Simulator bad(translate_machine(flatten(broken, "m1_a"), TranslateMode::Sequential, tb),
                  config);
    try {
        bad.run(parse_bindings("n = 2\nf = {1 |-> 0, 2 |-> 1}\nv = 1\n", "b"));
        throw Failure("non-decreasing convergent action was not flagged");
    } catch (const SimError& e) {
        REQUIRE_MSG(e.kind() == SimError::Kind::VariantViolation,
                    "wrong error kind: " << e.what());
        REQUIRE_MSG(e.event() == "progress", "expected progress, got " << e.event());
    }
    return std::to_string(convergent_firings) + " convergent firings all decreased; mutant "
                                                "flagged on first firing";
}

// ---------------------------------------------------------------------------
// 7. Determinism of trace, contract and VC artifacts.

std::string determinism() {
    auto once = [](int which) {
        std::ostringstream out;
        {
            auto [p, t] = ebtest::load_checked({"bin_c0.ebc", "bin_m2.ebm"});
            MachineProgram prog = ebtest::program_for(p, t, "bin_m2");
            SimConfig config;
            config.seed = 99;
            config.mode = TranslateMode::Interleaving;
            config.step_limit = 500;
            Simulator sim(prog, config);
            Trace trace = sim.run(ebtest::bin_bindings());
            out << trace.render() << trace.render_json() << emit_contracts(prog);
        }
        {
            auto [p, t] =
                ebtest::load_checked({"search_ctx0.ebc", "search_m0.ebm", "search_m1.ebm"});
            MachineProgram prog = ebtest::program_for(p, t, "m1_a");
            out << emit_contracts(prog);
            for (const Sequent& s : gen_pos(p, t, "m1_a")) out << emit_vc(s);
        }
        {
            auto [p, t] = ebtest::load_checked(
                {"mio_ctx1.ebc", "mio_ctx2.ebc", "mio_abstract.ebm", "mio_ref1.ebm"});
            SimConfig config;
            config.seed = 7;
            config.mode = TranslateMode::Interleaving;
            config.step_limit = 400;
            Simulator sim(ebtest::program_for(p, t, "mio_ref1", TranslateMode::Interleaving),
                          config);
            out << sim.run(ebtest::mio_bindings()).render_json();
            for (const Sequent& s : gen_pos(p, t, "mio_ref1")) out << emit_vc(s);
        }
        (void)which;
        return out.str();
    };
    const std::string a = once(1);
    const std::string b = once(2);
    REQUIRE_MSG(a == b, "artifacts differ between identical runs");
    return std::to_string(a.size()) + " bytes of artifacts byte-identical";
}

// ---------------------------------------------------------------------------
// 8. Counterexample soundness on fuzzed sequents, against a plain
// truth-table enumeration.

struct Fuzz {
    std::mt19937_64 rng;
    explicit Fuzz(std::uint64_t seed) : rng(seed) {}

    std::int64_t pick(std::int64_t n) { return static_cast<std::int64_t>(rng() % n); }

    FormulaPtr int_expr(int depth) {
        switch (pick(depth > 0 ? 5 : 3)) {
        case 0: return mk_ident("a");
        case 1: return mk_ident("b");
        case 2: return mk_int(pick(4) - 1);
        case 3: return mk_node(NodeKind::Add, {int_expr(depth - 1), int_expr(depth - 1)});
        default: return mk_node(NodeKind::Sub, {int_expr(depth - 1), int_expr(depth - 1)});
        }
    }

    FormulaPtr set_expr(int depth) {
        switch (pick(depth > 0 ? 5 : 2)) {
        case 0: return mk_ident("s");
        case 1: {
            std::vector<FormulaPtr> elems;
            const auto n = pick(3);
            for (int i = 0; i < n; ++i) elems.push_back(mk_int(pick(4) - 1));
            return mk_node(NodeKind::SetExt, std::move(elems));
        }
        case 2: return mk_node(NodeKind::Union, {set_expr(depth - 1), set_expr(depth - 1)});
        case 3: return mk_node(NodeKind::Inter, {set_expr(depth - 1), set_expr(depth - 1)});
        default: return mk_node(NodeKind::Diff, {set_expr(depth - 1), set_expr(depth - 1)});
        }
    }

    FormulaPtr pred(int depth) {
        switch (pick(depth > 0 ? 8 : 5)) {
        case 0: return mk_node(NodeKind::Lt, {int_expr(1), int_expr(1)});
        case 1: return mk_node(NodeKind::Le, {int_expr(1), int_expr(1)});
        case 2: return mk_node(NodeKind::Equal, {int_expr(1), int_expr(1)});
        case 3: return mk_node(NodeKind::Member, {int_expr(1), set_expr(1)});
        case 4: return mk_node(NodeKind::Equal, {mk_ident("p"), mk_bool(pick(2) == 0)});
        case 5: return mk_node(NodeKind::And, {pred(depth - 1), pred(depth - 1)});
        case 6: return mk_node(NodeKind::Or, {pred(depth - 1), pred(depth - 1)});
        default: return mk_node(NodeKind::Not, {pred(depth - 1)});
        }
    }
};

std::string counterexample_soundness() {
    Fuzz fuzz(4242);
    CheckBounds bounds;
    bounds.int_range = {-1, 2};
    Grounding ground;
    ground.int_range = bounds.int_range;

    const std::vector<std::pair<std::string, TypePtr>> decls = {
        {"a", TypeTag::int_type()},
        {"b", TypeTag::int_type()},
        {"p", TypeTag::bool_type()},
        {"s", TypeTag::set_type(TypeTag::int_type())},
    };

    int checked = 0, counterexamples = 0;
    for (int iter = 0; iter < 1000; ++iter) {
        Sequent s;
        s.name = "fuzz/" + std::to_string(iter) + "/THM";
        s.family = "THM";
        const auto nh = fuzz.pick(3);
        for (int h = 0; h < nh; ++h)
            s.hypotheses.push_back({"h" + std::to_string(h), fuzz.pred(2), false, {}});
        s.goal = fuzz.pred(2);
        std::set<std::string> used;
        for (const Labeled& h : s.hypotheses)
            for (const auto& v : free_vars(h.formula)) used.insert(v);
        for (const auto& v : free_vars(s.goal)) used.insert(v);
        for (const auto& [name, type] : decls)
            if (used.count(name)) s.free_symbols.emplace_back(name, type);

        Verdict v = check_sequent_finite(s, bounds);
        REQUIRE_MSG(v.kind != Verdict::Kind::Unbounded, "fuzz domain should be bounded");

        // independent straight enumeration, no pruning, no ordering tricks
        std::vector<std::vector<Value>> domains;
        for (const auto& [name, type] : s.free_symbols)
            domains.push_back(type_universe(type, ground, name));
        bool oracle_valid = true;
        std::vector<std::size_t> idx(domains.size(), 0);
        for (;;) {
            Env env;
            for (std::size_t i = 0; i < domains.size(); ++i)
                env[s.free_symbols[i].first] = domains[i][idx[i]];
            bool hyps_true = true;
            for (const Labeled& h : s.hypotheses)
                if (!eval_bool(h.formula, env, ground)) hyps_true = false;
            if (hyps_true && !eval_bool(s.goal, env, ground)) oracle_valid = false;
            std::size_t d = 0;
            while (d < domains.size() && ++idx[d] == domains[d].size()) idx[d++] = 0;
            if (d == domains.size()) break;
            if (domains.empty()) break;
        }
        if (domains.empty()) {
            Env env;
            bool hyps_true = true;
            for (const Labeled& h : s.hypotheses)
                if (!eval_bool(h.formula, env, ground)) hyps_true = false;
            oracle_valid = !(hyps_true && !eval_bool(s.goal, env, ground));
        }

        REQUIRE_MSG((v.kind == Verdict::Kind::Valid) == oracle_valid,
                    "verdict disagrees with the truth table on " << s.name);
        if (v.kind == Verdict::Kind::Counterexample) {
            ++counterexamples;
            Env env;
            for (const auto& [name, value] : v.assignment) env[name] = value;
            for (const Labeled& h : s.hypotheses)
                REQUIRE_MSG(eval_bool(h.formula, env, ground),
                            "counterexample does not satisfy " << h.label);
            REQUIRE_MSG(!eval_bool(s.goal, env, ground),
                        "counterexample satisfies the goal of " << s.name);
        }
        ++checked;
    }
    return std::to_string(checked) + " sequents, " + std::to_string(counterexamples) +
           " counterexamples, all sound";
}

} // namespace

int main() {
    criterion(1, "binary search fidelity", binary_search_fidelity);
    criterion(2, "simultaneous assignment", simultaneous_assignment);
    criterion(3, "mathkit oracle suite", mathkit_oracles);
    criterion(4, "proof obligation reproduction", po_reproduction);
    criterion(5, "runtime invariant preservation", invariant_preservation);
    criterion(6, "variant discipline", variant_discipline);
    criterion(7, "artifact determinism", determinism);
    criterion(8, "counterexample soundness", counterexample_soundness);
    if (failures == 0) {
        std::cout << "all acceptance criteria passed\n";
        return 0;
    }
    std::cout << failures << " acceptance criteria failed\n";
    return 1;
}
