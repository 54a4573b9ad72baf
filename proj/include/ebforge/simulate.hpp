#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "ebforge/eval.hpp"
#include "ebforge/translate.hpp"

namespace ebforge {

class SimError : public std::runtime_error {
public:
    enum class Kind {
        AxiomViolation,
        InvariantViolationAtInit,
        InvariantViolation,
        VariantViolation,
        UnboundedParameterDomain,
        MissingBinding,
        Runtime,
    };

    SimError(Kind kind, std::string label, std::string event, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind), label_(std::move(label)),
          event_(std::move(event)) {}

    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    const std::string& event() const { return event_; }

private:
    Kind kind_;
    std::string label_;
    std::string event_;
};

/// Variable bindings are per-state; constants and carrier universes
/// are fixed at initialisation and shared between successor states.
struct State {
    std::map<std::string, Value> vars;
    std::shared_ptr<const std::map<std::string, Value>> fixed =
        std::make_shared<std::map<std::string, Value>>(); // constants + carriers
    std::int64_t step_count = 0;

    Env env() const;
    std::uint64_t hash() const; // stable hash of the variable bindings
    bool same_vars(const State& other) const { return vars == other.vars; }
    const Value& constant(const std::string& name) const { return fixed->at(name); }
};

struct TraceEntry {
    std::string event;
    std::vector<std::pair<std::string, Value>> params;
    std::uint64_t pre_hash = 0;
    std::uint64_t post_hash = 0;
    std::optional<std::int64_t> variant_before;
    std::optional<std::int64_t> variant_after;
};

enum class Termination : std::uint8_t { Deadlock, StepLimit, Converged };

const char* termination_name(Termination t);

struct Trace {
    std::uint64_t seed = 0;
    std::vector<TraceEntry> entries;
    Termination termination = Termination::Deadlock;

    std::string render() const;
    std::string render_json() const;
};

enum class ParamSearch : std::uint8_t { Exhaustive, Sampled };

struct SimConfig {
    TranslateMode mode = TranslateMode::Sequential;
    std::uint64_t seed = 0;
    std::int64_t step_limit = 10000;
    bool check_invariants = true;
    bool check_axioms = true; // off only when bindings are valid by construction
    ParamSearch search = ParamSearch::Exhaustive;
    int sample_count = 32;
    int deadlock_rounds = 1000; // best-effort deadlock in sampled mode
    std::map<std::string, std::int64_t> carrier_sizes;
    std::int64_t default_carrier_size = 4;
    std::optional<std::pair<std::int64_t, std::int64_t>> int_range;
};

using ParamBinding = std::vector<std::pair<std::string, Value>>;
using Bindings = std::vector<std::pair<std::string, FormulaPtr>>;

/// Executes one MachineProgram. The simulator keeps its own copy of
/// the (immutable) program and owns its pseudo-random stream and the
/// states it returns.
class Simulator {
public:
    Simulator(MachineProgram program, SimConfig config);

    /// Ground carriers, bind constants (searching grounded domains for
    /// any left unbound when solve_missing is set), check axioms, run
    /// the initialisation plan, check invariants.
    State init_state(const Bindings& bindings, bool solve_missing = false);

    /// Parameter bindings that satisfy the event's guard in this state.
    /// Exhaustive: all of them, canonical order. Sampled: up to
    /// sample_count seed-drawn satisfying candidates.
    std::vector<ParamBinding> solve_params(const std::string& event, const State& state);

    /// Guard is re-checked; a false guard returns the state unchanged.
    State fire(const std::string& event, const ParamBinding& params, const State& state);

    Trace run(const Bindings& bindings, bool solve_missing = false);

    const Grounding& grounding() const { return ground_; }
    const MachineProgram& program() const { return program_; }

    std::optional<std::int64_t> variant_value(const State& state) const;

private:
    struct Rng {
        std::mt19937_64 eng;
        explicit Rng(std::uint64_t seed) : eng(seed) {}
        std::uint64_t next() { return eng(); }
        std::size_t below(std::size_t n) { return n == 0 ? 0 : next() % n; }
        template <typename T> void shuffle(std::vector<T>& v) {
            for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
        }
    };

    const EventProgram& event_or_throw(const std::string& name) const;
    bool guard_holds(const EventProgram& evt, const Env& env);
    std::vector<Value> param_domain(const EventProgram& evt, const SlotInfo& slot,
                                    const Env& env);
    std::vector<ParamBinding> solve_params_impl(const EventProgram& evt, const Env& base,
                                                Rng& rng);
    std::vector<Value> solve_domain(const SolveStep& step, const std::string& target,
                                    const Env& pre_env);
    State fire_impl(const EventProgram& evt, const ParamBinding& params, const Env& base,
                    const State& state, Rng& rng);
    void check_invariants(const State& state, const std::string& event, bool at_init);
    std::vector<std::pair<const EventProgram*, ParamBinding>>
    enabled_pairs(const Env& env, Rng& rng);

    MachineProgram program_;
    SimConfig config_;
    Grounding ground_;
    FormulaPtr measure_; // variant as an integer expression, fixed up front
};

} // namespace ebforge
