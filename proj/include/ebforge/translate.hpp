#pragma once

#include "ebforge/project.hpp"
#include "ebforge/typecheck.hpp"

namespace ebforge {

struct SlotInfo {
    std::string name;
    TypePtr type;
    bool required_binding = true; // constants only
};

/// One deterministic write of the plan; the right-hand side is
/// evaluated wholly in the pre-state. Indexed assignments have already
/// been lowered to an override of the whole relation.
struct WriteStep {
    std::string target;
    FormulaPtr rhs;
};

/// Non-deterministic assignment: enumerate candidates for the targets
/// over their grounded type domains, filter by the before-after
/// predicate, pick the first under the run's seed-shuffled order.
struct SolveStep {
    std::vector<std::string> targets;
    FormulaPtr predicate;
};

struct ActionPlan {
    std::vector<std::string> snapshot; // pre-state names the steps may read
    std::vector<WriteStep> writes;
    std::vector<SolveStep> solves;
};

enum class StatusPost : std::uint8_t { None, StrictDecrease, NonIncrease };

struct EventProgram {
    std::string name;
    EventStatus status = EventStatus::Ordinary;
    std::vector<SlotInfo> param_slots;
    std::vector<Labeled> guards;
    bool status_guard = false; // variant >= 0 is part of the guard
    StatusPost status_post = StatusPost::None;
    ActionPlan plan;
    std::set<std::string> frame_set;
};

struct EventSpec {
    std::string name;
    FormulaPtr requires_pred; // guard /\ status guard
    std::vector<std::string> assignable;
    FormulaPtr ensures_pred; // action post /\ variant restriction
};

struct ContractDoc {
    std::vector<Labeled> static_invariants; // axioms
    std::vector<Labeled> static_theorems;   // context theorems
    std::vector<std::string> constancy;     // carriers and constants
    std::vector<Labeled> instance_invariants;
    std::vector<Labeled> instance_theorems; // theorem-marked invariants
    std::vector<FormulaPtr> initially;
    FormulaPtr variant;
    std::vector<EventSpec> specs;
};

enum class TranslateMode : std::uint8_t { Sequential, Interleaving };

struct MachineProgram {
    std::string name;
    TranslateMode mode = TranslateMode::Sequential;
    std::vector<std::string> carrier_slots;
    std::vector<SlotInfo> constant_slots;
    std::vector<SlotInfo> variable_slots;
    std::vector<Labeled> axioms;
    std::vector<Labeled> invariants; // runtime-checked, whole chain
    ActionPlan init_plan;
    std::vector<EventProgram> events; // initialisation excluded
    FormulaPtr variant;               // null when absent
    bool variant_is_set = false;      // set variants are measured by card()
    ContractDoc contracts;

    const EventProgram* find_event(const std::string& name) const;
    /// The variant as an integer-valued formula (card() wrapped for sets).
    FormulaPtr variant_measure() const;
};

MachineProgram translate_machine(const FlatMachine& flat, TranslateMode mode,
                                 const TypedProject& types);

/// Snapshot-then-write plan. Executing the plan equals simultaneous
/// substitution; v(i) := E lowers to v := v <+ {i |-> E}.
ActionPlan lower_actions(const std::vector<Action>& actions);

/// Deterministic textual contract document (.ebc).
std::string emit_contracts(const MachineProgram& program);

/// Reader for the .ebc format; formulas are reparsed into trees.
ContractDoc parse_ebc(const std::string& text);

} // namespace ebforge
