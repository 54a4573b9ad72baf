#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ebforge/ast.hpp"
#include "ebforge/span.hpp"

namespace ebforge {

/// A labeled predicate; `theorem` marks redundant (provable) items.
struct Labeled {
    std::string label;
    FormulaPtr formula;
    bool theorem = false;
    SourceSpan span;
};

struct Context {
    std::string name;
    std::vector<std::string> extends;
    std::vector<std::string> sets;
    std::vector<std::string> constants;
    std::vector<Labeled> axioms;
    std::vector<Labeled> theorems;
    SourceSpan span;
};

enum class EventStatus : std::uint8_t { Ordinary, Convergent, Anticipated };

const char* status_name(EventStatus s);

/// A single substitution. Deterministic actions assign one variable
/// (optionally at an index: v(i) := E); non-deterministic actions
/// constrain a list of variables through a before-after predicate in
/// which the primed names denote the post-state.
struct Action {
    enum class Kind : std::uint8_t { Deterministic, NonDeterministic };
    Kind kind = Kind::Deterministic;
    std::string label;
    // Deterministic
    std::string lhs;
    FormulaPtr index; // null unless v(i) := E
    FormulaPtr rhs;
    // NonDeterministic
    std::vector<std::string> lhs_list;
    FormulaPtr predicate;
    SourceSpan span;
};

struct Witness {
    std::string name; // the disappearing abstract parameter or primed variable
    FormulaPtr predicate;
    SourceSpan span;
};

struct Event {
    std::string name;
    EventStatus status = EventStatus::Ordinary;
    std::vector<std::string> refines;
    bool extends_abstract = false; // `extends`: inherit guards and actions
    std::vector<std::string> params;
    std::vector<Labeled> guards;
    std::vector<Witness> witnesses;
    std::vector<Action> actions;
    SourceSpan span;

    bool is_init() const { return name == "initialisation"; }
};

struct Machine {
    std::string name;
    std::string refines; // empty if abstract
    std::vector<std::string> sees;
    std::vector<std::string> variables;
    std::vector<Labeled> invariants; // theorem-marked entries are machine theorems
    FormulaPtr variant;
    std::vector<Event> events;
    SourceSpan span;

    const Event* find_event(const std::string& name) const;
};

struct Project {
    std::vector<Context> contexts;
    std::vector<Machine> machines;

    const Context* find_context(const std::string& name) const;
    const Machine* find_machine(const std::string& name) const;
};

/// A refinement chain collapsed into one effective machine. Invariants
/// are the concatenation along the chain (abstract first); events are
/// the concrete events with `extends` inheritance already merged. The
/// direct abstraction is retained, flattened, for proof-obligation
/// pairing.
struct FlatMachine {
    std::string name;
    std::vector<std::string> sets;
    std::vector<std::string> constants;
    std::vector<Labeled> axioms;
    std::vector<Labeled> ctx_theorems;
    std::vector<std::string> variables;
    std::vector<Labeled> invariants; // whole chain, incl. theorem-marked entries
    FormulaPtr variant;
    std::vector<Event> events;
    std::shared_ptr<const FlatMachine> abstraction; // null for an abstract machine
    // concrete event name -> abstract event names it refines
    std::map<std::string, std::vector<std::string>> pairing;
};

/// Empty result iff all cross-references resolve, labels are unique,
/// the refines/sees/extends graphs are acyclic, every machine has an
/// initialisation assigning each variable, and formulas mention only
/// declared identifiers.
std::vector<Diagnostic> validate_project(const Project& project);

/// Requires a validated project. Throws EvalError(Unsupported) on a
/// refinement cycle or unknown machine.
FlatMachine flatten(const Project& project, const std::string& machine_name);

/// Variables assigned by a list of actions; v(i) := E contributes v.
std::set<std::string> frame(const std::vector<Action>& actions);

} // namespace ebforge
