#pragma once

#include "ebforge/project.hpp"
#include "ebforge/typecheck.hpp"

namespace ebforge {

/// A proof obligation: under the hypotheses, prove the goal. Named
/// `event/label/FAMILY` after the Rodin convention.
struct Sequent {
    std::string name;
    std::string family; // INV GRD SIM FIS WFIS NAT VAR THM WD MRG
    std::vector<Labeled> hypotheses;
    FormulaPtr goal;
    std::vector<std::pair<std::string, TypePtr>> free_symbols; // enumeration order
};

bool same_sequent(const Sequent& a, const Sequent& b);

/// Generate the proof-obligation families for one machine (abstract
/// machines get INV/FIS/NAT/VAR/THM/WD only). The project must be
/// validated and type-annotated.
std::vector<Sequent> gen_pos(const Project& project, const TypedProject& types,
                             const std::string& machine_name);

struct CheckBounds {
    std::map<std::string, std::int64_t> carrier_sizes;
    std::int64_t default_carrier_size = 2;
    std::pair<std::int64_t, std::int64_t> int_range{-2, 2};
    ValueLimits limits;
};

struct Verdict {
    enum class Kind : std::uint8_t { Valid, Counterexample, Unbounded } kind = Kind::Valid;
    std::map<std::string, Value> assignment; // Counterexample only
    std::string unbounded_symbol;            // Unbounded only
    std::uint64_t states_checked = 0;        // assignments examined (pruned or complete)
    double elapsed_ms = 0.0;
};

/// Exhaustively evaluate the sequent over every grounded assignment of
/// its free symbols. Valid iff hypotheses-all-true implies goal-true
/// everywhere; otherwise the first counterexample in canonical
/// enumeration order. Unbounded when a symbol's domain cannot be built.
Verdict check_sequent_finite(const Sequent& sequent, const CheckBounds& bounds);

/// S-expression rendering:
/// (vc "name" (declare sym type)* (assume "label" formula)* (assert formula))
std::string emit_vc(const Sequent& sequent);

/// Reader for the emit_vc format.
Sequent parse_vc(const std::string& text);

} // namespace ebforge
