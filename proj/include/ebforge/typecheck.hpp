#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "ebforge/project.hpp"

namespace ebforge {

class TypecheckError : public std::runtime_error {
public:
    TypecheckError(SourceSpan span, std::string message)
        : std::runtime_error(std::move(message)), span_(std::move(span)) {}
    const SourceSpan& span() const { return span_; }

private:
    SourceSpan span_;
};

/// Resolved symbol types for a project whose formulas have been
/// annotated in place. Sets, constants and machine variables share one
/// project-wide name space; event parameters are scoped per event.
struct TypedProject {
    std::map<std::string, TypePtr> symbols;          // declaration order is kept separately
    std::vector<std::string> symbol_order;
    std::map<std::string, TypePtr> params;           // "machine/event/param"
    std::vector<std::string> param_order;
    std::set<std::string> carriers;

    TypePtr symbol_type(const std::string& name) const;
    TypePtr param_type(const std::string& machine, const std::string& event,
                       const std::string& param) const;
};

/// Infer a type for every identifier and annotate every formula node.
/// Types are derived by unification over membership, equality and
/// relational-kind constraints in axioms, invariants, guards, actions
/// and witnesses. Carrier sets are nominal. Throws TypecheckError with
/// UntypedIdentifier / TypeMismatch style messages.
TypedProject infer_types(const Project& project);

} // namespace ebforge
