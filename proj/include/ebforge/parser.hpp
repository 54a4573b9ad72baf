#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ebforge/project.hpp"

namespace ebforge {

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(SourceSpan span, std::string message, std::vector<std::string> expected = {})
        : std::runtime_error(std::move(message)), span_(std::move(span)),
          expected_(std::move(expected)) {}

    const SourceSpan& span() const { return span_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    SourceSpan span_;
    std::vector<std::string> expected_;
};

struct SourceFile {
    std::string name;
    std::string text;
};

/// Parse .ebm/.ebc documents, one context or machine per file.
Project parse_project(const std::vector<SourceFile>& files);

/// Parse a single formula (predicate or expression).
FormulaPtr parse_formula(const std::string& text, const std::string& file = "<formula>");

/// Parse a bindings document: lines of `name = <value expression>`.
std::vector<std::pair<std::string, FormulaPtr>>
parse_bindings(const std::string& text, const std::string& file = "<bindings>");

} // namespace ebforge
