#pragma once

#include <string>
#include <vector>

namespace ebforge {

/// Half-open region of a source document, 1-based lines and columns.
struct SourceSpan {
    std::string file;
    int start_line = 0;
    int start_col = 0;
    int end_line = 0;
    int end_col = 0;

    std::string str() const;
};

struct Diagnostic {
    SourceSpan span;
    std::string message;
};

std::string format_diagnostics(const std::vector<Diagnostic>& diags);

} // namespace ebforge
