#include "ebforge/span.hpp"

#include <sstream>

namespace ebforge {

std::string SourceSpan::str() const {
    std::ostringstream os;
    os << (file.empty() ? "<input>" : file) << ":" << start_line << ":" << start_col;
    return os.str();
}

std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
    std::ostringstream os;
    for (const Diagnostic& d : diags) os << d.span.str() << ": " << d.message << "\n";
    return os.str();
}

} // namespace ebforge
