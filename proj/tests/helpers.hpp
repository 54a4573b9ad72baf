#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "ebforge/parser.hpp"
#include "ebforge/pogen.hpp"
#include "ebforge/simulate.hpp"
#include "ebforge/translate.hpp"
#include "ebforge/typecheck.hpp"

namespace ebtest {

using namespace ebforge;

inline std::string models_dir() { return EBFORGE_MODELS_DIR; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline Project load_models(std::initializer_list<const char*> names) {
    std::vector<SourceFile> files;
    for (const char* n : names)
        files.push_back({n, slurp(models_dir() + "/" + n)});
    return parse_project(files);
}

/// Parse + validate + infer; throws on any diagnostic.
inline std::pair<Project, TypedProject> load_checked(std::initializer_list<const char*> names) {
    Project p = load_models(names);
    auto diags = validate_project(p);
    if (!diags.empty()) throw std::runtime_error(format_diagnostics(diags));
    TypedProject t = infer_types(p);
    return {std::move(p), std::move(t)};
}

inline MachineProgram program_for(const Project& p, const TypedProject& t,
                                  const std::string& machine,
                                  TranslateMode mode = TranslateMode::Sequential) {
    return translate_machine(flatten(p, machine), mode, t);
}

inline Bindings bin_bindings() {
    return parse_bindings(slurp(models_dir() + "/bin.bindings"), "bin.bindings");
}

inline Bindings mio_bindings() {
    return parse_bindings(slurp(models_dir() + "/mio.bindings"), "mio.bindings");
}

} // namespace ebtest
