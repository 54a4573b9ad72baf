#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ebforge/parser.hpp"
#include "ebforge/pogen.hpp"
#include "ebforge/simulate.hpp"
#include "ebforge/translate.hpp"
#include "ebforge/typecheck.hpp"

namespace {

using namespace ebforge;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_out(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

Project load_project(const std::vector<std::string>& paths) {
    std::vector<SourceFile> files;
    for (const auto& p : paths) files.push_back({p, slurp(p)});
    return parse_project(files);
}

struct CommonOpts {
    std::vector<std::string> files;
    std::string machine;
};

struct GroundOpts {
    std::vector<std::string> carrier_specs; // NAME=K
    std::string int_spec;                   // LO..HI

    std::map<std::string, std::int64_t> carrier_sizes() const {
        std::map<std::string, std::int64_t> out;
        for (const auto& s : carrier_specs) {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("--carrier expects NAME=K, got '" + s + "'");
            out[s.substr(0, eq)] = std::stoll(s.substr(eq + 1));
        }
        return out;
    }

    std::optional<std::pair<std::int64_t, std::int64_t>> int_range() const {
        if (int_spec.empty()) return std::nullopt;
        const auto dots = int_spec.find("..", 1); // allow a leading minus
        if (dots == std::string::npos)
            throw CLI::ValidationError("--int expects LO..HI, got '" + int_spec + "'");
        return std::make_pair(std::stoll(int_spec.substr(0, dots)),
                              std::stoll(int_spec.substr(dots + 2)));
    }
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("EBFORGE_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

int check_cmd(const std::vector<std::string>& paths) {
    Project project = load_project(paths);
    auto diags = validate_project(project);
    if (!diags.empty()) {
        std::cerr << format_diagnostics(diags);
        return 1;
    }
    infer_types(project);
    std::cout << "ok: " << project.contexts.size() << " context(s), "
              << project.machines.size() << " machine(s)\n";
    return 0;
}

int types_cmd(const std::vector<std::string>& paths) {
    Project project = load_project(paths);
    auto diags = validate_project(project);
    if (!diags.empty()) {
        std::cerr << format_diagnostics(diags);
        return 1;
    }
    TypedProject types = infer_types(project);
    for (const auto& name : types.symbol_order)
        std::cout << name << " : " << types.symbols.at(name)->str() << "\n";
    for (const auto& key : types.param_order)
        std::cout << key << " : " << types.params.at(key)->str() << "\n";
    return 0;
}

MachineProgram build_program(const Project& project, const std::string& machine,
                             TranslateMode mode) {
    auto diags = validate_project(project);
    if (!diags.empty()) throw std::runtime_error(format_diagnostics(diags));
    TypedProject types = infer_types(project);
    FlatMachine flat = flatten(project, machine);
    return translate_machine(flat, mode, types);
}

std::string program_dump(const MachineProgram& p) {
    std::ostringstream os;
    os << "machine " << p.name << " mode "
       << (p.mode == TranslateMode::Sequential ? "sequential" : "interleaving") << "\n";
    os << "carriers:";
    for (const auto& c : p.carrier_slots) os << " " << c;
    os << "\nconstants:";
    for (const auto& c : p.constant_slots) os << " " << c.name << ":" << c.type->str();
    os << "\nvariables:";
    for (const auto& v : p.variable_slots) os << " " << v.name << ":" << v.type->str();
    os << "\n";
    if (p.variant) os << "variant " << render(p.variant) << "\n";
    os << "init\n";
    for (const auto& w : p.init_plan.writes)
        os << "  " << w.target << " := " << render(w.rhs) << "\n";
    for (const auto& s : p.init_plan.solves) {
        os << "  solve";
        for (const auto& t : s.targets) os << " " << t;
        os << " :| " << render(s.predicate) << "\n";
    }
    for (const auto& e : p.events) {
        os << "event " << e.name << " status " << status_name(e.status) << "\n";
        for (const auto& slot : e.param_slots)
            os << "  param " << slot.name << " : " << slot.type->str() << "\n";
        for (const auto& g : e.guards) os << "  guard @" << g.label << " " << render(g.formula) << "\n";
        if (e.status_guard) os << "  guard variant >= 0\n";
        os << "  frame";
        for (const auto& v : e.frame_set) os << " " << v;
        os << "\n";
        for (const auto& w : e.plan.writes)
            os << "  " << w.target << " := " << render(w.rhs) << "\n";
        for (const auto& s : e.plan.solves) {
            os << "  solve";
            for (const auto& t : s.targets) os << " " << t;
            os << " :| " << render(s.predicate) << "\n";
        }
    }
    return os.str();
}

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (c == '/' || c == '@') c = '_';
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ebforge: compile, simulate and check Event-B machines"};
    app.require_subcommand(1);

    CommonOpts common;
    GroundOpts ground;

    auto* check = app.add_subcommand("check", "parse, validate and type-check models");
    check->add_option("files", common.files, "model files (.ebm/.ebc)")->required();

    auto* types = app.add_subcommand("types", "print the inferred type of every symbol");
    types->add_option("files", common.files)->required();

    std::string mode_str = "sequential";
    std::string out_path;
    auto* translate = app.add_subcommand("translate", "translate a machine to a program");
    translate->add_option("files", common.files)->required();
    translate->add_option("--machine", common.machine, "machine to translate")->required();
    translate->add_option("--mode", mode_str)->check(CLI::IsMember({"sequential", "interleaving"}));
    translate->add_option("--out", out_path, "output path ('-' for stdout)");

    auto* contracts = app.add_subcommand("contracts", "emit the contract document (.ebc)");
    contracts->add_option("files", common.files)->required();
    contracts->add_option("--machine", common.machine)->required();
    contracts->add_option("--out", out_path);

    std::string bind_path;
    std::uint64_t seed = default_seed();
    std::int64_t steps = 10000;
    std::string param_search = "exhaustive";
    bool json_trace = false;
    bool solve_constants = false;
    bool no_check_inv = false;
    std::int64_t carrier_default = 4;
    auto* run = app.add_subcommand("run", "simulate a machine");
    run->add_option("files", common.files)->required();
    run->add_option("--machine", common.machine)->required();
    run->add_option("--bind", bind_path, "constant bindings file");
    run->add_option("--mode", mode_str)->check(CLI::IsMember({"sequential", "interleaving"}));
    run->add_option("--seed", seed, "scheduler seed (or EBFORGE_SEED)");
    run->add_option("--steps", steps, "step limit");
    run->add_option("--param-search", param_search,
                    "exhaustive or sample:K candidate search");
    run->add_option("--carrier", ground.carrier_specs, "carrier size NAME=K");
    run->add_option("--carrier-default", carrier_default, "default carrier size");
    run->add_option("--int", ground.int_spec, "integer range LO..HI for solving");
    run->add_flag("--solve-constants", solve_constants,
                  "search grounded domains for unbound constants");
    run->add_flag("--json-trace", json_trace);
    run->add_flag("--no-check-invariants", no_check_inv);
    run->add_option("--out", out_path, "trace output path");

    bool po_check = false;
    auto* po = app.add_subcommand("po", "generate (and finitely check) proof obligations");
    po->add_option("files", common.files)->required();
    po->add_option("--machine", common.machine)->required();
    po->add_flag("--check", po_check, "check each sequent by finite enumeration");
    po->add_option("--carrier", ground.carrier_specs, "carrier size NAME=K");
    po->add_option("--carrier-default", carrier_default, "default carrier size");
    po->add_option("--int", ground.int_spec, "integer range LO..HI");
    po->add_option("--out", out_path, "directory for .vc files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (check->parsed()) return check_cmd(common.files);
        if (types->parsed()) return types_cmd(common.files);

        const TranslateMode mode = mode_str == "interleaving" ? TranslateMode::Interleaving
                                                              : TranslateMode::Sequential;

        if (translate->parsed()) {
            Project project = load_project(common.files);
            MachineProgram prog = build_program(project, common.machine, mode);
            write_out(out_path, program_dump(prog));
            return 0;
        }
        if (contracts->parsed()) {
            Project project = load_project(common.files);
            MachineProgram prog = build_program(project, common.machine, mode);
            write_out(out_path, emit_contracts(prog));
            return 0;
        }
        if (run->parsed()) {
            Project project = load_project(common.files);
            MachineProgram prog = build_program(project, common.machine, mode);
            SimConfig config;
            config.mode = mode;
            config.seed = seed;
            config.step_limit = steps;
            config.check_invariants = !no_check_inv;
            config.carrier_sizes = ground.carrier_sizes();
            config.default_carrier_size = carrier_default;
            config.int_range = ground.int_range();
            if (param_search.rfind("sample:", 0) == 0) {
                config.search = ParamSearch::Sampled;
                config.sample_count = std::stoi(param_search.substr(7));
            } else if (param_search != "exhaustive") {
                std::cerr << "error: --param-search expects exhaustive or sample:K\n";
                return 2;
            }
            Bindings bindings;
            if (!bind_path.empty()) bindings = parse_bindings(slurp(bind_path), bind_path);
            Simulator sim(prog, config);
            Trace trace = sim.run(bindings, solve_constants);
            write_out(out_path, json_trace ? trace.render_json() : trace.render());
            return 0;
        }
        if (po->parsed()) {
            Project project = load_project(common.files);
            auto diags = validate_project(project);
            if (!diags.empty()) {
                std::cerr << format_diagnostics(diags);
                return 1;
            }
            TypedProject tp = infer_types(project);
            auto sequents = gen_pos(project, tp, common.machine);
            CheckBounds bounds;
            bounds.carrier_sizes = ground.carrier_sizes();
            bounds.default_carrier_size = carrier_default;
            if (auto r = ground.int_range()) bounds.int_range = *r;
            if (!out_path.empty()) {
                std::filesystem::create_directories(out_path);
                for (const Sequent& s : sequents)
                    write_out(out_path + "/" + sanitize(s.name) + ".vc", emit_vc(s));
            }
            bool all_valid = true;
            std::cout << "name | family | verdict | states | ms\n";
            for (const Sequent& s : sequents) {
                std::cout << s.name << " | " << s.family << " | ";
                if (!po_check) {
                    std::cout << "- | - | -\n";
                    continue;
                }
                Verdict v = check_sequent_finite(s, bounds);
                switch (v.kind) {
                case Verdict::Kind::Valid:
                    std::cout << "valid";
                    break;
                case Verdict::Kind::Counterexample: {
                    all_valid = false;
                    std::cout << "counterexample";
                    for (const auto& [n, val] : v.assignment)
                        std::cout << " " << n << "=" << val.render();
                    break;
                }
                case Verdict::Kind::Unbounded:
                    all_valid = false;
                    std::cout << "unbounded(" << v.unbounded_symbol << ")";
                    break;
                }
                std::cout << " | " << v.states_checked << " | " << v.elapsed_ms << "\n";
            }
            return po_check && !all_valid ? 1 : 0;
        }
    } catch (const SyntaxError& e) {
        std::cerr << e.span().str() << ": syntax error: " << e.what() << "\n";
        return 1;
    } catch (const TypecheckError& e) {
        std::cerr << e.span().str() << ": " << e.what() << "\n";
        return 1;
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const EvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
