#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "presslab/commands.hpp"
#include "presslab/config.hpp"
#include "presslab/util.hpp"

int main(int argc, char** argv) {
    using namespace presslab;
    CLI::App app{"Pressure estimates for finitely generated semigroup actions"};
    std::string command, config_path, out_path, format;
    int threads = 0;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    app.add_option("command", command, "estimate | verify | dimension | localent | sweep")
        ->required()
        ->check(CLI::IsMember({"estimate", "verify", "dimension", "localent", "sweep"}));
    app.add_option("--config", config_path, "key = value configuration file");
    auto* out_opt = app.add_option("--out", out_path, "output file (default: stdout)");
    auto* fmt_opt = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    auto* thr_opt = app.add_option("--threads", threads, "worker threads (default: PRESSLAB_THREADS or all cores)");
    auto* seed_opt = app.add_option("--seed", seed, "random seed");
    auto* tol_opt = app.add_option("--tolerance", tolerance, "check tolerance");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot open config '" << config_path << "'\n";
            return kExitParse;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            cfg = parse_config(buf.str());
        } catch (const ConfigError& e) {
            std::cerr << config_path << ": " << e.what() << "\n";
            return kExitParse;
        }
    }
    if (*out_opt) cfg.output = out_path;
    if (*fmt_opt) cfg.format = format;
    if (*thr_opt) cfg.threads = threads;
    if (*seed_opt) cfg.seed = seed;
    if (*tol_opt) cfg.tolerance = tolerance;
    set_thread_count(cfg.threads);

    CommandResult r = run_command(command, cfg);
    std::cerr << r.message;
    if (!r.output.empty()) {
        if (cfg.output.empty()) {
            std::cout << r.output;
        } else {
            std::ofstream out(cfg.output, std::ios::binary);
            if (!out) {
                std::cerr << "cannot write '" << cfg.output << "'\n";
                return kExitParse;
            }
            out << r.output;
        }
    }
    return r.exit_code;
}
