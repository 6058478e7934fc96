// Command line front end: single runs, refinement sweeps, operator dumps and
// the acceptance verification suite.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "worldline/acceptance.hpp"
#include "worldline/reporting.hpp"

namespace {

struct CommonArgs {
    std::string preset;
    std::string config_path;
    std::vector<std::string> overrides;  // "key = value" lines appended to the base
};

void add_override_flag(CLI::App* cmd, CommonArgs& args, const std::string& flag,
                       const std::string& key, const std::string& help) {
    auto cb = [&args, key](const std::string& v) { args.overrides.push_back(key + " = " + v); };
    cmd->add_option_function<std::string>(flag, cb, help);
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("preset", args.preset, "named preset: paper-quartic or paper-linear");
    cmd->add_option("--config", args.config_path, "configuration file (key = value lines)");
    add_override_flag(cmd, args, "--order", "order", "SBP operator order, 21 or 42");
    add_override_flag(cmd, args, "--n", "n_gamma", "number of gamma nodes");
    add_override_flag(cmd, args, "--gamma-i", "gamma_i", "lower gamma bound");
    add_override_flag(cmd, args, "--gamma-f", "gamma_f", "upper gamma bound");
    add_override_flag(cmd, args, "--c", "c", "speed of light");
    add_override_flag(cmd, args, "--m", "m", "particle mass");
    add_override_flag(cmd, args, "--potential", "potential", "free|linear|quartic|polynomial");
    add_override_flag(cmd, args, "--strength", "strength", "potential strength (alpha/kappa)");
    add_override_flag(cmd, args, "--coeffs", "coeffs", "polynomial coefficients a0,a1,...");
    add_override_flag(cmd, args, "--t-i", "t_i", "initial time");
    add_override_flag(cmd, args, "--x-i", "x_i", "initial position");
    add_override_flag(cmd, args, "--tdot-i", "tdot_i", "dt/dgamma at gamma_i");
    add_override_flag(cmd, args, "--xdot-i", "xdot_i", "dx/dgamma at gamma_i");
    add_override_flag(cmd, args, "--epsilon", "epsilon", "regularization: auto or a value");
    add_override_flag(cmd, args, "--residual-tol", "residual_tol", "gradient max-norm tolerance");
    add_override_flag(cmd, args, "--max-iters", "max_iters", "Newton iteration cap");
    add_override_flag(cmd, args, "--damping", "damping", "line-search backtracking factor");
    add_override_flag(cmd, args, "--min-step", "min_step", "smallest line-search step");
    add_override_flag(cmd, args, "--out", "out_dir", "output directory");
}

worldline::RunConfig build_config(const CommonArgs& args) {
    std::string text;
    if (!args.preset.empty()) {
        text = worldline::preset_text(args.preset);
    } else if (!args.config_path.empty()) {
        std::ifstream f(args.config_path);
        if (!f) throw worldline::ConfigError("cannot open config file '" + args.config_path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    for (const auto& line : args.overrides) text += line + "\n";
    worldline::RunConfig cfg = worldline::parse_config(text);
    if (const char* root = std::getenv("WORLDLINE_OUT_ROOT")) {
        std::filesystem::path p(cfg.out_dir);
        if (p.is_relative()) cfg.out_dir = (std::filesystem::path(root) / p).string();
    }
    return cfg;
}

int do_run(const CommonArgs& args) {
    const worldline::RunConfig cfg = build_config(args);
    const worldline::RunArtifacts art = worldline::run(cfg);
    std::printf("%s", art.summary_text.c_str());
    std::printf("# artifacts written to %s\n", art.out_dir.c_str());
    return static_cast<int>(art.status);
}

int do_sweep(const CommonArgs& args, const std::string& orders_csv, const std::string& n_csv) {
    const worldline::RunConfig cfg = build_config(args);
    std::vector<worldline::SbpOrder> orders;
    {
        std::stringstream ss(orders_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok == "21") orders.push_back(worldline::SbpOrder::SBP21);
            else if (tok == "42") orders.push_back(worldline::SbpOrder::SBP42);
            else throw worldline::ConfigError("sweep: order must be 21 or 42, got '" + tok + "'");
        }
    }
    std::vector<int> n_list;
    {
        std::stringstream ss(n_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) n_list.push_back(std::stoi(tok));
    }
    if (orders.empty() || n_list.empty()) {
        throw worldline::ConfigError("sweep: need --orders and --n lists");
    }
    std::filesystem::create_directories(cfg.out_dir);
    bool ok = true;
    for (auto order : orders) {
        bool all_solved = true;
        const std::string table = worldline::sweep_table(cfg, order, n_list, &all_solved);
        const std::string name =
            std::string("sweep_sbp") + (order == worldline::SbpOrder::SBP21 ? "21" : "42") + ".csv";
        worldline::detail::write_file(std::filesystem::path(cfg.out_dir) / name, table);
        std::printf("%s\n%s", name.c_str(), table.c_str());
        ok = ok && all_solved;
    }
    std::printf("# sweep artifacts written to %s\n", cfg.out_dir.c_str());
    return ok ? 0 : 2;
}

int do_dump(const CommonArgs& args) {
    const worldline::RunConfig cfg = build_config(args);
    worldline::dump_operators(cfg);
    std::printf("# D.txt H.txt D_reg.txt written to %s\n", cfg.out_dir.c_str());
    return 0;
}

int do_verify() {
    const auto results = worldline::run_acceptance_suite();
    bool all = true;
    for (const auto& r : results) {
        std::printf("%s criterion %s:%s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.details.c_str());
        all = all && r.passed;
    }
    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"world-line variational solver for second-order initial value problems"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, dump_args;
    std::string orders_csv = "21", n_csv = "16,32,64,128";

    CLI::App* cmd_run = app.add_subcommand("run", "solve one configuration and write artifacts");
    add_common(cmd_run, run_args);
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "grid refinement study against the oracle");
    add_common(cmd_sweep, sweep_args);
    cmd_sweep->add_option("--orders", orders_csv, "comma separated operator orders");
    cmd_sweep->add_option("--n-list", n_csv, "comma separated grid sizes");
    CLI::App* cmd_dump = app.add_subcommand("dump-operators", "write D, H, D_reg matrix files");
    add_common(cmd_dump, dump_args);
    CLI::App* cmd_verify = app.add_subcommand("verify", "run the acceptance suite");
    (void)cmd_verify;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (cmd_run->parsed()) return do_run(run_args);
        if (cmd_sweep->parsed()) return do_sweep(sweep_args, orders_csv, n_csv);
        if (cmd_dump->parsed()) return do_dump(dump_args);
        if (cmd_verify->parsed()) return do_verify();
    } catch (const worldline::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
