#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "worldline/problem.hpp"
#include "worldline/sbp_operators.hpp"
#include "worldline/solver.hpp"
#include "worldline/diagnostics.hpp"

namespace worldline {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One run of the solver, as configured from a key=value text file.
struct RunConfig {
    SbpOrder order = SbpOrder::SBP21;
    int n_gamma = 32;
    double gamma_i = 0.0;
    double gamma_f = 1.0;
    PhysicsParams physics;
    PotentialSpec potential;
    bool potential_set = false;
    InitialData initial;
    bool epsilon_auto = true;
    double epsilon = 0.0;
    SolverSettings solver;
    std::string out_dir = "out";
    DiagnosticsOptions diag;

    ProblemSpec to_problem() const {
        ProblemSpec spec;
        spec.grid = build_grid(gamma_i, gamma_f, n_gamma);
        spec.physics = physics;
        spec.potential = potential;
        spec.initial = initial;
        return spec;
    }

    SolverSettings to_solver_settings() const {
        SolverSettings s = solver;
        if (!epsilon_auto) s.epsilon_ladder = {epsilon};
        return s;
    }

    bool operator==(const RunConfig& o) const {
        return order == o.order && n_gamma == o.n_gamma && gamma_i == o.gamma_i &&
               gamma_f == o.gamma_f && physics.c == o.physics.c && physics.m == o.physics.m &&
               potential.kind == o.potential.kind && potential.strength == o.potential.strength &&
               potential.coeffs == o.potential.coeffs && potential_set == o.potential_set &&
               initial.t_i == o.initial.t_i && initial.x_i == o.initial.x_i &&
               initial.tdot_i == o.initial.tdot_i && initial.xdot_i == o.initial.xdot_i &&
               epsilon_auto == o.epsilon_auto && epsilon == o.epsilon &&
               solver.residual_tol == o.solver.residual_tol &&
               solver.max_iters == o.solver.max_iters && solver.damping == o.solver.damping &&
               solver.min_step == o.solver.min_step && out_dir == o.out_dir &&
               diag.use_regularized == o.diag.use_regularized &&
               diag.sign_lambda6 == o.diag.sign_lambda6 && diag.sign_lambda8 == o.diag.sign_lambda8;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "': cannot parse number from '" + v + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "': cannot parse integer from '" + v + "'");
    }
}

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace detail

/// Named presets expanding to full configurations.  `paper-quartic` is the
/// quartic-potential setup of the reference experiment (N=32, t_i=0, x_i=1,
/// tdot_i=1, xdot_i=1/10, kappa=1/4); `paper-linear` swaps in V = x/4.
inline std::string preset_text(const std::string& name) {
    const std::string common =
        "n_gamma = 32\n"
        "gamma_i = 0\n"
        "gamma_f = 1\n"
        "c = 1\n"
        "m = 1\n"
        "t_i = 0\n"
        "x_i = 1\n"
        "tdot_i = 1\n"
        "xdot_i = 0.1\n";
    if (name == "paper-quartic") {
        return "order = 21\n" + common + "potential = quartic\nstrength = 0.25\n";
    }
    if (name == "paper-linear") {
        return "order = 21\n" + common + "potential = linear\nstrength = 0.25\n";
    }
    throw ConfigError("unknown preset '" + name + "'");
}

inline void validate_config(const RunConfig& cfg);

/// Parses key=value configuration text.  '#' starts a comment; unknown keys
/// are rejected with their line number.
inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    bool strength_set = false;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        if (s.find('[') != std::string::npos) continue;  // section markers in echoes
        s = detail::trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value', got '" +
                              detail::trim(raw) + "'");
        }
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string val = detail::trim(s.substr(eq + 1));
        if (key == "order") {
            const int v = detail::parse_int(key, val, line);
            if (v == 21) cfg.order = SbpOrder::SBP21;
            else if (v == 42) cfg.order = SbpOrder::SBP42;
            else throw ConfigError("line " + std::to_string(line) + ": key 'order': must be 21 or 42");
        } else if (key == "n_gamma") {
            cfg.n_gamma = detail::parse_int(key, val, line);
        } else if (key == "gamma_i") {
            cfg.gamma_i = detail::parse_double(key, val, line);
        } else if (key == "gamma_f") {
            cfg.gamma_f = detail::parse_double(key, val, line);
        } else if (key == "c") {
            cfg.physics.c = detail::parse_double(key, val, line);
        } else if (key == "m") {
            cfg.physics.m = detail::parse_double(key, val, line);
        } else if (key == "potential") {
            cfg.potential_set = true;
            if (val == "free") cfg.potential.kind = PotentialKind::Free;
            else if (val == "linear") cfg.potential.kind = PotentialKind::Linear;
            else if (val == "quartic") cfg.potential.kind = PotentialKind::Quartic;
            else if (val == "polynomial") cfg.potential.kind = PotentialKind::Polynomial;
            else
                throw ConfigError("line " + std::to_string(line) +
                                  ": key 'potential': unknown kind '" + val + "'");
        } else if (key == "strength") {
            cfg.potential.strength = detail::parse_double(key, val, line);
            strength_set = true;
        } else if (key == "coeffs") {
            cfg.potential.coeffs.clear();
            std::istringstream cs(val);
            std::string tok;
            while (std::getline(cs, tok, ',')) {
                cfg.potential.coeffs.push_back(detail::parse_double(key, detail::trim(tok), line));
            }
        } else if (key == "t_i") {
            cfg.initial.t_i = detail::parse_double(key, val, line);
        } else if (key == "x_i") {
            cfg.initial.x_i = detail::parse_double(key, val, line);
        } else if (key == "tdot_i") {
            cfg.initial.tdot_i = detail::parse_double(key, val, line);
        } else if (key == "xdot_i") {
            cfg.initial.xdot_i = detail::parse_double(key, val, line);
        } else if (key == "epsilon") {
            if (val == "auto") {
                cfg.epsilon_auto = true;
            } else {
                cfg.epsilon_auto = false;
                cfg.epsilon = detail::parse_double(key, val, line);
            }
        } else if (key == "residual_tol") {
            cfg.solver.residual_tol = detail::parse_double(key, val, line);
        } else if (key == "max_iters") {
            cfg.solver.max_iters = detail::parse_int(key, val, line);
        } else if (key == "damping") {
            cfg.solver.damping = detail::parse_double(key, val, line);
        } else if (key == "min_step") {
            cfg.solver.min_step = detail::parse_double(key, val, line);
        } else if (key == "out_dir") {
            cfg.out_dir = val;
        } else if (key == "diag_use_dreg") {
            cfg.diag.use_regularized = detail::parse_int(key, val, line) != 0;
        } else if (key == "sign_lambda6") {
            cfg.diag.sign_lambda6 = detail::parse_double(key, val, line);
        } else if (key == "sign_lambda8") {
            cfg.diag.sign_lambda8 = detail::parse_double(key, val, line);
        } else {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    (void)strength_set;
    validate_config(cfg);
    return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

inline void validate_config(const RunConfig& cfg) {
    if (!cfg.potential_set) {
        throw ConfigError("missing required key 'potential'");
    }
    if (!(cfg.gamma_f > cfg.gamma_i)) {
        throw ConfigError("key 'gamma_f': must exceed gamma_i");
    }
    if (cfg.n_gamma < min_nodes(cfg.order)) {
        throw ConfigError("key 'n_gamma': grid too small for operator order");
    }
    if (!(cfg.physics.c > 0.0)) throw ConfigError("key 'c': must be positive");
    if (!(cfg.physics.m > 0.0)) throw ConfigError("key 'm': must be positive");
    if (!(cfg.initial.tdot_i > 0.0)) throw ConfigError("key 'tdot_i': must be positive");
    if (!cfg.epsilon_auto && cfg.epsilon < 0.0) throw ConfigError("key 'epsilon': must be >= 0");
    if (!(cfg.solver.residual_tol > 0.0)) throw ConfigError("key 'residual_tol': must be positive");
    if (!(cfg.solver.damping > 0.0 && cfg.solver.damping < 1.0)) {
        throw ConfigError("key 'damping': must lie in (0,1)");
    }
    if (cfg.solver.max_iters < 1) throw ConfigError("key 'max_iters': must be positive");
    if (cfg.potential.kind == PotentialKind::Polynomial && cfg.potential.coeffs.empty()) {
        throw ConfigError("key 'coeffs': required for polynomial potential");
    }
}

/// Canonical echo; parse_config(config_echo(cfg)) reproduces cfg exactly.
inline std::string config_echo(const RunConfig& cfg) {
    using detail::fmt17;
    std::ostringstream out;
    out << "order = " << (cfg.order == SbpOrder::SBP21 ? 21 : 42) << "\n";
    out << "n_gamma = " << cfg.n_gamma << "\n";
    out << "gamma_i = " << fmt17(cfg.gamma_i) << "\n";
    out << "gamma_f = " << fmt17(cfg.gamma_f) << "\n";
    out << "c = " << fmt17(cfg.physics.c) << "\n";
    out << "m = " << fmt17(cfg.physics.m) << "\n";
    switch (cfg.potential.kind) {
        case PotentialKind::Free: out << "potential = free\n"; break;
        case PotentialKind::Linear: out << "potential = linear\n"; break;
        case PotentialKind::Quartic: out << "potential = quartic\n"; break;
        case PotentialKind::Polynomial: out << "potential = polynomial\n"; break;
    }
    out << "strength = " << fmt17(cfg.potential.strength) << "\n";
    if (!cfg.potential.coeffs.empty()) {
        out << "coeffs = ";
        for (std::size_t i = 0; i < cfg.potential.coeffs.size(); ++i) {
            out << (i ? "," : "") << fmt17(cfg.potential.coeffs[i]);
        }
        out << "\n";
    }
    out << "t_i = " << fmt17(cfg.initial.t_i) << "\n";
    out << "x_i = " << fmt17(cfg.initial.x_i) << "\n";
    out << "tdot_i = " << fmt17(cfg.initial.tdot_i) << "\n";
    out << "xdot_i = " << fmt17(cfg.initial.xdot_i) << "\n";
    if (cfg.epsilon_auto) out << "epsilon = auto\n";
    else out << "epsilon = " << fmt17(cfg.epsilon) << "\n";
    out << "residual_tol = " << fmt17(cfg.solver.residual_tol) << "\n";
    out << "max_iters = " << cfg.solver.max_iters << "\n";
    out << "damping = " << fmt17(cfg.solver.damping) << "\n";
    out << "min_step = " << fmt17(cfg.solver.min_step) << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";
    out << "diag_use_dreg = " << (cfg.diag.use_regularized ? 1 : 0) << "\n";
    out << "sign_lambda6 = " << fmt17(cfg.diag.sign_lambda6) << "\n";
    out << "sign_lambda8 = " << fmt17(cfg.diag.sign_lambda8) << "\n";
    return out.str();
}

}  // namespace worldline
