#pragma once

#include "pdtune/bbo.hpp"
#include "pdtune/csv.hpp"

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace pdtune {

enum class Algorithm { bbo, pso, vebbo, vepso, nsbbo, nspso };

inline const std::vector<std::pair<Algorithm, std::string>>& algorithm_names() {
    static const std::vector<std::pair<Algorithm, std::string>> names = {
        {Algorithm::bbo, "bbo"},       {Algorithm::pso, "pso"},
        {Algorithm::vebbo, "vebbo"},   {Algorithm::vepso, "vepso"},
        {Algorithm::nsbbo, "nsbbo"},   {Algorithm::nspso, "nspso"}};
    return names;
}

inline std::string algorithm_name(Algorithm a) {
    for (const auto& [alg, name] : algorithm_names()) {
        if (alg == a) {
            return name;
        }
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& name) {
    for (const auto& [alg, n] : algorithm_names()) {
        if (n == name) {
            return alg;
        }
    }
    return std::nullopt;
}

inline bool is_multi_objective(Algorithm a) {
    return a != Algorithm::bbo && a != Algorithm::pso;
}

/// Search-space box of the eight gains.
inline Bounds default_gain_bounds() {
    Bounds b;
    b.lower.assign(8, 0.0);
    b.upper = {20.0, 10.0, 10.0, 10.0, 10.0, 10.0, 3.0, 3.0};
    return b;
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything one experiment needs: problem definition, algorithm settings
/// and campaign structure. Defaults reproduce the reference setup.
struct ExperimentConfig {
    Algorithm algorithm = Algorithm::bbo;
    std::size_t trials = 5;
    std::uint64_t master_seed = 1;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    bool seed_baseline = true; // member 0 starts from the baseline gains

    DroneParams drone;
    double dt = 0.01;
    double t_final = 10.0;
    Reference reference;
    DroneState initial = default_initial_state();
    Bounds bounds = default_gain_bounds();
    PdGains baseline = conventional_pd_gains();
    PsoConfig pso;
    BboConfig bbo;
    ArchiveConfig archive;
    Weights weights;

    void validate() const {
        if (trials < 1) {
            throw ConfigError("trials must be >= 1");
        }
        if (workers < 1) {
            throw ConfigError("workers must be >= 1");
        }
        drone.validate();
        if (!(dt > 0.0) || !(t_final >= dt)) {
            throw ConfigError("need dt > 0 and t_final >= dt");
        }
        bounds.validate();
        if (bounds.dim() != 8) {
            throw ConfigError("bounds must cover the 8 gains");
        }
        pso.validate();
        bbo.validate();
        archive.validate();
        weights.validate();
        if (weights.values.size() != 4) {
            throw ConfigError("weights must have 4 entries");
        }
        if (!initial.all_finite()) {
            throw ConfigError("initial state must be finite");
        }
        for (double g : baseline.as_array()) {
            if (!std::isfinite(g) || g < 0.0) {
                throw ConfigError("baseline gains must be finite and >= 0");
            }
        }
    }
};

namespace detail {

struct ConfigParseContext {
    ExperimentConfig cfg;
    std::optional<double> v_max_scalar;
};

using KeySetter = std::function<void(ConfigParseContext&, const std::string&)>;

inline double cfg_double(const std::string& v) { return parse_double(v); }

inline std::size_t cfg_size(const std::string& v) {
    const double d = parse_double(v);
    if (d < 0 || d != static_cast<double>(static_cast<std::size_t>(d))) {
        throw std::invalid_argument("not a non-negative integer: '" + v + "'");
    }
    return static_cast<std::size_t>(d);
}

inline std::uint64_t cfg_u64(const std::string& v) {
    char* end = nullptr;
    const auto r = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') {
        throw std::invalid_argument("not an unsigned integer: '" + v + "'");
    }
    return r;
}

inline bool cfg_bool(const std::string& v) {
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    throw std::invalid_argument("not a boolean: '" + v + "'");
}

inline const std::map<std::string, KeySetter>& config_keys() {
    static const std::map<std::string, KeySetter> keys = [] {
        std::map<std::string, KeySetter> m;
        auto add = [&m](const std::string& section, const std::string& key, KeySetter fn) {
            m[section + "." + key] = std::move(fn);
        };

        add("experiment", "algorithm", [](ConfigParseContext& c, const std::string& v) {
            const auto a = parse_algorithm(v);
            if (!a) {
                throw std::invalid_argument("unknown algorithm: '" + v + "'");
            }
            c.cfg.algorithm = *a;
        });
        add("experiment", "trials",
            [](ConfigParseContext& c, const std::string& v) { c.cfg.trials = cfg_size(v); });
        add("experiment", "master_seed",
            [](ConfigParseContext& c, const std::string& v) { c.cfg.master_seed = cfg_u64(v); });
        add("experiment", "workers", [](ConfigParseContext& c, const std::string& v) {
            c.cfg.workers = static_cast<unsigned>(cfg_size(v));
        });
        add("experiment", "seed_baseline", [](ConfigParseContext& c, const std::string& v) {
            c.cfg.seed_baseline = cfg_bool(v);
        });

        add("drone", "m", [](ConfigParseContext& c, const std::string& v) { c.cfg.drone.m = cfg_double(v); });
        add("drone", "g", [](ConfigParseContext& c, const std::string& v) { c.cfg.drone.g = cfg_double(v); });
        add("drone", "l", [](ConfigParseContext& c, const std::string& v) { c.cfg.drone.l = cfg_double(v); });
        add("drone", "ixx", [](ConfigParseContext& c, const std::string& v) { c.cfg.drone.ixx = cfg_double(v); });
        add("drone", "iyy", [](ConfigParseContext& c, const std::string& v) { c.cfg.drone.iyy = cfg_double(v); });
        add("drone", "izz", [](ConfigParseContext& c, const std::string& v) { c.cfg.drone.izz = cfg_double(v); });
        add("drone", "ax", [](ConfigParseContext& c, const std::string& v) { c.cfg.drone.ax = cfg_double(v); });
        add("drone", "ay", [](ConfigParseContext& c, const std::string& v) { c.cfg.drone.ay = cfg_double(v); });
        add("drone", "az", [](ConfigParseContext& c, const std::string& v) { c.cfg.drone.az = cfg_double(v); });

        add("simulation", "dt", [](ConfigParseContext& c, const std::string& v) { c.cfg.dt = cfg_double(v); });
        add("simulation", "t_final",
            [](ConfigParseContext& c, const std::string& v) { c.cfg.t_final = cfg_double(v); });

        add("reference", "z", [](ConfigParseContext& c, const std::string& v) { c.cfg.reference.z = cfg_double(v); });
        add("reference", "phi", [](ConfigParseContext& c, const std::string& v) { c.cfg.reference.phi = cfg_double(v); });
        add("reference", "theta", [](ConfigParseContext& c, const std::string& v) { c.cfg.reference.theta = cfg_double(v); });
        add("reference", "psi", [](ConfigParseContext& c, const std::string& v) { c.cfg.reference.psi = cfg_double(v); });

        const std::array<const char*, 12> state_keys = {
            "x", "y", "z", "xdot", "ydot", "zdot",
            "phi", "theta", "psi", "phidot", "thetadot", "psidot"};
        for (std::size_t i = 0; i < state_keys.size(); ++i) {
            add("initial", state_keys[i], [i](ConfigParseContext& c, const std::string& v) {
                const double val = cfg_double(v);
                DroneState& s = c.cfg.initial;
                if (i < 3) {
                    s.eps[i] = val;
                } else if (i < 6) {
                    s.eps_dot[i - 3] = val;
                } else if (i < 9) {
                    s.eta[i - 6] = val;
                } else {
                    s.eta_dot[i - 9] = val;
                }
            });
        }

        for (std::size_t d = 0; d < 8; ++d) {
            const std::string gene = gain_names()[d];
            add("bounds", gene + "_min", [d](ConfigParseContext& c, const std::string& v) {
                c.cfg.bounds.lower[d] = cfg_double(v);
            });
            add("bounds", gene + "_max", [d](ConfigParseContext& c, const std::string& v) {
                c.cfg.bounds.upper[d] = cfg_double(v);
            });
            add("baseline", gene, [d](ConfigParseContext& c, const std::string& v) {
                auto genes = c.cfg.baseline.to_vector();
                genes[d] = cfg_double(v);
                c.cfg.baseline = PdGains::from(genes);
            });
        }

        add("pso", "population",
            [](ConfigParseContext& c, const std::string& v) { c.cfg.pso.population = cfg_size(v); });
        add("pso", "iterations",
            [](ConfigParseContext& c, const std::string& v) { c.cfg.pso.iterations = cfg_size(v); });
        add("pso", "inertia",
            [](ConfigParseContext& c, const std::string& v) { c.cfg.pso.inertia = cfg_double(v); });
        add("pso", "inertia_damping", [](ConfigParseContext& c, const std::string& v) {
            c.cfg.pso.inertia_damping = cfg_double(v);
        });
        add("pso", "c1",
            [](ConfigParseContext& c, const std::string& v) { c.cfg.pso.cognitive = cfg_double(v); });
        add("pso", "c2",
            [](ConfigParseContext& c, const std::string& v) { c.cfg.pso.social = cfg_double(v); });
        add("pso", "v_max", [](ConfigParseContext& c, const std::string& v) {
            c.v_max_scalar = cfg_double(v);
        });

        add("bbo", "population",
            [](ConfigParseContext& c, const std::string& v) { c.cfg.bbo.population = cfg_size(v); });
        add("bbo", "iterations",
            [](ConfigParseContext& c, const std::string& v) { c.cfg.bbo.iterations = cfg_size(v); });
        add("bbo", "elites",
            [](ConfigParseContext& c, const std::string& v) { c.cfg.bbo.elites = cfg_size(v); });
        add("bbo", "mutation_prob", [](ConfigParseContext& c, const std::string& v) {
            c.cfg.bbo.mutation_prob = cfg_double(v);
        });
        add("bbo", "emigration", [](ConfigParseContext& c, const std::string& v) {
            if (v == "linear") {
                c.cfg.bbo.emigration = EmigrationModel::linear;
            } else if (v == "sinusoidal") {
                c.cfg.bbo.emigration = EmigrationModel::sinusoidal;
            } else {
                throw std::invalid_argument("emigration must be linear or sinusoidal, got '" + v + "'");
            }
        });

        add("archive", "grids", [](ConfigParseContext& c, const std::string& v) {
            c.cfg.archive.grids_per_dim = static_cast<int>(cfg_size(v));
        });
        add("archive", "inflation", [](ConfigParseContext& c, const std::string& v) {
            c.cfg.archive.inflation = cfg_double(v);
        });
        add("archive", "leader_pressure", [](ConfigParseContext& c, const std::string& v) {
            c.cfg.archive.leader_pressure = cfg_double(v);
        });
        add("archive", "deletion_pressure", [](ConfigParseContext& c, const std::string& v) {
            c.cfg.archive.deletion_pressure = cfg_double(v);
        });
        add("archive", "mutation_rate", [](ConfigParseContext& c, const std::string& v) {
            c.cfg.archive.mutation_rate = cfg_double(v);
        });
        add("archive", "capacity", [](ConfigParseContext& c, const std::string& v) {
            c.cfg.archive.capacity = cfg_size(v);
        });

        for (std::size_t i = 0; i < 4; ++i) {
            add("weights", "w" + std::to_string(i + 1),
                [i](ConfigParseContext& c, const std::string& v) {
                    c.cfg.weights.values[i] = cfg_double(v);
                });
        }
        return m;
    }();
    return keys;
}

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

} // namespace detail

/// Parses the flat sectioned key = value format. `#` starts a comment.
/// Unknown sections or keys are hard errors.
inline ExperimentConfig parse_config(std::istream& in) {
    detail::ConfigParseContext ctx;
    const auto& keys = detail::config_keys();

    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = "config line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(where + "malformed section header");
            }
            section = detail::trim(line.substr(1, line.size() - 2));
            const std::string prefix = section + ".";
            const auto it = keys.lower_bound(prefix);
            if (it == keys.end() || it->first.compare(0, prefix.size(), prefix) != 0) {
                throw ConfigError(where + "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + "expected key = value");
        }
        if (section.empty()) {
            throw ConfigError(where + "key outside any section");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const auto it = keys.find(section + "." + key);
        if (it == keys.end()) {
            throw ConfigError(where + "unknown key '" + key + "' in section [" + section + "]");
        }
        try {
            it->second(ctx, value);
        } catch (const std::exception& e) {
            throw ConfigError(where + e.what());
        }
    }

    if (ctx.v_max_scalar) {
        ctx.cfg.pso.v_max = std::vector<double>(ctx.cfg.bounds.dim(), *ctx.v_max_scalar);
    }
    ctx.cfg.validate();
    return ctx.cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    return parse_config(in);
}

/// Writes a config document that parse_config reads back identically.
inline void write_config(const ExperimentConfig& cfg, std::ostream& out) {
    const auto fd = [](double v) { return format_double(v); };
    out << "[experiment]\n";
    out << "algorithm = " << algorithm_name(cfg.algorithm) << "\n";
    out << "trials = " << cfg.trials << "\n";
    out << "master_seed = " << cfg.master_seed << "\n";
    out << "workers = " << cfg.workers << "\n";
    out << "seed_baseline = " << (cfg.seed_baseline ? "true" : "false") << "\n\n";

    out << "[drone]\n";
    out << "m = " << fd(cfg.drone.m) << "\ng = " << fd(cfg.drone.g) << "\nl = " << fd(cfg.drone.l)
        << "\nixx = " << fd(cfg.drone.ixx) << "\niyy = " << fd(cfg.drone.iyy)
        << "\nizz = " << fd(cfg.drone.izz) << "\nax = " << fd(cfg.drone.ax)
        << "\nay = " << fd(cfg.drone.ay) << "\naz = " << fd(cfg.drone.az) << "\n\n";

    out << "[simulation]\n";
    out << "dt = " << fd(cfg.dt) << "\nt_final = " << fd(cfg.t_final) << "\n\n";

    out << "[reference]\n";
    out << "z = " << fd(cfg.reference.z) << "\nphi = " << fd(cfg.reference.phi)
        << "\ntheta = " << fd(cfg.reference.theta) << "\npsi = " << fd(cfg.reference.psi)
        << "\n\n";

    out << "[initial]\n";
    out << "x = " << fd(cfg.initial.eps[0]) << "\ny = " << fd(cfg.initial.eps[1])
        << "\nz = " << fd(cfg.initial.eps[2]) << "\nxdot = " << fd(cfg.initial.eps_dot[0])
        << "\nydot = " << fd(cfg.initial.eps_dot[1]) << "\nzdot = " << fd(cfg.initial.eps_dot[2])
        << "\nphi = " << fd(cfg.initial.eta[0]) << "\ntheta = " << fd(cfg.initial.eta[1])
        << "\npsi = " << fd(cfg.initial.eta[2]) << "\nphidot = " << fd(cfg.initial.eta_dot[0])
        << "\nthetadot = " << fd(cfg.initial.eta_dot[1])
        << "\npsidot = " << fd(cfg.initial.eta_dot[2]) << "\n\n";

    out << "[bounds]\n";
    for (std::size_t d = 0; d < 8; ++d) {
        out << gain_names()[d] << "_min = " << fd(cfg.bounds.lower[d]) << "\n";
        out << gain_names()[d] << "_max = " << fd(cfg.bounds.upper[d]) << "\n";
    }
    out << "\n[baseline]\n";
    {
        const auto genes = cfg.baseline.as_array();
        for (std::size_t d = 0; d < 8; ++d) {
            out << gain_names()[d] << " = " << fd(genes[d]) << "\n";
        }
    }

    out << "\n[pso]\n";
    out << "population = " << cfg.pso.population << "\niterations = " << cfg.pso.iterations
        << "\ninertia = " << fd(cfg.pso.inertia)
        << "\ninertia_damping = " << fd(cfg.pso.inertia_damping)
        << "\nc1 = " << fd(cfg.pso.cognitive) << "\nc2 = " << fd(cfg.pso.social) << "\n";
    if (cfg.pso.v_max && !cfg.pso.v_max->empty()) {
        out << "v_max = " << fd(cfg.pso.v_max->front()) << "\n";
    }

    out << "\n[bbo]\n";
    out << "population = " << cfg.bbo.population << "\niterations = " << cfg.bbo.iterations
        << "\nelites = " << cfg.bbo.elites << "\nmutation_prob = " << fd(cfg.bbo.mutation_prob)
        << "\nemigration = "
        << (cfg.bbo.emigration == EmigrationModel::linear ? "linear" : "sinusoidal") << "\n";

    out << "\n[archive]\n";
    out << "grids = " << cfg.archive.grids_per_dim << "\ninflation = " << fd(cfg.archive.inflation)
        << "\nleader_pressure = " << fd(cfg.archive.leader_pressure)
        << "\ndeletion_pressure = " << fd(cfg.archive.deletion_pressure)
        << "\nmutation_rate = " << fd(cfg.archive.mutation_rate)
        << "\ncapacity = " << cfg.archive.capacity << "\n";

    out << "\n[weights]\n";
    for (std::size_t i = 0; i < 4; ++i) {
        out << "w" << (i + 1) << " = " << fd(cfg.weights.values[i]) << "\n";
    }
}

} // namespace pdtune
