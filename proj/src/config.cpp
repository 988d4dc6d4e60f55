#include "respde/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace respde {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config: " + key + ": " + why);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last) bad_key(key, "not a number: '" + value + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        bad_key(key, "not a nonnegative integer: '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    bad_key(key, "expected true or false, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) bad_key(key, "empty list entry");
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) bad_key(key, "empty list");
    return out;
}

}  // namespace

std::string round_trip_format(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    using Handler = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Handler> handlers = {
        {"mesh_n", [&](const std::string& k, const std::string& v) { cfg.mesh_n = parse_u64(k, v); }},
        {"dt", [&](const std::string& k, const std::string& v) { cfg.dt = parse_double(k, v); }},
        {"t_final", [&](const std::string& k, const std::string& v) { cfg.t_final = parse_double(k, v); }},
        {"a_const", [&](const std::string& k, const std::string& v) { cfg.a_const = parse_double(k, v); }},
        {"noise_rule", [&](const std::string&, const std::string& v) { cfg.noise_rule = v; }},
        {"noise_param", [&](const std::string& k, const std::string& v) { cfg.noise_param = parse_double(k, v); }},
        {"noise_channels", [&](const std::string& k, const std::string& v) { cfg.noise_channels = parse_u64(k, v); }},
        {"coeff_preset", [&](const std::string&, const std::string& v) { cfg.coeff_preset = v; }},
        {"coeff_c", [&](const std::string& k, const std::string& v) { cfg.coeff_c = parse_double(k, v); }},
        {"coeff_alpha", [&](const std::string& k, const std::string& v) { cfg.coeff_alpha = parse_double(k, v); }},
        {"coeff_beta", [&](const std::string& k, const std::string& v) { cfg.coeff_beta = parse_double(k, v); }},
        {"coeff_f_const", [&](const std::string& k, const std::string& v) { cfg.coeff_f_const = parse_double(k, v); }},
        {"coeff_h_const", [&](const std::string& k, const std::string& v) { cfg.coeff_h_const = parse_double(k, v); }},
        {"xi_preset", [&](const std::string&, const std::string& v) { cfg.xi_preset = v; }},
        {"xi_amplitude", [&](const std::string& k, const std::string& v) { cfg.xi_amplitude = parse_double(k, v); }},
        {"xi_shift", [&](const std::string& k, const std::string& v) { cfg.xi_shift = parse_double(k, v); }},
        {"obstacle_preset", [&](const std::string&, const std::string& v) { cfg.obstacle_preset = v; }},
        {"obstacle_amplitude", [&](const std::string& k, const std::string& v) { cfg.obstacle_amplitude = parse_double(k, v); }},
        {"obstacle_decay", [&](const std::string& k, const std::string& v) { cfg.obstacle_decay = parse_double(k, v); }},
        {"penalty_schedule", [&](const std::string& k, const std::string& v) { cfg.penalty_schedule = parse_list(k, v); }},
        {"solver", [&](const std::string&, const std::string& v) { cfg.solver = v; }},
        {"picard_tol", [&](const std::string& k, const std::string& v) { cfg.picard_tol = parse_double(k, v); }},
        {"picard_max_iter", [&](const std::string& k, const std::string& v) { cfg.picard_max_iter = parse_u64(k, v); }},
        {"paths", [&](const std::string& k, const std::string& v) { cfg.paths = parse_u64(k, v); }},
        {"seed", [&](const std::string& k, const std::string& v) { cfg.seed = parse_u64(k, v); }},
        {"compare_f_shift", [&](const std::string& k, const std::string& v) { cfg.compare_f_shift = parse_double(k, v); }},
        {"compare_xi_shift", [&](const std::string& k, const std::string& v) { cfg.compare_xi_shift = parse_double(k, v); }},
        {"compare_s_shift", [&](const std::string& k, const std::string& v) { cfg.compare_s_shift = parse_double(k, v); }},
        {"compare_tol", [&](const std::string& k, const std::string& v) { cfg.compare_tol = parse_double(k, v); }},
        {"out_dir", [&](const std::string&, const std::string& v) { cfg.out_dir = v; }},
        {"emit_plots", [&](const std::string& k, const std::string& v) { cfg.emit_plots = parse_bool(k, v); }},
    };

    std::set<std::string> seen;
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = handlers.find(key);
        if (it == handlers.end()) bad_key(key, "unknown key");
        if (!seen.insert(key).second) bad_key(key, "duplicate key");
        it->second(key, value);
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("config: cannot open file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "mesh_n = " << cfg.mesh_n << "\n";
    out << "dt = " << round_trip_format(cfg.dt) << "\n";
    out << "t_final = " << round_trip_format(cfg.t_final) << "\n";
    out << "a_const = " << round_trip_format(cfg.a_const) << "\n";
    out << "noise_rule = " << cfg.noise_rule << "\n";
    out << "noise_param = " << round_trip_format(cfg.noise_param) << "\n";
    out << "noise_channels = " << cfg.noise_channels << "\n";
    out << "coeff_preset = " << cfg.coeff_preset << "\n";
    out << "coeff_c = " << round_trip_format(cfg.coeff_c) << "\n";
    out << "coeff_alpha = " << round_trip_format(cfg.coeff_alpha) << "\n";
    out << "coeff_beta = " << round_trip_format(cfg.coeff_beta) << "\n";
    out << "coeff_f_const = " << round_trip_format(cfg.coeff_f_const) << "\n";
    out << "coeff_h_const = " << round_trip_format(cfg.coeff_h_const) << "\n";
    out << "xi_preset = " << cfg.xi_preset << "\n";
    out << "xi_amplitude = " << round_trip_format(cfg.xi_amplitude) << "\n";
    out << "xi_shift = " << round_trip_format(cfg.xi_shift) << "\n";
    out << "obstacle_preset = " << cfg.obstacle_preset << "\n";
    out << "obstacle_amplitude = " << round_trip_format(cfg.obstacle_amplitude) << "\n";
    out << "obstacle_decay = " << round_trip_format(cfg.obstacle_decay) << "\n";
    out << "penalty_schedule = ";
    for (std::size_t i = 0; i < cfg.penalty_schedule.size(); ++i)
        out << (i ? "," : "") << round_trip_format(cfg.penalty_schedule[i]);
    out << "\n";
    out << "solver = " << cfg.solver << "\n";
    out << "picard_tol = " << round_trip_format(cfg.picard_tol) << "\n";
    out << "picard_max_iter = " << cfg.picard_max_iter << "\n";
    out << "paths = " << cfg.paths << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "compare_f_shift = " << round_trip_format(cfg.compare_f_shift) << "\n";
    out << "compare_xi_shift = " << round_trip_format(cfg.compare_xi_shift) << "\n";
    out << "compare_s_shift = " << round_trip_format(cfg.compare_s_shift) << "\n";
    out << "compare_tol = " << round_trip_format(cfg.compare_tol) << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";
    out << "emit_plots = " << (cfg.emit_plots ? "true" : "false") << "\n";
    return out.str();
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.mesh_n < 1 || cfg.mesh_n > 200000) bad_key("mesh_n", "must be in [1, 200000]");
    if (!(cfg.dt > 0.0)) bad_key("dt", "must be positive");
    if (!(cfg.t_final > 0.0)) bad_key("t_final", "must be positive");
    const double steps = cfg.t_final / cfg.dt;
    if (std::abs(std::round(steps) * cfg.dt - cfg.t_final) > 1e-9 * std::max(1.0, cfg.t_final) ||
        std::round(steps) < 1.0)
        bad_key("t_final", "must be a positive multiple of dt");
    if (std::round(steps) > 1e7) bad_key("dt", "more than 1e7 steps requested");
    if (!(cfg.a_const > 0.0)) bad_key("a_const", "must be positive");

    if (cfg.noise_rule != "geometric" && cfg.noise_rule != "polynomial")
        bad_key("noise_rule", "must be geometric or polynomial");
    if (cfg.noise_channels > 0) {
        if (cfg.noise_rule == "geometric" && !(cfg.noise_param > 0.0 && cfg.noise_param < 1.0))
            bad_key("noise_param", "geometric ratio must lie in (0,1)");
        if (cfg.noise_rule == "polynomial" && !(cfg.noise_param > 1.0))
            bad_key("noise_param", "polynomial exponent must exceed 1");
        if (cfg.noise_channels > 10000) bad_key("noise_channels", "must be at most 10000");
    }

    if (cfg.coeff_preset != "zero" && cfg.coeff_preset != "linear" &&
        cfg.coeff_preset != "saturating")
        bad_key("coeff_preset", "must be zero, linear, or saturating");
    if (cfg.coeff_c < 0.0) bad_key("coeff_c", "must be nonnegative");
    if (cfg.coeff_alpha < 0.0) bad_key("coeff_alpha", "must be nonnegative");
    if (cfg.coeff_beta < 0.0) bad_key("coeff_beta", "must be nonnegative");

    if (cfg.xi_preset != "sine" && cfg.xi_preset != "zero")
        bad_key("xi_preset", "must be sine or zero");
    if (cfg.obstacle_preset != "none" && cfg.obstacle_preset != "sine")
        bad_key("obstacle_preset", "must be none or sine");

    double prev = 0.0;
    for (double n : cfg.penalty_schedule) {
        if (!(n > prev)) bad_key("penalty_schedule", "must be strictly increasing and positive");
        prev = n;
    }

    if (cfg.solver != "penalized" && cfg.solver != "picard")
        bad_key("solver", "must be penalized or picard");
    if (!(cfg.picard_tol > 0.0)) bad_key("picard_tol", "must be positive");
    if (cfg.picard_max_iter < 1 || cfg.picard_max_iter > 1000)
        bad_key("picard_max_iter", "must be in [1, 1000]");
    if (cfg.solver == "picard" &&
        !check_contraction(cfg.coeff_alpha, cfg.coeff_beta, cfg.a_const).ok)
        bad_key("coeff_alpha", "contraction condition 2*alpha + beta^2 < 2*a_const fails");

    if (cfg.paths < 1 || cfg.paths > 100000) bad_key("paths", "must be in [1, 100000]");
    if (cfg.compare_tol < 0.0) bad_key("compare_tol", "must be nonnegative");
}

Problem build_problem(const ExperimentConfig& cfg) {
    validate_config(cfg);
    Problem p;
    p.mesh = Mesh1D::uniform(static_cast<std::size_t>(cfg.mesh_n));
    const double a = cfg.a_const;
    p.op = assemble_operator(p.mesh, [a](double) { return a; }, a, a);
    if (cfg.noise_channels > 0) {
        const SpectrumRule rule = cfg.noise_rule == "geometric" ? SpectrumRule::geometric
                                                                : SpectrumRule::polynomial;
        p.noise = build_sine_spectrum(p.mesh, static_cast<std::size_t>(cfg.noise_channels), rule,
                                      cfg.noise_param);
    }
    if (cfg.coeff_preset == "zero")
        p.coeffs = make_zero_coefficients();
    else if (cfg.coeff_preset == "linear")
        p.coeffs = make_linear_coefficients(cfg.coeff_c, cfg.coeff_f_const, cfg.coeff_h_const);
    else
        p.coeffs = make_saturating_coefficients(cfg.coeff_c, cfg.coeff_alpha, cfg.coeff_beta,
                                                cfg.coeff_f_const, cfg.coeff_h_const);
    if (cfg.obstacle_preset == "sine")
        p.obstacle = make_sine_obstacle(cfg.obstacle_amplitude, cfg.obstacle_decay);
    else
        p.obstacle = make_no_obstacle();
    p.xi.resize(p.mesh.n_interior);
    for (std::size_t i = 0; i < p.mesh.n_interior; ++i) {
        const double x = p.mesh.node_coords[i];
        const double base = cfg.xi_preset == "sine" ? cfg.xi_amplitude * std::sin(M_PI * x) : 0.0;
        p.xi[i] = base + cfg.xi_shift;
    }
    return p;
}

SolverConfig build_solver_config(const ExperimentConfig& cfg) {
    SolverConfig sc;
    sc.dt = cfg.dt;
    sc.t_final = cfg.t_final;
    sc.penalty_n = cfg.penalty_schedule.back();
    return sc;
}

PenaltySchedule build_schedule(const ExperimentConfig& cfg) {
    return PenaltySchedule{cfg.penalty_schedule};
}

std::string resolve_out_dir(const ExperimentConfig& cfg) {
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    if (const char* env = std::getenv("RESPDE_OUT_DIR"); env && *env) return env;
    return "out";
}

}  // namespace respde
