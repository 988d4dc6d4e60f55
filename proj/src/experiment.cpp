#include "respde/experiment.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "respde/verify.hpp"
#include "respde/version.hpp"

namespace respde {

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest failure");
    std::string hex;
    hex.reserve(2 * len);
    static const char digits[] = "0123456789abcdef";
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(digits[md[i] >> 4]);
        hex.push_back(digits[md[i] & 0xf]);
    }
    return hex;
}

namespace {

using nlohmann::json;

// Collects all output files in memory and writes them in one pass, the
// manifest last, so partial runs never leave a manifest behind.
class OutputBatch {
  public:
    OutputBatch(std::string command, const ExperimentConfig& cfg)
        : command_(std::move(command)), cfg_(cfg), start_(std::chrono::steady_clock::now()) {}

    void add(const std::string& name, std::string content) {
        entries_.emplace_back(name, std::move(content));
    }

    // Companion plot script for a CSV already added.
    void add_plot(const std::string& csv_name, const std::string& plot_body) {
        if (!cfg_.emit_plots) return;
        std::string script;
        script += "# plot script for " + csv_name + "\n";
        script += "set datafile separator ','\n";
        script += plot_body;
        add(csv_name + ".gp", std::move(script));
    }

    std::vector<std::string> flush(const json& derived) {
        const std::string dir = resolve_out_dir(cfg_);
        std::filesystem::create_directories(dir);

        json manifest;
        manifest["command"] = command_;
        manifest["config"] = serialize_config(cfg_);
        manifest["library_version"] = library_version;
        manifest["derived"] = derived;
        json files = json::array();
        std::vector<std::string> paths;
        for (const auto& [name, content] : entries_) {
            files.push_back({{"name", name},
                             {"sha256", sha256_hex(content)},
                             {"bytes", content.size()}});
            paths.push_back(write_one(dir, name, content));
        }
        manifest["files"] = files;
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        manifest["wall_clock_seconds"] = wall;
        paths.push_back(
            write_one(dir, command_ + "_manifest.json", manifest.dump(2) + "\n"));
        return paths;
    }

  private:
    static std::string write_one(const std::string& dir, const std::string& name,
                                 const std::string& content) {
        const std::string path = (std::filesystem::path(dir) / name).string();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write output file " + path);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write on " + path);
        return path;
    }

    std::string command_;
    ExperimentConfig cfg_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::string trajectory_csv(const Trajectory& traj, const ReflectionMeasure& nu) {
    std::string out = "time,node,u,cumulative_mass\n";
    const std::size_t K = traj.states.size() - 1;
    const std::size_t n = traj.states[0].size();
    std::vector<double> cumulative(n, 0.0);
    for (std::size_t k = 0; k <= K; ++k) {
        if (k > 0)
            for (std::size_t i = 0; i < n; ++i) cumulative[i] += nu.masses[k - 1][i];
        for (std::size_t i = 0; i < n; ++i) {
            out += round_trip_format(traj.times[k]);
            out += ',';
            out += std::to_string(i);
            out += ',';
            out += round_trip_format(traj.states[k][i]);
            out += ',';
            out += round_trip_format(cumulative[i]);
            out += '\n';
        }
    }
    return out;
}

std::string measure_csv(const ReflectionMeasure& nu) {
    std::string out = "time,node,x,mass\n";  // nonzero atoms only
    for (std::size_t k = 0; k < nu.masses.size(); ++k)
        for (std::size_t i = 0; i < nu.coords.size(); ++i)
            if (nu.masses[k][i] != 0.0) {
                out += round_trip_format(nu.times[k]);
                out += ',';
                out += std::to_string(i);
                out += ',';
                out += round_trip_format(nu.coords[i]);
                out += ',';
                out += round_trip_format(nu.masses[k][i]);
                out += '\n';
            }
    return out;
}

// Derived constants shared by every manifest.
json derived_base(const ExperimentConfig& cfg) {
    json d;
    const auto chk = check_contraction(cfg.coeff_alpha, cfg.coeff_beta, cfg.a_const);
    d["contraction_margin"] = chk.margin;
    d["contraction_ok"] = chk.ok;
    if (chk.ok) {
        const PicardConstants pc =
            choose_gamma_delta(cfg.coeff_c, cfg.coeff_alpha, cfg.coeff_beta, cfg.a_const);
        d["epsilon"] = pc.epsilon;
        d["gamma"] = pc.gamma;
        d["delta"] = pc.delta;
        d["rho"] = pc.rho;
        d["degenerate"] = pc.degenerate;
    }
    return d;
}

struct NoiseSetup {
    std::unique_ptr<DirectIncrements> direct;  // null for deterministic runs
    std::size_t runs = 1;
};

NoiseSetup make_noise_setup(const ExperimentConfig& cfg, const Problem& p) {
    NoiseSetup setup;
    if (cfg.noise_channels > 0) {
        setup.direct = std::make_unique<DirectIncrements>(p.noise, cfg.dt, cfg.seed);
        setup.runs = static_cast<std::size_t>(cfg.paths);
    }
    return setup;
}

}  // namespace

CommandResult cmd_simulate(const ExperimentConfig& cfg) {
    const Problem p = build_problem(cfg);
    const SolverConfig sc = build_solver_config(cfg);
    OutputBatch batch("simulate", cfg);
    json derived = derived_base(cfg);
    CommandResult result;

    const NoiseSetup setup = make_noise_setup(cfg, p);
    double path0_mass = 0.0;

    if (cfg.solver == "picard") {
        const PicardResult pr = picard_solve(p, sc, setup.direct.get(), setup.runs,
                                             cfg.picard_tol,
                                             static_cast<std::size_t>(cfg.picard_max_iter));
        path0_mass = pr.solution.nu.total_mass();
        batch.add("simulate_trajectory_p0.csv", trajectory_csv(pr.solution.u, pr.solution.nu));
        batch.add_plot("simulate_trajectory_p0.csv",
                       "plot 'simulate_trajectory_p0.csv' using 1:3 with dots\n");
        batch.add("simulate_measure_p0.csv", measure_csv(pr.solution.nu));

        std::string hist = "iteration,delta,ratio\n";
        for (const PicardState& st : pr.history) {
            hist += std::to_string(st.iteration);
            hist += ',';
            hist += round_trip_format(st.delta_m);
            hist += ',';
            hist += round_trip_format(st.ratio);
            hist += '\n';
        }
        batch.add("simulate_picard_history.csv", hist);
        derived["picard_converged"] = pr.converged;
        derived["picard_iterations"] = pr.history.size();
        result.message = "picard solve: " + std::to_string(pr.history.size()) + " iterations, " +
                         (pr.converged ? "converged" : "NOT converged") +
                         ", total_mass=" + round_trip_format(path0_mass);
    } else {
        for (std::size_t r = 0; r < setup.runs; ++r) {
            const Trajectory traj = setup.direct ? simulate_path(p, sc, *setup.direct, r)
                                                 : deterministic_penalized(p, sc);
            const ReflectionMeasure nu = extract_measure(p.mesh, traj);
            if (r == 0) path0_mass = nu.total_mass();
            const std::string tag = "_p" + std::to_string(r);
            batch.add("simulate_trajectory" + tag + ".csv", trajectory_csv(traj, nu));
            batch.add_plot("simulate_trajectory" + tag + ".csv",
                           "plot 'simulate_trajectory" + tag + ".csv' using 1:3 with dots\n");
            batch.add("simulate_measure" + tag + ".csv", measure_csv(nu));
        }
        result.message = "penalized solve: " + std::to_string(setup.runs) +
                         " path(s), total_mass(p0)=" + round_trip_format(path0_mass);
    }
    derived["total_mass_p0"] = path0_mass;
    result.files = batch.flush(derived);
    result.exit_code = 0;
    return result;
}

CommandResult cmd_converge(const ExperimentConfig& cfg) {
    if (cfg.penalty_schedule.size() < 2)
        throw std::invalid_argument("config: penalty_schedule: need at least two levels");
    OutputBatch batch("converge", cfg);
    const Problem p = build_problem(cfg);
    const SolverConfig sc = build_solver_config(cfg);
    const PenaltySchedule schedule = build_schedule(cfg);
    const NoiseSetup setup = make_noise_setup(cfg, p);

    const ObstacleSolution sol = solve_linear_obstacle(p, sc, schedule, setup.direct.get(), 0);
    const AprioriTable apriori =
        apriori_bounds(p, sc, schedule, setup.direct.get(), setup.runs);

    // Log-log slope of the violation time integral against the penalty level.
    double slope = 0.0;
    bool slope_defined = true;
    {
        std::vector<double> lx, ly;
        for (const auto& lvl : sol.levels)
            if (lvl.violation_integral > 0.0) {
                lx.push_back(std::log10(lvl.penalty_n));
                ly.push_back(std::log10(lvl.violation_integral));
            }
        if (lx.size() < 2) {
            slope_defined = false;
        } else {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < lx.size(); ++i) {
                sx += lx[i];
                sy += ly[i];
                sxx += lx[i] * lx[i];
                sxy += lx[i] * ly[i];
            }
            const double m = static_cast<double>(lx.size());
            slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        }
    }

    std::string csv =
        "penalty_n,violation_integral,scaled_violation,total_mass,skorokhod,monotone_gap,"
        "mean_sup_norm2,mean_energy_integral,mean_scaled_violation\n";
    for (std::size_t l = 0; l < sol.levels.size(); ++l) {
        const auto& s = sol.levels[l];
        const auto& a = apriori.rows[l];
        csv += round_trip_format(s.penalty_n) + ',' + round_trip_format(s.violation_integral) +
               ',' + round_trip_format(s.scaled_violation) + ',' +
               round_trip_format(s.total_mass) + ',' + round_trip_format(s.skorokhod) + ',' +
               round_trip_format(s.monotone_gap) + ',' + round_trip_format(a.sup_state_norm2) +
               ',' + round_trip_format(a.energy_integral) + ',' +
               round_trip_format(a.scaled_violation) + '\n';
    }
    csv += "# loglog_slope = ";
    csv += slope_defined ? round_trip_format(slope) : "undefined";
    csv += '\n';

    batch.add("converge_levels.csv", csv);
    batch.add_plot("converge_levels.csv",
                   "set logscale xy\nplot 'converge_levels.csv' using 1:2 with linespoints\n");

    json derived = derived_base(cfg);
    derived["loglog_slope"] = slope_defined ? json(slope) : json(nullptr);
    derived["growth_flag"] = apriori.growth_flag;
    derived["monotonicity_fault"] = sol.monotonicity_fault;

    CommandResult result;
    result.files = batch.flush(derived);
    result.exit_code = sol.monotonicity_fault ? 1 : 0;
    std::ostringstream msg;
    msg << "schedule of " << sol.levels.size() << " levels, slope=";
    if (slope_defined)
        msg << round_trip_format(slope);
    else
        msg << "undefined";
    if (apriori.growth_flag) msg << ", GROWTH FLAG raised";
    if (sol.monotonicity_fault) msg << ", MONOTONICITY FAULT";
    result.message = msg.str();
    return result;
}

CommandResult cmd_compare(const ExperimentConfig& cfg) {
    OutputBatch batch("compare", cfg);
    const Problem lo = build_problem(cfg);
    const SolverConfig sc = build_solver_config(cfg);

    Problem hi = lo;
    for (std::size_t i = 0; i < hi.xi.size(); ++i) hi.xi[i] += cfg.compare_xi_shift;
    if (cfg.compare_f_shift != 0.0) {
        const CoefficientFn base = lo.coeffs.f;
        const double shift = cfg.compare_f_shift;
        hi.coeffs.f = [base, shift](double t, double x, double y, double z) {
            return base(t, x, y, z) + shift;
        };
    }
    const bool shared_barrier = cfg.compare_s_shift == 0.0;
    if (!shared_barrier && lo.obstacle.value) {
        const auto base = lo.obstacle.value;
        const double shift = cfg.compare_s_shift;
        hi.obstacle.value = [base, shift](double t, double x) { return base(t, x) + shift; };
    }

    const NoiseSetup setup = make_noise_setup(cfg, lo);
    const ComparisonReport sols =
        compare_solutions(lo, hi, sc, setup.direct.get(), setup.runs);
    const bool check_measures = shared_barrier && static_cast<bool>(lo.obstacle.value);
    ComparisonReport meas;
    if (check_measures) meas = compare_measures(lo, hi, sc, setup.direct.get(), setup.runs);

    const bool solutions_pass = sols.max_violation <= cfg.compare_tol;
    const bool measures_pass = !check_measures || meas.measure_gap >= -cfg.compare_tol;

    json report;
    report["tolerance"] = cfg.compare_tol;
    report["paths"] = sols.paths;
    report["max_violation"] = sols.max_violation;
    report["solutions_pass"] = solutions_pass;
    if (check_measures) {
        report["measure_gap"] = meas.measure_gap;
        report["measure_worst_function"] = meas.worst_function;
        report["measures_pass"] = measures_pass;
    } else {
        report["measure_gap"] = nullptr;
    }

    batch.add("compare_report.json", report.dump(2) + "\n");
    json derived = derived_base(cfg);
    derived["max_violation"] = sols.max_violation;

    CommandResult result;
    result.files = batch.flush(derived);
    result.exit_code = (solutions_pass && measures_pass) ? 0 : 1;
    std::ostringstream msg;
    msg << "max_violation=" << round_trip_format(sols.max_violation);
    if (check_measures) msg << ", measure_gap=" << round_trip_format(meas.measure_gap);
    msg << (result.exit_code == 0 ? " (pass)" : " (VIOLATION)");
    result.message = msg.str();
    return result;
}

CommandResult cmd_verify(const ExperimentConfig& cfg) {
    OutputBatch batch("verify", cfg);
    const Problem p = build_problem(cfg);
    const SolverConfig coarse_cfg = build_solver_config(cfg);
    SolverConfig fine_cfg = coarse_cfg;
    fine_cfg.dt = coarse_cfg.dt / 2.0;  // exact in binary; 2*fine.dt == dt

    const bool stochastic = cfg.noise_channels > 0;
    const std::size_t runs = stochastic ? static_cast<std::size_t>(cfg.paths) : 1;

    std::unique_ptr<DirectIncrements> fine;
    std::unique_ptr<PairSumIncrements> coarse;
    if (stochastic) {
        fine = std::make_unique<DirectIncrements>(p.noise, fine_cfg.dt, cfg.seed);
        coarse = std::make_unique<PairSumIncrements>(DirectIncrements(p.noise, fine_cfg.dt, cfg.seed));
    }

    std::vector<double> res_dt(runs), res_half(runs);
    EnergyReport report_p0;
    for (std::size_t r = 0; r < runs; ++r) {
        const Trajectory tc = stochastic ? simulate_path(p, coarse_cfg, *coarse, r)
                                         : deterministic_penalized(p, coarse_cfg);
        const Trajectory tf = stochastic ? simulate_path(p, fine_cfg, *fine, r)
                                         : deterministic_penalized(p, fine_cfg);
        const EnergyReport rc = energy_identity(p, tc, extract_measure(p.mesh, tc));
        const EnergyReport rf = energy_identity(p, tf, extract_measure(p.mesh, tf));
        res_dt[r] = rc.residual;
        res_half[r] = rf.residual;
        if (r == 0) report_p0 = rc;
    }

    auto rms = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x * x;
        return std::sqrt(acc / static_cast<double>(v.size()));
    };
    const double rms_dt = rms(res_dt);
    const double rms_half = rms(res_half);
    const double ratio = rms_dt > 0.0 ? rms_half / rms_dt : 0.0;

    bool pass = true;
    if (rms_dt == 0.0 && rms_half == 0.0) {
        pass = true;  // identically zero problem satisfies the identity exactly
    } else if (stochastic) {
        pass = rms_half < rms_dt;
    } else {
        pass = ratio >= 0.35 && ratio <= 0.65;
    }

    std::string csv = "path,residual_dt,residual_half\n";
    for (std::size_t r = 0; r < runs; ++r)
        csv += std::to_string(r) + ',' + round_trip_format(res_dt[r]) + ',' +
               round_trip_format(res_half[r]) + '\n';

    json report;
    report["paths"] = runs;
    report["rms_residual_dt"] = rms_dt;
    report["rms_residual_half"] = rms_half;
    report["ratio"] = ratio;
    report["pass"] = pass;
    report["path0_terms"] = {{"lhs", report_p0.lhs},
                             {"initial_energy", report_p0.initial_energy},
                             {"f_pairing", report_p0.f_pairing},
                             {"g_pairing", report_p0.g_pairing},
                             {"h_quadratic", report_p0.h_quadratic},
                             {"stochastic", report_p0.stochastic},
                             {"measure_pairing", report_p0.measure_pairing},
                             {"residual", report_p0.residual}};

    batch.add("verify_residuals.csv", csv);
    batch.add_plot("verify_residuals.csv",
                   "plot 'verify_residuals.csv' using 1:2 with points, '' using 1:3 with points\n");
    batch.add("verify_report.json", report.dump(2) + "\n");
    json derived = derived_base(cfg);
    derived["rms_ratio"] = ratio;

    CommandResult result;
    result.files = batch.flush(derived);
    result.exit_code = pass ? 0 : 1;
    std::ostringstream msg;
    msg << "RMS(dt)=" << round_trip_format(rms_dt) << " RMS(dt/2)=" << round_trip_format(rms_half)
        << " ratio=" << round_trip_format(ratio) << (pass ? " (pass)" : " (VIOLATION)");
    result.message = msg.str();
    return result;
}

}  // namespace respde
