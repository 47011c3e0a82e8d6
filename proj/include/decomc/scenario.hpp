// scenario.hpp - configuration-driven runner behind the decomc CLI.
//
// Builds a bath from the [bath] section, sweeps the [drive] time grid (and
// optionally a [sweep] variable), runs canonical / microcanonical /
// comparison / oracle computations, and emits a comma-separated table with a
// provenance header.  Every emitted number is produced by a library
// operation; nothing is computed in this layer.
//
// Output is byte-identical for identical effective config and tool version:
// fixed "%.12g" formatting, no timestamps, deterministic row order.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "decomc/bath.hpp"
#include "decomc/config.hpp"
#include "decomc/errors.hpp"
#include "decomc/fock.hpp"
#include "decomc/micro.hpp"
#include "decomc/parallel.hpp"
#include "decomc/thermal.hpp"
#include "decomc/thermo.hpp"
#include "decomc/version.hpp"

namespace decomc {

enum class Command { Thermal, Micro, Compare, Oracle, Sweep, Neff };

inline const char* command_name(Command c) {
    switch (c) {
        case Command::Thermal: return "thermal";
        case Command::Micro: return "micro";
        case Command::Compare: return "compare";
        case Command::Oracle: return "oracle";
        case Command::Sweep: return "sweep";
        case Command::Neff: return "neff";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Tabulated ln Z(beta) input path (nonlinear environments supplied as tables)
// ---------------------------------------------------------------------------

// Natural cubic spline of ln Z(beta).  E and C_V come from the first two
// derivatives; dC_V/dT uses the piecewise-constant third derivative, which is
// the resolution limit of a tabulated input (documented in the README).
class LogZTable {
  public:
    static LogZTable load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open logz table: " + path);
        std::vector<double> b, v;
        std::string line;
        while (std::getline(in, line)) {
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream row(line);
            double x, y;
            if (row >> x >> y) {
                b.push_back(x);
                v.push_back(y);
            }
        }
        return LogZTable(std::move(b), std::move(v));
    }

    LogZTable(std::vector<double> beta, std::vector<double> logz)
        : x_(std::move(beta)), y_(std::move(logz)) {
        if (x_.size() < 4) throw ConfigError("logz table: need at least 4 rows");
        for (std::size_t i = 1; i < x_.size(); ++i)
            if (!(x_[i] > x_[i - 1])) throw ConfigError("logz table: beta must increase");
        build();
    }

    double beta_min() const { return x_.front(); }
    double beta_max() const { return x_.back(); }

    ThermoPoint thermo(double beta) const {
        const std::size_t i = segment(beta);
        const double d = beta - x_[i];
        const double lz = y_[i] + d * (c1_[i] + d * (c2_[i] + d * c3_[i]));
        const double d1 = c1_[i] + d * (2.0 * c2_[i] + 3.0 * d * c3_[i]);
        const double d2 = 2.0 * c2_[i] + 6.0 * d * c3_[i];
        const double d3 = 6.0 * c3_[i];
        ThermoPoint tp;
        tp.beta = beta;
        tp.log_z = lz;
        tp.energy = -d1;
        tp.c_v = beta * beta * d2;
        tp.dcv_dT = -2.0 * beta * beta * beta * d2 - beta * beta * beta * beta * d3;
        return tp;
    }

    double solve_beta(double E_target) const {
        double lo = x_.front(), hi = x_.back();
        if (thermo(lo).energy < E_target || thermo(hi).energy > E_target)
            throw NonConvergence("logz table: E outside the tabulated range");
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (thermo(mid).energy > E_target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

  private:
    std::size_t segment(double beta) const {
        if (!(beta >= x_.front() && beta <= x_.back()))
            throw std::invalid_argument("logz table: beta outside tabulated range");
        const auto it = std::upper_bound(x_.begin(), x_.end(), beta);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin());
        return std::min(std::max<std::size_t>(i, 1) - 1, x_.size() - 2);
    }

    void build() {
        const std::size_t n = x_.size();
        std::vector<double> h(n - 1), alpha(n, 0.0), l(n, 1.0), mu(n, 0.0), zz(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
        for (std::size_t i = 1; i + 1 < n; ++i)
            alpha[i] = 3.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            l[i] = 2.0 * (x_[i + 1] - x_[i - 1]) - h[i - 1] * mu[i - 1];
            mu[i] = h[i] / l[i];
            zz[i] = (alpha[i] - h[i - 1] * zz[i - 1]) / l[i];
        }
        c1_.assign(n - 1, 0.0);
        c2_.assign(n, 0.0);
        c3_.assign(n - 1, 0.0);
        for (std::size_t j = n - 1; j-- > 0;) {
            c2_[j] = zz[j] - mu[j] * c2_[j + 1];
            c1_[j] = (y_[j + 1] - y_[j]) / h[j] - h[j] * (c2_[j + 1] + 2.0 * c2_[j]) / 3.0;
            c3_[j] = (c2_[j + 1] - c2_[j]) / (3.0 * h[j]);
        }
        c2_.resize(n - 1);
    }

    std::vector<double> x_, y_, c1_, c2_, c3_;
};

// ---------------------------------------------------------------------------
// Scenario configuration
// ---------------------------------------------------------------------------

struct NumericsConfig {
    quad::Options quad{};
    std::size_t contour_points{4096};
    double contour_half_width{240.0};
    double contour_rtol{1e-8};
    std::string micro_method{"auto"};  // auto | contour | saddle | ohmic_closed
    int fock_n_max{200};
    fock::ShellLimits shell{};
    double oracle_rtol{1e-8};
    bool with_q_i{true};
};

struct ScenarioConfig {
    // bath
    std::string bath_kind;                 // ladder | transmission_line | ohmic | table
    std::optional<ModeSet> modes;          // ladder / transmission_line
    double ladder_omega0{0.0};
    std::optional<ContinuumLine1D> line;   // ohmic thermo backend
    double eta{0.0}, deta_dT{0.0};         // ohmic
    std::optional<SpectralDensity> f_table;
    std::shared_ptr<LogZTable> logz_table;

    // drive
    CurrentProfile profile;
    std::vector<double> t_grid;

    // ensemble
    bool canonical{true};
    double beta{0.0};        // canonical beta
    double energy{0.0};      // microcanonical E (ladder: M * omega0)
    long long shell_M{-1};

    // sweep
    std::string sweep_variable;
    std::vector<double> sweep_values;

    NumericsConfig numerics;

    std::string output_path{"results.csv"};
    std::uint64_t config_hash{0};
};

inline ScenarioConfig build_scenario(const ConfigText& cfg) {
    ScenarioConfig sc;
    sc.config_hash = cfg.hash();

    // ---- bath ----
    sc.bath_kind = cfg.get("bath", "kind");
    if (sc.bath_kind == "ladder") {
        sc.ladder_omega0 = cfg.get_double("bath", "omega0");
        const long long n = cfg.get_int("bath", "modes");
        if (n < 1) throw ConfigError("[bath] modes must be >= 1");
        const std::string coupling = cfg.get_or("bath", "coupling", "constant");
        CouplingRule rule;
        if (coupling == "constant") {
            rule = constant_coupling(cfg.get_double("bath", "amplitude"));
        } else if (coupling == "ohmic_matched") {
            // A_n^2 = 2 eta omega0 / pi * omega_n^2: the ladder whose discrete
            // decoherence sum approaches the Ohmic integral as omega0 -> 0.
            const double eta = cfg.get_double("bath", "eta");
            const double w0 = sc.ladder_omega0;
            rule = [eta, w0](std::size_t, double w) {
                return std::sqrt(2.0 * eta * w0 / M_PI) * w;
            };
            sc.eta = eta;
        } else {
            throw ConfigError("[bath] coupling must be constant or ohmic_matched");
        }
        sc.modes = ladder_modes(sc.ladder_omega0, static_cast<std::size_t>(n), rule);
    } else if (sc.bath_kind == "transmission_line") {
        LineSpec line;
        line.length = cfg.get_double("bath", "length");
        line.speed = cfg.get_double_or("bath", "speed", 1.0);
        line.n_modes = static_cast<std::size_t>(cfg.get_int("bath", "modes"));
        const double amp = cfg.get_double_or("bath", "amplitude", 1.0);
        sc.modes = transmission_line_modes(
            line, [amp, &line](std::size_t, double) { return amp * std::sqrt(2.0 / line.length); });
    } else if (sc.bath_kind == "ohmic") {
        sc.eta = cfg.get_double("bath", "eta");
        sc.deta_dT = cfg.get_double_or("bath", "deta_dT", 0.0);
        sc.line = ContinuumLine1D{cfg.get_double("bath", "line_length"),
                                  cfg.get_double_or("bath", "line_speed", 1.0)};
    } else if (sc.bath_kind == "table") {
        const std::string fpath = cfg.get("bath", "spectral_table");
        std::ifstream in(fpath);
        if (!in) throw ConfigError("cannot open spectral table: " + fpath);
        std::vector<double> w, F;
        std::string line;
        while (std::getline(in, line)) {
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream row(line);
            double a, b;
            if (row >> a >> b) {
                w.push_back(a);
                F.push_back(b);
            }
        }
        sc.f_table = SpectralDensity::tabulated(std::move(w), std::move(F));
        if (cfg.has("bath", "logz_table"))
            sc.logz_table = std::make_shared<LogZTable>(LogZTable::load(cfg.get("bath", "logz_table")));
    } else {
        throw ConfigError("[bath] kind must be ladder, transmission_line, ohmic or table");
    }

    // ---- drive ----
    sc.profile.amplitude = cfg.get_double_or("drive", "amplitude", 1.0);
    sc.profile.omega_r = cfg.get_double_or("drive", "omega_r",
                                           std::numeric_limits<double>::infinity());
    if (cfg.has("drive", "t")) {
        sc.t_grid = cfg.get_list("drive", "t");
    } else {
        const double t0 = cfg.get_double("drive", "t_min");
        const double t1 = cfg.get_double("drive", "t_max");
        const long long nt = cfg.get_int("drive", "t_count");
        if (nt < 1 || t1 < t0) throw ConfigError("[drive] bad t grid");
        for (long long i = 0; i < nt; ++i)
            sc.t_grid.push_back(nt == 1 ? t0 : t0 + (t1 - t0) * double(i) / double(nt - 1));
    }
    for (std::size_t i = 1; i < sc.t_grid.size(); ++i)
        if (!(sc.t_grid[i] > sc.t_grid[i - 1]))
            throw ConfigError("[drive] t grid must be strictly increasing");
    if (sc.t_grid.empty() || sc.t_grid.front() < 0.0)
        throw ConfigError("[drive] t grid must be non-empty and >= 0");
    sc.profile.t = sc.t_grid.front();
    sc.profile.validate();

    // ---- ensemble ----
    const std::string ens = cfg.get_or("ensemble", "kind", "canonical");
    if (ens == "canonical") {
        sc.canonical = true;
        sc.beta = cfg.get_double("ensemble", "beta");
        if (!(sc.beta > 0.0)) throw ConfigError("[ensemble] beta must be > 0");
    } else if (ens == "microcanonical") {
        sc.canonical = false;
        if (cfg.has("ensemble", "M")) {
            sc.shell_M = cfg.get_int("ensemble", "M");
            if (sc.bath_kind != "ladder")
                throw ConfigError("[ensemble] M is only meaningful for ladder baths");
            sc.energy = static_cast<double>(sc.shell_M) * sc.ladder_omega0;
        } else {
            sc.energy = cfg.get_double("ensemble", "E");
            if (sc.bath_kind == "ladder") {
                const double m = sc.energy / sc.ladder_omega0;
                if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m))
                    throw ConfigError("[ensemble] ladder E must sit on a shell (multiple of omega0)");
                sc.shell_M = static_cast<long long>(std::llround(m));
            }
        }
        if (!(sc.energy > 0.0)) throw ConfigError("[ensemble] E must be > 0");
    } else {
        throw ConfigError("[ensemble] kind must be canonical or microcanonical");
    }

    // ---- numerics ----
    auto& nm = sc.numerics;
    nm.quad.rtol = cfg.get_double_or("numerics", "quad_rtol", 1e-9);
    if (!(nm.quad.rtol > 0.0 && nm.quad.rtol <= 1e-2))
        throw ConfigError("[numerics] quad_rtol must be in (0, 1e-2]");
    nm.contour_points = static_cast<std::size_t>(cfg.get_int_or("numerics", "contour_points", 4096));
    nm.contour_half_width = cfg.get_double_or("numerics", "contour_half_width", 240.0);
    nm.contour_rtol = cfg.get_double_or("numerics", "contour_rtol", 1e-8);
    nm.micro_method = cfg.get_or("numerics", "micro_method", "auto");
    nm.fock_n_max = static_cast<int>(cfg.get_int_or("numerics", "fock_n_max", 200));
    nm.shell.m_max = cfg.get_int_or("numerics", "shell_m_max", 60);
    nm.oracle_rtol = cfg.get_double_or("numerics", "oracle_rtol", 1e-8);
    nm.with_q_i = cfg.get_bool_or("numerics", "with_q_i", true);

    // ---- sweep ----
    if (cfg.has("sweep", "variable")) {
        sc.sweep_variable = cfg.get("sweep", "variable");
        sc.sweep_values = cfg.get_list("sweep", "values");
    }

    sc.output_path = cfg.get_or("output", "path", "results.csv");
    const std::string fmt = cfg.get_or("output", "format", "csv");
    if (fmt != "csv") throw ConfigError("[output] format must be csv");
    return sc;
}

// ---------------------------------------------------------------------------
// Result table
// ---------------------------------------------------------------------------

struct ResultRow {
    double swept{std::numeric_limits<double>::quiet_NaN()};
    double t{std::numeric_limits<double>::quiet_NaN()};
    double q_r{std::numeric_limits<double>::quiet_NaN()};
    double q_i{std::numeric_limits<double>::quiet_NaN()};
    double c_thermal_abs{std::numeric_limits<double>::quiet_NaN()};
    double c_micro_abs{std::numeric_limits<double>::quiet_NaN()};
    double abs_gap{std::numeric_limits<double>::quiet_NaN()};
    double preexp_correction{std::numeric_limits<double>::quiet_NaN()};
    double exponent_correction{std::numeric_limits<double>::quiet_NaN()};
    double n_eff{std::numeric_limits<double>::quiet_NaN()};
    // oracle command extras
    double c_fock_abs{std::numeric_limits<double>::quiet_NaN()};
    double exp_minus_qr{std::numeric_limits<double>::quiet_NaN()};
    double canonical_gap{std::numeric_limits<double>::quiet_NaN()};
    std::string method;
    std::string error;  // non-empty marks a failed row
};

struct RunResult {
    std::vector<std::string> columns;
    std::vector<ResultRow> rows;
    bool oracle_ok{true};
    double worst_oracle_dev{0.0};
};

namespace detail {

inline std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    if (v == 0.0) return "0";  // fold negative zero
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Per-bath computation backends
// ---------------------------------------------------------------------------

namespace detail {

struct ThermalOut {
    double q_r, q_i, c_abs;
};

// Canonical Q and |C| at inverse temperature beta for time t.
inline ThermalOut thermal_point(const ScenarioConfig& sc, double beta, double t) {
    CurrentProfile prof = sc.profile;
    prof.t = t;
    if (sc.modes) {
        DiscreteQ q(*sc.modes, prof, sc.numerics.with_q_i, sc.numerics.quad);
        const double qr = q.q_r(beta);
        return {qr, sc.numerics.with_q_i ? q.q_i() : std::numeric_limits<double>::quiet_NaN(),
                std::exp(-qr)};
    }
    if (sc.bath_kind == "ohmic") {
        // Q_I is not Bose enhanced and is omitted on the Ohmic closed-form path
        const double amp2 = prof.amplitude * prof.amplitude;
        const double qr = amp2 * q_ohmic_closed(sc.eta, beta, prof.omega_r, t).q_r;
        return {qr, std::numeric_limits<double>::quiet_NaN(), std::exp(-qr)};
    }
    // tabulated F: Q_I through the dispersion kernel when requested
    const double qr = q_r_continuum(*sc.f_table, prof, beta, sc.numerics.quad);
    const double qi = sc.numerics.with_q_i
                          ? q_i_continuum(*sc.f_table, prof, sc.numerics.quad)
                          : std::numeric_limits<double>::quiet_NaN();
    return {qr, qi, std::exp(-qr)};
}

// beta matched to the microcanonical energy on the same ln Z the contour uses.
inline ThermoPoint micro_thermo(const ScenarioConfig& sc) {
    if (sc.modes) {
        const double beta = solve_beta(*sc.modes, sc.energy);
        return thermo_derivatives(*sc.modes, beta);
    }
    if (sc.bath_kind == "ohmic") {
        const double beta = solve_beta(*sc.line, sc.energy);
        return thermo_derivatives(*sc.line, beta);
    }
    if (sc.logz_table) return sc.logz_table->thermo(sc.logz_table->solve_beta(sc.energy));
    throw ConfigError("microcanonical run needs a ladder/line bath, an ohmic line, "
                      "or a logz_table");
}

inline std::string resolve_micro_method(const ScenarioConfig& sc) {
    if (sc.numerics.micro_method != "auto") return sc.numerics.micro_method;
    if (sc.bath_kind == "ladder") return "contour";
    if (sc.bath_kind == "ohmic") return "ohmic_closed";
    return "saddle";
}

inline MicroCoherence micro_point(const ScenarioConfig& sc, const ThermoPoint& tp, double t,
                                  const std::string& method) {
    CurrentProfile prof = sc.profile;
    prof.t = t;

    if (method == "contour") {
        ContourSpec spec;
        spec.beta_anchor = tp.beta;
        spec.n_points = sc.numerics.contour_points;
        spec.half_width = sc.numerics.contour_half_width;
        spec.rtol = sc.numerics.contour_rtol;
        if (sc.bath_kind == "ladder") {
            spec.mode = ContourSpec::Mode::OnePeriod;
            spec.omega0 = sc.ladder_omega0;
        }
        if (sc.modes) {
            if (spec.mode == ContourSpec::Mode::OnePeriod)
                commensurate_ratios(*sc.modes, spec.omega0);
            auto lnz = [&](Complex z) { return log_partition(*sc.modes, z); };
            // Q_I on or off in lockstep with the thermal column
            const DiscreteQ q(*sc.modes, prof, sc.numerics.with_q_i, sc.numerics.quad);
            return coherence_contour(lnz, q, sc.energy, spec, tp);
        }
        if (sc.bath_kind == "ohmic") {
            auto lnz = [&](Complex z) { return continuum_log_partition(*sc.line, z); };
            const double amp2 = prof.amplitude * prof.amplitude;
            auto q = [&](Complex z) {
                return amp2 * q_ohmic_complex(sc.eta, z, prof.omega_r, t).q;
            };
            return coherence_contour(lnz, q, sc.energy, spec, tp);
        }
        throw ConfigError("contour method needs a discrete bath or the ohmic line");
    }

    if (method == "ohmic_closed") {
        if (sc.bath_kind != "ohmic")
            throw ConfigError("ohmic_closed method needs bath kind = ohmic");
        const double amp2 = prof.amplitude * prof.amplitude;
        return coherence_ohmic(amp2 * sc.eta, amp2 * sc.deta_dT, tp, t);
    }

    if (method == "saddle") {
        QDerivatives qd;
        if (sc.bath_kind == "ohmic") {
            const double amp2 = prof.amplitude * prof.amplitude;
            const auto d = q_ohmic_complex(sc.eta, Complex(tp.beta, 0.0), prof.omega_r, t);
            qd = QDerivatives{amp2 * d.q, amp2 * d.dq, amp2 * d.d2q};
        } else if (sc.modes) {
            const DiscreteQ q(*sc.modes, prof, sc.numerics.with_q_i, sc.numerics.quad);
            qd = q_derivatives_fd([&](Complex z) { return q(z); }, tp.beta);
        } else {
            const TabulatedQ q(*sc.f_table, prof, sc.numerics.quad);
            qd = q_derivatives_fd([&](Complex z) { return q(z); }, tp.beta);
            if (sc.numerics.with_q_i) {
                // constant phase, shared with the thermal column
                qd.value += Complex(0.0, q_i_continuum(*sc.f_table, prof, sc.numerics.quad));
            }
        }
        return coherence_saddle_corrected(qd, tp);
    }

    throw ConfigError("unknown micro method: " + method);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

inline RunResult run_scenario(const ScenarioConfig& sc, Command cmd) {
    RunResult out;

    const bool sweeping = cmd == Command::Sweep;
    if (sweeping && sc.sweep_variable.empty())
        throw ConfigError("sweep command needs a [sweep] section");
    if (cmd == Command::Thermal && !sc.canonical)
        throw ConfigError("thermal command needs a canonical ensemble (set ensemble.beta)");
    if ((cmd == Command::Micro || cmd == Command::Compare || cmd == Command::Oracle) &&
        sc.canonical)
        throw ConfigError(std::string(command_name(cmd)) +
                          " command needs a microcanonical ensemble (set ensemble.E or M)");

    std::vector<double> sweep_values = sweeping ? sc.sweep_values : std::vector<double>{0.0};

    switch (cmd) {
        case Command::Thermal:
            out.columns = {"t", "q_r", "q_i", "c_thermal_abs"};
            break;
        case Command::Micro:
            out.columns = {"t", "c_micro_abs", "preexp_correction", "exponent_correction",
                           "n_eff", "method"};
            break;
        case Command::Compare:
        case Command::Sweep:
            out.columns = {"t", "q_r", "q_i", "c_thermal_abs", "c_micro_abs", "abs_gap",
                           "preexp_correction", "exponent_correction", "n_eff", "method"};
            if (sweeping) out.columns.insert(out.columns.begin(), sc.sweep_variable);
            break;
        case Command::Oracle:
            out.columns = {"t", "c_micro_abs", "c_fock_abs", "abs_gap", "c_thermal_abs",
                           "exp_minus_qr", "canonical_gap", "method"};
            break;
        case Command::Neff:
            throw ConfigError("neff takes flags, not a config");
    }

    struct Job {
        double sweep_value;
        double t;
    };
    std::vector<Job> jobs;
    for (double sv : sweep_values)
        for (double t : sc.t_grid) jobs.push_back({sv, t});
    out.rows.resize(jobs.size());

    std::vector<double> oracle_dev(jobs.size(), 0.0);

    auto run_job = [&](std::size_t j) {
        ScenarioConfig local = sc;  // cheap: shared tables are by pointer
        const double t = jobs[j].t;
        ResultRow& row = out.rows[j];
        row.t = t;
        try {
            if (sweeping) {
                row.swept = jobs[j].sweep_value;
                const double v = jobs[j].sweep_value;
                if (sc.sweep_variable == "beta") {
                    local.canonical = true;
                    local.beta = v;
                } else if (sc.sweep_variable == "E") {
                    local.canonical = false;
                    local.energy = v;
                    if (local.bath_kind == "ladder")
                        local.shell_M = static_cast<long long>(std::llround(v / local.ladder_omega0));
                } else if (sc.sweep_variable == "M") {
                    local.canonical = false;
                    local.shell_M = static_cast<long long>(std::llround(v));
                    local.energy = static_cast<double>(local.shell_M) * local.ladder_omega0;
                } else {
                    throw ConfigError("sweep variable must be beta, E or M");
                }
            }

            const Command effective =
                sweeping ? (local.canonical ? Command::Thermal : Command::Compare) : cmd;

            if (effective == Command::Thermal) {
                const auto th = detail::thermal_point(local, local.beta, t);
                row.q_r = th.q_r;
                row.q_i = th.q_i;
                row.c_thermal_abs = th.c_abs;
                row.method = "canonical";
                return;
            }

            // microcanonical paths share the matched thermo point
            const auto tp = detail::micro_thermo(local);
            const std::string method = detail::resolve_micro_method(local);

            if (effective == Command::Micro || effective == Command::Compare) {
                const auto mc = detail::micro_point(local, tp, t, method);
                row.c_micro_abs = std::abs(mc.c);
                row.preexp_correction = mc.preexp_correction;
                row.exponent_correction = mc.exponent_correction;
                row.n_eff = mc.n_eff;
                row.method = method;
                if (effective == Command::Compare) {
                    const auto th = detail::thermal_point(local, tp.beta, t);
                    row.q_r = th.q_r;
                    row.q_i = th.q_i;
                    row.c_thermal_abs = th.c_abs;
                    // gap between the full complex coherences when the micro
                    // route carries a phase, else between the moduli
                    const Complex cth = std::exp(Complex(-th.q_r,
                                                         std::isnan(th.q_i) ? 0.0 : -th.q_i));
                    row.abs_gap = std::abs(mc.c - cth);
                }
                return;
            }

            if (effective == Command::Oracle) {
                if (local.bath_kind != "ladder")
                    throw ConfigError("oracle command needs a ladder bath");
                CurrentProfile prof = local.profile;
                prof.t = t;
                const auto c_fock = fock::coherence_exact_microcanonical(
                    *local.modes, prof, local.shell_M, local.numerics.shell, local.numerics.quad);
                const auto mc = detail::micro_point(local, tp, t, "contour");
                const auto th = detail::thermal_point(local, tp.beta, t);
                const auto c_can = fock::coherence_exact_canonical(
                    *local.modes, prof, tp.beta, local.numerics.fock_n_max, local.numerics.quad);
                row.c_micro_abs = std::abs(mc.c);
                row.c_fock_abs = std::abs(c_fock);
                row.abs_gap = std::abs(mc.c - c_fock);
                row.c_thermal_abs = std::abs(c_can);
                row.exp_minus_qr = std::exp(-th.q_r);
                row.canonical_gap = std::abs(std::abs(c_can) - row.exp_minus_qr);
                row.method = "oracle";
                const double micro_dev = row.abs_gap / std::max(row.c_fock_abs, 1e-300);
                const double can_dev = row.canonical_gap / std::max(row.exp_minus_qr, 1e-300);
                oracle_dev[j] = std::max(micro_dev, can_dev);
                return;
            }
        } catch (const ConfigError&) {
            throw;  // configuration problems abort the run
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    parallel_for(jobs.size(), run_job);

    for (double d : oracle_dev) out.worst_oracle_dev = std::max(out.worst_oracle_dev, d);
    if (cmd == Command::Oracle) out.oracle_ok = out.worst_oracle_dev <= sc.numerics.oracle_rtol;
    return out;
}

// ---------------------------------------------------------------------------
// Writer
// ---------------------------------------------------------------------------

inline std::string render_table(const ScenarioConfig& sc, Command cmd, const RunResult& res) {
    std::ostringstream os;
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(sc.config_hash));
    os << "# " << kResultsSchema << "\n";
    os << "# tool decomc " << kVersion << "\n";
    os << "# command " << command_name(cmd) << "\n";
    os << "# config fnv1a64=" << hash << "\n";
    os << "# numerics quad_rtol=" << detail::fmt_num(sc.numerics.quad.rtol)
       << " contour_points=" << sc.numerics.contour_points
       << " contour_half_width=" << detail::fmt_num(sc.numerics.contour_half_width)
       << " contour_rtol=" << detail::fmt_num(sc.numerics.contour_rtol)
       << " fock_n_max=" << sc.numerics.fock_n_max << "\n";
    for (std::size_t i = 0; i < res.columns.size(); ++i)
        os << (i ? "," : "# columns ") << res.columns[i];
    os << "\n";

    auto cell = [&](const std::string& name, const ResultRow& r) -> std::string {
        if (name == "t") return detail::fmt_num(r.t);
        if (name == "q_r") return detail::fmt_num(r.q_r);
        if (name == "q_i") return detail::fmt_num(r.q_i);
        if (name == "c_thermal_abs") return detail::fmt_num(r.c_thermal_abs);
        if (name == "c_micro_abs") return detail::fmt_num(r.c_micro_abs);
        if (name == "abs_gap") return detail::fmt_num(r.abs_gap);
        if (name == "preexp_correction") return detail::fmt_num(r.preexp_correction);
        if (name == "exponent_correction") return detail::fmt_num(r.exponent_correction);
        if (name == "n_eff") return detail::fmt_num(r.n_eff);
        if (name == "method") return r.method;
        if (name == "c_fock_abs") return detail::fmt_num(r.c_fock_abs);
        if (name == "exp_minus_qr") return detail::fmt_num(r.exp_minus_qr);
        if (name == "canonical_gap") return detail::fmt_num(r.canonical_gap);
        return detail::fmt_num(r.swept);  // the sweep variable column
    };

    for (const auto& r : res.rows) {
        if (!r.error.empty()) {
            for (std::size_t i = 0; i < res.columns.size(); ++i) {
                if (i) os << ",";
                os << (res.columns[i] == "t" ? detail::fmt_num(r.t)
                                             : (res.columns[i] == "method" ? "failed" : "nan"));
            }
            os << "\n# error t=" << detail::fmt_num(r.t) << " " << r.error << "\n";
            continue;
        }
        for (std::size_t i = 0; i < res.columns.size(); ++i) {
            if (i) os << ",";
            os << cell(res.columns[i], r);
        }
        os << "\n";
    }
    return os.str();
}

inline void write_table(const ScenarioConfig& sc, Command cmd, const RunResult& res) {
    std::ofstream out(sc.output_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + sc.output_path);
    out << render_table(sc, cmd, res);
}

} // namespace decomc
