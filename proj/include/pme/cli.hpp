#pragma once

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pme/forward.hpp"
#include "pme/inversion.hpp"
#include "pme/io.hpp"
#include "pme/profile.hpp"

namespace pme {

inline constexpr const char* kToolVersion = "0.1.0";

namespace detail {

inline std::vector<double> parse_double_list(const std::string& csv, const std::string& flag) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        auto comma = csv.find(',', pos);
        if (comma == std::string::npos) comma = csv.size();
        const std::string tok = csv.substr(pos, comma - pos);
        if (!tok.empty()) out.push_back(std::stod(tok));
        pos = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument(flag + ": empty list");
    return out;
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// Runs one CLI invocation (args exclude the program name). Exit codes:
// 0 success, 1 numeric failure, 2 usage error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Porous medium equation forward solver and polytropic exponent recovery"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    // forward
    auto* fwd = app.add_subcommand("forward", "Solve the direct problem and write u_T");
    double f_gamma = 0, f_T = 0, f_dt = 0;
    int f_n = 0;
    std::string f_u0, f_out;
    fwd->add_option("--gamma", f_gamma, "Polytropic exponent (> 1)")->required();
    fwd->add_option("--T", f_T, "Final time")->required();
    fwd->add_option("--N", f_n, "Mesh subdivisions per edge")->required();
    fwd->add_option("--dt", f_dt, "Time step (default h = 1/N)");
    fwd->add_option("--u0", f_u0, "Initial data, e.g. poly_bump(10), scaled_profile(1), file:path")
        ->required();
    fwd->add_option("--out", f_out, "Output field file")->required();

    // invert
    auto* inv = app.add_subcommand("invert", "Recover gamma from a u_T field file");
    std::string i_in, i_out, i_curve_out, i_norm = "l1";
    double i_T = 0, i_gamma_max = 20.0, i_alpha_min = 1.001, i_grid_step = 0.05,
           i_refine_tol = 1e-4;
    inv->add_option("--in", i_in, "u_T field file")->required()->check(CLI::ExistingFile);
    inv->add_option("--T", i_T, "Measurement time")->required();
    inv->add_option("--gamma-max", i_gamma_max, "Upper end of the search interval");
    inv->add_option("--norm", i_norm, "Objective norm: l1 | l2 | linf");
    inv->add_option("--alpha-min", i_alpha_min, "Lower end of the search interval");
    inv->add_option("--grid-step", i_grid_step, "Coarse scan spacing");
    inv->add_option("--refine-tol", i_refine_tol, "Refinement bracket width");
    inv->add_option("--out", i_out, "Report output path")->required();
    inv->add_option("--curve-out", i_curve_out, "Optional coarse-scan curve CSV");

    // curve
    auto* crv = app.add_subcommand("curve", "Sample the objective norm over an alpha range");
    std::string c_in, c_out, c_norm = "linf";
    double c_T = 0, c_alpha_min = 1.001, c_alpha_max = 10.0;
    int c_samples = 200;
    crv->add_option("--in", c_in, "u_T field file")->required()->check(CLI::ExistingFile);
    crv->add_option("--T", c_T, "Measurement time")->required();
    crv->add_option("--alpha-min", c_alpha_min, "Range start");
    crv->add_option("--alpha-max", c_alpha_max, "Range end");
    crv->add_option("--samples", c_samples, "Sample count");
    crv->add_option("--norm", c_norm, "Objective norm: l1 | l2 | linf");
    crv->add_option("--out", c_out, "Curve CSV output path")->required();

    // table
    auto* tab = app.add_subcommand("table", "Run the forward+invert pipeline over a (gamma, T) grid");
    std::string t_gammas, t_times, t_u0, t_out, t_norm = "l1";
    int t_n = 0;
    double t_dt = 0, t_gamma_max = 20.0, t_alpha_min = 1.001, t_grid_step = 0.05,
           t_refine_tol = 1e-4;
    tab->add_option("--gammas", t_gammas, "Comma-separated exponents")->required();
    tab->add_option("--times", t_times, "Comma-separated measurement times")->required();
    tab->add_option("--N", t_n, "Mesh subdivisions per edge")->required();
    tab->add_option("--u0", t_u0, "Initial data spec")->required();
    tab->add_option("--dt", t_dt, "Time step (default h = 1/N)");
    tab->add_option("--norm", t_norm, "Objective norm: l1 | l2 | linf");
    tab->add_option("--gamma-max", t_gamma_max, "Upper end of the search interval");
    tab->add_option("--alpha-min", t_alpha_min, "Lower end of the search interval");
    tab->add_option("--grid-step", t_grid_step, "Coarse scan spacing");
    tab->add_option("--refine-tol", t_refine_tol, "Refinement bracket width");
    tab->add_option("--out", t_out, "Optional output CSV path");

    // profile
    auto* prf = app.add_subcommand("profile", "Solve the stationary profile eigenproblem");
    double p_gamma = 0, p_tol = 1e-10;
    int p_n = 0, p_max_iter = 10000;
    std::string p_out;
    prf->add_option("--gamma", p_gamma, "Polytropic exponent (> 1)")->required();
    prf->add_option("--N", p_n, "Mesh subdivisions per edge")->required();
    prf->add_option("--tol", p_tol, "Relative fixed-point tolerance");
    prf->add_option("--max-iter", p_max_iter, "Iteration cap");
    prf->add_option("--out", p_out, "Output field file")->required();

    std::vector<const char*> argv;
    argv.push_back("pmeinv");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    detail::Timer timer;
    try {
        if (app.got_subcommand(fwd)) {
            if (fwd->count("--dt") == 0) f_dt = 1.0 / f_n;
            ForwardConfig cfg{f_gamma, f_n, f_dt, f_T, f_u0, {}};
            cfg.validate();
            ForwardResult res = solve_forward(cfg);
            write_field(f_out, res.mesh, res.u_T, "u_T", f_gamma, f_T);
            double mx = 0;
            for (double v : res.u_T) mx = std::max(mx, v);
            Manifest m;
            m.set("manifest", std::string("pme-1"));
            m.set("tool_version", std::string(kToolVersion));
            m.set("subcommand", std::string("forward"));
            m.set("gamma", f_gamma);
            m.set("T", f_T);
            m.set("N", f_n);
            m.set("dt", f_dt);
            m.set("u0", f_u0);
            m.set("out", f_out);
            m.set("duration_seconds", timer.seconds());
            m.write(f_out + ".manifest");
            out << "steps: " << res.step_count << "\n";
            out << "max_uT: " << format_double(mx) << "\n";
            return 0;
        }

        if (app.got_subcommand(inv)) {
            FieldData data = read_field(i_in);
            InversionConfig cfg;
            cfg.alpha_min = i_alpha_min;
            cfg.gamma_c = i_gamma_max;
            cfg.grid_step = i_grid_step;
            cfg.refine_tol = i_refine_tol;
            cfg.norm = parse_norm(i_norm);
            bool degenerate = true;
            for (double v : data.values) {
                if (v != 0.0) degenerate = false;
            }
            if (degenerate) err << "warning: degenerate measurement (u_T is identically zero)\n";
            InversionReport rep;
            try {
                rep = recover_gamma(data.field(), i_T, cfg);
            } catch (const gamma_range_error& e) {
                err << "error: " << e.what() << "; increase --gamma-max\n";
                return 1;
            }
            Manifest report;
            report.set("gamma_m", rep.gamma_m);
            report.set("objective_at_min", rep.objective_at_min);
            report.set("norm", norm_name(rep.norm_used));
            report.set("T", rep.T);
            report.set("alpha_min", cfg.alpha_min);
            report.set("gamma_max", cfg.gamma_c);
            report.set("grid_step", cfg.grid_step);
            report.set("refine_tol", cfg.refine_tol);
            report.set("n", data.mesh.n);
            report.set("input", i_in);
            if (degenerate) report.set("degenerate_measurement", std::string("true"));
            report.write(i_out);
            if (!i_curve_out.empty()) write_curve(i_curve_out, rep.curve);
            Manifest m;
            m.set("manifest", std::string("pme-1"));
            m.set("tool_version", std::string(kToolVersion));
            m.set("subcommand", std::string("invert"));
            m.set("in", i_in);
            m.set("T", i_T);
            m.set("gamma-max", i_gamma_max);
            m.set("norm", i_norm);
            m.set("alpha-min", i_alpha_min);
            m.set("grid-step", i_grid_step);
            m.set("refine-tol", i_refine_tol);
            m.set("out", i_out);
            if (!i_curve_out.empty()) m.set("curve-out", i_curve_out);
            m.set("duration_seconds", timer.seconds());
            m.write(i_out + ".manifest");
            out << "gamma_m: " << format_double(rep.gamma_m) << "\n";
            return 0;
        }

        if (app.got_subcommand(crv)) {
            if (c_samples < 1) throw std::invalid_argument("--samples must be >= 1");
            if (!(c_alpha_min > 1.0) || c_alpha_max < c_alpha_min) {
                throw std::invalid_argument("need 1 < --alpha-min <= --alpha-max");
            }
            FieldData data = read_field(c_in);
            PoissonSolver poisson(data.mesh);
            ScalarField w{&data.mesh, poisson.solve(data.values)};
            std::vector<double> alphas;
            for (int i = 0; i < c_samples; ++i) {
                alphas.push_back(c_samples == 1
                                     ? c_alpha_min
                                     : c_alpha_min + (c_alpha_max - c_alpha_min) * i /
                                           (c_samples - 1));
            }
            auto curve = sample_curve(data.field(), w, c_T, alphas, poisson.mass(),
                                      parse_norm(c_norm));
            write_curve(c_out, curve);
            Manifest m;
            m.set("manifest", std::string("pme-1"));
            m.set("tool_version", std::string(kToolVersion));
            m.set("subcommand", std::string("curve"));
            m.set("in", c_in);
            m.set("T", c_T);
            m.set("alpha-min", c_alpha_min);
            m.set("alpha-max", c_alpha_max);
            m.set("samples", c_samples);
            m.set("norm", c_norm);
            m.set("out", c_out);
            m.set("duration_seconds", timer.seconds());
            m.write(c_out + ".manifest");
            out << "samples: " << curve.size() << "\n";
            return 0;
        }

        if (app.got_subcommand(tab)) {
            const std::vector<double> gammas = detail::parse_double_list(t_gammas, "--gammas");
            const std::vector<double> times = detail::parse_double_list(t_times, "--times");
            if (tab->count("--dt") == 0) t_dt = 1.0 / t_n;
            InversionConfig icfg;
            icfg.alpha_min = t_alpha_min;
            icfg.gamma_c = t_gamma_max;
            icfg.grid_step = t_grid_step;
            icfg.refine_tol = t_refine_tol;
            icfg.norm = parse_norm(t_norm);

            double t_max = 0;
            for (double t : times) t_max = std::max(t_max, t);
            std::vector<std::vector<std::string>> cells(gammas.size());
            std::vector<std::vector<std::string>> errors(gammas.size());
            bool any_failed = false;
            for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
                // One forward sweep per gamma; intermediate measurement times
                // are snapshots of the same step sequence, so each cell is
                // bit-identical to a standalone forward+invert run.
                ForwardResult fr;
                bool have_forward = true;
                try {
                    ForwardConfig cfg{gammas[gi], t_n, t_dt, t_max, t_u0, times};
                    cfg.validate();
                    fr = solve_forward(cfg);
                } catch (const std::exception&) {
                    have_forward = false;
                }
                for (double T : times) {
                    std::string cell = "ERR", errcell = "ERR";
                    if (have_forward) {
                        try {
                            const std::vector<double>* vals = nullptr;
                            for (const auto& [t, v] : fr.snapshots) {
                                if (std::abs(t - T) <= 1e-9 * std::max(1.0, T)) vals = &v;
                            }
                            if (vals == nullptr) throw std::runtime_error("missing snapshot");
                            ScalarField ut{&fr.mesh, *vals};
                            InversionReport rep = recover_gamma(ut, T, icfg);
                            cell = format_double(rep.gamma_m);
                            errcell = format_double(std::abs(rep.gamma_m - gammas[gi]));
                        } catch (const std::exception&) {
                        }
                    }
                    if (cell == "ERR") any_failed = true;
                    cells[gi].push_back(cell);
                    errors[gi].push_back(errcell);
                }
            }

            std::ostringstream table;
            auto emit = [&](const char* title, const std::vector<std::vector<std::string>>& rows) {
                table << title << "\n";
                table << "gamma";
                for (double T : times) table << ",T=" << format_double(T);
                table << "\n";
                for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
                    table << format_double(gammas[gi]);
                    for (const auto& c : rows[gi]) table << "," << c;
                    table << "\n";
                }
            };
            emit("gamma_m", cells);
            emit("abs_error", errors);
            out << table.str();
            if (!t_out.empty()) {
                std::ofstream f(t_out);
                if (!f) throw io_error("table: cannot open " + t_out);
                f << table.str();
                Manifest m;
                m.set("manifest", std::string("pme-1"));
                m.set("tool_version", std::string(kToolVersion));
                m.set("subcommand", std::string("table"));
                m.set("gammas", t_gammas);
                m.set("times", t_times);
                m.set("N", t_n);
                m.set("dt", t_dt);
                m.set("u0", t_u0);
                m.set("norm", t_norm);
                m.set("gamma-max", t_gamma_max);
                m.set("alpha-min", t_alpha_min);
                m.set("grid-step", t_grid_step);
                m.set("refine-tol", t_refine_tol);
                m.set("out", t_out);
                m.set("duration_seconds", timer.seconds());
                m.write(t_out + ".manifest");
            }
            return any_failed ? 1 : 0;
        }

        if (app.got_subcommand(prf)) {
            if (p_gamma <= 1.0) throw std::invalid_argument("--gamma must exceed 1");
            Mesh mesh = build_unit_square_mesh(p_n);
            ProfileResult prof;
            try {
                prof = solve_profile(mesh, p_gamma, p_tol, p_max_iter);
            } catch (const profile_error& e) {
                err << "error: " << e.what() << "\n";
                return 1;
            }
            write_field(p_out, mesh, prof.f, "profile_f", p_gamma);
            Manifest m;
            m.set("manifest", std::string("pme-1"));
            m.set("tool_version", std::string(kToolVersion));
            m.set("subcommand", std::string("profile"));
            m.set("gamma", p_gamma);
            m.set("N", p_n);
            m.set("tol", p_tol);
            m.set("max-iter", p_max_iter);
            m.set("out", p_out);
            m.set("iterations", prof.iterations);
            m.set("residual", prof.residual);
            m.set("duration_seconds", timer.seconds());
            m.write(p_out + ".manifest");
            out << "iterations: " << prof.iterations << "\n";
            out << "residual: " << format_double(prof.residual) << "\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace pme
