#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "phibvp/cli.hpp"
#include "phibvp/error.hpp"
#include "phibvp/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace phibvp {

void GlobalOptions::apply(ProblemConfig& c) const {
    if (mesh_n) c.mesh.n = *mesh_n;
    if (tol_fp) c.solver.tol_fp = *tol_fp;
    if (tol_beta) c.solver.tol_beta = *tol_beta;
    if (damping) c.solver.damping = *damping;
    if (max_iters) c.solver.max_iters = *max_iters;
    if (seed) c.check.lattice.seed = *seed;
    if (threads) kernels::omp::set_threads(*threads);
}

int exit_code_for(Verdict v) noexcept {
    switch (v) {
    case Verdict::pass:
    case Verdict::sampled_pass: return exit_code::ok;
    case Verdict::fail: return exit_code::hypothesis_fail;
    case Verdict::inconclusive: return exit_code::inconclusive;
    }
    return exit_code::inconclusive;
}

namespace {

bool odd_eligible(const MonotoneBranch& b) {
    return b.phi().odd() && b.interval().symmetric();
}

HypothesisReport finite_check(const BvpProblem& p, const ProblemConfig& c) {
    const TheoremTag tag = c.check.theorem == "auto" ? applicable_theorem(p.branch)
                                                     : theorem_from_string(c.check.theorem);
    return check(p, tag, c.check.lattice);
}

HypothesisReport halfline_check(const HalflineProblem& hp, const HalflineCheckOptions& o,
                                const ProblemConfig& c) {
    if (c.check.theorem != "auto") {
        const auto tag = theorem_from_string(c.check.theorem);
        if (tag == TheoremTag::thm_halfline) return check_halfline(hp, o);
        if (tag == TheoremTag::thm_halfline_odd) return check_halfline_odd(hp, o);
        throw InvalidInput("theorem '" + c.check.theorem + "' does not apply on the half-line");
    }
    auto r = check_halfline(hp, o);
    if (!r.admits() && odd_eligible(hp.branch)) {
        auto odd = check_halfline_odd(hp, o);
        if (odd.admits()) return odd;
    }
    return r;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
    out << text;
}

std::filesystem::path prepare_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw InvalidInput("cannot create output directory '" + dir + "'");
    return p;
}

/// Maps library errors onto the exit-code contract.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const CompatibilityError& e) {
        err << "hypothesis violated: " << e.what() << "\n";
        return exit_code::hypothesis_fail;
    } catch (const BranchNotFound& e) {
        err << "hypothesis violated: " << e.what() << "\n";
        return exit_code::hypothesis_fail;
    } catch (const DomainError& e) {
        err << "hypothesis violated: " << e.what() << "\n";
        return exit_code::hypothesis_fail;
    } catch (const WrongCorollary& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::usage;
    }
}

ProblemConfig load(const std::string& path, const GlobalOptions& opts) {
    auto c = load_config(path);
    opts.apply(c);
    return c;
}

int solve_exit(SolveStatus s) {
    switch (s) {
    case SolveStatus::converged: return exit_code::ok;
    case SolveStatus::hypothesis_violation: return exit_code::hypothesis_fail;
    case SolveStatus::max_iters: return exit_code::not_converged;
    }
    return exit_code::not_converged;
}

} // namespace

HypothesisReport run_check(const BuiltProblem& built, const ProblemConfig& config) {
    HypothesisReport r = built.bvp
                             ? finite_check(*built.bvp, config)
                             : halfline_check(*built.halfline, built.halfline_options, config);
    if (built.example) {
        const double lambda = built.bvp ? built.bvp->nu2 - built.bvp->nu1
                                        : built.halfline->nu2 - built.halfline->nu1;
        const auto& ex = *built.example;
        HypothesisCheck hc;
        hc.name = "example";
        hc.verdict = ex.admits(lambda) ? Verdict::pass : Verdict::fail;
        hc.detail = ex.tag + ": |lambda| = " + num(std::abs(lambda)) + (ex.strict ? " < " : " <= ") +
                    num(ex.bound) + " required";
        hc.values = ex.params;
        hc.values["bound"] = ex.bound;
        hc.values["lambda"] = lambda;
        r.checks.push_back(std::move(hc));
    }
    return r;
}

void write_solution(const std::string& path, const SolveReport& r) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << "t,x,dx,u\n";
    const auto nodes = r.x.mesh().nodes();
    char buf[128];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", nodes[i], r.x[i], r.dx[i],
                      r.u[i]);
        out << buf;
    }
}

SolutionTable read_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot read '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "t,x,dx,u") {
        throw ParseError("expected header t,x,dx,u", 1, 1);
    }
    SolutionTable tab;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        double v[4];
        const char* s = line.c_str();
        for (int k = 0; k < 4; ++k) {
            char* end = nullptr;
            v[k] = std::strtod(s, &end);
            if (end == s) throw ParseError("expected a number", lineno, static_cast<int>(s - line.c_str()) + 1);
            s = end;
            if (k < 3) {
                if (*s != ',') throw ParseError("expected ','", lineno, static_cast<int>(s - line.c_str()) + 1);
                ++s;
            }
        }
        tab.t.push_back(v[0]);
        tab.x.push_back(v[1]);
        tab.dx.push_back(v[2]);
        tab.u.push_back(v[3]);
    }
    return tab;
}

int cmd_check(const std::string& config_path, const GlobalOptions& opts, std::ostream& out,
              std::ostream& err) {
    return guarded(err, [&] {
        RunRecord rec;
        rec.command = "check";
        rec.timestamp = timestamp();
        rec.config = load(config_path, opts);
        const auto built = build_problem(rec.config);
        rec.hypothesis = run_check(built, rec.config);
        rec.exit_status = exit_code_for(rec.hypothesis->overall());
        out << emit_record(rec);
        return rec.exit_status;
    });
}

int cmd_solve(const std::string& config_path, const std::string& out_dir,
              const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        RunRecord rec;
        rec.command = "solve";
        rec.timestamp = timestamp();
        rec.config = load(config_path, opts);
        if (!rec.config.T) throw InvalidInput("solve needs a finite T; use halfline");
        const auto built = build_problem(rec.config);
        rec.hypothesis = run_check(built, rec.config);
        const auto dir = prepare_dir(out_dir);
        const Verdict v = rec.hypothesis->overall();
        if (v == Verdict::fail) {
            rec.exit_status = exit_code::hypothesis_fail;
        } else {
            if (v == Verdict::inconclusive) {
                rec.warnings.push_back("hypothesis check inconclusive; solved anyway");
            }
            const auto report = solve(*built.bvp, rec.config.solver);
            write_solution((dir / "solution.csv").string(), report);
            rec.solve = SolveSummary::of(report);
            rec.exit_status = solve_exit(report.status);
        }
        write_text(dir / "run_record.yaml", emit_record(rec));
        out << "check " << to_string(v);
        if (rec.solve) {
            out << ", solve " << rec.solve->status << " in " << rec.solve->iterations
                << " iterations, residual " << rec.solve->residual;
        }
        out << "\n";
        return rec.exit_status;
    });
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        RunRecord rec;
        rec.command = "sweep";
        rec.timestamp = timestamp();
        rec.config = load(config_path, opts);
        if (!rec.config.T) throw InvalidInput("sweep needs a finite T");
        if (!rec.config.sweep) throw InvalidInput("config has no sweep section");
        const auto lambdas = rec.config.sweep->values();
        std::vector<SweepRow> rows(lambdas.size());
        const ProblemConfig& cfg = rec.config;
        const long n = static_cast<long>(lambdas.size());
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < n; ++i) {
            SweepRow& row = rows[static_cast<std::size_t>(i)];
            row.lambda = lambdas[static_cast<std::size_t>(i)];
            try {
                const auto built = build_problem(cfg, row.lambda);
                const auto h = run_check(built, cfg);
                row.verdict = to_string(h.overall());
                if (h.overall() == Verdict::fail) {
                    row.status = "skipped";
                } else {
                    const auto r = solve(*built.bvp, cfg.solver);
                    row.status = to_string(r.status);
                    row.iterations = r.iterations;
                    row.residual = r.residual;
                    row.message = r.message;
                }
            } catch (const Error& e) {
                row.verdict = to_string(Verdict::fail);
                row.status = "skipped";
                row.message = e.what();
            }
        }
        rec.sweep = rows;
        const auto dir = prepare_dir(out_dir);
        std::ostringstream csv;
        csv << "index,lambda,verdict,status,iterations,residual\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            csv << i << ',' << num(r.lambda) << ',' << r.verdict << ',' << r.status << ','
                << r.iterations << ',' << (r.status == "skipped" ? "" : num(r.residual)) << '\n';
        }
        write_text(dir / "sweep.csv", csv.str());
        rec.exit_status = exit_code::ok;
        write_text(dir / "run_record.yaml", emit_record(rec));
        out << rows.size() << " sweep rows written\n";
        return rec.exit_status;
    });
}

int cmd_halfline(const std::string& config_path, const std::string& out_dir,
                 const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        RunRecord rec;
        rec.command = "halfline";
        rec.timestamp = timestamp();
        rec.config = load(config_path, opts);
        if (!rec.config.halfline) throw InvalidInput("config has no halfline section");
        const auto built = build_problem(rec.config);
        rec.hypothesis = run_check(built, rec.config);
        const auto dir = prepare_dir(out_dir);
        const Verdict v = rec.hypothesis->overall();
        if (v == Verdict::fail) {
            rec.exit_status = exit_code::hypothesis_fail;
        } else {
            if (v == Verdict::inconclusive) {
                rec.warnings.push_back("hypothesis check inconclusive; solved anyway");
            }
            const auto rep = solve_halfline(*built.halfline, rec.config.solver);
            for (std::size_t j = 0; j < rep.intervals.size(); ++j) {
                write_solution((dir / ("interval_" + num(rep.schedule[j]) + ".csv")).string(),
                               rep.intervals[j]);
            }
            std::ostringstream gaps;
            gaps << "j,n_prev,n,gap\n";
            for (std::size_t j = 0; j < rep.gaps.size(); ++j) {
                gaps << j + 1 << ',' << num(rep.schedule[j]) << ',' << num(rep.schedule[j + 1])
                     << ',' << num(rep.gaps[j]) << '\n';
            }
            write_text(dir / "gaps.csv", gaps.str());
            rec.halfline = HalflineSummary::of(rep);
            rec.exit_status = rep.status == HalflineStatus::converged ? exit_code::ok
                                                                      : exit_code::not_converged;
        }
        write_text(dir / "run_record.yaml", emit_record(rec));
        out << "check " << to_string(v);
        if (rec.halfline) {
            out << ", halfline " << rec.halfline->status << " after "
                << rec.halfline->schedule.size() << " intervals";
            if (!rec.halfline->gaps.empty()) out << ", last gap " << rec.halfline->gaps.back();
        }
        out << "\n";
        return rec.exit_status;
    });
}

int cmd_verify(const std::string& table_path, const std::string& config_path,
               const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load(config_path, opts);
        if (!cfg.T) throw InvalidInput("verify needs a finite T");
        const auto built = build_problem(cfg);
        const BvpProblem& p = *built.bvp;
        const auto tab = read_solution(table_path);
        const Mesh& m = *p.mesh;
        if (tab.t.size() != m.size()) {
            throw InvalidInput("table has " + std::to_string(tab.t.size()) + " rows, mesh has " +
                               std::to_string(m.size()) + " nodes");
        }
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (std::abs(tab.t[i] - m[i]) > 1e-12 * (1 + p.T)) {
                throw InvalidInput("table nodes do not match the configured mesh");
            }
        }
        // residual of the divergence form and consistency of u with Phi(k x')
        GridFunction u(p.mesh, tab.u);
        std::vector<double> fv(m.size());
        double u_mismatch = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            fv[i] = p.rhs.f(m[i], tab.x[i], tab.dx[i]);
            if (!m.is_singular_node(i)) {
                const double ui = p.branch(p.weight.k(m[i]) * tab.dx[i]);
                u_mismatch = std::max(u_mismatch, std::abs(ui - tab.u[i]));
            }
        }
        const double residual = forward_difference_residual(u, GridFunction(p.mesh, fv));
        const double bdef = std::max(std::abs(tab.x.front() - p.nu1), std::abs(tab.x.back() - p.nu2));
        const bool ok = residual <= 1e-5 && bdef <= 1e-8 && u_mismatch <= 1e-8;
        out << "residual: " << num(residual) << "\n"
            << "boundary_defect: " << num(bdef) << "\n"
            << "u_mismatch: " << num(u_mismatch) << "\n"
            << "verified: " << (ok ? "true" : "false") << "\n";
        return ok ? exit_code::ok : exit_code::not_converged;
    });
}

} // namespace phibvp
