#include <CLI11.hpp>

#include <iostream>

#include "phibvp/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet problems for (Phi(k x'))' = f(t, x, x') by truncated fixed-point iteration"};
    app.require_subcommand(1);
    app.set_version_flag("--version", phibvp::kVersion);

    phibvp::GlobalOptions g;
    std::size_t mesh_n = 0;
    double tol_fp = 0, tol_beta = 0, damping = 0;
    int max_iters = 0, threads = 0;
    std::uint64_t seed = 0;
    auto* o_mesh = app.add_option("--mesh-n", mesh_n, "cells of the base mesh");
    auto* o_tfp = app.add_option("--tol-fp", tol_fp, "fixed-point tolerance");
    auto* o_tb = app.add_option("--tol-beta", tol_beta, "tolerance of the beta equation");
    auto* o_damp = app.add_option("--damping", damping, "damping factor in (0, 1]");
    auto* o_it = app.add_option("--max-iters", max_iters, "iteration cap");
    auto* o_thr = app.add_option("--threads", threads, "OpenMP threads");
    auto* o_seed = app.add_option("--seed", seed, "lattice jitter seed (0: plain lattice)");

    std::string config, out_dir, table;
    auto* check = app.add_subcommand("check", "run the hypothesis checks");
    check->add_option("config", config, "config file")->required();
    auto* solve = app.add_subcommand("solve", "check, then solve on [0, T]");
    solve->add_option("config", config)->required();
    solve->add_option("-o,--out", out_dir, "output directory")->required();
    auto* sweep = app.add_subcommand("sweep", "check and solve over a range of nu2");
    sweep->add_option("config", config)->required();
    sweep->add_option("-o,--out", out_dir)->required();
    auto* half = app.add_subcommand("halfline", "heteroclinic problem on [0, +inf)");
    half->add_option("config", config)->required();
    half->add_option("-o,--out", out_dir)->required();
    auto* verify = app.add_subcommand("verify", "re-check a solution table against its config");
    verify->add_option("table", table)->required();
    verify->add_option("config", config)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : phibvp::exit_code::usage;
    }
    if (*o_mesh) g.mesh_n = mesh_n;
    if (*o_tfp) g.tol_fp = tol_fp;
    if (*o_tb) g.tol_beta = tol_beta;
    if (*o_damp) g.damping = damping;
    if (*o_it) g.max_iters = max_iters;
    if (*o_thr) g.threads = threads;
    if (*o_seed) g.seed = seed;

    auto& out = std::cout;
    auto& err = std::cerr;
    if (*check) return phibvp::cmd_check(config, g, out, err);
    if (*solve) return phibvp::cmd_solve(config, out_dir, g, out, err);
    if (*sweep) return phibvp::cmd_sweep(config, out_dir, g, out, err);
    if (*half) return phibvp::cmd_halfline(config, out_dir, g, out, err);
    return phibvp::cmd_verify(table, config, g, out, err);
}
