#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phibvp/config.hpp"

namespace phibvp {

inline constexpr const char* kVersion = "0.1.0";

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int hypothesis_fail = 2;
inline constexpr int inconclusive = 3;
inline constexpr int not_converged = 4;
} // namespace exit_code

struct SolveSummary {
    std::string status;
    std::string message;
    int iterations = 0;
    std::size_t nodes = 0;
    double beta = 0.0;
    double residual = 0.0;
    double fixed_point_gap = 0.0;
    double final_damping = 0.0;
    bool x_in_envelope = false;
    bool dx_in_envelope = false;
    std::size_t truncation_active = 0;
    std::size_t psi_clipped = 0;
    DerivedScalars scalars;
    Verification verification;
    std::vector<double> trace;

    static SolveSummary of(const SolveReport& r);
    bool operator==(const SolveSummary&) const = default;
};

struct HalflineSummary {
    std::string status;
    std::string message;
    std::vector<double> schedule;
    std::vector<double> gaps;
    std::vector<double> k_n;
    std::vector<double> s_n;
    std::vector<double> boundary_defects;
    bool slopes_monotone = true;
    bool uniform_envelope = true;
    std::optional<double> C, K_lo, K_hi;
    double tail_value = 0.0;
    double tail_defect = 0.0;
    std::vector<SolveSummary> intervals;

    static HalflineSummary of(const HeteroclinicReport& r);
    bool operator==(const HalflineSummary&) const = default;
};

struct SweepRow {
    double lambda = 0.0;
    std::string verdict;
    std::string status;  // solver status, "skipped" when the check failed
    int iterations = 0;
    double residual = 0.0;
    std::string message;

    bool operator==(const SweepRow&) const = default;
};

struct RunRecord {
    std::string command;
    std::string timestamp;
    std::string version = kVersion;
    ProblemConfig config;
    std::optional<HypothesisReport> hypothesis;
    std::optional<SolveSummary> solve;
    std::optional<HalflineSummary> halfline;
    std::vector<SweepRow> sweep;
    std::vector<std::string> warnings;
    int exit_status = 0;

    bool operator==(const RunRecord&) const = default;
};

std::string emit_record(const RunRecord& record);
/// Throws ParseError on malformed input.
RunRecord parse_record(std::string_view text);

/// Overrides applied on top of the config file.
struct GlobalOptions {
    std::optional<std::size_t> mesh_n;
    std::optional<double> tol_fp;
    std::optional<double> tol_beta;
    std::optional<double> damping;
    std::optional<int> max_iters;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;

    void apply(ProblemConfig& config) const;
};

/// The hypothesis report for the configured theorem, plus the example
/// condition when the rhs comes from an example tag.
HypothesisReport run_check(const BuiltProblem& built, const ProblemConfig& config);
int exit_code_for(Verdict v) noexcept;

struct SolutionTable {
    std::vector<double> t, x, dx, u;
};
void write_solution(const std::string& path, const SolveReport& report);
SolutionTable read_solution(const std::string& path);

int cmd_check(const std::string& config_path, const GlobalOptions& opts, std::ostream& out,
              std::ostream& err);
int cmd_solve(const std::string& config_path, const std::string& out_dir,
              const GlobalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const GlobalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_halfline(const std::string& config_path, const std::string& out_dir,
                 const GlobalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& table_path, const std::string& config_path,
               const GlobalOptions& opts, std::ostream& out, std::ostream& err);

} // namespace phibvp
