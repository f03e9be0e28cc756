// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "oif/bench/stats.hpp"
#include "oif/marshal.hpp"
#include "oif/status.hpp"

namespace oif::bench {

/// How the solver is reached: through the dispatch layer and a loaded
/// plugin, or by calling the statically linked engine directly.
enum class CallPath { kOif, kRaw };

const char* to_string(CallPath path) noexcept;

enum class ProblemKind { kBurgers, kVdp };

struct CaseSpec {
    ProblemKind problem = ProblemKind::kBurgers;
    /// Burgers resolution.
    std::size_t n = 1600;
    /// Van der Pol damping.
    double mu = 1000.0;
    double t_final = 2.0;
    CallPath path = CallPath::kOif;
    std::string impl = "dopri5c";
    /// Empty: the implementation's default integrator.
    std::string integrator;
    ConfigDict integrator_params;
    double reltol = 1e-6;
    double abstol = 1e-12;
    int repeats = 30;
    /// integrate is called at n_out equally spaced times ending at t_final.
    int n_out = 100;
    bool warmup = true;
};

struct CaseResult {
    Status status;
    RuntimeSample sample;
    std::vector<double> initial_state;
    std::vector<double> final_state;
};

/// Loads the implementation (untimed), runs one untimed warm-up, then times
/// `repeats` runs of the integrate loop. A failing run stops the case and is
/// reported in `status`; no timings are kept for it.
CaseResult run_case(const CaseSpec& spec);

/// RHS-only timing: `evals` Burgers RHS evaluations at resolution n, per run.
RuntimeSample rhs_micro(std::size_t n, int evals, int repeats);

/// `case,path,impl,param,mean_s,ci95_s,status`
std::string csv_header();
std::string csv_row(const std::string& case_id, const std::string& path, const std::string& impl,
                    const std::string& param, const RuntimeSample& sample, const Status& status);
std::string csv_escape(const std::string& field);

/// One `i,value` line per element, 17 significant digits.
void write_solution(const std::filesystem::path& file, std::span<const double> values);

}  // namespace oif::bench
