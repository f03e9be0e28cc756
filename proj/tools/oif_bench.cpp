// SPDX-License-Identifier: Apache-2.0
//
// oif-bench: times IVP solves through the dispatch layer ("oif") and by
// calling the statically linked engines directly ("raw").

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oif/bench/runner.hpp"
#include "oif/bench/stats.hpp"

namespace {

using oif::bench::CallPath;
using oif::bench::CaseResult;
using oif::bench::CaseSpec;

struct CommonOptions {
    std::string impl = "dopri5c";
    std::string path = "oif";
    std::optional<double> t_final;
    int repeats = 30;
    int n_out = 100;
    double reltol = 1e-6;
    double abstol = 1e-12;
    std::string integrator;
    std::string csv;
    std::string dump_solution;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
    cmd.add_option("--impl", o.impl, "Implementation name")->capture_default_str();
    cmd.add_option("--path", o.path, "Call path")
        ->check(CLI::IsMember({"oif", "raw", "both"}))
        ->capture_default_str();
    cmd.add_option("--t-final", o.t_final, "Final time");
    cmd.add_option("--repeats", o.repeats, "Timed runs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--n-out", o.n_out, "Output times per run")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--rtol", o.reltol, "Relative tolerance")->capture_default_str();
    cmd.add_option("--atol", o.abstol, "Absolute tolerance")->capture_default_str();
    cmd.add_option("--integrator", o.integrator, "Integrator name (default: the impl's)");
    cmd.add_option("--csv", o.csv, "Write results as CSV to this file");
    cmd.add_option("--dump-solution", o.dump_solution,
                   "Write the final state of the last path run to this file");
}

std::vector<CallPath> paths_of(const std::string& name) {
    if (name == "oif") return {CallPath::kOif};
    if (name == "raw") return {CallPath::kRaw};
    return {CallPath::kOif, CallPath::kRaw};
}

std::string format_seconds(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int run_cases(const std::string& case_id, const std::string& param, CaseSpec spec,
              const CommonOptions& o) {
    spec.impl = o.impl;
    spec.repeats = o.repeats;
    spec.n_out = o.n_out;
    spec.reltol = o.reltol;
    spec.abstol = o.abstol;
    spec.integrator = o.integrator;

    std::vector<std::string> rows;
    std::vector<double> means;
    std::optional<CaseResult> last;
    for (CallPath path : paths_of(o.path)) {
        spec.path = path;
        CaseResult r = oif::bench::run_case(spec);
        rows.push_back(oif::bench::csv_row(case_id, oif::bench::to_string(path), spec.impl, param,
                                           r.sample, r.status));
        if (r.status.is_ok()) {
            const auto s = r.sample.summary();
            means.push_back(s.mean);
            std::cout << case_id << ' ' << param << ' ' << oif::bench::to_string(path)
                      << ": mean " << format_seconds(s.mean) << " s, ci95 "
                      << format_seconds(s.ci95) << " s over " << r.sample.runs.size()
                      << " runs\n";
        } else {
            std::cout << case_id << ' ' << param << ' ' << oif::bench::to_string(path)
                      << ": failed (" << r.status.code() << "): " << r.status.message() << '\n';
        }
        last = std::move(r);
    }
    if (means.size() == 2) {
        std::cout << "ratio oif/raw: " << means[0] / means[1] << '\n';
    }

    if (!o.csv.empty()) {
        std::ofstream out(o.csv);
        if (!out) {
            std::cerr << "oif-bench: cannot write " << o.csv << '\n';
            return 1;
        }
        out << oif::bench::csv_header() << '\n';
        for (const auto& row : rows) {
            out << row << '\n';
        }
    }
    if (!o.dump_solution.empty()) {
        if (!last || !last->status.is_ok()) {
            std::cerr << "oif-bench: no solution to dump\n";
            return 1;
        }
        oif::bench::write_solution(o.dump_solution, last->final_state);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark IVP solves through the dispatch layer and directly"};
    app.require_subcommand(1);

    CommonOptions burgers_opts;
    std::size_t burgers_n = 1600;
    auto* burgers = app.add_subcommand("burgers", "Inviscid Burgers' equation, periodic");
    burgers->add_option("--n", burgers_n, "Number of cells")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 26))
        ->capture_default_str();
    add_common(*burgers, burgers_opts);

    CommonOptions vdp_opts;
    double mu = 1000.0;
    auto* vdp = app.add_subcommand("vdp", "Van der Pol oscillator");
    vdp->add_option("--mu", mu, "Damping parameter")->capture_default_str();
    add_common(*vdp, vdp_opts);

    std::size_t micro_n = 6400;
    int evals = 10000;
    int micro_repeats = 30;
    auto* micro = app.add_subcommand("rhs-micro", "Time Burgers RHS evaluations only");
    micro->add_option("--n", micro_n, "Number of cells")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 26))
        ->capture_default_str();
    micro->add_option("--evals", evals, "Evaluations per run")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    micro->add_option("--repeats", micro_repeats, "Timed runs")
        ->check(CLI::Range(2, 1 << 20))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (burgers->parsed()) {
            CaseSpec spec;
            spec.problem = oif::bench::ProblemKind::kBurgers;
            spec.n = burgers_n;
            spec.t_final = burgers_opts.t_final.value_or(2.0);
            return run_cases("burgers", "N=" + std::to_string(burgers_n), spec, burgers_opts);
        }
        if (vdp->parsed()) {
            CaseSpec spec;
            spec.problem = oif::bench::ProblemKind::kVdp;
            spec.mu = mu;
            spec.t_final = vdp_opts.t_final.value_or(3000.0);
            char param[48];
            std::snprintf(param, sizeof param, "mu=%g", mu);
            return run_cases("vdp", param, spec, vdp_opts);
        }
        const auto sample = oif::bench::rhs_micro(micro_n, evals, micro_repeats);
        const auto s = sample.summary();
        std::cout << "rhs-micro N=" << micro_n << ", " << evals << " evaluations: mean "
                  << format_seconds(s.mean) << " s, ci95 " << format_seconds(s.ci95) << " s over "
                  << sample.runs.size() << " runs\n";
    } catch (const std::exception& e) {
        std::cerr << "oif-bench: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
