// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oif/bench/problems.hpp"
#include "oif/bench/runner.hpp"
#include "oif/bench/stats.hpp"
#include "oif/dispatch.hpp"
#include "test_support.hpp"

using namespace oif::bench;

namespace {

std::vector<double> eval_burgers(const std::vector<double>& u, double dx) {
    std::vector<double> u_copy = u;
    std::vector<double> udot(u.size(), -99.0);
    std::intptr_t dims[1] = {static_cast<std::intptr_t>(u.size())};
    OIFArrayF64 a{1, dims, u_copy.data()};
    OIFArrayF64 b{1, dims, udot.data()};
    BurgersContext ctx{dx};
    REQUIRE(burgers_rhs(0.0, &a, &b, &ctx) == 0);
    return udot;
}

std::vector<double> eval_vdp(std::vector<double> y, double mu) {
    std::vector<double> ydot(2);
    std::intptr_t dims[1] = {2};
    OIFArrayF64 a{1, dims, y.data()};
    OIFArrayF64 b{1, dims, ydot.data()};
    VdpContext ctx{mu};
    REQUIRE(vdp_rhs(0.0, &a, &b, &ctx) == 0);
    return ydot;
}

struct RootsFixture {
    RootsFixture() { oif::Dispatch::instance().set_search_roots({OIF_TEST_BUNDLED_ROOT}); }
};

}  // namespace

TEST_CASE("Burgers problem setup") {
    const BurgersProblem p(4);
    CHECK(p.dx == 0.5);
    CHECK(p.t_final == 2.0);
    CHECK(p.grid() == std::vector<double>{0.0, 0.5, 1.0, 1.5});
    const auto u0 = p.initial_state();
    CHECK(u0[0] == 0.5);
    CHECK(u0[1] == doctest::Approx(0.25));
    CHECK(u0[2] == doctest::Approx(0.5));
    CHECK(u0[3] == doctest::Approx(0.75));
}

TEST_CASE("Lax-Friedrichs flux") {
    CHECK(lax_friedrichs_flux(0.0, 1.0, 1.0) == -0.25);
    for (double u : {-1.5, 0.0, 0.3, 2.0}) {
        CHECK(lax_friedrichs_flux(u, u, 7.0) == 0.5 * u * u);
    }
}

TEST_CASE("Burgers right-hand side") {
    SUBCASE("constant state has zero derivative") {
        const auto udot = eval_burgers(std::vector<double>(16, 0.7), 0.125);
        for (double v : udot) CHECK(v == 0.0);
    }
    SUBCASE("hand-computed three-cell case") {
        // u = [0, 1, 0], alpha = 1, dx = 1.
        // F(0,1) = -0.25, F(1,0) = ((0.5) + 1) / 2 = 0.75, F(0,0) = 0 (wrap).
        const auto udot = eval_burgers({0.0, 1.0, 0.0}, 1.0);
        CHECK(udot[0] == -(-0.25 - 0.0));
        CHECK(udot[1] == -(0.75 - -0.25));
        CHECK(udot[2] == -(0.0 - 0.75));
    }
    SUBCASE("flux differences telescope to zero") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::vector<double> u(257);
        for (double& v : u) v = dist(rng);
        const auto udot = eval_burgers(u, 2.0 / 257);
        double sum = 0.0;
        double scale = 0.0;
        for (double v : udot) {
            sum += v;
            scale += std::abs(v);
        }
        CHECK(std::abs(sum) <= 1e-12 * scale);
    }
    SUBCASE("periodic: shifting the state shifts the derivative") {
        const BurgersProblem p(64);
        auto u = p.initial_state();
        const auto base = eval_burgers(u, p.dx);
        std::rotate(u.begin(), u.begin() + 5, u.end());
        const auto shifted = eval_burgers(u, p.dx);
        for (std::size_t i = 0; i < u.size(); ++i) {
            CHECK(shifted[i] == base[(i + 5) % u.size()]);
        }
    }
}

TEST_CASE("Van der Pol right-hand side") {
    CHECK(eval_vdp({2.0, 0.0}, 1000.0) == std::vector<double>{0.0, -2.0});
    CHECK(eval_vdp({0.0, 1.0}, 0.0) == std::vector<double>{1.0, 0.0});
    for (double mu : {0.0, 5.0, 1000.0}) {
        CHECK(eval_vdp({1.0, 5.0}, mu) == std::vector<double>{5.0, -1.0});
    }
    CHECK(VdpProblem{}.initial_state() == std::vector<double>{2.0, 0.0});
}

TEST_CASE("stats") {
    const std::vector<double> runs = {1.0, 2.0, 3.0};
    const auto s = stats(runs);
    CHECK(s.mean == 2.0);
    CHECK(std::abs(s.se - 0.5773503) <= 1e-6);
    CHECK(std::abs(s.ci95 - 1.1316065) <= 1e-5);

    const auto flat = stats(std::vector<double>(5, 0.25));
    CHECK(flat.se == 0.0);
    CHECK(flat.ci95 == 0.0);

    try {
        stats(std::vector<double>{1.0});
        FAIL("expected invalid-argument");
    } catch (const oif::Error& e) {
        CHECK(e.code() == OIF_ERR_INVALID_ARGUMENT);
    }

    SUBCASE("permutation invariance") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> dist(0.0, 10.0);
        std::vector<double> v(31);
        for (double& x : v) x = dist(rng);
        const auto a = stats(v);
        for (int k = 0; k < 20; ++k) {
            std::shuffle(v.begin(), v.end(), rng);
            const auto b = stats(v);
            CHECK(b.mean == doctest::Approx(a.mean).epsilon(1e-14));
            CHECK(b.se == doctest::Approx(a.se).epsilon(1e-12));
        }
    }
    SUBCASE("summary of a single run has no interval") {
        RuntimeSample one{{0.5}};
        CHECK(one.summary().mean == 0.5);
        CHECK(std::isnan(one.summary().ci95));
    }
}

TEST_CASE("CSV helpers") {
    CHECK(csv_header() == "case,path,impl,param,mean_s,ci95_s,status");
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");

    RuntimeSample sample{{1.0, 2.0, 3.0}};
    CHECK(csv_row("burgers", "oif", "dopri5c", "N=1600", sample, oif::Status::ok()) ==
          "burgers,oif,dopri5c,N=1600,2,1.13161,ok");
    const oif::Status failed{oif::ErrorCode::kSolverFailure, "problem is probably stiff, t=2"};
    CHECK(csv_row("vdp", "oif", "dopri5c", "mu=1000", {}, failed) ==
          "vdp,oif,dopri5c,mu=1000,,,\"error -6: problem is probably stiff, t=2\"");
}

TEST_CASE("solution dump") {
    const auto file = oif::test::scratch_dir("dump") / "u.csv";
    const std::vector<double> v = {0.1, 1.0 / 3.0, -2.5e-300};
    write_solution(file, v);
    std::ifstream in(file);
    std::string header;
    std::getline(in, header);
    CHECK(header == "i,value");
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::string line;
        REQUIRE(std::getline(in, line));
        const auto comma = line.find(',');
        CHECK(std::stoul(line.substr(0, comma)) == i);
        CHECK(std::strtod(line.c_str() + comma + 1, nullptr) == v[i]);
    }
}

TEST_CASE_FIXTURE(RootsFixture, "run_case") {
    SUBCASE("oif and raw give bit-identical Burgers solutions") {
        CaseSpec spec;
        spec.n = 200;
        spec.repeats = 2;
        spec.n_out = 10;
        spec.path = CallPath::kOif;
        const auto oif_result = run_case(spec);
        spec.path = CallPath::kRaw;
        const auto raw_result = run_case(spec);
        REQUIRE(oif_result.status.is_ok());
        REQUIRE(raw_result.status.is_ok());
        CHECK(oif_result.sample.runs.size() == 2);
        REQUIRE(oif_result.final_state.size() == 200);
        CHECK(std::memcmp(oif_result.final_state.data(), raw_result.final_state.data(),
                          200 * sizeof(double)) == 0);
    }
    SUBCASE("rk4 through both paths") {
        CaseSpec spec;
        spec.n = 50;
        spec.impl = "rk4";
        spec.t_final = 0.5;
        spec.repeats = 2;
        spec.integrator = "rk4";
        spec.integrator_params.add("dt", 0.01);
        spec.path = CallPath::kOif;
        const auto a = run_case(spec);
        spec.path = CallPath::kRaw;
        const auto b = run_case(spec);
        REQUIRE(a.status.is_ok());
        REQUIRE(b.status.is_ok());
        CHECK(a.final_state == b.final_state);
    }
    SUBCASE("stiff VdP is recorded as a failure without timings") {
        CaseSpec spec;
        spec.problem = ProblemKind::kVdp;
        spec.mu = 1000.0;
        spec.t_final = 3000.0;
        spec.repeats = 1;
        const auto r = run_case(spec);
        CHECK(r.status.code() == OIF_ERR_SOLVER);
        CHECK(r.status.message().find("problem is probably stiff") != std::string::npos);
        CHECK(r.sample.runs.empty());
    }
    SUBCASE("non-stiff VdP succeeds") {
        CaseSpec spec;
        spec.problem = ProblemKind::kVdp;
        spec.mu = 5.0;
        spec.t_final = 30.0;
        spec.repeats = 2;
        const auto r = run_case(spec);
        CHECK(r.status.is_ok());
        CHECK(r.final_state.size() == 2);
    }
    SUBCASE("unknown implementations") {
        CaseSpec spec;
        spec.n = 16;
        spec.impl = "sundials";
        spec.path = CallPath::kRaw;
        CHECK(run_case(spec).status.code() == OIF_ERR_NOT_FOUND);
        spec.path = CallPath::kOif;
        CHECK(run_case(spec).status.code() == OIF_ERR_NOT_FOUND);
    }
    SUBCASE("invalid parameters") {
        CaseSpec spec;
        spec.repeats = 0;
        CHECK(run_case(spec).status.code() == OIF_ERR_INVALID_ARGUMENT);
        spec.repeats = 1;
        spec.n = 1;
        CHECK(run_case(spec).status.code() == OIF_ERR_INVALID_ARGUMENT);
    }
}

TEST_CASE("rhs_micro") {
    const auto s = rhs_micro(64, 10, 3);
    CHECK(s.runs.size() == 3);
    for (double r : s.runs) CHECK(r >= 0.0);
}
