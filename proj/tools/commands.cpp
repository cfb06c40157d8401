// Copyright 2026 The errmargin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <locale>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "errmargin/error.hpp"
#include "errmargin/instance.hpp"
#include "errmargin/mixed_bounds.hpp"
#include "errmargin/oracle.hpp"
#include "errmargin/strong_margin.hpp"
#include "errmargin/weak_solver.hpp"

namespace errmargin::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kOracleTolerance = 1e-3;
constexpr double kCertificateTolerance = 1e-10;
constexpr double kFeasibilityTolerance = 1e-12;
constexpr double kDualityTolerance = 1e-9;
constexpr double kDominanceTolerance = 1e-6;
constexpr double kGapTolerance = 1e-10;

const std::vector<std::string> kSweepColumns = {"eta1",     "m",       "domain", "p_max",
                                                "trace_e1", "p_error", "m_c",    "m_c_prime"};

MarginKind parse_kind(const std::string &s) {
    if (s == "weak") {
        return MarginKind::Weak;
    }
    if (s == "strong") {
        return MarginKind::Strong;
    }
    throw Error(ErrorCode::ParseError, "--kind must be weak or strong, got '" + s + "'");
}

/// "re0,im0,re1,im1"
State2 parse_state(const std::string &text, const char *flag) {
    std::vector<double> v;
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    std::string field;
    while (std::getline(in, field, ',')) {
        std::istringstream num(field);
        num.imbue(std::locale::classic());
        double x = 0.0;
        if (!(num >> x) || !(num >> std::ws).eof()) {
            throw Error(ErrorCode::ParseError,
                        std::string(flag) + ": cannot parse '" + field + "' as a number");
        }
        v.push_back(x);
    }
    if (v.size() != 4) {
        throw Error(ErrorCode::ParseError,
                    std::string(flag) + " expects four comma-separated reals re0,im0,re1,im1");
    }
    return {Complex{v[0], v[1]}, Complex{v[2], v[3]}};
}

int threads_from_env() {
    int hw = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    const char *cap = std::getenv(kThreadsEnv);
    if (cap == nullptr || *cap == '\0') {
        return hw;
    }
    char *end = nullptr;
    long n = std::strtol(cap, &end, 10);
    if (*end != '\0' || n < 1) {
        throw Error(ErrorCode::InvalidConfig,
                    std::string(kThreadsEnv) + " must be a positive integer");
    }
    return static_cast<int>(std::min<long>(n, hw));
}

Json herm_json(const Herm2 &h) {
    return Json{{"alpha", h.alpha}, {"beta", {h.beta.x, h.beta.y, h.beta.z}}};
}

Json optional_json(const std::optional<double> &v) { return v ? Json(*v) : Json(nullptr); }

std::string format_herm(const Herm2 &h) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(12) << "alpha=" << h.alpha << " beta=(" << h.beta.x << ", "
      << h.beta.y << ", " << h.beta.z << ")";
    return s.str();
}

std::string format_optional(const std::optional<double> &v) {
    if (!v) {
        return "undefined";
    }
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(12) << *v;
    return s.str();
}

std::string format_csv(double x) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(17) << x;
    return s.str();
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
    double eta1 = 0.5;
    std::optional<double> overlap;
    std::string state1;
    std::string state2;
    double margin = 0.0;
    std::string kind = "weak";
    bool json = false;
};

Json solution_json(const Instance &inst, const Solution &sol) {
    Json povm{{"e1", herm_json(inst.to_input_frame(sol.povm.e1))},
              {"e2", herm_json(inst.to_input_frame(sol.povm.e2))},
              {"e3", herm_json(inst.to_input_frame(sol.povm.e3))}};
    Json cert{{"Y", herm_json(inst.to_input_frame(sol.cert.Y))},
              {"y", std::isfinite(sol.cert.y) ? Json(sol.cert.y) : Json(nullptr)},
              {"m", sol.cert.m},
              {"d", sol.cert.value},
              {"limiting", sol.cert.limiting}};
    Json diag{{"p_success", sol.diag.p_success},
              {"p_error", sol.diag.p_error},
              {"outcome_probs", sol.diag.outcome_probs},
              {"cond_err_1", optional_json(sol.diag.cond_err_1)},
              {"cond_err_2", optional_json(sol.diag.cond_err_2)},
              {"inconclusive_given_1", optional_json(sol.diag.inconclusive_given_1)},
              {"inconclusive_given_2", optional_json(sol.diag.inconclusive_given_2)}};
    return Json{{"kind", to_string(sol.kind)},
                {"eta1", inst.caller_eta1()},
                {"eta2", 1.0 - inst.caller_eta1()},
                {"overlap", inst.overlap()},
                {"margin", sol.margin},
                {"weak_margin", sol.weak_margin},
                {"domain", to_string(sol.domain.tag)},
                {"m_c", sol.domain.m_c},
                {"m_c_prime", sol.domain.m_c_prime},
                {"p_max", sol.p_max},
                {"trace_e1", sol.trace_e1},
                {"povm", povm},
                {"certificate", cert},
                {"diagnostics", diag}};
}

void print_solution(std::ostream &out, const Instance &inst, const Solution &sol) {
    out << std::setprecision(12);
    out << "kind:        " << to_string(sol.kind) << "\n";
    out << "margin:      " << sol.margin << "\n";
    if (sol.kind == MarginKind::Strong) {
        out << "weak margin: " << sol.weak_margin << "\n";
    }
    out << "domain:      " << to_string(sol.domain.tag) << "\n";
    out << "m_c:         " << sol.domain.m_c << "\n";
    out << "m_c':        " << sol.domain.m_c_prime << "\n";
    out << "p_max:       " << sol.p_max << "\n";
    out << "p_error:     " << sol.diag.p_error << "\n";
    out << "tr E1:       " << sol.trace_e1 << "\n";
    out << "E1:          " << format_herm(inst.to_input_frame(sol.povm.e1)) << "\n";
    out << "E2:          " << format_herm(inst.to_input_frame(sol.povm.e2)) << "\n";
    out << "E3:          " << format_herm(inst.to_input_frame(sol.povm.e3)) << "\n";
    out << "Y:           " << format_herm(inst.to_input_frame(sol.cert.Y)) << "\n";
    out << "y:           " << (sol.cert.limiting ? std::string("inf (limiting certificate)")
                                                 : format_optional(sol.cert.y))
        << "\n";
    out << "d:           " << sol.cert.value << "\n";
    out << "P(rho2|E1):  " << format_optional(sol.diag.cond_err_1) << "\n";
    out << "P(rho1|E2):  " << format_optional(sol.diag.cond_err_2) << "\n";
    out << "P(rho1|E3):  " << format_optional(sol.diag.inconclusive_given_1) << "\n";
    out << "P(rho2|E3):  " << format_optional(sol.diag.inconclusive_given_2) << "\n";
}

int cmd_solve(const SolveArgs &a, std::ostream &out) {
    bool have_states = !a.state1.empty() || !a.state2.empty();
    if (have_states == a.overlap.has_value()) {
        throw Error(ErrorCode::ParseError, "give either --overlap or both --state1 and --state2");
    }
    if (have_states && (a.state1.empty() || a.state2.empty())) {
        throw Error(ErrorCode::ParseError, "--state1 and --state2 must be given together");
    }
    Instance inst = have_states ? canonicalize(parse_state(a.state1, "--state1"),
                                               parse_state(a.state2, "--state2"), a.eta1)
                                : instance_from_overlap(a.eta1, *a.overlap);
    Solution sol = solve(inst, a.margin, parse_kind(a.kind));
    if (a.json) {
        out << solution_json(inst, sol).dump(2) << "\n";
    } else {
        print_solution(out, inst, sol);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::optional<double> eta1;
    std::vector<double> eta1_range;
    std::optional<double> margin;
    std::vector<double> margin_range;
    double overlap = 0.9;
    std::string kind = "weak";
    std::string columns;
    std::string out = "-";
};

std::vector<double> axis(const std::optional<double> &fixed, const std::vector<double> &range,
                         const char *name) {
    if (fixed.has_value() == !range.empty()) {
        throw Error(ErrorCode::ParseError,
                    std::string("give exactly one of --") + name + " and --" + name + "-range");
    }
    if (fixed) {
        return {*fixed};
    }
    double lo = range[0];
    double hi = range[1];
    double steps = range[2];
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) {
        throw Error(ErrorCode::ParseError,
                    std::string("--") + name + "-range must satisfy 0 <= LO <= HI <= 1");
    }
    if (!(steps >= 2.0) || steps != std::floor(steps) || steps > 1e7) {
        throw Error(ErrorCode::ParseError,
                    std::string("--") + name + "-range needs an integer step count >= 2");
    }
    int n = static_cast<int>(steps);
    std::vector<double> v(n);
    for (int i = 0; i < n; i++) {
        v[i] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
    }
    return v;
}

std::vector<int> select_columns(const std::string &spec) {
    std::vector<int> sel;
    if (spec.empty()) {
        for (size_t i = 0; i < kSweepColumns.size(); i++) {
            sel.push_back(static_cast<int>(i));
        }
        return sel;
    }
    std::istringstream in(spec);
    std::string name;
    while (std::getline(in, name, ',')) {
        auto it = std::find(kSweepColumns.begin(), kSweepColumns.end(), name);
        if (it == kSweepColumns.end()) {
            throw Error(ErrorCode::ParseError, "unknown column '" + name + "'");
        }
        sel.push_back(static_cast<int>(it - kSweepColumns.begin()));
    }
    return sel;
}

void write_sweep(const SweepArgs &a, std::ostream &csv) {
    std::vector<double> etas = axis(a.eta1, a.eta1_range, "eta1");
    std::vector<double> margins = axis(a.margin, a.margin_range, "margin");
    std::vector<int> sel = select_columns(a.columns);
    MarginKind kind = parse_kind(a.kind);

    for (size_t k = 0; k < sel.size(); k++) {
        csv << (k ? "," : "") << kSweepColumns[sel[k]];
    }
    csv << "\n";
    for (double eta1 : etas) {
        Instance inst = instance_from_overlap(eta1, a.overlap);
        for (double m : margins) {
            Solution sol = solve(inst, m, kind);
            std::string fields[] = {format_csv(eta1),
                                    format_csv(m),
                                    std::string(to_string(sol.domain.tag)),
                                    format_csv(sol.p_max),
                                    format_csv(sol.trace_e1),
                                    format_csv(sol.diag.p_error),
                                    format_csv(sol.domain.m_c),
                                    format_csv(sol.domain.m_c_prime)};
            for (size_t k = 0; k < sel.size(); k++) {
                csv << (k ? "," : "") << fields[sel[k]];
            }
            csv << "\n";
        }
    }
}

int cmd_sweep(const SweepArgs &a, std::ostream &out, std::ostream &err) {
    if (a.out == "-") {
        write_sweep(a, out);
        return kExitOk;
    }
    // Build in memory first so a validation error leaves no partial file.
    std::ostringstream buffer;
    write_sweep(a, buffer);
    std::ofstream file(a.out);
    if (!file || !(file << buffer.str()) || !file.flush()) {
        err << "error: cannot write " << a.out << "\n";
        return kExitInvalid;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    int samples = 200;
    std::uint64_t seed = 7;
    std::string kind = "weak";
    bool mixed = false;
};

struct Worst {
    double value = -std::numeric_limits<double>::infinity();
    std::string where;

    void update(double v, const std::string &at) {
        if (v > value) {
            value = v;
            where = at;
        }
    }
};

std::string describe(double eta1, double s, double m) {
    std::ostringstream d;
    d << std::setprecision(17) << "eta1=" << eta1 << " S=" << s << " m=" << m;
    return d.str();
}

Vec3 random_ball(std::mt19937_64 &rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;
    Vec3 v{normal(rng), normal(rng), normal(rng)};
    double r = std::cbrt(unit(rng));
    return v * (r / v.norm());
}

int verify_pure(const VerifyArgs &a, const SearchConfig &cfg, std::ostream &out) {
    MarginKind kind = parse_kind(a.kind);
    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> eta_dist(0.02, 0.5);
    std::uniform_real_distribution<double> s_dist(0.0, 0.98);
    std::uniform_real_distribution<double> m_dist(0.0, 1.0);

    Worst oracle_dev;
    Worst feasibility;
    Worst slackness;
    Worst margin_excess;
    Worst duality;
    for (int i = 0; i < a.samples; i++) {
        double eta1 = eta_dist(rng);
        double s = s_dist(rng);
        double m = m_dist(rng);
        std::string at = describe(eta1, s, m);
        Instance inst = instance_from_overlap(eta1, std::sqrt(s));
        Solution sol = solve(inst, m, kind);
        OracleResult o = kind == MarginKind::Weak ? oracle_pure_weak(inst, m, cfg)
                                                  : oracle_pure_strong(inst, m, cfg);
        oracle_dev.update(std::abs(sol.p_max - o.p_best), at);
        CertificateReport rep = check_certificate(inst.caller(), sol.povm, sol.cert);
        feasibility.update(-rep.worst_feasibility(), at);
        slackness.update(rep.worst_slackness(), at);
        margin_excess.update(rep.margin_excess, at);
        if (kind == MarginKind::Weak) {
            duality.update(o.p_best - sol.cert.value, at);
        }
    }

    bool ok = oracle_dev.value <= kOracleTolerance && feasibility.value <= kFeasibilityTolerance &&
              slackness.value <= kCertificateTolerance &&
              margin_excess.value <= kFeasibilityTolerance && duality.value <= kDualityTolerance;
    out << std::setprecision(6);
    out << "samples:                   " << a.samples << " (" << a.kind << ", seed " << a.seed
        << ")\n";
    out << "max |p_max - oracle|:      " << oracle_dev.value << "  at " << oracle_dev.where << "\n";
    out << "max feasibility violation: " << feasibility.value << "  at " << feasibility.where
        << "\n";
    out << "max slackness residual:    " << slackness.value << "  at " << slackness.where << "\n";
    out << "max margin excess:         " << margin_excess.value << "  at " << margin_excess.where
        << "\n";
    if (kind == MarginKind::Weak) {
        out << "max oracle - certificate:  " << duality.value << "  at " << duality.where << "\n";
    }
    out << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitVerifyFailed;
}

int verify_mixed(const VerifyArgs &a, const SearchConfig &cfg, std::ostream &out) {
    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> eta_dist(0.02, 0.98);
    std::uniform_real_distribution<double> m_dist(0.0, 1.0);

    Worst excess;
    Worst gap;
    for (int i = 0; i < a.samples; i++) {
        Vec3 r1 = random_ball(rng);
        Vec3 r2 = random_ball(rng);
        double eta1 = eta_dist(rng);
        double m = m_dist(rng);
        MixedInstance minst =
            make_mixed_instance(DensityMatrix::qubit(r1), DensityMatrix::qubit(r2), eta1);
        std::ostringstream at;
        at << std::setprecision(17) << "eta1=" << eta1 << " F=" << minst.fidelity << " m=" << m;
        excess.update(oracle_mixed_weak(minst, m, cfg) - upper_bound_mixed(minst, m), at.str());
        gap.update(-trace_fidelity_inequality_gap(minst), at.str());
    }
    bool ok = excess.value <= kDominanceTolerance && gap.value <= kGapTolerance;
    out << std::setprecision(6);
    out << "samples:                 " << a.samples << " (mixed, seed " << a.seed << ")\n";
    out << "max oracle - bound:      " << excess.value << "  at " << excess.where << "\n";
    out << "max inequality deficit:  " << gap.value << "  at " << gap.where << "\n";
    out << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_verify(const VerifyArgs &a, std::ostream &out) {
    if (a.samples < 1) {
        throw Error(ErrorCode::ParseError, "--samples must be positive");
    }
    SearchConfig cfg;
    cfg.threads = threads_from_env();
    return a.mixed ? verify_mixed(a, cfg, out) : verify_pure(a, cfg, out);
}

// ---------------------------------------------------------------- mixed-bound

struct MixedArgs {
    std::string rho1;
    std::string rho2;
    double eta1 = 0.5;
    double margin = 0.0;
    bool json = false;
};

int cmd_mixed_bound(const MixedArgs &a, std::ostream &out) {
    MixedInstance minst =
        make_mixed_instance(DensityMatrix::load(a.rho1), DensityMatrix::load(a.rho2), a.eta1);
    Domain dom = mixed_domain(minst, a.margin);
    double bound = upper_bound_mixed(minst, a.margin);
    double helstrom = helstrom_mixed(minst);
    double gap = trace_fidelity_inequality_gap(minst);
    if (a.json) {
        Json j{{"eta1", minst.eta1},   {"margin", a.margin},
               {"fidelity", minst.fidelity},
               {"domain", to_string(dom.tag)},
               {"m_c", dom.m_c},       {"m_c_prime", dom.m_c_prime},
               {"upper_bound", bound}, {"helstrom", helstrom},
               {"inequality_gap", gap}};
        out << j.dump(2) << "\n";
        return kExitOk;
    }
    out << std::setprecision(12);
    out << "fidelity:       " << minst.fidelity << "\n";
    out << "domain:         " << to_string(dom.tag) << "\n";
    out << "m_c:            " << dom.m_c << "\n";
    out << "m_c':           " << dom.m_c_prime << "\n";
    out << "upper bound:    " << bound << "\n";
    out << "helstrom:       " << helstrom << "\n";
    out << "inequality gap: " << gap << "\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Two-state discrimination with an error margin"};
    app.name("errmargin");
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto *solve_cmd = app.add_subcommand("solve", "Optimal measurement for one instance");
    solve_cmd->add_option("--eta1", solve_args.eta1, "Prior of state 1")->required();
    solve_cmd->add_option("--overlap", solve_args.overlap, "|<phi1|phi2>|");
    solve_cmd->add_option("--state1", solve_args.state1, "State 1 as re0,im0,re1,im1");
    solve_cmd->add_option("--state2", solve_args.state2, "State 2 as re0,im0,re1,im1");
    solve_cmd->add_option("--margin", solve_args.margin, "Error margin")->required();
    solve_cmd->add_option("--kind", solve_args.kind, "weak or strong");
    solve_cmd->add_flag("--json", solve_args.json, "Emit a JSON object");

    SweepArgs sweep_args;
    auto *sweep_cmd = app.add_subcommand("sweep", "CSV over a grid of priors and margins");
    sweep_cmd->add_option("--eta1", sweep_args.eta1, "Fixed prior of state 1");
    sweep_cmd->add_option("--eta1-range", sweep_args.eta1_range, "LO HI STEPS")->expected(3);
    sweep_cmd->add_option("--margin", sweep_args.margin, "Fixed margin");
    sweep_cmd->add_option("--margin-range", sweep_args.margin_range, "LO HI STEPS")->expected(3);
    sweep_cmd->add_option("--overlap", sweep_args.overlap, "|<phi1|phi2>|");
    sweep_cmd->add_option("--kind", sweep_args.kind, "weak or strong");
    sweep_cmd->add_option("--columns", sweep_args.columns, "Comma-separated column subset");
    sweep_cmd->add_option("--out", sweep_args.out, "Output path, - for stdout");

    VerifyArgs verify_args;
    auto *verify_cmd = app.add_subcommand("verify", "Compare closed forms with brute force");
    verify_cmd->add_option("--samples", verify_args.samples, "Number of random instances");
    verify_cmd->add_option("--seed", verify_args.seed, "Random seed");
    verify_cmd->add_option("--kind", verify_args.kind, "weak or strong");
    verify_cmd->add_flag("--mixed", verify_args.mixed, "Check the mixed-state bound instead");

    MixedArgs mixed_args;
    auto *mixed_cmd = app.add_subcommand("mixed-bound", "Upper bound for two mixed states");
    mixed_cmd->add_option("--rho1", mixed_args.rho1, "JSON density matrix")->required();
    mixed_cmd->add_option("--rho2", mixed_args.rho2, "JSON density matrix")->required();
    mixed_cmd->add_option("--eta1", mixed_args.eta1, "Prior of state 1")->required();
    mixed_cmd->add_option("--margin", mixed_args.margin, "Error margin")->required();
    mixed_cmd->add_flag("--json", mixed_args.json, "Emit a JSON object");

    std::vector<const char *> argv{"errmargin"};
    for (const auto &s : args) {
        argv.push_back(s.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*solve_cmd) {
            return cmd_solve(solve_args, out);
        }
        if (*sweep_cmd) {
            return cmd_sweep(sweep_args, out, err);
        }
        if (*verify_cmd) {
            return cmd_verify(verify_args, out);
        }
        return cmd_mixed_bound(mixed_args, out);
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}

}  // namespace errmargin::cli
