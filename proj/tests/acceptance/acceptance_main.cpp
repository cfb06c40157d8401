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

// Acceptance checks. One PASS/FAIL line per criterion; nonzero exit if any
// criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "errmargin/instance.hpp"
#include "errmargin/mixed_bounds.hpp"
#include "errmargin/oracle.hpp"
#include "errmargin/strong_margin.hpp"
#include "errmargin/weak_solver.hpp"

namespace {

using namespace errmargin;
using Rng = std::mt19937_64;

double uniform(Rng &rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 random_ball(Rng &rng) {
    std::normal_distribution<double> n;
    Vec3 v{n(rng), n(rng), n(rng)};
    return v * (std::cbrt(uniform(rng, 0.0, 1.0)) / v.norm());
}

Instance make(double eta1, double s) { return instance_from_overlap(eta1, std::sqrt(s)); }

struct Worst {
    double value = -std::numeric_limits<double>::infinity();
    void update(double v) { value = std::max(value, v); }
};

int failures = 0;

void report(int id, const char *name, bool ok, const std::string &detail) {
    std::printf("%s  [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) {
        failures++;
    }
}

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Triples stratified over the three weak domains.
struct Triple {
    double eta1, s, m;
};

std::vector<Triple> stratified_triples(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Triple> out;
    while (static_cast<int>(out.size()) < n) {
        double eta1 = uniform(rng, 0.02, 0.5);
        double s = uniform(rng, 0.0, 0.98);
        Domain d = classify_parameters(eta1, 1.0 - eta1, s, 0.0);
        double lo = 0.0, hi = 1.0;
        switch (out.size() % 3) {
            case 0:  // single-state
                if (d.m_c_prime <= 0.0) {
                    continue;
                }
                hi = d.m_c_prime;
                break;
            case 1:  // intermediate
                lo = d.m_c_prime;
                hi = d.m_c;
                break;
            default:  // minimum-error
                lo = d.m_c;
                break;
        }
        out.push_back({eta1, s, uniform(rng, lo, hi)});
    }
    return out;
}

struct CertWorst {
    Worst feasibility, slackness, gap, excess;
    void add(const Instance &inst, const Solution &sol) {
        CertificateReport r = check_certificate(inst.caller(), sol.povm, sol.cert);
        feasibility.update(-r.worst_feasibility());
        slackness.update(std::max({r.slack_e1, r.slack_e2, r.slack_e3, r.slack_margin}));
        gap.update(r.duality_gap);
        excess.update(sol.diag.p_error - sol.cert.m);
    }
};

CertWorst g_cert;

void criterion_oracle() {
    std::vector<Triple> triples = stratified_triples(200, 7);
    std::array<int, 3> seen{};
    Worst dev;
    SearchConfig cfg;  // default, single thread
    auto start = std::chrono::steady_clock::now();
    for (const Triple &t : triples) {
        Instance inst = make(t.eta1, t.s);
        Solution sol = solve_weak(inst, t.m);
        seen[static_cast<int>(sol.domain.tag)]++;
        g_cert.add(inst, sol);
        dev.update(std::abs(sol.p_max - oracle_pure_weak(inst, t.m, cfg).p_best));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool spans = seen[0] > 0 && seen[1] > 0 && seen[2] > 0;
    report(1, "oracle equivalence", dev.value <= 1e-3 && secs <= 120.0 && spans,
           fmt("200 instances, domains %d/%d/%d, max |p_max - oracle| = %.3g (tol 1e-3), %.1f s "
               "(limit 120 s)",
               seen[0], seen[1], seen[2], dev.value, secs));
}

void criterion_certificates() {
    Rng rng(11);
    int count = 200;
    for (int i = 0; i < 5000; i++) {
        Instance inst = make(uniform(rng, 0.02, 0.98), uniform(rng, 0.0, 0.98));
        double m = uniform(rng, 0.0, 1.0);
        g_cert.add(inst, solve_weak(inst, m));
        g_cert.add(inst, solve_strong(inst, uniform(rng, 0.0, 0.99)));
        count += 2;
    }
    for (double eta1 : {0.05, 0.3, 0.5, 0.8}) {
        for (double s : {0.0, 0.3, 0.81, 0.98}) {
            Instance inst = make(eta1, s);
            Domain d = classify(inst, 0.0);
            for (double m : {0.0, d.m_c_prime, d.m_c, 1.0}) {
                g_cert.add(inst, solve_weak(inst, m));
                count++;
            }
        }
    }
    bool ok = g_cert.feasibility.value <= 1e-12 && g_cert.slackness.value <= 1e-10 &&
              g_cert.gap.value <= 1e-10 && g_cert.excess.value <= 1e-12;
    report(2, "certificates", ok,
           fmt("%d solutions, feasibility %.3g (tol 1e-12), slackness %.3g (tol 1e-10), "
               "gap %.3g (tol 1e-10), p_err - m %.3g (tol 1e-12)",
               count, g_cert.feasibility.value, g_cert.slackness.value, g_cert.gap.value,
               g_cert.excess.value));
}

void criterion_figure2() {
    Instance inst = make(0.3, 0.81);
    Domain d = classify(inst, 0.0);
    bool ok = std::abs(d.m_c - 0.217335) <= 1e-5 && std::abs(d.m_c_prime - 0.072178) <= 1e-5;

    int pattern_bad = 0;
    int decreasing = 0;
    double previous = -1.0;
    const int n = 500;
    for (int i = 0; i < n; i++) {
        double m = static_cast<double>(i) / (n - 1);
        Solution sol = solve_weak(inst, m);
        if (m <= d.m_c_prime && sol.trace_e1 != 0.0) {
            pattern_bad++;
        }
        if (m > d.m_c_prime && m <= d.m_c && !(sol.trace_e1 > 0.0)) {
            pattern_bad++;
        }
        if (sol.p_max < previous) {
            decreasing++;
        }
        previous = sol.p_max;
    }
    double jump = 0.0;
    for (double b : {d.m_c_prime, d.m_c}) {
        double below = p_max_weak(inst, std::nextafter(b, 0.0));
        double above = p_max_weak(inst, std::nextafter(b, 1.0));
        jump = std::max({jump, std::abs(above - below), std::abs(p_max_weak(inst, b) - below)});
    }
    ok = ok && pattern_bad == 0 && decreasing == 0 && jump <= 1e-12;
    report(3, "figure-2 regression", ok,
           fmt("m_c = %.9f, m_c' = %.9f, tr E1 pattern violations %d, decreases %d over %d "
               "samples, boundary jump %.3g (tol 1e-12)",
               d.m_c, d.m_c_prime, pattern_bad, decreasing, n, jump));
}

void criterion_figure1() {
    std::vector<DomainTag> order;
    const int n = 2000;
    for (int i = 0; i < n; i++) {
        double eta1 = 0.5 - 0.499 * i / (n - 1);
        DomainTag tag = classify(make(eta1, 0.81), 0.06).tag;
        if (order.empty() || order.back() != tag) {
            order.push_back(tag);
        }
    }
    std::vector<DomainTag> expected{DomainTag::Intermediate, DomainTag::SingleState,
                                    DomainTag::Intermediate, DomainTag::MinimumError};
    std::string seq;
    for (DomainTag t : order) {
        seq += (seq.empty() ? "" : " -> ") + std::string(to_string(t));
    }
    report(4, "figure-1 regression", order == expected, "eta1 0.5 -> 0.001: " + seq);
}

void criterion_limits() {
    Rng rng(13);
    Worst err;
    for (int i = 0; i < 2000; i++) {
        double eta1 = uniform(rng, 0.01, 0.99);
        double s = uniform(rng, 0.0, 0.99);
        double eta2 = 1.0 - eta1;
        Instance inst = make(eta1, s);
        double helstrom = 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * eta1 * eta2 * s));
        err.update(std::abs(solve_weak(inst, 1.0).p_max - helstrom));
        double lo = std::min(eta1, eta2);
        double hi = std::max(eta1, eta2);
        double unamb = lo >= hi * s ? 1.0 - 2.0 * std::sqrt(eta1 * eta2 * s) : hi * (1.0 - s);
        err.update(std::abs(solve_weak(inst, 0.0).p_max - unamb));
    }
    report(5, "limit reductions", err.value <= 1e-12,
           fmt("2000 instances, max deviation from Helstrom / unambiguous %.3g (tol 1e-12)",
               err.value));
}

void criterion_strong() {
    Worst round_trip, equivalence, oracle_dev;
    const int n = 10;
    for (int a = 0; a < n; a++) {
        double eta1 = 0.02 + 0.96 * a / (n - 1);
        for (int b = 0; b < n; b++) {
            double s = 0.97 * b / (n - 1);
            Instance inst = make(eta1, s);
            for (int c = 0; c < n; c++) {
                double m_s = 0.95 * c / (n - 1);
                double m_w = weak_margin_of_strong(inst, m_s);
                if (m_w < 1.0) {
                    round_trip.update(std::abs(strong_margin_of_weak(inst, m_w) - m_s));
                }
                // Inside the minimum-error domain the weak margin is not
                // recoverable (every such margin maps to the same strong one).
                double mw2 = static_cast<double>(c) / (n - 1);
                if (classify(inst, mw2).tag != DomainTag::MinimumError) {
                    double back = weak_margin_of_strong(inst, strong_margin_of_weak(inst, mw2));
                    round_trip.update(std::abs(back - mw2));
                }
                equivalence.update(std::abs(p_max_strong(inst, m_s) - p_max_weak(inst, m_w)));
            }
        }
    }
    Rng rng(17);
    for (int i = 0; i < 50; i++) {
        Instance inst = make(uniform(rng, 0.02, 0.5), uniform(rng, 0.0, 0.98));
        double m_s = uniform(rng, 0.0, 1.0);
        oracle_dev.update(std::abs(oracle_pure_strong(inst, m_s).p_best - p_max_strong(inst, m_s)));
    }
    bool ok = round_trip.value <= 1e-10 && equivalence.value <= 1e-10 && oracle_dev.value <= 1e-3;
    report(6, "strong/weak equivalence", ok,
           fmt("round trip %.3g (tol 1e-10), closed form vs conversion %.3g on 1000 points "
               "(tol 1e-10), strong oracle %.3g on 50 instances (tol 1e-3)",
               round_trip.value, equivalence.value, oracle_dev.value));
}

void criterion_mixed() {
    Rng rng(19);
    Worst deficit, excess, zero;
    for (int i = 0; i < 1000; i++) {
        MixedInstance mi = make_mixed_instance(DensityMatrix::qubit(random_ball(rng)),
                                               DensityMatrix::qubit(random_ball(rng)),
                                               uniform(rng, 0.02, 0.98));
        deficit.update(-trace_fidelity_inequality_gap(mi));
        double f2 = mi.fidelity * mi.fidelity;
        double lo = std::min(mi.eta1, mi.eta2);
        double hi = std::max(mi.eta1, mi.eta2);
        double direct = lo >= hi * f2 ? 1.0 - 2.0 * std::sqrt(mi.eta1 * mi.eta2) * mi.fidelity
                                      : hi * (1.0 - f2);
        zero.update(std::abs(upper_bound_mixed(mi, 0.0) - direct));
        if (i < 100) {
            double m = uniform(rng, 0.0, 1.0);
            excess.update(oracle_mixed_weak(mi, m) - upper_bound_mixed(mi, m));
        }
    }
    bool ok = deficit.value <= 1e-10 && excess.value <= 1e-6 && zero.value <= 1e-14;
    report(7, "mixed-state bound", ok,
           fmt("max inequality deficit %.3g over 1000 pairs (tol 1e-10), max oracle - bound "
               "%.3g over 100 samples (tol 1e-6), zero-margin deviation %.3g (tol 1e-14)",
               deficit.value, excess.value, zero.value));
}

void criterion_symmetry() {
    Rng rng(23);
    Worst asym;
    int found = 0;
    while (found < 100) {
        Instance inst = make(uniform(rng, 0.02, 0.98), uniform(rng, 0.0, 0.98));
        double m = uniform(rng, 0.0, 1.0);
        if (classify(inst, m).tag != DomainTag::Intermediate || m <= 0.0) {
            continue;
        }
        found++;
        Diagnostics g = solve_weak(inst, m).diag;
        if (g.cond_err_1 && g.cond_err_2) {
            asym.update(std::abs(*g.cond_err_1 - *g.cond_err_2));
        }
        if (g.inconclusive_given_1 && g.inconclusive_given_2) {
            asym.update(std::abs(*g.inconclusive_given_1 - *g.inconclusive_given_2));
        }
    }
    report(8, "symmetry", asym.value <= 1e-10,
           fmt("100 intermediate instances, max conditional asymmetry %.3g (tol 1e-10)",
               std::max(asym.value, 0.0)));
}

}  // namespace

int main() {
    criterion_oracle();
    criterion_certificates();
    criterion_figure2();
    criterion_figure1();
    criterion_limits();
    criterion_strong();
    criterion_mixed();
    criterion_symmetry();
    std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
