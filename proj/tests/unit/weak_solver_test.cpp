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

#include "errmargin/weak_solver.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "errmargin/error.hpp"
#include "test_util.hpp"

namespace errmargin {
namespace {

using testing::instance_of;
using testing::Rng;

ErrorCode code_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no errmargin::Error thrown";
    return ErrorCode::ParseError;
}

void expect_herm_near(const Herm2 &a, const Herm2 &b, double tol) {
    EXPECT_NEAR(a.alpha, b.alpha, tol);
    EXPECT_NEAR((a.beta - b.beta).norm(), 0.0, tol);
}

// Optimal values from an independent interior-point SDP solve of the primal
// problem (solver tolerance ~1e-8).
struct SdpCase {
    double eta1;
    double s;
    double m;
    double p;
};

const std::vector<SdpCase> kSdpWeak = {
    {0.3, 0.81, 0.0, 0.13300000469898726},   {0.3, 0.81, 0.03, 0.34116638006699707},
    {0.3, 0.81, 0.1, 0.5398145756781025},    {0.3, 0.81, 0.15, 0.6492996438709244},
    {0.3, 0.81, 0.25, 0.782665880507699},    {0.3, 0.81, 1.0, 0.7826658805019452},
    {0.5, 0.81, 0.05, 0.2914213562356459},   {0.5, 0.5, 0.0, 0.2928932321511995},
    {0.45, 0.2, 0.02, 0.785746498280518},    {0.1, 0.9, 0.01, 0.3240000000012517},
    {0.1, 0.9, 0.05, 0.7200000000007334},    {0.7, 0.81, 0.15, 0.6492996438710799},
    {0.02, 0.98, 0.3, 0.9804081597975317},
};

TEST(PMaxWeak, MatchesIndependentSdp) {
    for (const auto &c : kSdpWeak) {
        Instance inst = instance_of(c.eta1, c.s);
        EXPECT_NEAR(p_max_weak(inst, c.m), c.p, 1e-7) << c.eta1 << " " << c.s << " " << c.m;
        EXPECT_NEAR(solve_weak(inst, c.m).diag.p_success, c.p, 1e-7);
    }
}

TEST(PMaxWeak, Examples) {
    Instance inst = instance_of(0.3, 0.81);
    EXPECT_NEAR(p_max_weak(inst, 1.0), 0.7826658805020513, 1e-15);
    EXPECT_NEAR(p_max_weak(inst, 0.0), 0.7 * 0.19, 1e-15);
    EXPECT_NEAR(p_max_weak(inst, 0.15), 0.6492996438709348, 1e-15);
    EXPECT_NEAR(p_max_weak(inst, 0.03), 0.3411663800658374, 1e-15);
    EXPECT_NEAR(p_max_weak(instance_of(0.5, 0.81), 0.0), 0.1, 1e-15);
    EXPECT_NEAR(p_max_weak(instance_of(0.5, 0.81), 0.05), 0.2914213562373094, 1e-15);
    for (double eta1 : {0.1, 0.3, 0.5, 0.8}) {
        for (double m : {0.0, 0.2, 1.0}) {
            EXPECT_DOUBLE_EQ(p_max_weak(instance_of(eta1, 0.0), m), 1.0);
        }
    }
    EXPECT_EQ(code_of([&] { p_max_weak(inst, 1.5); }), ErrorCode::MarginOutOfRange);
    EXPECT_EQ(code_of([&] { p_max_weak(inst, -0.1); }), ErrorCode::MarginOutOfRange);
}

TEST(PMaxWeak, ParametersAllowIdenticalStates) {
    // S = 1: guessing the likelier label succeeds with max(eta) and errs with min(eta).
    EXPECT_DOUBLE_EQ(p_max_weak_parameters(0.3, 0.7, 1.0, 0.0, 1.0), 0.7);
    EXPECT_NEAR(p_max_weak_parameters(0.3, 0.7, 1.0, 0.0, 0.15), 0.7 * 0.15 / 0.3, 1e-15);
    EXPECT_NEAR(p_max_weak_parameters(0.5, 0.5, 1.0, 0.0, 0.2), 0.2, 1e-15);
}

TEST(SolveWeak, IntermediateExample) {
    Solution sol = solve_weak(instance_of(0.3, 0.81), 0.15);
    EXPECT_EQ(sol.domain.tag, DomainTag::Intermediate);
    EXPECT_NEAR(sol.p_max, 0.64930, 1e-5);
    EXPECT_NEAR(sol.cert.y, 2.0805442298766206, 1e-12);
    EXPECT_NEAR(sol.diag.p_error, 0.15, 1e-10);
    EXPECT_NEAR(sol.cert.value, sol.p_max, 1e-12);
    EXPECT_GT(sol.povm.e1.trace(), 0.0);
    EXPECT_GT(sol.povm.e2.trace(), 0.0);
    EXPECT_GT(sol.povm.e3.trace(), 0.0);
    EXPECT_TRUE(check_povm(sol.povm).ok());
}

TEST(SolveWeak, SingleStateExample) {
    Solution sol = solve_weak(instance_of(0.3, 0.81), 0.03);
    EXPECT_EQ(sol.domain.tag, DomainTag::SingleState);
    EXPECT_EQ(sol.trace_e1, 0.0);
    EXPECT_NEAR(sol.p_max, 0.341166, 1e-6);
    EXPECT_NEAR(sol.cert.y, 3.8876500750494443, 1e-10);
    EXPECT_NEAR(sol.diag.p_error, 0.03, 1e-10);
    EXPECT_FALSE(sol.diag.cond_err_1.has_value());
    ASSERT_TRUE(sol.diag.inconclusive_given_1.has_value());
    // E2 and E3 are orthogonal rank-one projectors.
    EXPECT_NEAR(eigs(sol.povm.e2).upper, 1.0, 1e-12);
    EXPECT_NEAR(eigs(sol.povm.e3).upper, 1.0, 1e-12);
    EXPECT_NEAR(trace_product(sol.povm.e2, sol.povm.e3), 0.0, 1e-12);
}

TEST(SolveWeak, ConstraintInactiveInMinimumErrorDomain) {
    Instance inst = instance_of(0.3, 0.81);
    Solution a = solve_weak(inst, 0.4);
    Solution b = solve_weak(inst, 1.0);
    EXPECT_EQ(a.domain.tag, DomainTag::MinimumError);
    EXPECT_EQ(a.p_max, b.p_max);
    EXPECT_EQ(a.povm.e1, b.povm.e1);
    EXPECT_EQ(a.povm.e2, b.povm.e2);
    EXPECT_EQ(a.povm.e3, b.povm.e3);
    EXPECT_EQ(a.cert.Y, b.cert.Y);
    EXPECT_EQ(a.cert.y, b.cert.y);
    EXPECT_EQ(a.margin, 0.4);
    EXPECT_EQ(a.cert.m, 0.4);
}

TEST(BuildMinError, Examples) {
    Construction eq = build_min_error(instance_of(0.5, 0.0));
    Instance orth = instance_of(0.5, 0.0);
    expect_herm_near(eq.povm.e1, Herm2::projector(orth.n1()), 1e-15);
    expect_herm_near(eq.povm.e2, Herm2::projector(orth.n2()), 1e-15);
    EXPECT_NEAR(eq.cert.value, 1.0, 1e-15);

    Instance inst = instance_of(0.3, 0.81);
    Construction c = build_min_error(inst);
    Diagnostics d = diagnostics(inst.internal(), c.povm);
    EXPECT_NEAR(d.p_success, 0.782665, 1e-6);
    EXPECT_NEAR(d.p_error, classify(inst, 1.0).m_c, 1e-12);
    EXPECT_EQ(c.povm.e3, Herm2::zero());
    EXPECT_EQ(c.cert.y, 0.0);
    // Y = eta2 rho2 + positive part of (eta1 rho1 - eta2 rho2).
    StatePair sp = inst.internal();
    expect_herm_near(c.cert.Y,
                     sp.rho2() * sp.eta2 + positive_part(sp.rho1() * sp.eta1 - sp.rho2() * sp.eta2),
                     1e-15);

    Instance tiny = instance_of(1e-6, 0.81);
    Construction t = build_min_error(tiny);
    EXPECT_NEAR(eigs(t.povm.e1).upper, 1.0, 1e-12);
    EXPECT_NEAR(diagnostics(tiny.internal(), t.povm).p_success, tiny.eta2(), 1e-5);
}

TEST(BuildIntermediate, BetaEquationsHold) {
    Rng rng(301);
    int checked = 0;
    while (checked < 300) {
        Instance inst =
            instance_of(testing::uniform(rng, 0.02, 0.5), testing::uniform(rng, 0.0, 0.98));
        Domain d = classify(inst, 0.0);
        double m = testing::uniform(rng, std::max(d.m_c_prime, 1e-6), d.m_c);
        if (classify(inst, m).tag != DomainTag::Intermediate) {
            continue;
        }
        checked++;
        IntermediateDual dual = intermediate_dual(inst, intermediate_multiplier(inst, m));
        StatePair sp = inst.internal();
        Herm2 y1 = dual.Y() - (sp.rho1() * sp.eta1 - sp.rho2() * (dual.y * sp.eta2));
        Herm2 y2 = dual.Y() - (sp.rho2() * sp.eta2 - sp.rho1() * (dual.y * sp.eta1));
        // Each of Y, Y1, Y2 has a vanishing smaller eigenvalue.
        ASSERT_NEAR(eigs(dual.Y()).lower, 0.0, 1e-10);
        ASSERT_NEAR(eigs(y1).lower, 0.0, 1e-10);
        ASSERT_NEAR(eigs(y2).lower, 0.0, 1e-10);
        // And the a-vectors are as defined.
        ASSERT_NEAR((dual.a1 - (sp.n1 * sp.eta1 - sp.n2 * (dual.y * sp.eta2))).norm(), 0.0, 1e-15);
    }
}

TEST(BuildIntermediate, LinearRelationAmongBetas) {
    Instance inst = instance_of(0.3, 0.81);
    for (double m : {0.08, 0.15, 0.2}) {
        IntermediateDual dual = intermediate_dual(inst, intermediate_multiplier(inst, m));
        auto c = intermediate_coefficients(inst, m);
        Vec3 b1 = dual.beta - dual.a1 * 0.5;
        Vec3 b2 = dual.beta - dual.a2 * 0.5;
        Vec3 b3 = dual.beta;
        // Completeness of the rank-one elements needs sum_mu c_mu beta_mu = 0.
        Vec3 rel = b1 * c[0] + b2 * c[1] + b3 * c[2];
        EXPECT_NEAR(rel.norm(), 0.0, 1e-12) << m;
    }
}

TEST(BuildIntermediate, EnvelopeProperty) {
    Rng rng(302);
    for (int i = 0; i < 100; i++) {
        Instance inst =
            instance_of(testing::uniform(rng, 0.02, 0.5), testing::uniform(rng, 0.0, 0.98));
        Domain d = classify(inst, 0.0);
        double m = testing::uniform(rng, std::max(d.m_c_prime, 0.01), d.m_c);
        if (!(m < d.m_c)) {
            continue;
        }
        double y = intermediate_multiplier(inst, m);
        double h = 1e-6;
        double deriv = (intermediate_dual(inst, y + h).Y().trace() -
                        intermediate_dual(inst, y - h).Y().trace()) /
                       (2.0 * h);
        Construction c = build_intermediate(inst, m);
        double p_err = diagnostics(inst.internal(), c.povm).p_error;
        ASSERT_NEAR(deriv, -p_err, 1e-5) << inst.eta1() << " " << inst.S() << " " << m;
    }
}

TEST(BuildIntermediate, BoundaryMatching) {
    Instance inst = instance_of(0.3, 0.81);
    Domain d = classify(inst, 0.1);

    // At m_c the inconclusive weight vanishes and the Helstrom measurement remains.
    auto c_hi = intermediate_coefficients(inst, d.m_c);
    EXPECT_NEAR(c_hi[2], 0.0, 1e-10);
    Construction at_mc = build_intermediate(inst, d.m_c);
    Construction helstrom = build_min_error(inst);
    expect_herm_near(at_mc.povm.e1, helstrom.povm.e1, 1e-7);
    expect_herm_near(at_mc.povm.e2, helstrom.povm.e2, 1e-7);
    EXPECT_NEAR(at_mc.povm.e3.trace(), 0.0, 1e-7);

    // At m_c' E1 vanishes and the single-state measurement remains.
    auto c_lo = intermediate_coefficients(inst, d.m_c_prime);
    EXPECT_NEAR(c_lo[0], 0.0, 1e-10);
    Construction at_mcp = build_intermediate(inst, d.m_c_prime);
    Construction single = build_single_state(inst, d.m_c_prime);
    EXPECT_NEAR(at_mcp.povm.e1.trace(), 0.0, 1e-7);
    expect_herm_near(at_mcp.povm.e2, single.povm.e2, 1e-7);
    expect_herm_near(at_mcp.povm.e3, single.povm.e3, 1e-7);
    EXPECT_NEAR(single.cert.y, intermediate_multiplier(inst, d.m_c_prime), 1e-9);
    EXPECT_NEAR(single.cert.y, 2.557711922826594, 1e-9);
}

TEST(BuildIntermediate, Errors) {
    Instance inst = instance_of(0.3, 0.81);
    EXPECT_EQ(code_of([&] { build_intermediate(inst, 0.03); }), ErrorCode::OutOfDomain);
    EXPECT_EQ(code_of([&] { build_intermediate(inst, 0.3); }), ErrorCode::OutOfDomain);
    EXPECT_EQ(code_of([&] { build_intermediate(instance_of(0.5, 0.81), 0.0); }),
              ErrorCode::MarginZeroDegenerate);
    EXPECT_EQ(code_of([&] { build_intermediate(inst, 2.0); }), ErrorCode::MarginOutOfRange);
}

TEST(BuildSingleState, ZeroMarginLimit) {
    Instance inst = instance_of(0.2, 0.81);
    Solution sol = solve_weak(inst, 0.0);
    EXPECT_EQ(sol.domain.tag, DomainTag::SingleState);
    expect_herm_near(sol.povm.e2, Herm2::projector(-inst.n1()), 1e-15);
    EXPECT_NEAR(sol.p_max, 0.152, 1e-15);
    EXPECT_NEAR(sol.diag.p_success, 0.152, 1e-15);
    EXPECT_TRUE(sol.cert.limiting);
    EXPECT_TRUE(std::isinf(sol.cert.y));
}

TEST(BuildSingleState, Errors) {
    EXPECT_EQ(code_of([] { build_single_state(instance_of(0.5, 0.81), 0.0); }),
              ErrorCode::OutOfDomain);
    EXPECT_EQ(code_of([] { build_single_state(instance_of(0.3, 0.81), 0.1); }),
              ErrorCode::OutOfDomain);
}

TEST(BuildUnambiguous, ValuesAndErrors) {
    Instance inst = instance_of(0.4, 0.5);
    Construction c = build_unambiguous(inst);
    Diagnostics d = diagnostics(inst.internal(), c.povm);
    EXPECT_NEAR(d.p_error, 0.0, 1e-15);
    EXPECT_NEAR(d.p_success, 1.0 - 2.0 * std::sqrt(0.4 * 0.6 * 0.5), 1e-14);
    EXPECT_TRUE(check_povm(c.povm).ok());
    EXPECT_TRUE(c.cert.limiting);
    EXPECT_EQ(code_of([] { build_unambiguous(instance_of(0.1, 0.81)); }), ErrorCode::OutOfDomain);
}

TEST(Certificates, HoldOnRandomInstances) {
    Rng rng(303);
    for (int i = 0; i < 3000; i++) {
        double eta1 = testing::uniform(rng, 0.02, 0.98);
        double s = testing::uniform(rng, 0.0, 0.98);
        double m = i % 10 == 0 ? 0.0 : testing::uniform(rng, 0.0, 0.6);
        Instance inst = instance_of(eta1, s);
        Solution sol = solve_weak(inst, m);
        CertificateReport rep = check_certificate(inst.caller(), sol.povm, sol.cert);
        ASSERT_TRUE(rep.ok(1e-12, 1e-10))
            << "eta1=" << eta1 << " S=" << s << " m=" << m << " feas=" << rep.worst_feasibility()
            << " slack=" << rep.worst_slackness() << " excess=" << rep.margin_excess;
        ASSERT_LE(sol.diag.p_error, m + 1e-12);
        ASSERT_NEAR(sol.diag.p_success, sol.p_max, 1e-10);
        ASSERT_TRUE(check_povm(sol.povm, true).ok());
        ASSERT_EQ(sol.trace_e1, sol.povm.e1.trace());
    }
}

TEST(Certificates, RejectCorruptedPairs) {
    Instance inst = instance_of(0.3, 0.81);
    Solution sol = solve_weak(inst, 0.15);
    Certificate bad = sol.cert;
    bad.Y = bad.Y * 0.9;
    bad.value = bad.Y.trace() + bad.m * bad.y;
    EXPECT_FALSE(check_certificate(inst.caller(), sol.povm, bad).ok());

    Povm3 wrong = sol.povm;
    wrong.e1 = sol.povm.e2;
    wrong.e2 = sol.povm.e1;
    EXPECT_FALSE(check_certificate(inst.caller(), wrong, sol.cert).ok());
}

TEST(Symmetry, ConditionalErrorsAgree) {
    Rng rng(304);
    int checked = 0;
    while (checked < 300) {
        double eta1 = testing::uniform(rng, 0.02, 0.98);
        Instance inst = instance_of(eta1, testing::uniform(rng, 0.0, 0.98));
        double m = testing::uniform(rng, 0.0, 0.6);
        Solution sol = solve_weak(inst, m);
        if (sol.domain.tag == DomainTag::SingleState) {
            continue;
        }
        checked++;
        if (sol.diag.cond_err_1 && sol.diag.cond_err_2) {
            ASSERT_NEAR(*sol.diag.cond_err_1, *sol.diag.cond_err_2, 1e-10);
        }
        if (sol.diag.inconclusive_given_1) {
            ASSERT_NEAR(*sol.diag.inconclusive_given_1, *sol.diag.inconclusive_given_2, 1e-10);
        }
    }
    Solution eq = solve_weak(instance_of(0.5, 0.81), 0.05);
    ASSERT_TRUE(eq.diag.cond_err_1 && eq.diag.cond_err_2);
    EXPECT_NEAR(*eq.diag.cond_err_1, *eq.diag.cond_err_2, 1e-12);
}

TEST(Continuity, AtCriticalMargins) {
    Rng rng(305);
    for (int i = 0; i < 200; i++) {
        Instance inst =
            instance_of(testing::uniform(rng, 0.02, 0.5), testing::uniform(rng, 0.05, 0.98));
        Domain d = classify(inst, 0.0);
        for (double edge : {d.m_c, d.m_c_prime}) {
            if (edge <= 0.0) {
                continue;
            }
            double below = p_max_weak(inst, std::nextafter(edge, 0.0));
            double above = p_max_weak(inst, std::nextafter(edge, 1.0));
            ASSERT_NEAR(below, above, 1e-12) << inst.eta1() << " " << inst.S() << " " << edge;
        }
    }
}

TEST(Continuity, NondecreasingInMargin) {
    Rng rng(306);
    for (int i = 0; i < 50; i++) {
        Instance inst =
            instance_of(testing::uniform(rng, 0.02, 0.5), testing::uniform(rng, 0.0, 0.98));
        double prev = -1.0;
        for (int k = 0; k < 1000; k++) {
            double p = p_max_weak(inst, k / 999.0);
            ASSERT_GE(p, prev - 1e-15);
            prev = p;
        }
    }
}

TEST(LabelCovariance, SwappingHypothesesSwapsTheMeasurement) {
    Rng rng(307);
    for (int i = 0; i < 500; i++) {
        State2 a = testing::random_state(rng);
        State2 b = testing::random_state(rng);
        double eta1 = testing::uniform(rng, 0.02, 0.98);
        double m = testing::uniform(rng, 0.0, 0.5);
        Instance fwd = canonicalize(a, b, eta1);
        Instance rev = canonicalize(b, a, 1.0 - eta1);
        Solution sf = solve_weak(fwd, m);
        Solution sr = solve_weak(rev, m);
        ASSERT_NEAR(sf.p_max, sr.p_max, 1e-12);
        auto near = [](const Herm2 &x, const Herm2 &y) {
            return std::abs(x.alpha - y.alpha) <= 1e-12 && (x.beta - y.beta).norm() <= 1e-12;
        };
        ASSERT_TRUE(near(fwd.to_input_frame(sf.povm.e1), rev.to_input_frame(sr.povm.e2)));
        ASSERT_TRUE(near(fwd.to_input_frame(sf.povm.e2), rev.to_input_frame(sr.povm.e1)));
        ASSERT_TRUE(near(fwd.to_input_frame(sf.povm.e3), rev.to_input_frame(sr.povm.e3)));
    }
}

TEST(Diagnostics, JointProbabilities) {
    Instance inst = instance_of(0.3, 0.81);
    Solution sol = solve_weak(inst, 1.0);
    EXPECT_NEAR(sol.diag.p_error, 0.217335, 1e-6);
    double total = 0.0;
    for (const auto &row : sol.diag.joint) {
        for (double p : row) {
            total += p;
        }
    }
    EXPECT_NEAR(total, 1.0, 1e-15);
    EXPECT_NEAR(sol.diag.outcome_probs[2], 0.0, 1e-15);
    EXPECT_FALSE(sol.diag.inconclusive_given_1.has_value());
    EXPECT_EQ(to_string(MarginKind::Weak), "weak");
    EXPECT_EQ(to_string(MarginKind::Strong), "strong");
}

TEST(CheckPovm, FlagsBrokenMeasurements) {
    Povm3 incomplete{Herm2::projector({0, 0, 1}), Herm2::zero(), Herm2::zero()};
    EXPECT_FALSE(check_povm(incomplete).ok());
    Povm3 negative{Herm2{0.0, {0, 0, 0.1}}, Herm2::projector({0, 0, -1}),
                   Herm2::identity() - Herm2{0.0, {0, 0, 0.1}} - Herm2::projector({0, 0, -1})};
    EXPECT_FALSE(check_povm(negative).ok());
    Povm3 full_rank_e3{Herm2::zero(), Herm2::zero(), Herm2::identity()};
    EXPECT_FALSE(check_povm(full_rank_e3).ok());
    EXPECT_TRUE(check_povm(full_rank_e3, true).ok());
}

}  // namespace
}  // namespace errmargin
