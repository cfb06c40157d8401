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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "errmargin/error.hpp"

namespace errmargin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Coefficients this close below zero are boundary round-off.
constexpr double kCoefficientClamp = 1e-12;

[[noreturn]] void out_of_domain(const char *builder, double m, const Domain &d) {
    std::ostringstream msg;
    msg << builder << ": margin " << m << " outside its domain (m_c' = " << d.m_c_prime
        << ", m_c = " << d.m_c << ")";
    throw Error(ErrorCode::OutOfDomain, msg.str());
}

double max_entry(const Herm2 &h) {
    return std::max(std::abs(h.alpha) + std::abs(h.beta.z), std::hypot(h.beta.x, h.beta.y));
}

// E = gamma (|b| - b.sigma), the rank-one operator annihilated by |b| + b.sigma.
Herm2 rank_one_against(const Vec3 &b, double gamma) {
    return {gamma * b.norm(), b * (-gamma)};
}

// eta1 n1 + eta2 n2 - q (n1 + n2) with q = sqrt(eta1 eta2 / S), regrouped so
// that nothing large cancels as S -> 0. Uses eta1 + eta2 = 1.
Vec3 intermediate_direction(const Instance &inst) {
    Vec3 sum = inst.n1() + inst.n2();
    Vec3 diff = inst.n1() - inst.n2();
    double root_s = std::sqrt(inst.S());
    double root_eta = std::sqrt(inst.eta1() * inst.eta2());
    return sum * 0.5 - sum * (root_eta / root_s) + diff * (0.5 * (inst.eta1() - inst.eta2()));
}

double helstrom(double eta1, double eta2, double s) {
    return 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - 4.0 * eta1 * eta2 * s)));
}

}  // namespace

std::string_view to_string(MarginKind kind) {
    return kind == MarginKind::Weak ? "weak" : "strong";
}

bool PovmReport::ok(double tol) const {
    return min_eigenvalue >= -tol && completeness_residual <= tol && max_rank_defect <= tol;
}

PovmReport check_povm(const Povm3 &povm, bool allow_full_rank_e3) {
    PovmReport r;
    const Herm2 *elements[] = {&povm.e1, &povm.e2, &povm.e3};
    r.min_eigenvalue = kInf;
    for (int k = 0; k < 3; k++) {
        auto [lo, hi] = eigs(*elements[k]);
        r.min_eigenvalue = std::min(r.min_eigenvalue, lo);
        if (k < 2 || !allow_full_rank_e3) {
            r.max_rank_defect = std::max(r.max_rank_defect, lo);
        }
    }
    r.completeness_residual = max_entry(povm.sum() - Herm2::identity());
    return r;
}

Diagnostics diagnostics(const StatePair &states, const Povm3 &povm) {
    Diagnostics d;
    const Herm2 rho[2] = {states.rho1(), states.rho2()};
    const double eta[2] = {states.eta1, states.eta2};
    const Herm2 *elements[3] = {&povm.e1, &povm.e2, &povm.e3};
    for (int a = 0; a < 2; a++) {
        for (int mu = 0; mu < 3; mu++) {
            d.joint[a][mu] = eta[a] * trace_product(*elements[mu], rho[a]);
        }
    }
    for (int mu = 0; mu < 3; mu++) {
        d.outcome_probs[mu] = d.joint[0][mu] + d.joint[1][mu];
    }
    d.p_success = d.joint[0][0] + d.joint[1][1];
    d.p_error = d.joint[0][1] + d.joint[1][0];
    if (d.outcome_probs[0] >= kOutcomeProbabilityFloor) {
        d.cond_err_1 = d.joint[1][0] / d.outcome_probs[0];
    }
    if (d.outcome_probs[1] >= kOutcomeProbabilityFloor) {
        d.cond_err_2 = d.joint[0][1] / d.outcome_probs[1];
    }
    if (d.outcome_probs[2] >= kOutcomeProbabilityFloor) {
        d.inconclusive_given_1 = d.joint[0][2] / d.outcome_probs[2];
        d.inconclusive_given_2 = d.joint[1][2] / d.outcome_probs[2];
    }
    return d;
}

double CertificateReport::worst_feasibility() const {
    return std::min({min_eig_y, min_eig_y1, min_eig_y2, multiplier});
}

double CertificateReport::worst_slackness() const {
    return std::max({slack_e1, slack_e2, slack_e3, slack_margin, duality_gap});
}

bool CertificateReport::ok(double feasibility_tol, double slack_tol) const {
    return worst_feasibility() >= -feasibility_tol && worst_slackness() <= slack_tol &&
           margin_excess <= feasibility_tol;
}

CertificateReport check_certificate(const StatePair &states, const Povm3 &povm,
                                    const Certificate &cert) {
    CertificateReport r;
    Diagnostics d = diagnostics(states, povm);
    Herm2 rho1 = states.rho1();
    Herm2 rho2 = states.rho2();
    r.min_eig_y = eigs(cert.Y).lower;
    r.duality_gap = std::abs(d.p_success - cert.value);
    r.margin_excess = d.p_error - cert.m;
    r.slack_e3 = frobenius_norm(mul(povm.e3, cert.Y));

    if (cert.limiting) {
        // y -> infinity: Y + eps I is feasible for large finite y iff these
        // compressions are nonnegative.
        r.min_eig_y1 = trace_product(cert.Y - rho1 * states.eta1, Herm2::projector(-states.n2));
        r.min_eig_y2 = trace_product(cert.Y - rho2 * states.eta2, Herm2::projector(-states.n1));
        r.multiplier = kInf;
        r.slack_e1 = frobenius_norm(mul(povm.e1, rho2));
        r.slack_e2 = frobenius_norm(mul(povm.e2, rho1));
        r.slack_margin = std::abs(cert.m - d.p_error);
        return r;
    }

    Herm2 y1 = cert.Y - (rho1 * states.eta1 - rho2 * (cert.y * states.eta2));
    Herm2 y2 = cert.Y - (rho2 * states.eta2 - rho1 * (cert.y * states.eta1));
    r.min_eig_y1 = eigs(y1).lower;
    r.min_eig_y2 = eigs(y2).lower;
    r.multiplier = cert.y;
    r.slack_e1 = frobenius_norm(mul(povm.e1, y1));
    r.slack_e2 = frobenius_norm(mul(povm.e2, y2));
    r.slack_margin = std::abs(cert.y * (cert.m - d.p_error));
    return r;
}

double p_max_weak_parameters(double eta1, double eta2, double s, double t, double m) {
    if (eta1 > eta2) {
        std::swap(eta1, eta2);
    }
    Domain d = classify_parameters(eta1, eta2, s, m);
    switch (d.tag) {
        case DomainTag::MinimumError:
            return helstrom(eta1, eta2, s);
        case DomainTag::Intermediate: {
            double r = std::sqrt(std::max(0.0, 1.0 - 2.0 * std::sqrt(eta1 * eta2 * s)));
            double v = std::sqrt(m) + r;
            return v * v;
        }
        case DomainTag::SingleState: {
            double v = std::sqrt(m * s / eta1) + std::sqrt(std::max(0.0, eta1 - m) * t / eta1);
            return eta2 * v * v;
        }
    }
    return 0.0;
}

double p_max_weak(const Instance &inst, double m) {
    require_margin(m);
    return p_max_weak_parameters(inst.eta1(), inst.eta2(), inst.S(), inst.T(), m);
}

Construction build_min_error(const Instance &inst) {
    double eta1 = inst.eta1();
    double eta2 = inst.eta2();
    Vec3 g = inst.n1() * eta1 - inst.n2() * eta2;
    double len = g.norm();
    if (len < 1e-14) {
        throw Error(ErrorCode::DegenerateDirection, "eta1 n1 - eta2 n2 vanishes");
    }
    Vec3 dir = g / len;

    Construction c;
    c.povm.e1 = Herm2::projector(dir);
    c.povm.e2 = Herm2::projector(-dir);
    c.povm.e3 = Herm2::zero();

    // Positive eigenvalue of eta1 rho1 - eta2 rho2.
    double lambda_plus = 0.5 * (eta1 - eta2 + len);
    c.cert.Y = Herm2{0.5, inst.n2() * 0.5} * eta2 + c.povm.e1 * lambda_plus;
    c.cert.y = 0.0;
    c.cert.value = c.cert.Y.trace();
    return c;
}

IntermediateDual intermediate_dual(const Instance &inst, double y) {
    double eta1 = inst.eta1();
    double eta2 = inst.eta2();
    double k = y / (2.0 * (y - 1.0));
    double root = std::sqrt(eta1 * eta2 * inst.S());

    IntermediateDual dual;
    dual.y = y;
    dual.beta = intermediate_direction(inst) * k;
    dual.alpha = k * (1.0 - 2.0 * root);
    dual.a1 = inst.n1() * eta1 - inst.n2() * (y * eta2);
    dual.a2 = inst.n2() * eta2 - inst.n1() * (y * eta1);
    return dual;
}

double intermediate_multiplier(const Instance &inst, double m) {
    double root = std::sqrt(inst.eta1() * inst.eta2() * inst.S());
    return 1.0 + std::sqrt(1.0 - 2.0 * root) / std::sqrt(m);
}

std::array<double, 3> intermediate_coefficients(const Instance &inst, double m) {
    double eta1 = inst.eta1();
    double eta2 = inst.eta2();
    double root = std::sqrt(eta1 * eta2 * inst.S());
    double r = std::sqrt(1.0 - 2.0 * root);
    double sm = std::sqrt(m);
    double y = intermediate_multiplier(inst, m);
    double w = y / (y + 1.0);
    return {w * (sm - (root - eta1) / r), w * (sm - (root - eta2) / r), root / sm - sm - r};
}

Construction build_intermediate(const Instance &inst, double m) {
    Domain d = classify(inst, m);
    if (m == 0.0 && d.m_c_prime == 0.0) {
        throw Error(ErrorCode::MarginZeroDegenerate,
                    "build_intermediate: m = 0 needs the unambiguous construction");
    }
    if (m < d.m_c_prime || m > d.m_c || m <= 0.0) {
        out_of_domain("build_intermediate", m, d);
    }

    double y = intermediate_multiplier(inst, m);
    IntermediateDual dual = intermediate_dual(inst, y);
    std::array<Vec3, 3> b = {dual.beta - dual.a1 * 0.5, dual.beta - dual.a2 * 0.5, dual.beta};
    std::array<double, 3> coef = intermediate_coefficients(inst, m);
    for (double &c : coef) {
        if (c < -kCoefficientClamp) {
            out_of_domain("build_intermediate", m, d);
        }
        c = std::max(0.0, c);
    }
    double norm = 0.0;
    for (int mu = 0; mu < 3; mu++) {
        norm += coef[mu] * b[mu].norm();
    }
    double gamma = 1.0 / norm;

    Construction c;
    c.povm.e1 = rank_one_against(b[0], gamma * coef[0]);
    c.povm.e2 = rank_one_against(b[1], gamma * coef[1]);
    c.povm.e3 = rank_one_against(b[2], gamma * coef[2]);
    c.cert.Y = dual.Y();
    c.cert.y = y;
    c.cert.m = m;
    c.cert.value = c.cert.Y.trace() + m * y;
    return c;
}

Construction build_unambiguous(const Instance &inst) {
    double eta1 = inst.eta1();
    double eta2 = inst.eta2();
    double s = inst.S();
    double t = inst.T();
    if (eta1 < eta2 * s || s == 0.0) {
        std::ostringstream msg;
        msg << "build_unambiguous: requires 0 < eta2 S <= eta1 (eta1 = " << eta1 << ", S = " << s
            << ")";
        throw Error(ErrorCode::OutOfDomain, msg.str());
    }
    // Failure probabilities sqrt(eta2 S/eta1) and sqrt(eta1 S/eta2) for the two states.
    double w1 = (1.0 - std::sqrt(eta2 * s / eta1)) / t;
    double w2 = (1.0 - std::sqrt(eta1 * s / eta2)) / t;

    Construction c;
    c.povm.e1 = Herm2::projector(-inst.n2()) * w1;
    c.povm.e2 = Herm2::projector(-inst.n1()) * w2;
    c.povm.e3 = Herm2::identity() - c.povm.e1 - c.povm.e2;

    // y -> infinity limit of the intermediate dual (k -> 1/2).
    double root = std::sqrt(eta1 * eta2 * s);
    c.cert.Y = Herm2{0.5 * (1.0 - 2.0 * root), intermediate_direction(inst) * 0.5};
    c.cert.y = kInf;
    c.cert.m = 0.0;
    c.cert.value = c.cert.Y.trace();
    c.cert.limiting = true;
    return c;
}

SingleStateDual single_state_dual(const Instance &inst, double y) {
    double eta1 = inst.eta1();
    double eta2 = inst.eta2();
    Vec3 a2 = inst.n2() * eta2 - inst.n1() * (y * eta1);
    double r = a2.norm();
    double x = eta2 - y * eta1;

    SingleStateDual dual;
    dual.y = y;
    dual.f = a2 / r;
    // lambda+ lambda- = (x^2 - r^2)/4 = -y eta1 eta2 T; avoid cancellation in x + r.
    if (x >= 0.0) {
        dual.lambda_plus = 0.5 * (x + r);
        dual.lambda_minus = -2.0 * y * eta1 * eta2 * inst.T() / (x + r);
    } else {
        dual.lambda_plus = 2.0 * y * eta1 * eta2 * inst.T() / (r - x);
        dual.lambda_minus = 0.5 * (x - r);
    }
    return dual;
}

double single_state_multiplier(const Instance &inst, double m) {
    double eta1 = inst.eta1();
    double s = inst.S();
    double t = inst.T();
    // From eta1 (1 + f.n1)/2 = m with f parallel to eta2 n2 - y eta1 n1.
    return inst.eta2() / eta1 *
           (s - t + std::sqrt(s * t) * (eta1 - 2.0 * m) / std::sqrt(m * (eta1 - m)));
}

Construction build_single_state(const Instance &inst, double m) {
    Domain d = classify(inst, m);
    double eta1 = inst.eta1();
    double eta2 = inst.eta2();
    if (eta1 > eta2 * inst.S() || m > d.m_c_prime) {
        out_of_domain("build_single_state", m, d);
    }
    if (m > eta1) {
        out_of_domain("build_single_state", m, d);
    }

    Construction c;
    c.povm.e1 = Herm2::zero();
    if (m == 0.0) {
        // Limit y -> infinity: f -> -n1 and lambda+ -> eta2 T.
        Vec3 f = -inst.n1();
        c.povm.e2 = Herm2::projector(f);
        c.povm.e3 = Herm2::projector(-f);
        c.cert.Y = Herm2::projector(f) * (eta2 * inst.T());
        c.cert.y = kInf;
        c.cert.m = 0.0;
        c.cert.value = c.cert.Y.trace();
        c.cert.limiting = true;
        return c;
    }

    double y = single_state_multiplier(inst, m);
    SingleStateDual dual = single_state_dual(inst, y);
    c.povm.e2 = Herm2::projector(dual.f);
    c.povm.e3 = Herm2::projector(-dual.f);
    c.cert.Y = dual.Y();
    c.cert.y = y;
    c.cert.m = m;
    c.cert.value = c.cert.Y.trace() + m * y;
    return c;
}

Solution solve_weak(const Instance &inst, double m) {
    Domain d = classify(inst, m);
    Construction c;
    switch (d.tag) {
        case DomainTag::MinimumError:
            c = build_min_error(inst);
            c.cert.m = m;
            break;
        case DomainTag::Intermediate:
            c = m == 0.0 ? build_unambiguous(inst) : build_intermediate(inst, m);
            break;
        case DomainTag::SingleState:
            c = build_single_state(inst, m);
            break;
    }

    Solution sol;
    sol.kind = MarginKind::Weak;
    sol.domain = d;
    sol.margin = m;
    sol.weak_margin = m;
    sol.p_max = p_max_weak(inst, m);
    sol.povm = inst.swapped() ? c.povm.relabeled() : c.povm;
    sol.cert = c.cert;
    sol.diag = diagnostics(inst.caller(), sol.povm);
    sol.trace_e1 = sol.povm.e1.trace();
    return sol;
}

}  // namespace errmargin
