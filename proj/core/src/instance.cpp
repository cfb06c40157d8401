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

#include "errmargin/instance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "errmargin/error.hpp"

namespace errmargin {

namespace {

void require_prior(double eta1) {
    if (!(eta1 > 0.0 && eta1 < 1.0)) {
        std::ostringstream msg;
        msg << "eta1 must lie strictly between 0 and 1, got " << eta1;
        throw Error(ErrorCode::DegeneratePrior, msg.str());
    }
}

void require_independent(double s) {
    if (s > kMaxOverlapSquared) {
        std::ostringstream msg;
        msg << "states are linearly dependent (|<phi1|phi2>|^2 = " << s << ")";
        throw Error(ErrorCode::LinearlyDependent, msg.str());
    }
}

State2 normalized(const State2 &psi, const char *name) {
    double n = std::sqrt(std::norm(psi[0]) + std::norm(psi[1]));
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw Error(ErrorCode::NotNormalizable, std::string(name) + " has zero or non-finite norm");
    }
    return {psi[0] / n, psi[1] / n};
}

Complex inner(const State2 &a, const State2 &b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

// Matrix whose columns are a and b.
Mat2c columns(const State2 &a, const State2 &b) {
    return {{a[0], b[0], a[1], b[1]}};
}

Mat2c inverse(const Mat2c &k) {
    Complex det = k.determinant();
    return {{k(1, 1) / det, -k(0, 1) / det, -k(1, 0) / det, k(0, 0) / det}};
}

}  // namespace

void Instance::init_canonical(double eta1_caller, double s, double t, double overlap) {
    require_prior(eta1_caller);
    require_independent(s);
    double eta2_caller = 1.0 - eta1_caller;
    swapped_ = eta1_caller > eta2_caller;
    eta1_ = swapped_ ? eta2_caller : eta1_caller;
    eta2_ = swapped_ ? eta1_caller : eta2_caller;
    s_ = s;
    t_ = t;
    overlap_ = overlap;

    double rs = std::sqrt(s);
    double rt = std::sqrt(t);
    n1_ = {rt, 0.0, rs};
    n2_ = {-rt, 0.0, rs};

    // Bloch (sin a, 0, cos a) <-> (cos a/2, sin a/2) with cos a = sqrt(S).
    double c = std::sqrt(0.5 * (1.0 + rs));
    double sn = rt / (2.0 * c);
    State2 internal1{Complex{c}, Complex{sn}};
    State2 internal2{Complex{c}, Complex{-sn}};
    psi1_ = swapped_ ? internal2 : internal1;
    psi2_ = swapped_ ? internal1 : internal2;
}

Instance canonicalize(const State2 &psi1, const State2 &psi2, double eta1) {
    require_prior(eta1);
    State2 u1 = normalized(psi1, "psi1");
    State2 u2 = normalized(psi2, "psi2");

    Complex ov = inner(u1, u2);
    // Gram determinant: |det[u1 u2]|^2 = 1 - |<u1|u2>|^2 without cancellation.
    double t = std::norm(u1[0] * u2[1] - u1[1] * u2[0]);
    double s = std::norm(ov);
    double total = s + t;
    s /= total;
    t /= total;

    Instance inst;
    inst.init_canonical(eta1, s, t, std::min(1.0, std::abs(ov)));

    // Fix the relative phase so that <u1|u2'> is real and nonnegative, then
    // map the canonical pair onto (u1, u2').
    double mag = std::abs(ov);
    Complex phase = mag > 0.0 ? ov / mag : Complex{1.0};
    State2 u2p{u2[0] * std::conj(phase), u2[1] * std::conj(phase)};
    inst.frame_ = columns(u1, u2p) * inverse(columns(inst.psi1_, inst.psi2_));
    return inst;
}

Instance instance_from_overlap(double eta1, double overlap) {
    if (!(overlap >= 0.0 && overlap <= 1.0)) {
        std::ostringstream msg;
        msg << "overlap |<phi1|phi2>| must lie in [0, 1], got " << overlap;
        throw Error(ErrorCode::InvalidConfig, msg.str());
    }
    Instance inst;
    inst.init_canonical(eta1, overlap * overlap, (1.0 - overlap) * (1.0 + overlap), overlap);
    return inst;
}

std::string_view to_string(DomainTag tag) {
    switch (tag) {
        case DomainTag::MinimumError:
            return "minimum-error";
        case DomainTag::Intermediate:
            return "intermediate";
        case DomainTag::SingleState:
            return "single-state";
    }
    return "unknown";
}

double critical_margin(double eta1, double eta2, double s) {
    double q = 4.0 * eta1 * eta2 * s;
    double r = std::sqrt(std::max(0.0, 1.0 - q));
    // (1 - r)/2 rewritten as q / (2 (1 + r)).
    return 0.5 * q / (1.0 + r);
}

double single_state_margin(double eta1, double eta2, double s) {
    if (eta1 >= eta2 * s) {
        return 0.0;
    }
    double g = std::sqrt(eta1 * eta2 * s);
    return (eta1 - g) * (eta1 - g) / (1.0 - 2.0 * g);
}

Domain classify_parameters(double eta1, double eta2, double s, double m) {
    if (eta1 > eta2) {
        std::swap(eta1, eta2);
    }
    Domain d;
    d.m_c = critical_margin(eta1, eta2, s);
    d.m_c_prime = single_state_margin(eta1, eta2, s);
    if (m >= d.m_c) {
        d.tag = DomainTag::MinimumError;
    } else if (eta1 <= eta2 * s && m <= d.m_c_prime) {
        d.tag = DomainTag::SingleState;
    } else {
        d.tag = DomainTag::Intermediate;
    }
    return d;
}

void require_margin(double m) {
    if (!(m >= 0.0 && m <= 1.0)) {
        std::ostringstream msg;
        msg << "error margin must lie in [0, 1], got " << m;
        throw Error(ErrorCode::MarginOutOfRange, msg.str());
    }
}

Domain classify(const Instance &inst, double m) {
    require_margin(m);
    return classify_parameters(inst.eta1(), inst.eta2(), inst.S(), m);
}

}  // namespace errmargin
