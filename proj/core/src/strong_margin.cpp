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

#include "errmargin/strong_margin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "errmargin/error.hpp"

namespace errmargin {

double strong_single_state_margin(double eta1, double eta2, double s) {
    if (eta1 >= eta2 * s) {
        return 0.0;
    }
    double g = std::sqrt(eta1 * eta2 * s);
    double u = eta1 - g;
    double v = eta2 - g;
    return u * u / (v * v + u * u);
}

Domain classify_strong_parameters(double eta1, double eta2, double s, double m) {
    if (eta1 > eta2) {
        std::swap(eta1, eta2);
    }
    Domain d;
    d.m_c = critical_margin(eta1, eta2, s);
    d.m_c_prime = strong_single_state_margin(eta1, eta2, s);
    if (m >= d.m_c) {
        d.tag = DomainTag::MinimumError;
    } else if (eta1 <= eta2 * s && m <= d.m_c_prime) {
        d.tag = DomainTag::SingleState;
    } else {
        d.tag = DomainTag::Intermediate;
    }
    return d;
}

Domain classify_strong(const Instance &inst, double m_s) {
    require_margin(m_s);
    return classify_strong_parameters(inst.eta1(), inst.eta2(), inst.S(), m_s);
}

double p_max_strong_parameters(double eta1, double eta2, double s, double t, double m) {
    if (eta1 > eta2) {
        std::swap(eta1, eta2);
    }
    Domain d = classify_strong_parameters(eta1, eta2, s, m);
    switch (d.tag) {
        case DomainTag::MinimumError:
            return 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - 4.0 * eta1 * eta2 * s)));
        case DomainTag::Intermediate: {
            // m < m_c <= 1/2 here, so 1 - 2m > 0.
            if (!(m < 0.5)) {
                std::ostringstream msg;
                msg << "strong intermediate branch reached at m = " << m;
                throw Error(ErrorCode::MarginOutOfRange, msg.str());
            }
            double a_m = (1.0 - m) / ((1.0 - 2.0 * m) * (1.0 - 2.0 * m)) *
                         (1.0 + 2.0 * std::sqrt(m * (1.0 - m)));
            return a_m * (1.0 - 2.0 * std::sqrt(eta1 * eta2 * s));
        }
        case DomainTag::SingleState: {
            double den = m * eta2 + (1.0 - m) * eta1 - 2.0 * std::sqrt(m * (1.0 - m) * eta1 * eta2 * s);
            return eta1 * eta2 * (1.0 - m) * t / den;
        }
    }
    return 0.0;
}

double p_max_strong(const Instance &inst, double m_s) {
    require_margin(m_s);
    return p_max_strong_parameters(inst.eta1(), inst.eta2(), inst.S(), inst.T(), m_s);
}

double weak_margin_of_strong(const Instance &inst, double m_s) {
    if (!(m_s >= 0.0 && m_s < 1.0)) {
        std::ostringstream msg;
        msg << "strong margin must lie in [0, 1), got " << m_s;
        throw Error(ErrorCode::MarginOutOfRange, msg.str());
    }
    return std::min(1.0, m_s * p_max_strong(inst, m_s) / (1.0 - m_s));
}

double strong_margin_of_weak(const Instance &inst, double m_w) {
    double p = p_max_weak(inst, m_w);
    return m_w / (p + m_w);
}

Solution solve_strong(const Instance &inst, double m_s) {
    require_margin(m_s);
    double m_w = m_s < 1.0 ? weak_margin_of_strong(inst, m_s) : 1.0;
    Solution sol = solve_weak(inst, m_w);
    sol.kind = MarginKind::Strong;
    sol.margin = m_s;
    sol.domain = classify_strong(inst, m_s);
    sol.p_max = p_max_strong(inst, m_s);
    return sol;
}

Solution solve(const Instance &inst, double margin, MarginKind kind) {
    return kind == MarginKind::Weak ? solve_weak(inst, margin) : solve_strong(inst, margin);
}

}  // namespace errmargin
