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

#include "errmargin/op2.hpp"

#include <ostream>

namespace errmargin {

Mat2c Mat2c::from(const Herm2 &h) {
    const auto &b = h.beta;
    return {{Complex{h.alpha + b.z, 0.0}, Complex{b.x, -b.y}, Complex{b.x, b.y},
             Complex{h.alpha - b.z, 0.0}}};
}

Mat2c Mat2c::operator+(const Mat2c &o) const {
    Mat2c r;
    for (int k = 0; k < 4; k++) {
        r.m[k] = m[k] + o.m[k];
    }
    return r;
}

Mat2c Mat2c::operator-(const Mat2c &o) const {
    Mat2c r;
    for (int k = 0; k < 4; k++) {
        r.m[k] = m[k] - o.m[k];
    }
    return r;
}

Mat2c Mat2c::operator*(const Mat2c &o) const {
    const Mat2c &a = *this;
    Mat2c r;
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            r(i, j) = a(i, 0) * o(0, j) + a(i, 1) * o(1, j);
        }
    }
    return r;
}

Mat2c Mat2c::adjoint() const {
    return {{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
}

Eigenpair2 eigs(const Herm2 &h) {
    double r = h.beta.norm();
    return {h.alpha - r, h.alpha + r};
}

bool is_psd(const Herm2 &h, double tol) {
    return eigs(h).lower >= -tol;
}

Mat2c mul(const Mat2c &a, const Mat2c &b) {
    return a * b;
}

Mat2c mul(const Herm2 &a, const Herm2 &b) {
    return Mat2c::from(a) * Mat2c::from(b);
}

Mat2c mul(const Herm2 &a, const Mat2c &b) {
    return Mat2c::from(a) * b;
}

Mat2c mul(const Mat2c &a, const Herm2 &b) {
    return a * Mat2c::from(b);
}

double frobenius_norm(const Mat2c &m) {
    double s = 0.0;
    for (const auto &c : m.m) {
        s += std::norm(c);
    }
    return std::sqrt(s);
}

double trace_product(const Herm2 &a, const Herm2 &b) {
    return 2.0 * (a.alpha * b.alpha + a.beta.dot(b.beta));
}

Herm2 hermitian_part(const Mat2c &m) {
    Herm2 h;
    h.alpha = 0.5 * (m(0, 0).real() + m(1, 1).real());
    h.beta.x = 0.5 * (m(0, 1).real() + m(1, 0).real());
    h.beta.y = 0.5 * (m(1, 0).imag() - m(0, 1).imag());
    h.beta.z = 0.5 * (m(0, 0).real() - m(1, 1).real());
    return h;
}

Herm2 positive_part(const Herm2 &h) {
    double r = h.beta.norm();
    auto [lo, hi] = eigs(h);
    if (lo >= 0.0) {
        return h;
    }
    if (hi <= 0.0) {
        return Herm2::zero();
    }
    // hi > 0 > lo forces r > 0.
    return Herm2::projector(h.beta / r) * hi;
}

Herm2 conjugate(const Mat2c &u, const Herm2 &h) {
    return hermitian_part(u * Mat2c::from(h) * u.adjoint());
}

std::ostream &operator<<(std::ostream &out, const Vec3 &v) {
    return out << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

std::ostream &operator<<(std::ostream &out, const Herm2 &h) {
    return out << "Herm2{alpha=" << h.alpha << ", beta=" << h.beta << "}";
}

}  // namespace errmargin
