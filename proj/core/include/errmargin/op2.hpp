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

#ifndef ERRMARGIN_OP2_HPP
#define ERRMARGIN_OP2_HPP

#include <array>
#include <cmath>
#include <complex>
#include <iosfwd>

namespace errmargin {

/// Eigenvalue tolerance used for every positive-semidefiniteness decision.
inline constexpr double kPsdTolerance = 1e-12;

using Complex = std::complex<double>;

/// Real 3-vector; used for Bloch vectors and Pauli coefficients.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr bool operator==(const Vec3 &) const = default;

    constexpr double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3 &o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    // hypot avoids overflow/underflow in the squared components.
    double norm() const { return std::hypot(x, y, z); }
    bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline constexpr Vec3 operator*(double s, const Vec3 &v) { return v * s; }

/// 2x2 Hermitian operator alpha*I + beta.sigma.
///
/// Hermiticity is structural: every value of this type is Hermitian, and its
/// eigenvalues are exactly alpha -/+ |beta|.
struct Herm2 {
    double alpha = 0.0;
    Vec3 beta;

    static constexpr Herm2 identity() { return {1.0, {}}; }
    static constexpr Herm2 zero() { return {0.0, {}}; }
    /// Rank-one projector (I + n.sigma)/2 for a unit Bloch vector n.
    static constexpr Herm2 projector(const Vec3 &n) { return {0.5, n * 0.5}; }

    constexpr double trace() const { return 2.0 * alpha; }

    constexpr Herm2 operator+(const Herm2 &o) const { return {alpha + o.alpha, beta + o.beta}; }
    constexpr Herm2 operator-(const Herm2 &o) const { return {alpha - o.alpha, beta - o.beta}; }
    constexpr Herm2 operator-() const { return {-alpha, -beta}; }
    constexpr Herm2 operator*(double s) const { return {alpha * s, beta * s}; }
    constexpr bool operator==(const Herm2 &) const = default;

    bool is_finite() const { return std::isfinite(alpha) && beta.is_finite(); }
};

inline constexpr Herm2 operator*(double s, const Herm2 &h) { return h * s; }

/// General 2x2 complex matrix, row-major. Only needed for products, which are
/// not Hermitian in general.
struct Mat2c {
    std::array<Complex, 4> m{};

    Complex &operator()(int r, int c) { return m[2 * r + c]; }
    const Complex &operator()(int r, int c) const { return m[2 * r + c]; }

    static Mat2c identity() { return {{Complex{1}, Complex{0}, Complex{0}, Complex{1}}}; }
    static Mat2c from(const Herm2 &h);

    Mat2c operator+(const Mat2c &o) const;
    Mat2c operator-(const Mat2c &o) const;
    Mat2c operator*(const Mat2c &o) const;
    Mat2c adjoint() const;
    Complex trace() const { return m[0] + m[3]; }
    Complex determinant() const { return m[0] * m[3] - m[1] * m[2]; }
};

struct Eigenpair2 {
    double lower;
    double upper;
};

Eigenpair2 eigs(const Herm2 &h);

/// True iff the smaller eigenvalue is >= -tol.
bool is_psd(const Herm2 &h, double tol = kPsdTolerance);

Mat2c mul(const Mat2c &a, const Mat2c &b);
Mat2c mul(const Herm2 &a, const Herm2 &b);
Mat2c mul(const Herm2 &a, const Mat2c &b);
Mat2c mul(const Mat2c &a, const Herm2 &b);

double frobenius_norm(const Mat2c &m);

/// tr(a b) = 2 (alpha alpha' + beta . beta').
double trace_product(const Herm2 &a, const Herm2 &b);

/// Hermitian part (M + M^dagger)/2 expressed in Bloch form.
Herm2 hermitian_part(const Mat2c &m);

/// Positive part: the projection of h onto its nonnegative eigenspace.
Herm2 positive_part(const Herm2 &h);

/// U h U^dagger for a unitary U. The result is re-symmetrised.
Herm2 conjugate(const Mat2c &u, const Herm2 &h);

std::ostream &operator<<(std::ostream &out, const Vec3 &v);
std::ostream &operator<<(std::ostream &out, const Herm2 &h);

}  // namespace errmargin

#endif  // ERRMARGIN_OP2_HPP
