// Gaussian quadrature rules for the weighted integrals used throughout:
// Gauss-Legendre, Gauss-Jacobi with weight (1-x)^alpha (1+x)^beta, and
// product rules on spheres and balls carrying the degenerate weight |y|^a.
//
// Nodes and weights come from the Golub-Welsch procedure: eigenvalues of the
// symmetric tridiagonal Jacobi matrix give the nodes, squared first components
// of the eigenvectors (times the weight-function mass) give the weights.
#ifndef FBLAB_QUADRATURE_HPP
#define FBLAB_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fblab {

// Point in R^{n+1}, stored as (x1, x2, y); x2 unused when n = 1.
using Point = std::array<double, 3>;

inline Point operator+(const Point& p, const Point& q) {
    return {p[0] + q[0], p[1] + q[1], p[2] + q[2]};
}
inline Point operator-(const Point& p, const Point& q) {
    return {p[0] - q[0], p[1] - q[1], p[2] - q[2]};
}
inline Point operator*(double s, const Point& p) { return {s * p[0], s * p[1], s * p[2]}; }
inline double norm(const Point& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]); }

namespace quad {

struct Rule1d {
    std::vector<double> x;
    std::vector<double> w;
    int size() const { return static_cast<int>(x.size()); }
};

namespace detail {

// Eigenvalues of a symmetric tridiagonal matrix (diag d, subdiag e) by QL with
// implicit shifts; z accumulates the first row of the rotation product, so on
// return z[i]^2 is the squared first eigenvector component for eigenvalue d[i].
inline void tql_first_row(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    const int m = static_cast<int>(d.size());
    if (m == 1) return;
    e.push_back(0.0);
    for (int l = 0; l < m; ++l) {
        int iter = 0;
        int mm;
        do {
            for (mm = l; mm < m - 1; ++mm) {
                double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
                if (std::abs(e[mm]) <= 1e-15 * dd) break;
            }
            if (mm != l) {
                if (++iter > 60) throw std::runtime_error("tql_first_row: no convergence");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[mm] - d[l] + e[l] / (g + (g >= 0 ? r : -r));
                double s = 1.0, c = 1.0, p = 0.0;
                for (int i = mm - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[mm] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (r == 0.0 && mm - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[mm] = 0.0;
            }
        } while (mm != l);
    }
}

inline void sort_rule(Rule1d& r) {
    std::vector<int> idx(r.x.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    for (size_t i = 1; i < idx.size(); ++i) {
        int k = idx[i];
        size_t j = i;
        while (j > 0 && r.x[idx[j - 1]] > r.x[k]) {
            idx[j] = idx[j - 1];
            --j;
        }
        idx[j] = k;
    }
    Rule1d out;
    out.x.reserve(idx.size());
    out.w.reserve(idx.size());
    for (int k : idx) {
        out.x.push_back(r.x[k]);
        out.w.push_back(r.w[k]);
    }
    r = std::move(out);
}

} // namespace detail

// m-point rule for int_{-1}^{1} f(x) (1-x)^alpha (1+x)^beta dx, exact for
// polynomials of degree <= 2m-1. Requires alpha, beta > -1.
inline Rule1d gauss_jacobi(int m, double alpha, double beta) {
    if (m < 1) throw std::invalid_argument("gauss_jacobi: need m >= 1");
    if (alpha <= -1.0 || beta <= -1.0) throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");
    const double ab = alpha + beta;
    std::vector<double> d(m), e(m > 1 ? m - 1 : 0), z(m, 0.0);
    z[0] = 1.0;
    d[0] = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < m; ++k) {
        double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
        d[k] = (beta * beta - alpha * alpha) / den;
    }
    for (int k = 1; k < m; ++k) {
        double b2;
        if (k == 1) {
            b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
        } else {
            double t = 2.0 * k + ab;
            b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
        }
        e[k - 1] = std::sqrt(b2);
    }
    detail::tql_first_row(d, e, z);
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                                std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
    Rule1d r;
    r.x = d;
    r.w.resize(m);
    for (int i = 0; i < m; ++i) r.w[i] = mu0 * z[i] * z[i];
    detail::sort_rule(r);
    return r;
}

inline Rule1d gauss_legendre(int m) { return gauss_jacobi(m, 0.0, 0.0); }

// Rule for int_0^1 f(w) (1-w)^alpha w^beta dw.
inline Rule1d gauss_jacobi01(int m, double alpha, double beta) {
    Rule1d r = gauss_jacobi(m, alpha, beta);
    const double scale = std::pow(2.0, -(alpha + beta + 1.0));
    for (int i = 0; i < r.size(); ++i) {
        r.x[i] = 0.5 * (r.x[i] + 1.0);
        r.w[i] *= scale;
    }
    return r;
}

// Rule for int_a^b f(x) dx (Legendre mapped to [a,b]).
inline Rule1d gauss_legendre_ab(int m, double a, double b) {
    Rule1d r = gauss_legendre(m);
    for (int i = 0; i < r.size(); ++i) {
        r.x[i] = 0.5 * (a + b) + 0.5 * (b - a) * r.x[i];
        r.w[i] *= 0.5 * (b - a);
    }
    return r;
}

struct SphereNode {
    Point z;   // on the unit sphere S^n in R^{n+1}
    double w;  // carries the |y|^a surface weight
};

// Product rule for int_{S^n} f(z) |z_y|^a dsigma, n in {1,2}.
//
// The polar angle from the y-axis is handled by Gauss-Jacobi in w = cos^2
// (absorbing |y|^a and the sin^{n-1} surface factor exactly); the remaining
// S^{n-1} factor uses +-1 (n=1) or equispaced angles (n=2). Nodes come in
// +-y pairs so odd-in-y integrands cancel exactly. Exact for polynomial f
// with total degree <= degree.
inline std::vector<SphereNode> sphere_rule(int n, double a, int degree) {
    if (n != 1 && n != 2) throw std::invalid_argument("sphere_rule: n must be 1 or 2");
    if (a <= -1.0 || a >= 1.0) throw std::invalid_argument("sphere_rule: a must lie in (-1,1)");
    const int mw = degree / 2 + 3;
    Rule1d rw = gauss_jacobi01(mw, 0.5 * (n - 2), 0.5 * (a - 1.0));
    std::vector<SphereNode> nodes;
    if (n == 1) {
        nodes.reserve(4 * rw.size());
        for (int j = 0; j < rw.size(); ++j) {
            double t = std::sqrt(rw.x[j]);        // |y| component
            double s = std::sqrt(1.0 - rw.x[j]);  // |x1| component
            for (int sx = -1; sx <= 1; sx += 2)
                for (int sy = -1; sy <= 1; sy += 2)
                    nodes.push_back({{sx * s, 0.0, sy * t}, 0.5 * rw.w[j]});
        }
    } else {
        int mphi = degree + 2;
        if (mphi % 2) ++mphi;
        const double dphi = 2.0 * M_PI / mphi;
        nodes.reserve(2 * mphi * rw.size());
        for (int j = 0; j < rw.size(); ++j) {
            double t = std::sqrt(rw.x[j]);
            double s = std::sqrt(1.0 - rw.x[j]);
            for (int mph = 0; mph < mphi; ++mph) {
                double phi = dphi * (mph + 0.5);
                double cx = s * std::cos(phi), cy = s * std::sin(phi);
                for (int sy = -1; sy <= 1; sy += 2)
                    nodes.push_back({{cx, cy, sy * t}, 0.5 * rw.w[j] * dphi});
            }
        }
    }
    return nodes;
}

struct BallNode {
    Point z;
    double w;
};

// Rule for int_{B_1} f(z) |z_y|^a dz on the unit ball of R^{n+1}; the radial
// direction uses Gauss-Jacobi with weight tau^{n+a}. To integrate over B_r,
// evaluate f at r*z and multiply the sum by r^{n+1+a}.
inline std::vector<BallNode> ball_rule(int n, double a, int degree, int radial_points = 0) {
    auto sph = sphere_rule(n, a, degree);
    int mr = radial_points > 0 ? radial_points : degree / 2 + 3;
    Rule1d rr = gauss_jacobi01(mr, 0.0, n + a);
    std::vector<BallNode> nodes;
    nodes.reserve(sph.size() * rr.size());
    for (int i = 0; i < rr.size(); ++i)
        for (const auto& s : sph)
            nodes.push_back({{rr.x[i] * s.z[0], rr.x[i] * s.z[1], rr.x[i] * s.z[2]}, rr.w[i] * s.w});
    return nodes;
}

} // namespace quad
} // namespace fblab

#endif
