// Frequency diagnostics at thin-space centers: the sphere mass H(r), ball
// energy D(r), frequency N(r) = D(r)/H(r), the lambda-Weiss energies
// W_lambda(r) = (D - lambda H)/r^{2 lambda} and Monneau masses
// H_lambda(r) = H/r^{2 lambda}, with monotonicity verdicts and the r^2
// extrapolation of N to r = 0+.
//
// Normalizations: H(r) = r^{-(n+a)} int_{dB_r} u^2 |y|^a and
// D(r) = r^{-(n+a-1)} int_{B_r} |grad u|^2 |y|^a, so that N = D/H equals the
// unnormalized ratio r * (ball energy) / (sphere mass).
#ifndef FBLAB_DIAGNOSTICS_HPP
#define FBLAB_DIAGNOSTICS_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fblab/grid.hpp"
#include "fblab/poly.hpp"
#include "fblab/quadrature.hpp"

namespace fblab {

// A field that diagnostics can probe: nodal grid data (interpolated), an
// exact polynomial, or a callable with (optionally) a callable gradient.
struct FieldRef {
    int n = 1;
    double a = 0.0;
    std::function<double(const Point&)> value;
    std::function<Point(const Point&)> gradient;  // may be empty
    const ScalarField* grid = nullptr;            // set for nodal fields

    double operator()(const Point& p) const { return value(p); }
};

inline FieldRef ref_of(const ScalarField& f) {
    FieldRef r;
    r.n = f.grid->n();
    r.a = f.grid->a();
    r.grid = &f;
    r.value = [&f](const Point& p) { return f.interp(p); };
    return r;
}

inline FieldRef ref_of(const MultiPoly& p, int n, double a) {
    FieldRef r;
    r.n = n;
    r.a = a;
    auto copy = p;
    r.value = [copy](const Point& q) { return copy.eval(q); };
    r.gradient = [copy](const Point& q) { return copy.grad(q); };
    return r;
}

inline FieldRef ref_of(std::function<double(const Point&)> v, std::function<Point(const Point&)> g,
                       int n, double a) {
    FieldRef r;
    r.n = n;
    r.a = a;
    r.value = std::move(v);
    r.gradient = std::move(g);
    return r;
}

// Difference u - p(. - center), used for second blow-ups.
inline FieldRef difference(const FieldRef& u, const MultiPoly& p, const Point& center) {
    FieldRef r = u;
    auto base = u.value;
    auto baseg = u.gradient;
    auto poly = p;
    r.grid = nullptr;
    r.value = [base, poly, center](const Point& q) { return base(q) - poly.eval(q - center); };
    if (baseg)
        r.gradient = [baseg, poly, center](const Point& q) {
            Point g = baseg(q), gp = poly.grad(q - center);
            return Point{g[0] - gp[0], g[1] - gp[1], g[2] - gp[2]};
        };
    else
        r.gradient = nullptr;
    return r;
}

struct FrequencyProfile {
    Point center{0, 0, 0};
    std::vector<double> radii;
    std::vector<double> H, D, N;
    std::vector<double> lambdas;
    std::vector<std::vector<double>> W_lambda;  // [lambda index][radius index]
    std::vector<std::vector<double>> H_lambda;
    double N_at_zero = 0.0;
    double fit_residual = 0.0;
    bool low_confidence = false;
    bool truncated = false;  // H underflowed at small radii
    bool monotone_N = true, monotone_all_W = true, monotone_all_H = true;
    std::vector<bool> monotone_W, monotone_H;
};

struct ProfileOptions {
    int sphere_order = 64;       // angular nodes for non-polynomial fields
    int radial_points = 48;      // radial nodes for analytic D
    double monotone_tol = 1e-3;  // relative slack for monotonicity verdicts
    double h_floor = 1e-300;
};

namespace diag_detail {

inline bool monotone_nondecreasing(const std::vector<double>& v, double tol_rel) {
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return true;
    for (size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i + 1] - v[i] < -tol_rel * scale) return false;
    return true;
}

// Grid-field ball energy: cell-wise gradient energy with a continuous
// partial-volume ramp at the sphere (vertex-distance interpolation removes
// the O(h) staircase in N(r)). Accumulates all radii in one pass.
inline void cell_energy_all_radii(const ScalarField& u, const Point& center,
                                  const std::vector<double>& radii, std::vector<double>& out) {
    const Grid& g = *u.grid;
    const int nx = g.nx(), ny = g.ny(), n = g.n();
    const double h = g.h();
    out.assign(radii.size(), 0.0);
    const double rmax = radii.empty() ? 0.0 : radii.back();
    const int n2 = n == 2 ? nx : 1;
    for (int i1 = 0; i1 + 1 < nx; ++i1)
        for (int i2 = 0; i2 < (n == 2 ? nx - 1 : 1); ++i2)
            for (int k = 0; k + 1 < ny; ++k) {
                // distances from profile center to nearest/farthest cell vertex
                double cx = g.x(i1) + 0.5 * h - center[0];
                double cy2 = n == 2 ? g.x(i2) + 0.5 * h - center[1] : 0.0;
                double cz = g.y(k) + 0.5 * h - center[2];
                double half = 0.5 * h;
                double dmin = 0.0, dmax = 0.0;
                {
                    double ax = std::abs(cx), ay = n == 2 ? std::abs(cy2) : 0.0, az = std::abs(cz);
                    double mnx = std::max(0.0, ax - half), mny = std::max(0.0, ay - half),
                           mnz = std::max(0.0, az - half);
                    double mxx = ax + half, mxy = n == 2 ? ay + half : 0.0, mxz = az + half;
                    dmin = std::sqrt(mnx * mnx + mny * mny + mnz * mnz);
                    dmax = std::sqrt(mxx * mxx + mxy * mxy + mxz * mxz);
                }
                if (dmin > rmax) continue;
                // mirror cell below the plane contributes equally (evenness)
                double cellw = 2.0 * std::pow(h, static_cast<double>(n)) * g.face_weight_y(k);
                double gx = 0.0, gy = 0.0, gz = 0.0;
                if (n == 1) {
                    double v00 = u.at(i1, 0, k), v10 = u.at(i1 + 1, 0, k);
                    double v01 = u.at(i1, 0, k + 1), v11 = u.at(i1 + 1, 0, k + 1);
                    gx = 0.5 * ((v10 - v00) + (v11 - v01)) / h;
                    gz = 0.5 * ((v01 - v00) + (v11 - v10)) / h;
                } else {
                    double s_x = 0, s_y = 0, s_z = 0;
                    for (int dj = 0; dj <= 1; ++dj)
                        for (int dk = 0; dk <= 1; ++dk)
                            s_x += u.at(i1 + 1, i2 + dj, k + dk) - u.at(i1, i2 + dj, k + dk);
                    for (int di = 0; di <= 1; ++di)
                        for (int dk = 0; dk <= 1; ++dk)
                            s_y += u.at(i1 + di, i2 + 1, k + dk) - u.at(i1 + di, i2, k + dk);
                    for (int di = 0; di <= 1; ++di)
                        for (int dj = 0; dj <= 1; ++dj)
                            s_z += u.at(i1 + di, i2 + dj, k + 1) - u.at(i1 + di, i2 + dj, k);
                    gx = 0.25 * s_x / h;
                    gy = 0.25 * s_y / h;
                    gz = 0.25 * s_z / h;
                }
                double e = cellw * (gx * gx + gy * gy + gz * gz);
                for (size_t ri = 0; ri < radii.size(); ++ri) {
                    double r = radii[ri];
                    double frac;
                    if (r >= dmax)
                        frac = 1.0;
                    else if (r <= dmin)
                        frac = 0.0;
                    else
                        frac = (r - dmin) / (dmax - dmin);
                    if (frac > 0.0) out[ri] += frac * e;
                }
            }
    (void)n2;
}

} // namespace diag_detail

// Sphere mass H(r) = int_{dB_1} u(center + r z)^2 |z_y|^a dsigma.
inline double sphere_mass(const FieldRef& u, const Point& center, double r,
                          const std::vector<quad::SphereNode>& rule) {
    double s = 0.0;
    for (const auto& nd : rule) {
        Point p = center + r * nd.z;
        double v = u.value(p);
        s += nd.w * v * v;
    }
    return s;
}

inline FrequencyProfile profile(const FieldRef& u, const Point& center, std::vector<double> radii,
                                const std::vector<double>& lambdas = {},
                                const ProfileOptions& opt = {}) {
    if (radii.empty()) throw std::invalid_argument("profile: need at least one radius");
    if (std::abs(center[2]) > 1e-14) throw std::invalid_argument("profile: center must lie on the thin space");
    if (u.grid) {
        double margin = 1.0 - std::max({std::abs(center[0]), u.n == 2 ? std::abs(center[1]) : 0.0});
        if (radii.back() > margin + 1e-12)
            throw std::invalid_argument("profile: largest radius leaves the grid domain");
    }

    FrequencyProfile out;
    out.center = center;
    out.lambdas = lambdas;

    auto sph = quad::sphere_rule(u.n, u.a, opt.sphere_order);
    std::vector<quad::BallNode> ball;
    if (!u.grid) {
        if (!u.gradient)
            throw std::invalid_argument("profile: analytic field needs a gradient for D(r)");
        ball = quad::ball_rule(u.n, u.a, opt.sphere_order, opt.radial_points);
    }

    std::vector<double> Draw;
    if (u.grid) diag_detail::cell_energy_all_radii(*u.grid, center, radii, Draw);

    for (size_t ri = 0; ri < radii.size(); ++ri) {
        double r = radii[ri];
        double H = sphere_mass(u, center, r, sph);
        if (H < opt.h_floor) {
            out.truncated = true;
            break;
        }
        double Draw_r;
        if (u.grid) {
            Draw_r = Draw[ri];
        } else {
            double s = 0.0;
            for (const auto& nd : ball) {
                Point p = center + r * nd.z;
                Point gr = u.gradient(p);
                s += nd.w * (gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2]);
            }
            Draw_r = s * std::pow(r, u.n + 1 + u.a);
        }
        double Dn = Draw_r / std::pow(r, u.n + u.a - 1);
        out.radii.push_back(r);
        out.H.push_back(H);
        out.D.push_back(Dn);
        out.N.push_back(Dn / H);
    }

    for (double lam : lambdas) {
        std::vector<double> W, Hl;
        double wscale = 0.0;  // scale of the terms composing W, before cancellation
        for (size_t i = 0; i < out.radii.size(); ++i) {
            double r2l = std::pow(out.radii[i], 2.0 * lam);
            W.push_back((out.D[i] - lam * out.H[i]) / r2l);
            Hl.push_back(out.H[i] / r2l);
            wscale = std::max(wscale, (std::abs(out.D[i]) + std::abs(lam) * out.H[i]) / r2l);
        }
        bool wmono = true;
        for (size_t i = 0; i + 1 < W.size(); ++i)
            if (W[i + 1] - W[i] < -opt.monotone_tol * wscale) wmono = false;
        out.monotone_W.push_back(wmono);
        out.monotone_H.push_back(diag_detail::monotone_nondecreasing(Hl, opt.monotone_tol));
        out.W_lambda.push_back(std::move(W));
        out.H_lambda.push_back(std::move(Hl));
    }
    out.monotone_N = diag_detail::monotone_nondecreasing(out.N, opt.monotone_tol);
    out.monotone_all_W = true;
    for (bool b : out.monotone_W) out.monotone_all_W = out.monotone_all_W && b;
    out.monotone_all_H = true;
    for (bool b : out.monotone_H) out.monotone_all_H = out.monotone_all_H && b;

    // N(0+) by least squares N(r) ~ N0 + c r^2 over the smallest radii;
    // the expansion of the frequency of a graded field is N0 + O(r^2).
    size_t m = std::min<size_t>(5, out.N.size());
    if (m >= 2) {
        double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < m; ++i) {
            double X = out.radii[i] * out.radii[i], Y = out.N[i];
            sw += 1;
            sx += X;
            sy += Y;
            sxx += X * X;
            sxy += X * Y;
        }
        double det = sw * sxx - sx * sx;
        if (std::abs(det) > 1e-30) {
            double c = (sw * sxy - sx * sy) / det;
            out.N_at_zero = (sy - c * sx) / sw;
            double res = 0.0;
            for (size_t i = 0; i < m; ++i) {
                double X = out.radii[i] * out.radii[i];
                double e = out.N[i] - (out.N_at_zero + c * X);
                res += e * e;
            }
            out.fit_residual = std::sqrt(res / m);
        } else {
            out.N_at_zero = out.N.front();
        }
    } else if (!out.N.empty()) {
        out.N_at_zero = out.N.front();
        out.low_confidence = true;
    }
    if (!out.monotone_N && out.fit_residual > 1e-2) out.low_confidence = true;
    return out;
}

// Geometric radius schedule r0 * ratio^k, capped.
inline std::vector<double> default_radii(double r0 = 0.04, double ratio = 1.25, double cap = 0.8) {
    std::vector<double> r;
    for (double x = r0; x <= cap * (1.0 + 1e-12); x *= ratio) r.push_back(x);
    return r;
}

inline double frequency_at_zero(const FrequencyProfile& p) { return p.N_at_zero; }

// Weighted flux of the field through shrinking circles in the (eta, y)-plane
// around a thin-space point (eta a unit thin-space direction). The weighted
// angular means m(rho) at radii (eps, 2 eps, 4 eps) are fit to the model
// c0 + c1 rho^{-a} + c2 rho^2, which isolates the capacitary component
// exactly and rejects the smooth even part; the flux is (-a) J_a c1.
// Meaningful for a < 0.
inline double transverse_circle_flux(const FieldRef& u, const Point& base,
                                     const std::array<double, 2>& eta, double eps,
                                     int angular_order = 48) {
    const double a = u.a;
    auto rule = quad::gauss_jacobi(angular_order, 0.5 * (a - 1.0), 0.5 * (a - 1.0));
    auto mean = [&](double rho) {
        double s = 0.0;
        for (int i = 0; i < rule.size(); ++i) {
            double t = rule.x[i];
            double yy = rho * std::sqrt(std::max(0.0, 1.0 - t * t));
            Point p{base[0] + rho * t * eta[0], base[1] + rho * t * eta[1], yy};
            s += rule.w[i] * u.value(p);
        }
        return 2.0 * s;
    };
    double m1 = mean(eps), m2 = mean(2.0 * eps), m3 = mean(4.0 * eps);
    double d1 = m1 - m2, d2 = m2 - m3;
    double ea = std::pow(eps, -a), q = std::pow(2.0, -a);
    return (-a) * (4.0 * d1 - d2) / (ea * (1.0 - q) * (4.0 - q));
}

struct WeissVerdict {
    bool nonnegative = true;      // W_kappa(r) >= -tol on the sampled radii
    bool identically_zero = true; // |W_kappa| below tolerance everywhere
    bool monotone = true;
    double min_value = 0.0;
    double max_abs = 0.0;
};

inline WeissVerdict weiss_nonneg_check(const FieldRef& u, double kappa, const Point& center,
                                       const std::vector<double>& radii, double tol = 1e-10,
                                       const ProfileOptions& opt = {}) {
    auto prof = profile(u, center, radii, {kappa}, opt);
    WeissVerdict v;
    const auto& W = prof.W_lambda[0];
    double scale = 0.0;
    for (size_t i = 0; i < W.size(); ++i) scale = std::max(scale, std::abs(prof.D[i]) + std::abs(prof.H[i]));
    for (double w : W) {
        v.min_value = std::min(v.min_value, w);
        v.max_abs = std::max(v.max_abs, std::abs(w));
        if (w < -tol * std::max(1.0, scale)) v.nonnegative = false;
        if (std::abs(w) > tol * std::max(1.0, scale)) v.identically_zero = false;
    }
    v.monotone = diag_detail::monotone_nondecreasing(W, opt.monotone_tol);
    return v;
}

} // namespace fblab

#endif
