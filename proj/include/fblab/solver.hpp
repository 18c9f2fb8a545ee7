// Projected SOR solver for the weighted Dirichlet energy with a unilateral
// constraint on the thin plane {y = 0} or the very thin line {x_n = y = 0}.
//
// The discrete energy on the half-domain is
//   E(u) = sum_k Vx_k h^{n-2} sum_{x-edges @ level k} (du)^2
//        + sum_k  G_k h^n     sum_{nodes}           (u_{k+1} - u_k)^2,
// where G_k = 1 / int_{y_k}^{y_{k+1}} y^{-a} dy reproduces the weighted flux
// of the one-dimensional a-harmonic profile between levels exactly (so the
// homogeneous solution c|y|^{1-a} solves the scheme nodally), and Vx_k is the
// exact dual-cell integral of y^a, except at k = 0 where
//   Vx_0 = (1-a) h^{1+a} / (2(1+a))
// is the unique choice making the plane row consistent for smooth even
// a-harmonic functions under the conjugate transverse coupling. Both reduce
// to the unweighted 5/7-point stencil at a = 0.
//
// LCP sign convention: row(u) >= 0 at constrained nodes (super-a-harmonicity),
// row(u) = 0 at free nodes, (u - phi) * row(u) = 0.
#ifndef FBLAB_SOLVER_HPP
#define FBLAB_SOLVER_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fblab/grid.hpp"
#include "fblab/poly.hpp"

namespace fblab {

enum class ConstraintSet { thin, very_thin };

struct ObstacleSpec {
    ConstraintSet constraint_set = ConstraintSet::thin;
    // Obstacle on the constraint set; evaluated at points with y = 0.
    std::function<double(const Point&)> obstacle;
    // Dirichlet data on the cube boundary, even in y.
    std::function<double(const Point&)> boundary;

    double obstacle_at(const Point& p) const { return obstacle ? obstacle(p) : 0.0; }
};

struct SolveOptions {
    double tol = -1.0;  // < 0: default 1e-8 for n=1, 1e-6 for n=2
    int max_sweeps = 50000;
    double omega = 1.8;
    bool record_energy = false;
    int check_interval = 32;

    double tol_for(int n) const { return tol > 0 ? tol : (n == 1 ? 1e-8 : 1e-6); }
};

struct SolveReport {
    bool converged = false;
    int sweeps = 0;
    double last_update = 0.0;
    double lcp_residual = 0.0;  // discrete KKT residual in update units
    std::vector<double> energy_history;
};

namespace solver_detail {

struct Stencil {
    std::vector<double> vx;    // per-level x-edge weight
    std::vector<double> cyup;  // h^2 * G_k
    std::vector<double> diag;  // row diagonal per level
    int n = 1;

    explicit Stencil(const Grid& g) : n(g.n()) {
        const double h = g.h(), a = g.a();
        const int ny = g.ny();
        vx.resize(ny);
        cyup.resize(ny, 0.0);
        diag.resize(ny);
        for (int k = 0; k < ny; ++k) vx[k] = g.dual_weight_y(k);
        vx[0] = (1.0 - a) * std::pow(h, 1.0 + a) / (2.0 * (1.0 + a));
        for (int k = 0; k + 1 < ny; ++k) cyup[k] = h * h * g.coupling_y(k);
        for (int k = 0; k < ny; ++k) {
            double d = 2.0 * n * vx[k];
            if (k + 1 < ny) d += cyup[k];
            if (k > 0) d += cyup[k - 1];
            diag[k] = d;
        }
    }
};

// Node classification: 0 free interior, 1 Dirichlet, 2 constrained.
inline std::vector<uint8_t> classify(const Grid& g, ConstraintSet cs) {
    std::vector<uint8_t> kind(g.node_count(), 0);
    const int nx = g.nx(), ny = g.ny();
    auto mark = [&](int i1, int i2, int k, uint8_t v) { kind[g.index(i1, i2, k)] = v; };
    const int n2 = g.n() == 2 ? nx : 1;
    for (int i1 = 0; i1 < nx; ++i1)
        for (int i2 = 0; i2 < n2; ++i2)
            for (int k = 0; k < ny; ++k)
                if (k == ny - 1 || g.on_x_boundary(i1, g.n() == 2 ? i2 : g.mid()))
                    mark(i1, i2, k, 1);
    if (cs == ConstraintSet::thin) {
        for (size_t f : g.thin_mask())
            if (kind[f] == 0) kind[f] = 2;
    } else {
        for (size_t f : g.verythin_mask())
            if (kind[f] == 0) kind[f] = 2;
    }
    return kind;
}

} // namespace solver_detail

// Discrete weighted Dirichlet energy (full domain: the stored half doubled).
inline double discrete_energy(const ScalarField& u) {
    const Grid& g = *u.grid;
    solver_detail::Stencil st(g);
    const double h = g.h();
    const int nx = g.nx(), ny = g.ny();
    const double hx = std::pow(h, g.n() - 2.0);
    double e = 0.0;
    const int n2 = g.n() == 2 ? nx : 1;
    for (int i1 = 0; i1 < nx; ++i1)
        for (int i2 = 0; i2 < n2; ++i2)
            for (int k = 0; k < ny; ++k) {
                double uc = u.values[g.index(i1, i2, k)];
                if (i1 + 1 < nx) {
                    double d = u.values[g.index(i1 + 1, i2, k)] - uc;
                    e += st.vx[k] * hx * d * d;
                }
                if (g.n() == 2 && i2 + 1 < nx) {
                    double d = u.values[g.index(i1, i2 + 1, k)] - uc;
                    e += st.vx[k] * hx * d * d;
                }
                if (k + 1 < ny) {
                    double d = u.values[g.index(i1, i2, k + 1)] - uc;
                    e += g.coupling_y(k) * std::pow(h, static_cast<double>(g.n())) * d * d;
                }
            }
    return 2.0 * e;
}

inline ScalarField solve(const Grid& g, const ObstacleSpec& spec, const SolveOptions& opt = {},
                         SolveReport* report = nullptr) {
    if (!spec.boundary) throw std::invalid_argument("solve: boundary data required");
    if (spec.constraint_set == ConstraintSet::very_thin && g.a() >= 0.0)
        throw std::invalid_argument("solve: very thin constraint requires a < 0 (the line has zero "
                                    "a-harmonic capacity otherwise)");

    solver_detail::Stencil st(g);
    auto kind = solver_detail::classify(g, spec.constraint_set);
    const int nx = g.nx(), ny = g.ny();
    const int n2 = g.n() == 2 ? nx : 1;

    ScalarField u(g);
    std::vector<double> phi(g.node_count(), -std::numeric_limits<double>::infinity());
    for (int i1 = 0; i1 < nx; ++i1)
        for (int i2 = 0; i2 < n2; ++i2)
            for (int k = 0; k < ny; ++k) {
                size_t f = g.index(i1, i2, k);
                Point p = g.n() == 1 ? Point{g.x(i1), 0.0, g.y(k)} : Point{g.x(i1), g.x(i2), g.y(k)};
                u.values[f] = spec.boundary(p);
                if (kind[f] == 2) phi[f] = spec.obstacle_at(p);
            }

    // Admissibility of the boundary data on the closure of the constraint set.
    {
        auto check = [&](const Point& p) {
            double gv = spec.boundary(p), ov = spec.obstacle_at(p);
            if (gv < ov - 1e-12)
                throw std::invalid_argument("solve: boundary data dips below the obstacle on the "
                                            "constraint set (inadmissible)");
        };
        if (spec.constraint_set == ConstraintSet::thin) {
            if (g.n() == 1) {
                check({-1.0, 0.0, 0.0});
                check({1.0, 0.0, 0.0});
            } else {
                for (int i = 0; i < nx; ++i) {
                    check({g.x(i), -1.0, 0.0});
                    check({g.x(i), 1.0, 0.0});
                    check({-1.0, g.x(i), 0.0});
                    check({1.0, g.x(i), 0.0});
                }
            }
        } else if (g.n() == 2) {
            check({-1.0, 0.0, 0.0});
            check({1.0, 0.0, 0.0});
        }
    }

    for (size_t f = 0; f < u.values.size(); ++f)
        if (kind[f] == 2 && u.values[f] < phi[f]) u.values[f] = phi[f];

    const double tol = opt.tol_for(g.n());
    const double omega = opt.omega;
    const size_t sy = 1, sx1 = g.n() == 1 ? static_cast<size_t>(ny) : static_cast<size_t>(nx) * ny;
    const size_t sx2 = static_cast<size_t>(ny);

    SolveReport rep;
    double* v = u.values.data();
    auto row_residual = [&](size_t f, int k) -> double {
        double uc = v[f];
        double r = 0.0;
        r += st.vx[k] * (2.0 * uc - v[f - sx1] - v[f + sx1]);
        if (g.n() == 2) r += st.vx[k] * (2.0 * uc - v[f - sx2] - v[f + sx2]);
        if (k + 1 < ny) r += st.cyup[k] * (uc - v[f + sy]);
        if (k > 0) r += st.cyup[k - 1] * (uc - v[f - sy]);
        return r;
    };

    int sweep = 0;
    bool converged = false;
    for (sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        double max_update = 0.0;
        for (int i1 = 1; i1 < nx - 1; ++i1) {
            for (int i2 = (g.n() == 2 ? 1 : 0); i2 < (g.n() == 2 ? nx - 1 : 1); ++i2) {
                size_t base = g.index(i1, i2, 0);
                for (int k = 0; k < ny - 1; ++k) {
                    size_t f = base + k;
                    if (kind[f] == 1) continue;
                    double r = row_residual(f, k);
                    double unew = v[f] - omega * r / st.diag[k];
                    if (kind[f] == 2 && unew < phi[f]) unew = phi[f];
                    double d = std::abs(unew - v[f]);
                    if (d > max_update) max_update = d;
                    v[f] = unew;
                }
            }
        }
        if (opt.record_energy) rep.energy_history.push_back(discrete_energy(u));
        rep.last_update = max_update;
        if (max_update < tol && (sweep % opt.check_interval == 0 || max_update < 0.1 * tol)) {
            // Discrete complementarity residual, in update units.
            double res = 0.0;
            for (int i1 = 1; i1 < nx - 1; ++i1)
                for (int i2 = (g.n() == 2 ? 1 : 0); i2 < (g.n() == 2 ? nx - 1 : 1); ++i2) {
                    size_t base = g.index(i1, i2, 0);
                    for (int k = 0; k < ny - 1; ++k) {
                        size_t f = base + k;
                        if (kind[f] == 1) continue;
                        double r = row_residual(f, k) / st.diag[k];
                        if (kind[f] == 0) {
                            res = std::max(res, std::abs(r));
                        } else {
                            res = std::max(res, std::max(0.0, -r));
                            res = std::max(res, std::abs((v[f] - phi[f]) * r));
                        }
                    }
                }
            rep.lcp_residual = res;
            if (res < 10.0 * tol) {
                converged = true;
                break;
            }
        }
    }
    rep.converged = converged;
    rep.sweeps = std::min(sweep, opt.max_sweeps);
    if (report) *report = rep;
    return u;
}

// ---------------------------------------------------------------------------
// KKT / complementarity report.
struct FluxSample {
    Point where;
    double value;
};

struct KktReport {
    double max_obstacle_violation = 0.0;
    double max_positive_flux = 0.0;
    double max_complementarity = 0.0;
    // max |L_a u| / |y|^a proxy over rows away from the constraint set
    // (y >= 8h; the first layers sit in the plane's influence zone, whose
    // information is carried by flux_density instead)
    double interior_residual = 0.0;
    std::vector<FluxSample> flux_density;
};

// Weighted transverse flux density 2 lim y^a d_y u at a thin node. The plane
// row is the discrete integral of -L_a u over the node's dual cell, so
// -2 row / h^2 is the measure density; it is exact on the homogeneous profile
// c |y|^{1-a} and carries the sign of the discrete complementarity system.
inline double thin_flux_from_row(const Grid& g, double row) {
    return -2.0 * row / (g.h() * g.h());
}

// Very thin flux density at x' from weighted angular means on circles of
// radii (eps, 2 eps, 4 eps) in the (x_n, y) plane. Fitting the means to
// c0 + c1 rho^{-a} + c2 rho^2 isolates the capacitary component exactly and
// rejects the smooth even part; the flux is (-a) J_a c1.
inline double verythin_flux_two_circle(const std::function<double(const Point&)>& field,
                                       double x1, double eps, double a, int angular_order = 48) {
    static thread_local std::vector<double> tx, tw;
    static thread_local double cached_a = 2.0;
    static thread_local int cached_m = -1;
    if (cached_a != a || cached_m != angular_order) {
        auto r = quad::gauss_jacobi(angular_order, 0.5 * (a - 1.0), 0.5 * (a - 1.0));
        tx = r.x;
        tw = r.w;
        cached_a = a;
        cached_m = angular_order;
    }
    auto mean = [&](double rho) {
        double s = 0.0;
        for (size_t i = 0; i < tx.size(); ++i) {
            double t = tx[i];
            double xn = rho * t, yy = rho * std::sqrt(std::max(0.0, 1.0 - t * t));
            s += tw[i] * field({x1, xn, yy});
        }
        return 2.0 * s;  // both signs of y by evenness
    };
    double d1 = mean(eps) - mean(2.0 * eps), d2 = mean(2.0 * eps) - mean(4.0 * eps);
    double q = std::pow(2.0, -a);
    return (-a) * (4.0 * d1 - d2) / (std::pow(eps, -a) * (1.0 - q) * (4.0 - q));
}

inline KktReport kkt_report(const ScalarField& u, const ObstacleSpec& spec) {
    const Grid& g = *u.grid;
    solver_detail::Stencil st(g);
    auto kind = solver_detail::classify(g, spec.constraint_set);
    const int nx = g.nx(), ny = g.ny();
    KktReport out;

    const size_t sy = 1, sx1 = g.n() == 1 ? static_cast<size_t>(ny) : static_cast<size_t>(nx) * ny;
    const size_t sx2 = static_cast<size_t>(ny);
    const double* v = u.values.data();
    const double h = g.h();

    auto row_residual = [&](size_t f, int k) -> double {
        double uc = v[f];
        double r = st.vx[k] * (2.0 * uc - v[f - sx1] - v[f + sx1]);
        if (g.n() == 2) r += st.vx[k] * (2.0 * uc - v[f - sx2] - v[f + sx2]);
        if (k + 1 < ny) r += st.cyup[k] * (uc - v[f + sy]);
        if (k > 0) r += st.cyup[k - 1] * (uc - v[f - sy]);
        return r;
    };

    const int kmin = std::min(8, std::max(1, ny / 4));
    for (int i1 = 1; i1 < nx - 1; ++i1)
        for (int i2 = (g.n() == 2 ? 1 : 0); i2 < (g.n() == 2 ? nx - 1 : 1); ++i2) {
            size_t base = g.index(i1, i2, 0);
            for (int k = kmin; k < ny - 1; ++k) {
                size_t f = base + k;
                out.interior_residual =
                    std::max(out.interior_residual, std::abs(row_residual(f, k)) / (h * h * st.vx[k]));
            }
            // plane nodes that are not part of the constraint set are interior too
            if (kind[base] == 0)
                out.interior_residual =
                    std::max(out.interior_residual, std::abs(row_residual(base, 0)) / (h * h * st.vx[0]));
        }

    std::vector<size_t> cs = spec.constraint_set == ConstraintSet::thin ? g.thin_mask() : g.verythin_mask();
    std::function<double(const Point&)> interp = [&u](const Point& p) { return u.interp(p); };
    for (size_t f : cs) {
        Point p = g.coords(f);
        double phi = spec.obstacle_at(p);
        double flux;
        if (spec.constraint_set == ConstraintSet::thin) {
            flux = thin_flux_from_row(g, row_residual(f, 0));
        } else {
            flux = verythin_flux_two_circle(interp, p[0], 2.0 * h, g.a());
        }
        out.flux_density.push_back({p, flux});
        out.max_obstacle_violation = std::max(out.max_obstacle_violation, phi - v[f]);
        out.max_positive_flux = std::max(out.max_positive_flux, flux);
        out.max_complementarity = std::max(out.max_complementarity, std::abs((v[f] - phi) * flux));
    }
    out.max_obstacle_violation = std::max(out.max_obstacle_violation, 0.0);
    out.max_positive_flux = std::max(out.max_positive_flux, 0.0);
    return out;
}

// Solve for the residual v = u - p directly, with the obstacle shifted by -p.
// The base polynomial must belong to the admissible blow-up cone.
inline ScalarField residual_solve(const Grid& g, const ObstacleSpec& spec, const MultiPoly& base,
                                  const SolveOptions& opt = {}, SolveReport* report = nullptr) {
    int kappa = base.homogeneity();
    auto chk = is_in_P_kappa(base, kappa, g.a(), g.n());
    if (!chk.member) {
        std::string msg = "residual_solve: base polynomial rejected:";
        for (const auto& s : chk.failures) msg += " " + s + ";";
        throw std::invalid_argument(msg);
    }
    ObstacleSpec shifted = spec;
    auto base_copy = base;
    auto obstacle = spec.obstacle;
    shifted.obstacle = [obstacle, base_copy](const Point& p) {
        double phi = obstacle ? obstacle(p) : 0.0;
        return phi - base_copy.eval(p);
    };
    auto bdata = spec.boundary;
    shifted.boundary = [bdata, base_copy](const Point& p) { return bdata(p) - base_copy.eval(p); };
    return solve(g, shifted, opt, report);
}

} // namespace fblab

#endif
