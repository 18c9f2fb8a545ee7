// Extraction and classification of first and second blow-ups at candidate
// singular points: the leading homogeneous polynomial p_star of even order
// kappa, the next-order homogeneity lambda_star of v = u - p_star, the
// second blow-up profile q (polynomial when the fit is a-harmonic, otherwise
// a candidate homogeneous solution of the codimension-two problem), the
// spherical orthogonality relations between q and the admissible cone, and
// the three conditions for a clean (kappa+1)-order next term.
#ifndef FBLAB_BLOWUP_HPP
#define FBLAB_BLOWUP_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fblab/diagnostics.hpp"
#include "fblab/poly.hpp"

namespace fblab {

namespace blowup_detail {

// Dense SPD solve by Cholesky; dimensions here are at most kappa+2.
inline std::vector<double> spd_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < j; ++k) A[j][j] -= A[j][k] * A[j][k];
        if (A[j][j] <= 0.0) throw std::runtime_error("spd_solve: matrix not positive definite");
        A[j][j] = std::sqrt(A[j][j]);
        for (int i = j + 1; i < n; ++i) {
            for (int k = 0; k < j; ++k) A[i][j] -= A[i][k] * A[j][k];
            A[i][j] /= A[j][j];
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) b[i] -= A[i][k] * b[k];
        b[i] /= A[i][i];
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int k = i + 1; k < n; ++k) b[i] -= A[k][i] * b[k];
        b[i] /= A[i][i];
    }
    return b;
}

} // namespace blowup_detail

// Projection of the rescaled trace z -> field(center + rho z)/rho^degree onto
// the space of degree-homogeneous even a-harmonic polynomials, in the
// |y|^a-weighted spherical inner product. Returns the fit and its relative
// L2(dB_1) residual.
struct HomogeneousFit {
    MultiPoly poly;
    double rel_residual = 0.0;
    double trace_norm = 0.0;  // L2(dB_1,|y|^a) norm of the rescaled trace
};

inline HomogeneousFit fit_homogeneous(const FieldRef& u, const Point& center, double rho, int degree,
                                      int sphere_order = 64) {
    auto basis = harmonic_basis(u.n, degree, u.a);
    const int m = static_cast<int>(basis.size());
    auto rule = quad::sphere_rule(u.n, u.a, std::max(sphere_order, 2 * degree + 6));
    std::vector<std::vector<double>> G(m, std::vector<double>(m, 0.0));
    std::vector<double> b(m, 0.0);
    double tracesq = 0.0;
    std::vector<double> bv(m);
    for (const auto& nd : rule) {
        double tv = u.value(center + rho * nd.z) / std::pow(rho, degree);
        for (int i = 0; i < m; ++i) bv[i] = basis[i].eval(nd.z);
        for (int i = 0; i < m; ++i) {
            b[i] += nd.w * tv * bv[i];
            for (int j = i; j < m; ++j) G[i][j] += nd.w * bv[i] * bv[j];
        }
        tracesq += nd.w * tv * tv;
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j) G[i][j] = G[j][i];
    auto c = blowup_detail::spd_solve(G, b);
    MultiPoly fit;
    for (int i = 0; i < m; ++i) fit = fit + c[i] * basis[i];
    // residual^2 = |trace|^2 - 2 c.b + c.G c = |trace|^2 - c.b for the solved system
    double cb = 0.0;
    for (int i = 0; i < m; ++i) cb += c[i] * b[i];
    double res2 = std::max(0.0, tracesq - cb);
    HomogeneousFit out;
    out.poly = fit;
    out.trace_norm = std::sqrt(std::max(tracesq, 0.0));
    out.rel_residual = out.trace_norm > 0 ? std::sqrt(res2) / out.trace_norm : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
struct FirstBlowup {
    bool ok = false;
    std::string notice;  // set when the point is not singular-like
    int kappa = 0;
    MultiPoly p_star;
    double freq_estimate = 0.0;
    double fit_residual = 0.0;
    bool low_confidence = false;
};

struct BlowupOptions {
    double rho = 0.0;          // fit radius; 0 -> automatic
    double snap_tol = 0.1;     // distance to an even integer accepted for kappa
    double lambda_snap = 0.1;  // distance to an integer accepted for lambda_star
    double noise_floor = 1e-12;
    uint64_t seed = 0;  // for the sampled cone-membership certificate
    std::vector<double> freq_radii;  // radii for the frequency estimate; empty -> default
    // trace residual above this marks the fit low-confidence; finite-radius
    // fits legitimately carry next-order content that the two-radius
    // extrapolation removes, so only order-one residuals are suspicious
    double fit_warn = 0.35;
};

inline double auto_rho(const FieldRef& u, const Point& center) {
    double margin = 1.0 - std::max({std::abs(center[0]), u.n == 2 ? std::abs(center[1]) : 0.0});
    double rho = 0.15 * margin;
    if (u.grid) {
        rho = std::max(rho, 8.0 * u.grid->grid->h());
        // the fit samples spheres up to 2 rho; keep them inside the grid
        rho = std::min(rho, 0.45 * margin);
    }
    return rho;
}

inline FirstBlowup first_blowup(const FieldRef& u, const Point& center, const BlowupOptions& opt = {}) {
    FirstBlowup out;
    std::vector<double> radii = opt.freq_radii;
    if (radii.empty()) {
        double cap = 1.0 - std::max({std::abs(center[0]), u.n == 2 ? std::abs(center[1]) : 0.0});
        double r0 = u.grid ? std::max(0.04, 6.0 * u.grid->grid->h()) : 0.02;
        radii = default_radii(r0, 1.25, 0.8 * cap);
    }
    auto prof = profile(u, center, radii);
    out.freq_estimate = prof.N_at_zero;
    double nearest = 2.0 * std::round(out.freq_estimate / 2.0);
    if (nearest < 2.0 || std::abs(out.freq_estimate - nearest) > opt.snap_tol) {
        out.notice = "frequency " + std::to_string(out.freq_estimate) +
                     " is not near a positive even integer; not a singular point of even order";
        return out;
    }
    out.kappa = static_cast<int>(nearest);

    double rho = opt.rho > 0 ? opt.rho : auto_rho(u, center);
    auto f1 = fit_homogeneous(u, center, rho, out.kappa);
    auto f2 = fit_homogeneous(u, center, 2.0 * rho, out.kappa);
    // one Richardson step assuming an O(rho) coefficient drift
    out.p_star = 2.0 * f1.poly - f2.poly;
    out.fit_residual = f1.rel_residual;
    auto cone = is_in_P_kappa(out.p_star, out.kappa, u.a, u.n, 10000, opt.seed);
    if (!cone.member) {
        // tiny negative parts can be fit noise; report but keep the polynomial
        out.low_confidence = true;
        out.notice = "leading polynomial failed cone membership: " +
                     (cone.failures.empty() ? std::string("?") : cone.failures.front());
    }
    if (out.fit_residual > opt.fit_warn) out.low_confidence = true;
    out.ok = true;
    return out;
}

// ---------------------------------------------------------------------------
enum class SecondCase { polynomial, very_thin_solution, degenerate, unclassified };

inline const char* to_string(SecondCase c) {
    switch (c) {
        case SecondCase::polynomial: return "polynomial";
        case SecondCase::very_thin_solution: return "very_thin_solution";
        case SecondCase::degenerate: return "degenerate";
        default: return "unclassified";
    }
}

struct OrthogonalityReport {
    double inner_p_star = 0.0;                 // <q, p_star>_a
    std::vector<double> probe_inners;          // <q, p_i>_a over the documented probe set
    std::vector<std::string> probe_names;
    bool probes_nonpositive = true;
};

struct BlowupReport {
    Point center{0, 0, 0};
    int kappa = 0;
    MultiPoly p_star;
    int spine_dim = 0;
    SpineBasis spine_basis;
    double lambda_star = 0.0;
    double lambda_err = 0.0;  // jackknife spread of the log-log slope
    MultiPoly q;              // normalized second blow-up (polynomial case)
    MultiPoly q_scaled;       // H_{lambda}(0+)^{1/2} q, the next-term candidate
    SecondCase kind = SecondCase::unclassified;
    double poly_fit_residual = 0.0;
    double harmonicity_residual = 0.0;
    double h_lambda_limit = 0.0;  // extrapolated H_lambda(0+, v)
    OrthogonalityReport orthogonality;
    std::array<bool, 3> nxt_flags{false, false, false};
    std::string notes;
};

// Fixed probe subset of the admissible cone of order kappa: the radial power,
// the axis powers, and the diagonal powers. The cone inequality <q,p>_a <= 0
// is universal; a finite probe set gives falsifiable necessary checks.
inline std::vector<std::pair<std::string, MultiPoly>> cone_probe_set(int n, int kappa, double a) {
    std::vector<std::pair<std::string, MultiPoly>> probes;
    auto add = [&](const std::string& name, const MultiPoly& pb) {
        probes.emplace_back(name, ext_a(pb, a, n));
    };
    // |x|^kappa
    MultiPoly r2;
    r2.add_term({2, 0, 0}, 1.0);
    if (n == 2) r2.add_term({0, 2, 0}, 1.0);
    MultiPoly rk = MultiPoly::constant(1.0);
    for (int i = 0; i < kappa / 2; ++i) rk = rk * r2;
    add("radial", rk);
    add("axis1", MultiPoly::monomial({kappa, 0, 0}, 1.0));
    if (n == 2) {
        add("axis2", MultiPoly::monomial({0, kappa, 0}, 1.0));
        MultiPoly plus, minus;
        plus.add_term({1, 0, 0}, 1.0);
        plus.add_term({0, 1, 0}, 1.0);
        minus.add_term({1, 0, 0}, 1.0);
        minus.add_term({0, 1, 0}, -1.0);
        MultiPoly pk = MultiPoly::constant(std::pow(2.0, -kappa / 2.0));
        MultiPoly mk = pk;
        for (int i = 0; i < kappa; ++i) {
            pk = pk * plus;
            mk = mk * minus;
        }
        add("diag+", pk);
        add("diag-", mk);
    }
    return probes;
}

// Extrapolate H_lambda(0+, v) by least squares against r^2 over the smallest
// radii (monotone limit of the Monneau mass).
inline double extrapolate_h_lambda(const FieldRef& v, const Point& center, double lambda,
                                   const std::vector<double>& radii, int sphere_order = 64) {
    auto rule = quad::sphere_rule(v.n, v.a, sphere_order);
    size_t m = std::min<size_t>(5, radii.size());
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        double r = radii[i];
        double H = sphere_mass(v, center, r, rule) / std::pow(r, 2.0 * lambda);
        double X = r * r;
        sw += 1;
        sx += X;
        sy += H;
        sxx += X * X;
        sxy += X * H;
    }
    double det = sw * sxx - sx * sx;
    if (std::abs(det) < 1e-30) return sy / sw;
    double c = (sw * sxy - sx * sy) / det;
    return (sy - c * sx) / sw;
}

inline BlowupReport second_blowup(const FieldRef& u, const Point& center, const FirstBlowup& first,
                                  const BlowupOptions& opt = {}) {
    if (!first.ok) throw std::invalid_argument("second_blowup: first blow-up did not succeed");
    BlowupReport rep;
    rep.center = center;
    rep.kappa = first.kappa;
    rep.p_star = first.p_star;
    rep.spine_basis = spine(first.p_star, u.n);
    rep.spine_dim = rep.spine_basis.dim;

    FieldRef v = difference(u, first.p_star, center);
    auto rule = quad::sphere_rule(u.n, u.a, 64);

    // noise floor: |v| on a reference sphere vs |u|
    double rho0 = opt.rho > 0 ? opt.rho : auto_rho(u, center);
    double vnorm = std::sqrt(std::max(0.0, sphere_mass(v, center, rho0, rule)));
    double unorm = std::sqrt(std::max(0.0, sphere_mass(u, center, rho0, rule)));
    if (vnorm < opt.noise_floor * std::max(unorm, 1.0)) {
        rep.kind = SecondCase::degenerate;
        rep.notes = "residual field below noise floor; the field coincides with its leading polynomial";
        return rep;
    }

    // lambda_star from the log-log slope of H(r, v) over a clean window: the
    // lower end respects the grid noise floor, the upper end stretches within
    // the domain margin until enough radii are available
    double margin = 1.0 - std::max({std::abs(center[0]), u.n == 2 ? std::abs(center[1]) : 0.0});
    double hi = std::min(0.3, 0.8 * margin);
    double lo = u.grid ? 4.0 * u.grid->grid->h() * first.kappa : 5e-3;
    std::vector<double> rs;
    for (double r = lo; (r <= hi || rs.size() < 4) && r <= 0.9 * margin; r *= 1.3) rs.push_back(r);
    std::vector<double> lx, ly;
    for (double r : rs) {
        double H = sphere_mass(v, center, r, rule);
        if (H > 1e-280) {
            lx.push_back(std::log(r));
            ly.push_back(0.5 * std::log(H));
        }
    }
    if (lx.size() < 3) {
        rep.kind = SecondCase::degenerate;
        rep.notes = "insufficient usable radii for the homogeneity fit";
        return rep;
    }
    auto slope_of = [](const std::vector<double>& X, const std::vector<double>& Y, size_t skip) {
        double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < X.size(); ++i) {
            if (i == skip) continue;
            sw += 1;
            sx += X[i];
            sy += Y[i];
            sxx += X[i] * X[i];
            sxy += X[i] * Y[i];
        }
        return (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
    };
    rep.lambda_star = slope_of(lx, ly, lx.size());
    double jmin = rep.lambda_star, jmax = rep.lambda_star;
    for (size_t i = 0; i < lx.size(); ++i) {
        double s = slope_of(lx, ly, i);
        jmin = std::min(jmin, s);
        jmax = std::max(jmax, s);
    }
    rep.lambda_err = 0.5 * (jmax - jmin);

    // second blow-up profile at two radii
    double lam_round = std::round(rep.lambda_star);
    bool lam_integer = std::abs(rep.lambda_star - lam_round) <= opt.lambda_snap && lam_round >= 1;
    if (lam_integer) {
        int lam = static_cast<int>(lam_round);
        double rfit = std::min(rho0, 0.45 * margin);
        auto f1 = fit_homogeneous(v, center, rfit, lam);
        auto f2 = fit_homogeneous(v, center, 2.0 * rfit, lam);
        // two regimes: analytic fields carry next-order contamination whose
        // share shrinks toward small radii (Richardson in the pair removes
        // the drift); grid fields are interpolation-noise limited, which
        // shrinks toward large radii where the outer fit alone is best
        bool contamination_regime = f1.rel_residual <= f2.rel_residual;
        MultiPoly qfit = contamination_regime ? 2.0 * f1.poly - f2.poly : f2.poly;
        rep.poly_fit_residual = std::min(f1.rel_residual, f2.rel_residual);
        double qn = sphere_norm(qfit, u.a, u.n);
        if (qn > 0) {
            rep.q = (1.0 / qn) * qfit;
            MultiPoly res = la_residual(rep.q, u.a, u.n);
            rep.harmonicity_residual = res.max_abs_coeff();
        }
        std::vector<double> window(rs);
        if (!contamination_regime) std::reverse(window.begin(), window.end());
        window.resize(std::min<size_t>(5, window.size()));
        std::sort(window.begin(), window.end());
        rep.h_lambda_limit = std::max(0.0, extrapolate_h_lambda(v, center, lam, window));
        rep.q_scaled = std::sqrt(rep.h_lambda_limit) * rep.q;
        // polynomial case when the better trace residual is negligible or the
        // residual pair shows a clear scale trend (a genuinely non-polynomial
        // homogeneous profile is scale-invariant and shows neither)
        double rmin = rep.poly_fit_residual, rmax = std::max(f1.rel_residual, f2.rel_residual);
        bool converging = rmin < 1e-6 || (rmin < 0.75 * rmax && rmin < 0.5);
        if (converging) rep.kind = SecondCase::polynomial;
    }
    if (rep.kind == SecondCase::unclassified && u.a < 0.0 && rep.spine_dim == u.n - 1) {
        if (rep.lambda_star - rep.kappa >= 0.05) {
            rep.kind = SecondCase::very_thin_solution;
            rep.notes = "non-polynomial homogeneity with full-dimensional spine; candidate "
                        "codimension-two solution (residual checks via classify_second_blowup)";
        } else {
            rep.notes = "full-dimensional spine but the measured frequency gap over the leading "
                        "order is below the expected positive margin";
        }
    }

    // orthogonality of the normalized trace against p_star and the probe cone
    {
        // use the trace at rho0 (normalized) when no polynomial fit is available
        MultiPoly qq = rep.q;
        if (qq.empty() && !rep.p_star.empty()) {
            // sampled profile: compute inner products by direct quadrature
            double inner_ps = 0.0, qnorm2 = 0.0;
            for (const auto& nd : rule) {
                double tv = v.value(center + rho0 * nd.z);
                inner_ps += nd.w * tv * rep.p_star.eval(nd.z);
                qnorm2 += nd.w * tv * tv;
            }
            double qn = std::sqrt(std::max(qnorm2, 1e-300));
            rep.orthogonality.inner_p_star = inner_ps / qn;
            for (auto& [name, pb] : cone_probe_set(u.n, rep.kappa, u.a)) {
                double ip = 0.0;
                for (const auto& nd : rule) {
                    double tv = v.value(center + rho0 * nd.z);
                    ip += nd.w * tv * pb.eval(nd.z);
                }
                ip /= qn;
                rep.orthogonality.probe_inners.push_back(ip);
                rep.orthogonality.probe_names.push_back(name);
                if (ip > 1e-6) rep.orthogonality.probes_nonpositive = false;
            }
        } else if (!qq.empty()) {
            rep.orthogonality.inner_p_star = sphere_inner(qq, rep.p_star, u.a, u.n);
            for (auto& [name, pb] : cone_probe_set(u.n, rep.kappa, u.a)) {
                double ip = sphere_inner(qq, pb, u.a, u.n);
                rep.orthogonality.probe_inners.push_back(ip);
                rep.orthogonality.probe_names.push_back(name);
                if (ip > 1e-6) rep.orthogonality.probes_nonpositive = false;
            }
        }
    }

    // next-order membership conditions
    {
        bool c1 = rep.kind == SecondCase::polynomial &&
                  std::abs(rep.lambda_star - (rep.kappa + 1)) <= opt.lambda_snap;
        bool c2 = false, c3 = false;
        if (c1) {
            // (ii) thin-space derivatives of order <= kappa-2 vanish along the spine
            c2 = true;
            MultiPoly qs = rep.q_scaled;
            std::vector<MultiPoly> derivs{qs};
            for (int order = 0; order <= rep.kappa - 2 && c2; ++order) {
                std::vector<MultiPoly> next;
                for (const auto& dq : derivs) {
                    // restriction to the spine: substitute x = sum t_l xi_l, y = 0
                    MultiPoly r = dq.restrict_thin();
                    if (rep.spine_dim == 0) {
                        if (std::abs(r.eval({0, 0, 0})) > 1e-8 * std::max(1.0, qs.max_abs_coeff()))
                            c2 = false;
                    } else {
                        for (const auto& xi : rep.spine_basis.vectors) {
                            // 1d restriction poly in t sampled at a few points
                            for (double t : {-0.9, -0.4, 0.3, 0.8}) {
                                Point pt{t * xi[0], t * xi[1], 0.0};
                                if (std::abs(r.eval(pt)) > 1e-8 * std::max(1.0, qs.max_abs_coeff())) {
                                    c2 = false;
                                    break;
                                }
                            }
                        }
                    }
                    if (order < rep.kappa - 2) {
                        next.push_back(dq.derivative(0));
                        if (u.n == 2) next.push_back(dq.derivative(1));
                    }
                }
                derivs = std::move(next);
            }
            // (iii) the fitted next term carries the full Monneau limit
            double qs2 = sphere_inner(rep.q_scaled, rep.q_scaled, u.a, u.n);
            double ref = std::max(rep.h_lambda_limit, 1e-14);
            c3 = std::abs(qs2 - rep.h_lambda_limit) <= 0.05 * ref;
        }
        rep.nxt_flags = {c1, c1 && c2, c1 && c3};
    }
    return rep;
}

// The three conditions for the second blow-up to be the clean next term of
// order kappa+1 (computed during second_blowup; exposed as the named check).
inline std::array<bool, 3> nxt_membership(const BlowupReport& rep) { return rep.nxt_flags; }

// Residual checks for a homogeneous second blow-up profile against the two
// admissible classes: an a-harmonic polynomial, or a homogeneous solution to
// the codimension-two zero-obstacle problem supported on the spine.
struct ClassifyVerdict {
    SecondCase kind = SecondCase::unclassified;
    double harmonicity_residual = 0.0;
    double spine_negativity = 0.0;    // max(0, -q) on the spine
    double off_support_flux = 0.0;    // max |flux| where q > 0 on the spine
    double complementarity = 0.0;     // max |q * flux| along the spine
    std::string notes;
};

inline ClassifyVerdict classify_second_blowup(const FieldRef& q, const SpineBasis& sp, double a,
                                              int kappa, const std::optional<MultiPoly>& qpoly = {}) {
    ClassifyVerdict v;
    if (qpoly && !qpoly->empty()) {
        if (qpoly->homogeneity() >= 0 && qpoly->homogeneity() < kappa)
            v.notes = "profile homogeneity below the leading order";
        MultiPoly res = la_residual(*qpoly, a, q.n);
        v.harmonicity_residual = res.max_abs_coeff() / std::max(1.0, qpoly->max_abs_coeff());
        if (v.harmonicity_residual < 1e-8) {
            v.kind = SecondCase::polynomial;
            return v;
        }
    }
    if (a >= 0.0 || sp.dim != q.n - 1) {
        v.notes = "not in the codimension-two regime (needs a < 0 and full spine)";
        return v;
    }
    // sample along the spine: nonnegativity, flux sign, complementarity
    const auto& xi = sp.vectors.front();
    const std::array<double, 2> eta{-xi[1], xi[0]};  // transverse thin direction
    const double eps = q.grid ? 2.0 * q.grid->grid->h() : 1e-2;
    double maxneg = 0.0, maxflux = 0.0, maxcompl = 0.0;
    for (double t = -0.8; t <= 0.8001; t += 0.1) {
        Point p{t * xi[0], t * xi[1], 0.0};
        double qv = q.value(p);
        maxneg = std::max(maxneg, -qv);
        double f = transverse_circle_flux(q, p, eta, eps);
        if (qv > 1e-6) maxflux = std::max(maxflux, std::max(0.0, f));
        maxcompl = std::max(maxcompl, std::abs(qv * f));
    }
    v.spine_negativity = maxneg;
    v.off_support_flux = maxflux;
    v.complementarity = maxcompl;
    if (maxneg < 1e-6 && maxflux < 1e-3 && maxcompl < 1e-3) v.kind = SecondCase::very_thin_solution;
    return v;
}

} // namespace fblab

#endif
