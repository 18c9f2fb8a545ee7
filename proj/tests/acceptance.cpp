// End-to-end acceptance suite. Each numbered criterion prints exactly one
// PASS/FAIL line with the measured quantities; the process exit code is the
// number of failed criteria.
#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fblab/blowup.hpp"
#include "fblab/diagnostics.hpp"
#include "fblab/singular_set.hpp"
#include "fblab/solver.hpp"
#include "fblab/very_thin.hpp"

using namespace fblab;

namespace {

int g_failures = 0;
int g_index = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
    ++g_index;
    std::printf("[%2d/11] %s  %s  (%s)\n", g_index, pass ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double now_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

double rel_l2_error(const ScalarField& u, const MultiPoly& exact) {
    const Grid& g = *u.grid;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.ny(); ++k) {
            double w = g.dual_weight_y(k);
            double e = exact.eval({g.x(i), 0.0, g.y(k)});
            double d = u.at(i, 0, k) - e;
            num += w * d * d;
            den += w * e * e;
        }
    return std::sqrt(num / den);
}

// -------------------------------------------------------------- criterion 1
void c1_solver_fidelity() {
    bool pass = true;
    std::string detail;
    for (double a : {-0.5, 0.0, 0.5}) {
        Grid g(GridSpec{1, 257, a});
        MultiPoly p = ext_a(parse_poly("x1^2"), a, 1);
        ObstacleSpec spec;
        spec.boundary = [&p](const Point& q) { return p.eval(q); };
        SolveOptions opt;
        opt.tol = 1e-9;
        double t0 = now_seconds();
        SolveReport rep;
        ScalarField u = solve(g, spec, opt, &rep);
        double dt = now_seconds() - t0;
        double err = rel_l2_error(u, p);
        char buf[128];
        std::snprintf(buf, sizeof buf, "a=%+.1f: L2 %.2e in %.1fs; ", a, err, dt);
        detail += buf;
        if (!(rep.converged && err <= 0.02 && dt <= 60.0)) pass = false;
    }
    report(pass, "solver fidelity (quadratic data, res 257)", detail);
}

// -------------------------------------------------------------- criterion 2
void c2_homogeneous_solution() {
    double a = -0.5;
    Grid g(GridSpec{1, 257, a});
    ObstacleSpec spec;
    spec.boundary = [a](const Point& p) { return -std::pow(std::abs(p[2]), 1.0 - a); };
    SolveOptions opt;
    opt.tol = 1e-10;
    ScalarField u = solve(g, spec, opt);
    auto kkt = kkt_report(u, spec);
    double fmin = 0.0, fmax = -1e300;
    for (const auto& f : kkt.flux_density) {
        fmin = std::min(fmin, f.value);
        fmax = std::max(fmax, f.value);
    }
    bool flux_ok = std::abs(fmin + 3.0) <= 0.09 && std::abs(fmax + 3.0) <= 0.09;

    auto fr = ref_of([a](const Point& p) { return -std::pow(std::abs(p[2]), 1.0 - a); },
                     [a](const Point& p) -> Point {
                         double s = p[2] >= 0 ? 1.0 : -1.0;
                         return {0, 0, -(1.0 - a) * std::pow(std::abs(p[2]), -a) * s};
                     },
                     1, a);
    auto prof = profile(fr, {0, 0, 0}, {0.1, 0.15, 0.2, 0.3, 0.4, 0.5});
    bool n_ok = true;
    double nmin = 1e300, nmax = -1e300;
    for (double Nr : prof.N) {
        nmin = std::min(nmin, Nr);
        nmax = std::max(nmax, Nr);
        if (Nr < 1.455 || Nr > 1.545) n_ok = false;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "N in [%.4f, %.4f]; flux in [%.4f, %.4f] vs -3", nmin, nmax, fmin,
                  fmax);
    report(n_ok && flux_ok, "homogeneous transverse profile", buf);
}

// -------------------------------------------------------------- criterion 3
void c3_quartic_reproduction() {
    MultiPoly q = ext_a(parse_poly("x1^2 x2^2"), 0.0, 2);
    auto f = ref_of(q, 2, 0.0);
    auto p0 = profile(f, {0, 0, 0}, default_radii(0.04, 1.25, 0.6));
    auto p3 = profile(f, {0.3, 0, 0}, default_radii(0.02, 1.25, 0.4));
    bool freq_ok = std::abs(p0.N_at_zero - 4.0) <= 0.05 && std::abs(p3.N_at_zero - 2.0) <= 0.05;

    ScanOptions so;
    so.spacing = 0.15;
    so.extent = 0.6;
    auto table = scan(f, so);
    bool axis1 = false, axis2 = false, origin4 = false;
    for (const auto& e : table.entries) {
        if (e.stratum == "Sigma_2^1" && std::abs(e.where[1]) < 1e-9 && std::abs(e.where[0]) > 0.05)
            axis1 = true;
        if (e.stratum == "Sigma_2^1" && std::abs(e.where[0]) < 1e-9 && std::abs(e.where[1]) > 0.05)
            axis2 = true;
        if (e.stratum == "Sigma_4^0" && std::abs(e.where[0]) < 1e-9 && std::abs(e.where[1]) < 1e-9)
            origin4 = true;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "N0(0)=%.4f N0(0.3)=%.4f; strata axes=%d/%d origin=%d",
                  p0.N_at_zero, p3.N_at_zero, axis1, axis2, origin4);
    report(freq_ok && axis1 && axis2 && origin4, "biaxial quartic frequencies and strata", buf);
}

// -------------------------------------------------------------- criterion 4
struct CorpusField {
    std::string name;
    FieldRef field;
    Point center;
    std::vector<double> radii;
    std::vector<double> h_lambdas;
    std::vector<double> w_lambdas;
};

void c4_monotonicity_suite() {
    double t0 = now_seconds();
    std::vector<CorpusField> corpus;
    auto keep = [&corpus](ScalarField&& f) -> const ScalarField& {
        static std::vector<std::unique_ptr<ScalarField>> store;
        store.push_back(std::make_unique<ScalarField>(std::move(f)));
        return *store.back();
    };
    static std::vector<std::unique_ptr<Grid>> grids;
    static std::vector<std::unique_ptr<MultiPoly>> polys;

    // analytic fields
    auto quartic = MultiPoly(ext_a(parse_poly("x1^2 x2^2"), 0.0, 2));
    corpus.push_back({"quartic", ref_of(quartic, 2, 0.0), {0, 0, 0}, default_radii(0.05, 1.25, 0.7),
                      {2.0, 4.0}, {4.0, 5.0}});
    auto q2m = MultiPoly(ext_a(parse_poly("x1^2"), -0.5, 2));
    corpus.push_back({"quadratic a=-0.5", ref_of(q2m, 2, -0.5), {0, 0, 0},
                      default_radii(0.05, 1.25, 0.7), {1.0, 2.0}, {2.0, 3.0}});
    auto q2p = MultiPoly(ext_a(parse_poly("x1^2"), 0.5, 1));
    corpus.push_back({"quadratic a=+0.5", ref_of(q2p, 1, 0.5), {0, 0, 0},
                      default_radii(0.05, 1.25, 0.7), {1.0, 2.0}, {2.0, 3.0}});
    for (double a : {-0.5, 0.0}) {
        auto u = MultiPoly(ext_a(parse_poly("x1^2"), a, 2) +
                           0.1 * ext_a(parse_poly("x1^2 x2"), a, 2));
        auto p = MultiPoly(ext_a(parse_poly("x1^2"), a, 2));
        FieldRef v = difference(ref_of(u, 2, a), p, {0, 0, 0});
        char nm[64];
        std::snprintf(nm, sizeof nm, "next-order residual a=%+.1f", a);
        corpus.push_back({nm, v, {0, 0, 0}, default_radii(0.05, 1.25, 0.7), {2.0, 3.0}, {2.0, 3.0}});
    }
    {
        double a = -0.5;
        auto fr = ref_of([a](const Point& p) { return -std::pow(std::abs(p[2]), 1.0 - a); },
                         [a](const Point& p) -> Point {
                             double s = p[2] >= 0 ? 1.0 : -1.0;
                             return {0, 0, -(1.0 - a) * std::pow(std::abs(p[2]), -a) * s};
                         },
                         1, a);
        corpus.push_back({"transverse profile", fr, {0, 0, 0}, default_radii(0.1, 1.25, 0.7),
                          {1.0, 1.5}, {2.0, 3.0}});
    }

    // solved fields
    {
        double a = -0.5;
        grids.push_back(std::make_unique<Grid>(GridSpec{1, 129, a}));
        polys.push_back(std::make_unique<MultiPoly>(ext_a(parse_poly("x1^2"), a, 1)));
        const MultiPoly& p = *polys.back();
        ObstacleSpec spec;
        spec.boundary = [&p](const Point& q) { return p.eval(q); };
        SolveOptions opt;
        opt.tol = 1e-9;
        const ScalarField& u = keep(solve(*grids.back(), spec, opt));
        // Monneau exponents strictly below the frequency: the equality case
        // lambda = N(0+) is exercised on the analytic corpus where the curve
        // is exactly flat; on solved fields the scheme error at the touching
        // point would otherwise drown the flat limit.
        corpus.push_back({"solved quadratic (grid)", ref_of(u), {0, 0, 0},
                          default_radii(0.2, 1.25, 0.7), {1.0, 1.8}, {2.0, 3.0}});
        // the same solved field minus a scaled cone polynomial, as a grid field
        ScalarField v = u;
        const Grid& g = *grids.back();
        for (int i = 0; i < g.nx(); ++i)
            for (int k = 0; k < g.ny(); ++k) v.at(i, 0, k) -= 0.5 * p.eval({g.x(i), 0.0, g.y(k)});
        const ScalarField& vk = keep(std::move(v));
        corpus.push_back({"solved residual vs cone element (grid)", ref_of(vk), {0, 0, 0},
                          default_radii(0.2, 1.25, 0.7), {1.0, 1.8}, {2.0, 3.0}});
    }
    {
        // genuine contact from an obstacle bump; profiled on the normalized
        // field (solution minus the even a-harmonic extension of the obstacle)
        double a = 0.3;
        grids.push_back(std::make_unique<Grid>(GridSpec{1, 257, a}));
        const Grid& g = *grids.back();
        ObstacleSpec spec;
        spec.obstacle = [](const Point& p) { return 0.25 - p[0] * p[0]; };
        spec.boundary = [](const Point&) { return 0.0; };
        SolveOptions opt;
        opt.tol = 1e-9;
        ScalarField u = solve(g, spec, opt);
        polys.push_back(std::make_unique<MultiPoly>(
            MultiPoly::constant(0.25) - ext_a(parse_poly("x1^2"), a, 1)));
        const MultiPoly& phibar = *polys.back();
        ScalarField ut = u;
        for (int i = 0; i < g.nx(); ++i)
            for (int k = 0; k < g.ny(); ++k) ut.at(i, 0, k) -= phibar.eval({g.x(i), 0.0, g.y(k)});
        const ScalarField& utk = keep(std::move(ut));
        // center at the last contact node (free-boundary proxy); the
        // normalized field vanishes there exactly
        int ifb = g.mid();
        for (int i = g.mid(); i < g.nx() - 1; ++i)
            if (u.at(i, 0, 0) == spec.obstacle(Point{g.x(i), 0.0, 0.0})) ifb = i;
        Point fb{g.x(ifb), 0.0, 0.0};
        double cap = 0.9 * (1.0 - std::abs(fb[0]));
        // radii clear of the node-offset scale of the free-boundary proxy
        corpus.push_back({"solved contact field (grid)", ref_of(utk), fb,
                          default_radii(0.15, 1.25, cap), {1.0}, {2.0, 3.0}});
    }
    {
        // the codimension-two capacitary cone, an exact homogeneous solution
        double a = -0.5;
        auto val = [a](const Point& p) { return -std::pow(p[1] * p[1] + p[2] * p[2], -0.5 * a); };
        auto grd = [a](const Point& p) -> Point {
            double rho2 = p[1] * p[1] + p[2] * p[2];
            double f = 0.5 * a * std::pow(rho2, -0.5 * a - 1.0);
            return {0.0, 2.0 * f * p[1], 2.0 * f * p[2]};
        };
        corpus.push_back({"capacitary cone", ref_of(val, grd, 2, a), {0, 0, 0},
                          default_radii(0.1, 1.25, 0.7), {0.4, 0.5}, {1.0, 2.0}});
    }

    bool pass = corpus.size() >= 8;
    std::string detail = std::to_string(corpus.size()) + " fields;";
    ProfileOptions popt;
    popt.monotone_tol = 1e-3;
    for (auto& cf : corpus) {
        std::vector<double> lambdas = cf.h_lambdas;
        lambdas.insert(lambdas.end(), cf.w_lambdas.begin(), cf.w_lambdas.end());
        auto prof = profile(cf.field, cf.center, cf.radii, lambdas, popt);
        bool ok = prof.monotone_N;
        for (size_t i = 0; i < cf.h_lambdas.size(); ++i) ok = ok && prof.monotone_H[i];
        for (size_t i = 0; i < cf.w_lambdas.size(); ++i)
            ok = ok && prof.monotone_W[cf.h_lambdas.size() + i];
        if (!ok) {
            pass = false;
            detail += " [" + cf.name + " VIOLATES]";
        }
    }
    double dt = now_seconds() - t0;
    char buf[64];
    std::snprintf(buf, sizeof buf, " runtime %.0fs", dt);
    detail += buf;
    if (dt > 600.0) pass = false;
    report(pass, "monotonicity suite (N, H_lambda, W_lambda)", detail);
}

// -------------------------------------------------------------- criterion 5
void c5_counterexample_orthogonality() {
    MultiPoly p_star = ext_a(parse_poly("x1^2 x2^2"), 0.0, 2);
    bool pass = true;
    double worst_inner = 0.0, worst_probe = -1e300;
    for (double b : {-1.0 / 3.0, -0.25, -0.125}) {
        MultiPoly qbar;
        qbar.add_term({4, 0, 0}, b);
        qbar.add_term({0, 4, 0}, -(11.0 / 24.0 + b));
        qbar.add_term({2, 2, 0}, 1.0);
        MultiPoly q = ext_a(qbar, 0.0, 2);
        double ip = sphere_inner(q, p_star, 0.0, 2);
        worst_inner = std::max(worst_inner, std::abs(ip));
        if (std::abs(ip) > 1e-10) pass = false;
        for (auto& [name, probe] : cone_probe_set(2, 4, 0.0)) {
            double pv = sphere_inner(q, probe, 0.0, 2);
            worst_probe = std::max(worst_probe, pv);
            if (pv > 1e-10) pass = false;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max |<q,p*>| = %.2e; max probe = %.2e", worst_inner, worst_probe);
    report(pass, "quartic pair orthogonality and cone probes", buf);
}

// -------------------------------------------------------------- criterion 6
void c6_symbol_check() {
    double a = -0.5, sigma = 0.25;
    std::vector<double> ratios;
    for (double width : {0.3, 0.5, 0.8}) {
        LineFunction b{[width](double x) {
                           double r = x / width;
                           return std::pow(std::max(0.0, 1.0 - r * r), 3);
                       },
                       width, true};
        Extension e = extend(kernel_spec(2, a, 128), b);
        double x0 = 0.1 * width;
        ratios.push_back(f_a_of_extension(e, x0, 1e-4) / frac_laplacian_line(b, sigma, x0));
    }
    double rmin = ratios[0], rmax = ratios[0];
    for (double r : ratios) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    double spread = std::abs(rmax - rmin) / std::abs(0.5 * (rmax + rmin));
    char buf[128];
    std::snprintf(buf, sizeof buf, "ratios %.5f / %.5f / %.5f, spread %.2f%%", ratios[0], ratios[1],
                  ratios[2], 100 * spread);
    report(spread <= 0.02, "line flux vs fractional Laplacian symbol", buf);
}

// -------------------------------------------------------------- criterion 7
void c7_homogeneity_classification() {
    double a = -0.5;
    bool pass = true;
    std::string detail;
    for (int lam : {1, 2, 3}) {
        MultiPoly p = ext_a(MultiPoly::monomial({lam, 0, 0}, 1.0), a, 1);
        auto g = [p](double th) { return p.eval({std::cos(th), 0.0, std::sin(th)}); };
        auto v = verify_homogeneous_2d(g, lam, a);
        detail += "l=" + std::to_string(lam) + (v.valid ? ":ok " : ":BAD ");
        if (!v.valid) pass = false;
    }
    auto v137 = verify_homogeneous_2d([](double) { return 1.0; }, 1.37, a);
    detail += v137.admissible_homogeneity ? "1.37:BAD " : "1.37:rejected ";
    if (v137.admissible_homogeneity || v137.valid) pass = false;
    auto vcap = verify_homogeneous_2d([](double) { return -1.0; }, -a, a);
    detail += vcap.admissible_homogeneity ? "-a:admissible" : "-a:BAD";
    if (!vcap.admissible_homogeneity) pass = false;
    report(pass, "planar homogeneous-solution classification", detail);
}

// -------------------------------------------------------------- criterion 8
void c8_blowup_recovery() {
    bool pass = true;
    std::string detail;
    for (double a : {-0.5, 0.0}) {
        MultiPoly p2 = ext_a(parse_poly("x1^2"), a, 2);
        MultiPoly p3 = ext_a(parse_poly("x1^2 x2"), a, 2);
        MultiPoly u = p2 + 0.1 * p3;
        auto f = ref_of(u, 2, a);
        auto fb = first_blowup(f, {0, 0, 0});
        bool ok = fb.ok && fb.kappa == 2;
        double lam = 0.0, qerr = 1.0;
        bool nxt = false;
        if (ok) {
            auto sb = second_blowup(f, {0, 0, 0}, fb);
            lam = sb.lambda_star;
            MultiPoly target = 0.1 * p3;
            qerr = sphere_norm(sb.q_scaled - target, a, 2) / sphere_norm(target, a, 2);
            nxt = sb.nxt_flags[0] && sb.nxt_flags[1] && sb.nxt_flags[2];
            ok = std::abs(lam - 3.0) <= 0.05 && qerr <= 0.01 && nxt;
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "a=%+.1f: lambda=%.4f qerr=%.2e nxt=%d; ", a, lam, qerr, nxt);
        detail += buf;
        if (!ok) pass = false;
    }
    report(pass, "next-order blow-up recovery", detail);
}

// -------------------------------------------------------------- criterion 9
void c9_first_blowup_translation() {
    MultiPoly q = ext_a(parse_poly("x1^2 x2^2"), 0.0, 2);
    auto f = ref_of(q, 2, 0.0);
    auto fb = first_blowup(f, {0.3, 0, 0});
    MultiPoly expect = 0.09 * ext_a(parse_poly("x2^2"), 0.0, 2);
    double rel = fb.ok ? (fb.p_star - expect).max_abs_coeff() / expect.max_abs_coeff() : 1.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "kappa=%d, coefficient error %.2e", fb.ok ? fb.kappa : -1, rel);
    report(fb.ok && fb.kappa == 2 && rel <= 1e-3, "translated first blow-up", buf);
}

// ------------------------------------------------------------- criterion 10
void c10_equivalence() {
    double t0 = now_seconds();
    LineFunction psi{[](double x) {
                         double r = x / 0.4;
                         return 0.5 * std::pow(std::max(0.0, 1.0 - r * r), 2);
                     },
                     0.4, true};
    EquivOptions opt;
    opt.res = 65;
    auto rep = equivalence_chain(psi, -0.5, opt);
    double dt = now_seconds() - t0;
    bool pass = !rep.rejected && rep.cube_report.converged && rep.kernel_converged &&
                rep.contact_count_w1 > 0 && rep.rel_disc_contact <= 0.02 && dt <= 300.0;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "contact disc %.3f%% (global %.3f, informational); contacts %d/%d; %.0fs",
                  100 * rep.rel_disc_contact, rep.max_disc_global, rep.contact_count_w1,
                  rep.contact_count_w3, dt);
    report(pass, "line equivalence of the codimension-two solve", buf);
}

// ------------------------------------------------------------- criterion 11
void c11_barrier_exponents() {
    bool pass = true;
    std::string detail;
    struct Case {
        double a, beta;
    };
    for (Case c : {Case{-0.5, 1.0}, Case{-0.5, 0.25}, Case{-0.25, 0.5}}) {
        auto rep = barrier(kernel_spec(2, c.a, 96), c.beta);
        double expect = std::min(-c.a, c.beta);
        char buf[96];
        std::snprintf(buf, sizeof buf, "(a=%.2f,b=%.2f): %.3f vs %.3f; ", c.a, c.beta,
                      rep.measured_exponent, expect);
        detail += buf;
        if (std::abs(rep.measured_exponent - expect) > 0.05) pass = false;
    }
    report(pass, "barrier Holder exponents", detail);
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    c1_solver_fidelity();
    c2_homogeneous_solution();
    c3_quartic_reproduction();
    c4_monotonicity_suite();
    c5_counterexample_orthogonality();
    c6_symbol_check();
    c7_homogeneity_classification();
    c8_blowup_recovery();
    c9_first_blowup_translation();
    c10_equivalence();
    c11_barrier_exponents();
    std::printf("%d/11 criteria passed\n", 11 - g_failures);
    return g_failures;
}
