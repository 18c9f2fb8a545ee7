// Scanning a field for free-boundary points, estimating (kappa, m, lambda)
// per point through the blow-up machinery, and bucketing into strata with
// anomalous/generic tags. Includes the obstacle non-degeneracy check and the
// isolation check for zero-dimensional strata.
#ifndef FBLAB_SINGULAR_SET_HPP
#define FBLAB_SINGULAR_SET_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <atomic>
#include <thread>
#include <vector>

#include "fblab/blowup.hpp"
#include "fblab/diagnostics.hpp"

namespace fblab {

struct StratumEntry {
    Point where{0, 0, 0};
    int kappa = 0;
    int m = 0;
    double lambda_star = 0.0;
    std::string stratum;       // "Sigma_k^m"
    bool anomalous = false;    // lambda_star in [kappa, kappa+1)
    bool boundary_of_classification = false;  // |lambda - (kappa+1)| below margin
    bool nxt = false;
    double confidence = 1.0;   // 1 high, 0 low
    std::string note;
};

struct StratumTable {
    std::vector<StratumEntry> entries;
    int scanned_points = 0;
    int contact_points = 0;
};

struct ScanOptions {
    double spacing = 0.1;
    double extent = 0.6;        // scan window half-width on the thin space
    double contact_tol = 1e-8;  // |u - phi| below this counts as contact
    double anomaly_margin = 0.05;
    std::function<double(const Point&)> obstacle;  // defaults to zero
    int threads = 1;
    uint64_t seed = 0;
};

// Contact proxy for analytic and solved fields: u - phi vanishes at the point;
// singular (zero-density) contact is approximated by the decay of the contact
// fraction between two radii.
inline StratumTable scan(const FieldRef& u, const ScanOptions& opt = {}) {
    StratumTable table;
    auto phi = [&](const Point& p) { return opt.obstacle ? opt.obstacle(p) : 0.0; };
    std::vector<Point> candidates;
    auto consider = [&](double x1, double x2) {
        Point p{x1, x2, 0.0};
        table.scanned_points++;
        double v = u.value(p) - phi(p);
        if (std::abs(v) > opt.contact_tol) return;
        table.contact_points++;
        // contact-fraction decay over two radii on the thin space
        auto contact_fraction = [&](double r) {
            int hits = 0, tot = 0;
            const int mpts = 24;
            for (int i = 0; i < mpts; ++i) {
                Point q = p;
                if (u.n == 1) {
                    q[0] += r * (2.0 * i / (mpts - 1.0) - 1.0);
                } else {
                    double th = 2.0 * M_PI * i / mpts;
                    q[0] += r * std::cos(th);
                    q[1] += r * std::sin(th);
                }
                if (std::abs(q[0]) > 0.95 || (u.n == 2 && std::abs(q[1]) > 0.95)) continue;
                ++tot;
                if (std::abs(u.value(q) - phi(q)) <= 10.0 * opt.contact_tol) ++hits;
            }
            return tot > 0 ? static_cast<double>(hits) / tot : 1.0;
        };
        double f1 = contact_fraction(4.0 * opt.spacing);
        double f2 = contact_fraction(2.0 * opt.spacing);
        if (f1 > 0.9 && f2 > 0.9) return;  // full-density contact: not singular
        candidates.push_back(p);
    };
    if (u.n == 1) {
        for (double x = -opt.extent; x <= opt.extent + 1e-12; x += opt.spacing) consider(x, 0.0);
    } else {
        for (double x = -opt.extent; x <= opt.extent + 1e-12; x += opt.spacing)
            for (double y2 = -opt.extent; y2 <= opt.extent + 1e-12; y2 += opt.spacing) consider(x, y2);
    }
    // classification per candidate is independent; parallel across points
    // with a deterministic slot-per-candidate reduction
    table.entries.resize(candidates.size());
    auto classify_point = [&](size_t idx) {
        const Point& p = candidates[idx];
        StratumEntry e;
        e.where = p;
        // restore the contact normalization: the continuum solution vanishes
        // at the center, the discrete one lifts off at the scheme error scale
        double uc = u.value(p) - phi(p);
        FieldRef shifted = u;
        auto base = u.value;
        shifted.value = [base, uc](const Point& q) { return base(q) - uc; };
        BlowupOptions bopt;
        bopt.seed = opt.seed;
        auto fb = first_blowup(shifted, p, bopt);
        if (!fb.ok) {
            e.note = fb.notice;
            e.confidence = 0.0;
            e.stratum = "unclassified";
            table.entries[idx] = e;
            return;
        }
        e.kappa = fb.kappa;
        auto sb = second_blowup(shifted, p, fb, bopt);
        e.m = sb.spine_dim;
        e.lambda_star = sb.lambda_star;
        e.stratum = "Sigma_" + std::to_string(e.kappa) + "^" + std::to_string(e.m);
        e.anomalous = sb.kind != SecondCase::degenerate &&
                      e.lambda_star < e.kappa + 1 - opt.anomaly_margin;
        e.boundary_of_classification =
            std::abs(e.lambda_star - (e.kappa + 1)) < opt.anomaly_margin &&
            sb.kind != SecondCase::degenerate;
        e.nxt = sb.nxt_flags[0] && sb.nxt_flags[1] && sb.nxt_flags[2];
        e.confidence = fb.low_confidence ? 0.5 : 1.0;
        if (sb.kind == SecondCase::degenerate) e.note = "field coincides with its leading polynomial";
        table.entries[idx] = e;
    };
    int nthreads = std::max(1, opt.threads);
    if (nthreads == 1 || candidates.size() < 2) {
        for (size_t i = 0; i < candidates.size(); ++i) classify_point(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < candidates.size(); i = next.fetch_add(1))
                    classify_point(i);
            });
        for (auto& th : pool) th.join();
    }
    std::sort(table.entries.begin(), table.entries.end(), [](const StratumEntry& A, const StratumEntry& B) {
        if (A.where[0] != B.where[0]) return A.where[0] < B.where[0];
        if (A.where[1] != B.where[1]) return A.where[1] < B.where[1];
        return A.kappa < B.kappa;
    });
    return table;
}

// Non-degeneracy of the normalized obstacle: Lap_x phi_g <= -c < 0 on the thin
// unit ball. Exact for quadratics; otherwise the sampled supremum is reported.
struct NondegeneracyVerdict {
    bool satisfied = false;
    double c = 0.0;           // largest c with Lap phi_g <= -c observed
    double sup_laplacian = 0.0;
    bool exact = false;       // quadratic case, no sampling needed
};

inline NondegeneracyVerdict nondegeneracy_check(const MultiPoly& phi_g, double c_required, int n,
                                                int samples = 2000) {
    NondegeneracyVerdict v;
    MultiPoly lap = laplace_x(phi_g.restrict_thin(), n);
    if (lap.degree() == 0) {
        v.exact = true;
        v.sup_laplacian = lap.eval({0, 0, 0});
    } else {
        double sup = -1e300;
        for (int i = 0; i < samples; ++i) {
            double t = 2.0 * M_PI * i / samples;
            double r = std::sqrt((i % 97) / 96.0);
            Point p = n == 1 ? Point{2.0 * (i / (samples - 1.0)) - 1.0, 0.0, 0.0}
                             : Point{r * std::cos(t), r * std::sin(t), 0.0};
            sup = std::max(sup, lap.eval(p));
        }
        v.sup_laplacian = sup;
    }
    v.c = -v.sup_laplacian;
    v.satisfied = v.sup_laplacian <= -c_required + 1e-12;
    return v;
}

// Isolation of a point of even order kappa with zero-dimensional spine from
// all table entries of order >= kappa, within 10 spacings.
struct IsolationVerdict {
    bool isolated = true;
    std::vector<Point> violators;
    std::vector<Point> lower_order_neighbors;  // reported, not violations
};

inline IsolationVerdict isolation_check(const StratumTable& table, const StratumEntry& e,
                                        double spacing) {
    IsolationVerdict v;
    for (const auto& other : table.entries) {
        if (&other == &e) continue;
        double d = norm(other.where - e.where);
        if (d <= 1e-12 || d > 10.0 * spacing) continue;
        if (other.kappa >= e.kappa)
            v.violators.push_back(other.where);
        else
            v.lower_order_neighbors.push_back(other.where);
    }
    v.isolated = v.violators.empty();
    return v;
}

} // namespace fblab

#endif
