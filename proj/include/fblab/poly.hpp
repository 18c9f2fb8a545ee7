// Sparse polynomial algebra in (x1[, x2], y) for blow-up candidates: the even
// a-harmonic extension of thin-space polynomials, a-harmonicity residuals,
// homogeneity grading, spine computation, cone membership and weighted
// spherical inner products.
//
// Coefficients are double by default; PolyT<Rational> provides the exact
// arithmetic mode used by golden tests (extension coefficients are rational
// in a whenever a is rational).
#ifndef FBLAB_POLY_HPP
#define FBLAB_POLY_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fblab/quadrature.hpp"

namespace fblab {

// ---------------------------------------------------------------------------
// Exact rational scalar (64-bit, normalized). Overflow is not defended against;
// the golden tests stay far away from 2^63.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n) : num(n), den(1) {}
    Rational(long long n, long long d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(std::llabs(num), den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend Rational operator+(Rational a, Rational b) { return Rational(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend Rational operator-(Rational a, Rational b) { return Rational(a.num * b.den - b.num * a.den, a.den * b.den); }
    friend Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }
    friend Rational operator/(Rational a, Rational b) { return Rational(a.num * b.den, a.den * b.num); }
    Rational operator-() const { return Rational(-num, den); }
    friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
};

template <class C>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static bool is_zero(double v) { return v == 0.0; }
    static double from_int(long long k) { return static_cast<double>(k); }
    static double to_double(double v) { return v; }
};
template <>
struct scalar_traits<Rational> {
    static bool is_zero(const Rational& v) { return v.num == 0; }
    static Rational from_int(long long k) { return Rational(k); }
    static double to_double(const Rational& v) { return v.to_double(); }
};

// Monomial exponents (x1, x2, y). Polynomials over n=1 simply never use x2.
struct MIdx {
    int e1 = 0, e2 = 0, ey = 0;
    int degree() const { return e1 + e2 + ey; }
    friend bool operator<(const MIdx& a, const MIdx& b) {
        if (a.e1 != b.e1) return a.e1 < b.e1;
        if (a.e2 != b.e2) return a.e2 < b.e2;
        return a.ey < b.ey;
    }
    friend bool operator==(const MIdx& a, const MIdx& b) { return a.e1 == b.e1 && a.e2 == b.e2 && a.ey == b.ey; }
};

template <class C>
class PolyT {
  public:
    using Terms = std::map<MIdx, C>;

    PolyT() = default;
    static PolyT constant(C c) {
        PolyT p;
        p.add_term({0, 0, 0}, c);
        return p;
    }
    static PolyT monomial(MIdx m, C c) {
        PolyT p;
        p.add_term(m, c);
        return p;
    }

    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void add_term(MIdx m, C c) {
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            if (!scalar_traits<C>::is_zero(c)) terms_.emplace(m, c);
        } else {
            it->second = it->second + c;
            if (scalar_traits<C>::is_zero(it->second)) terms_.erase(it);
        }
    }

    C coeff(MIdx m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? C{} : it->second;
    }

    int degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
        return d;
    }

    bool even_in_y() const {
        for (const auto& [m, c] : terms_)
            if (m.ey % 2) return false;
        return true;
    }
    bool depends_on_y() const {
        for (const auto& [m, c] : terms_)
            if (m.ey > 0) return true;
        return false;
    }
    // True iff every term has total degree k (the zero polynomial counts).
    bool homogeneous_of(int k) const {
        for (const auto& [m, c] : terms_)
            if (m.degree() != k) return false;
        return true;
    }
    // Homogeneity if graded, else -1. Zero polynomial reports 0.
    int homogeneity() const {
        int k = -1;
        for (const auto& [m, c] : terms_) {
            if (k < 0)
                k = m.degree();
            else if (m.degree() != k)
                return -1;
        }
        return k < 0 ? 0 : k;
    }

    PolyT homogeneous_part(int k) const {
        PolyT out;
        for (const auto& [m, c] : terms_)
            if (m.degree() == k) out.add_term(m, c);
        return out;
    }

    friend PolyT operator+(const PolyT& p, const PolyT& q) {
        PolyT out = p;
        for (const auto& [m, c] : q.terms_) out.add_term(m, c);
        return out;
    }
    friend PolyT operator-(const PolyT& p, const PolyT& q) {
        PolyT out = p;
        for (const auto& [m, c] : q.terms_) out.add_term(m, -c);
        return out;
    }
    friend PolyT operator*(C s, const PolyT& p) {
        PolyT out;
        if (scalar_traits<C>::is_zero(s)) return out;
        for (const auto& [m, c] : p.terms_) out.add_term(m, s * c);
        return out;
    }
    friend PolyT operator*(const PolyT& p, const PolyT& q) {
        PolyT out;
        for (const auto& [mp, cp] : p.terms_)
            for (const auto& [mq, cq] : q.terms_)
                out.add_term({mp.e1 + mq.e1, mp.e2 + mq.e2, mp.ey + mq.ey}, cp * cq);
        return out;
    }

    PolyT derivative(int axis) const {
        PolyT out;
        for (const auto& [m, c] : terms_) {
            MIdx d = m;
            int e = 0;
            if (axis == 0) {
                e = m.e1;
                if (e) d.e1--;
            } else if (axis == 1) {
                e = m.e2;
                if (e) d.e2--;
            } else {
                e = m.ey;
                if (e) d.ey--;
            }
            if (e) out.add_term(d, scalar_traits<C>::from_int(e) * c);
        }
        return out;
    }

    // Exact division by y; requires every term to carry a factor of y.
    PolyT divide_by_y() const {
        PolyT out;
        for (const auto& [m, c] : terms_) {
            if (m.ey == 0) throw std::invalid_argument("divide_by_y: term without y factor");
            out.add_term({m.e1, m.e2, m.ey - 1}, c);
        }
        return out;
    }

    // Restriction to the thin space {y = 0}.
    PolyT restrict_thin() const {
        PolyT out;
        for (const auto& [m, c] : terms_)
            if (m.ey == 0) out.add_term(m, c);
        return out;
    }

    double eval(const Point& p) const {
        double s = 0.0;
        for (const auto& [m, c] : terms_)
            s += scalar_traits<C>::to_double(c) * std::pow(p[0], m.e1) * std::pow(p[1], m.e2) *
                 std::pow(p[2], m.ey);
        return s;
    }

    Point grad(const Point& p) const {
        return {derivative(0).eval(p), derivative(1).eval(p), derivative(2).eval(p)};
    }

    // Composition with the translation X -> X + c (binomial expansion).
    PolyT shift(const Point& c) const {
        PolyT out;
        auto binom = [](int n, int k) {
            long long b = 1;
            for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
            return b;
        };
        for (const auto& [m, co] : terms_) {
            for (int i = 0; i <= m.e1; ++i)
                for (int j = 0; j <= m.e2; ++j)
                    for (int k = 0; k <= m.ey; ++k) {
                        double f = static_cast<double>(binom(m.e1, i) * binom(m.e2, j) * binom(m.ey, k)) *
                                   std::pow(c[0], m.e1 - i) * std::pow(c[1], m.e2 - j) *
                                   std::pow(c[2], m.ey - k);
                        if (f == 0.0) continue;
                        // shift only supported for double coefficients in practice;
                        // Rational mode shifts by rational-representable offsets.
                        out.add_term({i, j, k}, scale_by(co, f));
                    }
        }
        return out;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& [mi, c] : terms_) m = std::max(m, std::abs(scalar_traits<C>::to_double(c)));
        return m;
    }

    template <class D>
    PolyT<D> convert() const {
        PolyT<D> out;
        for (const auto& [m, c] : terms_) out.add_term(m, static_cast<D>(scalar_traits<C>::to_double(c)));
        return out;
    }

  private:
    static C scale_by(const C& c, double f);
    Terms terms_;
};

template <>
inline double PolyT<double>::scale_by(const double& c, double f) { return c * f; }
template <>
inline Rational PolyT<Rational>::scale_by(const Rational& c, double f) {
    long long k = static_cast<long long>(f);
    if (static_cast<double>(k) != f) throw std::invalid_argument("Rational shift: non-integer factor");
    return c * Rational(k);
}

using MultiPoly = PolyT<double>;
using RatPoly = PolyT<Rational>;

// ---------------------------------------------------------------------------
// The Laplacian restricted to the x variables.
template <class C>
PolyT<C> laplace_x(const PolyT<C>& p, int n) {
    PolyT<C> out = p.derivative(0).derivative(0);
    if (n >= 2) out = out + p.derivative(1).derivative(1);
    return out;
}

// Even a-harmonic extension of a thin-space polynomial:
//   Ext_a(p) = sum_j c_j (-1)^j / (2j)! y^{2j} Lap_x^j p,
// with c_0 = 1 and c_{j+1}/c_j = (2j+1)/(2j+1+a); the series terminates.
// The recurrence is forced by div(|y|^a grad Ext) = 0, i.e. by the identity
// Lap Ext + a d_y Ext / y = 0 matched degree by degree.
template <class C>
PolyT<C> ext_a(const PolyT<C>& pbar, C a, int n) {
    if (pbar.depends_on_y()) throw std::invalid_argument("ext_a: input must not depend on y");
    double ad = scalar_traits<C>::to_double(a);
    if (ad <= -1.0 || ad >= 1.0) throw std::invalid_argument("ext_a: a must lie in (-1,1)");
    PolyT<C> out = pbar;
    PolyT<C> lap = pbar;
    C cj = scalar_traits<C>::from_int(1);
    C factinv = scalar_traits<C>::from_int(1);
    int sign = 1;
    for (int j = 1;; ++j) {
        lap = laplace_x(lap, n);
        if (lap.empty()) break;
        cj = cj * scalar_traits<C>::from_int(2 * j - 1) / (scalar_traits<C>::from_int(2 * j - 1) + a);
        factinv = factinv / scalar_traits<C>::from_int((2 * j) * (2 * j - 1));
        sign = -sign;
        PolyT<C> y2j = PolyT<C>::monomial({0, 0, 2 * j}, scalar_traits<C>::from_int(sign) * cj * factinv);
        out = out + y2j * lap;
    }
    return out;
}

// For even-in-y p, L_a p = |y|^a (Lap p + a d_y p / y); this returns the
// polynomial factor Lap p + a (d_y p)/y, which vanishes iff p is a-harmonic.
template <class C>
PolyT<C> la_residual(const PolyT<C>& p, C a, int n) {
    if (!p.even_in_y()) throw std::invalid_argument("la_residual: polynomial must be even in y");
    PolyT<C> lap = laplace_x(p, n) + p.derivative(2).derivative(2);
    PolyT<C> dy = p.derivative(2);
    if (!dy.empty()) lap = lap + a * dy.divide_by_y();
    return lap;
}

// ---------------------------------------------------------------------------
// Spine of a polynomial on the thin space: the kernel of xi -> xi . grad_x p(x,0)
// as a polynomial identity. Returned basis vectors are orthonormal.
struct SpineBasis {
    std::vector<std::array<double, 2>> vectors;  // directions in the thin space R^n
    int dim = 0;
    bool degenerate = false;  // restriction of p vanished identically
};

inline SpineBasis spine(const MultiPoly& p, int n) {
    MultiPoly pbar = p.restrict_thin();
    SpineBasis out;
    if (pbar.empty()) {
        out.degenerate = true;
        out.dim = n;
        if (n >= 1) out.vectors.push_back({1.0, 0.0});
        if (n >= 2) out.vectors.push_back({0.0, 1.0});
        return out;
    }
    // Gram matrix of the partial derivatives in the monomial coefficient basis.
    MultiPoly d1 = pbar.derivative(0);
    MultiPoly d2 = n >= 2 ? pbar.derivative(1) : MultiPoly();
    auto dot = [](const MultiPoly& f, const MultiPoly& g) {
        double s = 0.0;
        for (const auto& [m, c] : f.terms()) s += c * g.coeff(m);
        return s;
    };
    double g11 = dot(d1, d1), g12 = dot(d1, d2), g22 = dot(d2, d2);
    double scale = std::max({g11, g22, 1e-300});
    const double tol = 1e-24 * scale;
    if (n == 1) {
        if (g11 <= tol) {
            out.vectors.push_back({1.0, 0.0});
            out.dim = 1;
        }
        return out;
    }
    // 2x2 symmetric eigenproblem, smallest eigenvector(s) spans the kernel.
    double tr = g11 + g22, det = g11 * g22 - g12 * g12;
    double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    double lam1 = 0.5 * tr - disc, lam2 = 0.5 * tr + disc;
    auto eigvec = [&](double lam) -> std::array<double, 2> {
        double vx = g12, vy = lam - g11;
        if (std::abs(vx) + std::abs(vy) < 1e-30 * std::max(1.0, scale)) {
            vx = lam - g22;
            vy = g12;
        }
        double nn = std::hypot(vx, vy);
        if (nn == 0.0) return {1.0, 0.0};
        return {vx / nn, vy / nn};
    };
    if (lam1 <= tol) out.vectors.push_back(eigvec(lam1));
    if (lam2 <= tol) out.vectors.push_back(eigvec(lam2));
    if (out.vectors.size() == 2) {  // restriction is constant; keep axes
        out.vectors = {{1.0, 0.0}, {0.0, 1.0}};
    }
    out.dim = static_cast<int>(out.vectors.size());
    return out;
}

// ---------------------------------------------------------------------------
// Weighted spherical inner product <p,q>_a = int_{dB_1} p q |y|^a dsigma,
// by a product rule exact for the integrand's degree (plus margin).
inline double sphere_inner(const MultiPoly& p, const MultiPoly& q, double a, int n) {
    if (p.empty() || q.empty()) return 0.0;
    int deg = p.degree() + q.degree();
    auto rule = quad::sphere_rule(n, a, deg + 4);
    double s = 0.0;
    for (const auto& nd : rule) s += nd.w * p.eval(nd.z) * q.eval(nd.z);
    return s;
}

inline double sphere_norm(const MultiPoly& p, double a, int n) {
    return std::sqrt(std::max(0.0, sphere_inner(p, p, a, n)));
}

// ---------------------------------------------------------------------------
// Membership in the cone of admissible blow-up polynomials of order kappa:
// a-harmonic, kappa-homogeneous, even in y, nonnegative on the thin space.
// Nonnegativity is certified by root analysis for n=1 and by quasi-random
// sampling on the thin unit sphere for n=2 (a failure reports a witness).
struct ConeCheck {
    bool member = false;
    std::vector<std::string> failures;
    Point witness{0, 0, 0};
};

inline ConeCheck is_in_P_kappa(const MultiPoly& p, int kappa, double a, int n,
                               int samples = 10000, uint64_t seed = 0) {
    ConeCheck out;
    if (p.empty()) {
        out.failures.push_back("zero polynomial");
        return out;
    }
    if (kappa % 2 != 0 || kappa < 2) out.failures.push_back("order not a positive even integer");
    if (!p.homogeneous_of(kappa)) out.failures.push_back("not homogeneous of the stated order");
    if (!p.even_in_y()) out.failures.push_back("not even in y");
    if (p.even_in_y()) {
        MultiPoly res = la_residual(p, a, n);
        if (res.max_abs_coeff() > 1e-10 * std::max(1.0, p.max_abs_coeff()))
            out.failures.push_back("not a-harmonic");
    }
    MultiPoly pbar = p.restrict_thin();
    if (pbar.empty()) out.failures.push_back("vanishes identically on the thin space");
    if (n == 1) {
        // Homogeneous in one variable: sign decided by the single coefficient.
        double c = pbar.coeff({kappa, 0, 0});
        if (!pbar.empty() && (c < 0.0 || kappa % 2 != 0)) {
            out.failures.push_back("negative on the thin space");
            out.witness = {c < 0 ? 1.0 : -1.0, 0, 0};
        }
    } else if (!pbar.empty()) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        const double golden = 0.6180339887498949;
        double u0 = U(rng);
        for (int i = 0; i < samples; ++i) {
            double t = 2.0 * M_PI * std::fmod(u0 + golden * i, 1.0);
            Point z{std::cos(t), std::sin(t), 0.0};
            double v = pbar.eval(z);
            if (v < -1e-12 * std::max(1.0, pbar.max_abs_coeff())) {
                out.failures.push_back("negative on the thin space");
                out.witness = z;
                break;
            }
        }
    }
    out.member = out.failures.empty();
    return out;
}

// ---------------------------------------------------------------------------
// Canonical text form: "c * x1^i x2^j y^k +- ...", terms ordered by descending
// total degree then by exponent order. Whitespace-insensitive parse.
inline std::string to_string(const MultiPoly& p) {
    if (p.empty()) return "0";
    std::vector<std::pair<MIdx, double>> ts(p.terms().begin(), p.terms().end());
    std::sort(ts.begin(), ts.end(), [](const auto& A, const auto& B) {
        int da = A.first.degree(), db = B.first.degree();
        if (da != db) return da > db;
        return B.first < A.first;
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : ts) {
        double cc = c;
        if (first) {
            if (cc < 0) {
                os << "-";
                cc = -cc;
            }
        } else {
            os << (cc < 0 ? " - " : " + ");
            cc = std::abs(cc);
        }
        first = false;
        bool has_vars = m.e1 || m.e2 || m.ey;
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", cc);
        if (!has_vars || std::string(buf) != "1") {
            os << buf;
            if (has_vars) os << "*";
        }
        bool star = false;
        auto put = [&](const char* v, int e) {
            if (!e) return;
            if (star) os << " ";
            os << v;
            if (e > 1) os << "^" << e;
            star = true;
        };
        put("x1", m.e1);
        put("x2", m.e2);
        put("y", m.ey);
    }
    return os.str();
}

namespace detail {
struct PolyLexer {
    const std::string& s;
    size_t i = 0;
    explicit PolyLexer(const std::string& str) : s(str) {}
    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eof() {
        skip();
        return i >= s.size();
    }
    char peek() {
        skip();
        return i < s.size() ? s[i] : '\0';
    }
    bool accept(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
};
} // namespace detail

// Parses the canonical text form (and reasonable variants: optional '*',
// optional exponents, arbitrary whitespace). Throws on malformed input.
inline MultiPoly parse_poly(const std::string& text) {
    detail::PolyLexer lx(text);
    MultiPoly out;
    bool any = false;
    while (!lx.eof()) {
        double sign = 1.0;
        while (true) {
            if (lx.accept('+')) continue;
            if (lx.accept('-')) {
                sign = -sign;
                continue;
            }
            break;
        }
        if (lx.eof()) break;
        double coeff = 1.0;
        bool saw_coeff = false;
        lx.skip();
        if (lx.i < lx.s.size() && (std::isdigit(static_cast<unsigned char>(lx.s[lx.i])) || lx.s[lx.i] == '.')) {
            char* end = nullptr;
            coeff = std::strtod(lx.s.c_str() + lx.i, &end);
            lx.i = end - lx.s.c_str();
            saw_coeff = true;
            // allow rational literals "p/q"
            if (lx.accept('/')) {
                char* e2 = nullptr;
                double den = std::strtod(lx.s.c_str() + lx.i, &e2);
                if (e2 == lx.s.c_str() + lx.i || den == 0.0) throw std::invalid_argument("parse_poly: bad rational");
                lx.i = e2 - lx.s.c_str();
                coeff /= den;
            }
        }
        lx.accept('*');
        MIdx m;
        bool saw_var = true;
        while (saw_var) {
            saw_var = false;
            lx.skip();
            lx.accept('*');
            lx.skip();
            int* slot = nullptr;
            if (lx.i + 1 < lx.s.size() && lx.s[lx.i] == 'x' &&
                (lx.s[lx.i + 1] == '1' || lx.s[lx.i + 1] == '2')) {
                slot = lx.s[lx.i + 1] == '1' ? &m.e1 : &m.e2;
                lx.i += 2;
            } else if (lx.i < lx.s.size() && lx.s[lx.i] == 'y') {
                slot = &m.ey;
                lx.i += 1;
            }
            if (slot) {
                int e = 1;
                if (lx.accept('^')) {
                    lx.skip();
                    char* end = nullptr;
                    e = static_cast<int>(std::strtol(lx.s.c_str() + lx.i, &end, 10));
                    if (end == lx.s.c_str() + lx.i || e < 0) throw std::invalid_argument("parse_poly: bad exponent");
                    lx.i = end - lx.s.c_str();
                }
                *slot += e;
                saw_var = true;
            }
        }
        if (!saw_coeff && m.e1 == 0 && m.e2 == 0 && m.ey == 0)
            throw std::invalid_argument("parse_poly: empty term near position " + std::to_string(lx.i));
        out.add_term(m, sign * coeff);
        any = true;
    }
    if (!any) throw std::invalid_argument("parse_poly: no terms");
    return out;
}

// Basis of the space of kappa-homogeneous, even-in-y, a-harmonic polynomials:
// the even extension is a bijection from thin-space homogeneous polynomials.
inline std::vector<MultiPoly> harmonic_basis(int n, int kappa, double a) {
    std::vector<MultiPoly> basis;
    if (n == 1) {
        basis.push_back(ext_a(MultiPoly::monomial({kappa, 0, 0}, 1.0), a, n));
    } else {
        for (int i = kappa; i >= 0; --i)
            basis.push_back(ext_a(MultiPoly::monomial({i, kappa - i, 0}, 1.0), a, n));
    }
    return basis;
}

} // namespace fblab

#endif
