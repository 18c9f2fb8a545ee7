// Tensor grid on the half-domain [-1,1]^n x [0,1] with the degenerate weight
// |y|^a integrated exactly over faces and dual cells. Fields are even in y, so
// only y >= 0 is stored; the y = 0 plane carries the thin constraint set and
// the node line {x_n = y = 0} the very thin one.
#ifndef FBLAB_GRID_HPP
#define FBLAB_GRID_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fblab/quadrature.hpp"

namespace fblab {

struct GridSpec {
    int n = 1;        // thin-space dimension (1 or 2)
    int res = 129;    // nodes per axis over [-1,1], odd so x = 0 is a node
    double a = 0.0;   // weight exponent in (-1,1)

    void validate() const {
        if (n != 1 && n != 2) throw std::invalid_argument("GridSpec: n must be 1 or 2");
        if (res < 17 || res % 2 == 0) throw std::invalid_argument("GridSpec: res must be odd and >= 17");
        if (!(a > -1.0 && a < 1.0)) throw std::invalid_argument("GridSpec: a must lie in (-1,1)");
    }
};

// int_{y0}^{y1} y^a dy, exact.
inline double weight_integral(double y0, double y1, double a) {
    return (std::pow(y1, 1.0 + a) - std::pow(y0, 1.0 + a)) / (1.0 + a);
}
// int_{y0}^{y1} y^{-a} dy, the conjugate integral entering the flux-exact
// transverse coupling 1 / int y^{-a}.
inline double conjugate_integral(double y0, double y1, double a) {
    return (std::pow(y1, 1.0 - a) - std::pow(y0, 1.0 - a)) / (1.0 - a);
}

class Grid {
  public:
    explicit Grid(GridSpec spec) : spec_(spec) {
        spec.validate();
        h_ = 2.0 / (spec.res - 1);
        ny_ = (spec.res + 1) / 2;  // y-levels 0..(res-1)/2 covering [0,1]
        nx_ = spec.res;
        face_weights_y_.resize(ny_ - 1);
        dual_weights_y_.resize(ny_);
        conj_couplings_y_.resize(ny_ - 1);
        for (int k = 0; k + 1 < ny_; ++k) {
            face_weights_y_[k] = weight_integral(y(k), y(k + 1), spec.a);
            conj_couplings_y_[k] = 1.0 / conjugate_integral(y(k), y(k + 1), spec.a);
        }
        dual_weights_y_[0] = weight_integral(0.0, 0.5 * h_, spec.a);
        for (int k = 1; k + 1 < ny_; ++k)
            dual_weights_y_[k] = weight_integral(y(k) - 0.5 * h_, y(k) + 0.5 * h_, spec.a);
        dual_weights_y_[ny_ - 1] = weight_integral(1.0 - 0.5 * h_, 1.0, spec.a);
        for (double w : face_weights_y_)
            if (!(w > 0.0)) throw std::runtime_error("Grid: nonpositive face weight");
    }

    const GridSpec& spec() const { return spec_; }
    int n() const { return spec_.n; }
    double a() const { return spec_.a; }
    double h() const { return h_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }

    double x(int i) const { return -1.0 + h_ * i; }
    double y(int k) const { return h_ * k; }
    int mid() const { return (nx_ - 1) / 2; }  // index of the x = 0 node

    // exact int_{[y_k, y_{k+1}]} y^a dy
    double face_weight_y(int k) const { return face_weights_y_[k]; }
    // exact int over the dual interval of node level k (half cell at k = 0)
    double dual_weight_y(int k) const { return dual_weights_y_[k]; }
    // 1 / int_{[y_k,y_{k+1}]} y^{-a} dy; reproduces the weighted flux of the
    // one-dimensional a-harmonic profile between the two levels exactly
    double coupling_y(int k) const { return conj_couplings_y_[k]; }

    size_t node_count() const {
        return spec_.n == 1 ? static_cast<size_t>(nx_) * ny_
                            : static_cast<size_t>(nx_) * nx_ * ny_;
    }
    // axis-major flat index, order (x1[, x2], y), y fastest
    size_t index(int i1, int i2, int k) const {
        return spec_.n == 1 ? static_cast<size_t>(i1) * ny_ + k
                            : (static_cast<size_t>(i1) * nx_ + i2) * ny_ + k;
    }

    bool on_x_boundary(int i1, int i2) const {
        if (i1 == 0 || i1 == nx_ - 1) return true;
        if (spec_.n == 2 && (i2 == 0 || i2 == nx_ - 1)) return true;
        return false;
    }

    // Thin constraint set: interior nodes of the plane {y = 0}.
    // Very thin constraint set: interior nodes of the line {x_n = y = 0}.
    std::vector<size_t> thin_mask() const {
        std::vector<size_t> m;
        if (spec_.n == 1) {
            for (int i = 1; i < nx_ - 1; ++i) m.push_back(index(i, 0, 0));
        } else {
            for (int i = 1; i < nx_ - 1; ++i)
                for (int j = 1; j < nx_ - 1; ++j) m.push_back(index(i, j, 0));
        }
        return m;
    }
    std::vector<size_t> verythin_mask() const {
        std::vector<size_t> m;
        if (spec_.n == 1) {
            m.push_back(index(mid(), 0, 0));
        } else {
            for (int i = 1; i < nx_ - 1; ++i) m.push_back(index(i, mid(), 0));
        }
        return m;
    }

    Point coords(size_t flat) const {
        int k = static_cast<int>(flat % ny_);
        size_t rest = flat / ny_;
        if (spec_.n == 1) return {x(static_cast<int>(rest)), 0.0, y(k)};
        int i2 = static_cast<int>(rest % nx_);
        int i1 = static_cast<int>(rest / nx_);
        return {x(i1), x(i2), y(k)};
    }

  private:
    GridSpec spec_;
    double h_ = 0.0;
    int nx_ = 0, ny_ = 0;
    std::vector<double> face_weights_y_;
    std::vector<double> dual_weights_y_;
    std::vector<double> conj_couplings_y_;
};

inline Grid build_grid(const GridSpec& spec) { return Grid(spec); }

// Nodal values of an even-in-y function on the half-domain.
struct ScalarField {
    const Grid* grid = nullptr;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(&g), values(g.node_count(), 0.0) {}

    double& at(int i1, int i2, int k) { return values[grid->index(i1, i2, k)]; }
    double at(int i1, int i2, int k) const { return values[grid->index(i1, i2, k)]; }

    // Multilinear interpolation using the even reflection across y = 0.
    double interp(const Point& p) const {
        const Grid& g = *grid;
        double yy = std::abs(p[2]);
        double fi = (p[0] + 1.0) / g.h();
        double fk = yy / g.h();
        int i = static_cast<int>(std::floor(fi));
        int k = static_cast<int>(std::floor(fk));
        i = std::min(std::max(i, 0), g.nx() - 2);
        k = std::min(std::max(k, 0), g.ny() - 2);
        double si = fi - i, sk = fk - k;
        if (g.n() == 1) {
            double v00 = at(i, 0, k), v10 = at(i + 1, 0, k);
            double v01 = at(i, 0, k + 1), v11 = at(i + 1, 0, k + 1);
            return (1 - si) * ((1 - sk) * v00 + sk * v01) + si * ((1 - sk) * v10 + sk * v11);
        }
        double fj = (p[1] + 1.0) / g.h();
        int j = static_cast<int>(std::floor(fj));
        j = std::min(std::max(j, 0), g.nx() - 2);
        double sj = fj - j;
        double acc = 0.0;
        for (int di = 0; di <= 1; ++di)
            for (int dj = 0; dj <= 1; ++dj)
                for (int dk = 0; dk <= 1; ++dk) {
                    double w = (di ? si : 1 - si) * (dj ? sj : 1 - sj) * (dk ? sk : 1 - sk);
                    acc += w * at(i + di, j + dj, k + dk);
                }
        return acc;
    }
};

} // namespace fblab

#endif
