#include "elastodpg/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace elastodpg {

namespace {

// P_i^{(a,0)}(z) and d/dz for i = 0..n into val/der (arrays of size n+1).
void jacobi_row(int n, double a, double z, double* val, double* der) {
    const double b = 0.0;
    val[0] = 1.0;
    der[0] = 0.0;
    if (n == 0) return;
    val[1] = 0.5 * ((a + b + 2.0) * z + (a - b));
    der[1] = 0.5 * (a + b + 2.0);
    for (int i = 2; i <= n; ++i) {
        const double s = 2.0 * i + a + b;
        const double c1 = 2.0 * i * (i + a + b) * (s - 2.0);
        const double c2 = (s - 1.0) * s * (s - 2.0);
        const double c3 = (s - 1.0) * (a * a - b * b);
        const double c4 = 2.0 * (i + a - 1.0) * (i + b - 1.0) * s;
        val[i] = ((c2 * z + c3) * val[i - 1] - c4 * val[i - 2]) / c1;
        der[i] = ((c2 * z + c3) * der[i - 1] + c2 * val[i - 1] - c4 * der[i - 2]) / c1;
    }
}

int mode_index(int m, int n) {
    const int d = m + n;
    return d * (d + 1) / 2 + m;
}

}  // namespace

TriangleBasis::TriangleBasis(int degree) : degree_(degree) {
    if (degree < 0) throw std::invalid_argument("TriangleBasis: negative degree");
}

void TriangleBasis::eval(const std::vector<Point2>& pts, Eigen::MatrixXd* v,
                         Eigen::MatrixXd* dx, Eigen::MatrixXd* dy) const {
    const int k = degree_;
    const int np = static_cast<int>(pts.size());
    if (v) v->resize(dim(), np);
    if (dx) dx->resize(dim(), np);
    if (dy) dy->resize(dim(), np);

    // Scaled Legendre S_m(x,s) = s^m P_m(2x/s - 1) with s = 1-y, evaluated by
    // a recurrence that stays polynomial through the collapsed vertex s = 0.
    std::vector<double> S(k + 1), Sx(k + 1), Ss(k + 1);
    std::vector<double> J(k + 1), dJ(k + 1);
    for (int p = 0; p < np; ++p) {
        const double x = pts[p].x;
        const double y = pts[p].y;
        const double s = 1.0 - y;
        S[0] = 1.0;
        Sx[0] = 0.0;
        Ss[0] = 0.0;
        if (k >= 1) {
            S[1] = 2.0 * x - s;
            Sx[1] = 2.0;
            Ss[1] = -1.0;
        }
        for (int m = 1; m < k; ++m) {
            S[m + 1] = ((2.0 * m + 1.0) * (2.0 * x - s) * S[m] - m * s * s * S[m - 1]) / (m + 1.0);
            Sx[m + 1] = ((2.0 * m + 1.0) * (2.0 * S[m] + (2.0 * x - s) * Sx[m]) -
                         m * s * s * Sx[m - 1]) /
                        (m + 1.0);
            Ss[m + 1] = ((2.0 * m + 1.0) * (-S[m] + (2.0 * x - s) * Ss[m]) -
                         m * (2.0 * s * S[m - 1] + s * s * Ss[m - 1])) /
                        (m + 1.0);
        }
        const double z = 2.0 * y - 1.0;
        for (int m = 0; m <= k; ++m) {
            jacobi_row(k - m, 2.0 * m + 1.0, z, J.data(), dJ.data());
            for (int n = 0; n + m <= k; ++n) {
                const double c = std::sqrt(2.0 * (2.0 * m + 1.0) * (m + n + 1.0));
                const int row = mode_index(m, n);
                if (v) (*v)(row, p) = c * S[m] * J[n];
                if (dx) (*dx)(row, p) = c * Sx[m] * J[n];
                if (dy) (*dy)(row, p) = c * (-Ss[m] * J[n] + 2.0 * S[m] * dJ[n]);
            }
        }
    }
}

Eigen::MatrixXd TriangleBasis::values(const std::vector<Point2>& pts) const {
    Eigen::MatrixXd v;
    eval(pts, &v, nullptr, nullptr);
    return v;
}

Eigen::MatrixXd TriangleBasis::values(const QuadratureRule& q) const {
    std::vector<Point2> pts(q.size());
    for (int i = 0; i < q.size(); ++i) pts[i] = {q.x(i), q.y(i)};
    return values(pts);
}

void TriangleBasis::gradients(const std::vector<Point2>& pts, Eigen::MatrixXd& dx,
                              Eigen::MatrixXd& dy) const {
    eval(pts, nullptr, &dx, &dy);
}

void TriangleBasis::gradients(const QuadratureRule& q, Eigen::MatrixXd& dx,
                              Eigen::MatrixXd& dy) const {
    std::vector<Point2> pts(q.size());
    for (int i = 0; i < q.size(); ++i) pts[i] = {q.x(i), q.y(i)};
    gradients(pts, dx, dy);
}

AffineMap affine_map(const Mesh& m, int t) {
    AffineMap map;
    const Point2 v0 = m.vertex(t, 0), v1 = m.vertex(t, 1), v2 = m.vertex(t, 2);
    map.origin = v0;
    map.J << v1.x - v0.x, v2.x - v0.x, v1.y - v0.y, v2.y - v0.y;
    map.det = map.J.determinant();
    map.Jinv = map.J.inverse();
    return map;
}

Eigen::MatrixXd legendre_values_1d(int degree, const std::vector<double>& t) {
    Eigen::MatrixXd v(degree + 1, t.size());
    for (int p = 0; p < static_cast<int>(t.size()); ++p) {
        const double z = 2.0 * t[p] - 1.0;
        double pm1 = 0.0, pm = 1.0;
        for (int i = 0; i <= degree; ++i) {
            v(i, p) = std::sqrt(2.0 * i + 1.0) * pm;
            const double next = ((2.0 * i + 1.0) * z * pm - i * pm1) / (i + 1.0);
            pm1 = pm;
            pm = next;
        }
    }
    return v;
}

Eigen::MatrixXd lagrange_values_1d(const std::vector<double>& nodes,
                                   const std::vector<double>& t) {
    const int n = static_cast<int>(nodes.size());
    Eigen::MatrixXd v(n, t.size());
    for (int p = 0; p < static_cast<int>(t.size()); ++p)
        for (int i = 0; i < n; ++i) {
            double prod = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) prod *= (t[p] - nodes[j]) / (nodes[i] - nodes[j]);
            v(i, p) = prod;
        }
    return v;
}

}  // namespace elastodpg
