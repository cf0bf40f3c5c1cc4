#include "capflow/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace capflow {

namespace {

// Strictly-lower CSR pattern of the face graph plus the diagonal factor.
struct Ic0 {
    std::vector<int> row_start, cols;
    std::vector<double> vals;
    std::vector<double> ldiag;
    // transpose access for the backward sweep
    std::vector<int> tr_start, tr_row, tr_idx;
};

Ic0 factor(const Grid& g, const PressureAssembly& sys) {
    const int n = g.n_cells();
    std::vector<std::vector<std::pair<int, double>>> lower(n);
    for (int f = 0; f < static_cast<int>(g.faces.size()); ++f) {
        const Face& face = g.faces[f];
        if (face.neighbour < 0 || sys.a_face[f] == 0.0) continue;
        const int lo = std::min(face.owner, face.neighbour);
        const int hi = std::max(face.owner, face.neighbour);
        lower[hi].emplace_back(lo, -sys.a_face[f]);
    }
    Ic0 ic;
    ic.row_start.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) {
        std::sort(lower[i].begin(), lower[i].end());
        ic.row_start[i + 1] = ic.row_start[i] + static_cast<int>(lower[i].size());
    }
    ic.cols.resize(ic.row_start[n]);
    ic.vals.resize(ic.row_start[n]);
    ic.ldiag.assign(n, 1.0);

    const double shift = sys.singular ? 1e-8 : 0.0;
    for (int i = 0; i < n; ++i) {
        int base = ic.row_start[i];
        for (int k = 0; k < static_cast<int>(lower[i].size()); ++k)
            ic.cols[base + k] = lower[i][k].first;
        for (int k = 0; k < static_cast<int>(lower[i].size()); ++k) {
            const int col = lower[i][k].first;
            double s = lower[i][k].second;
            // intersect row i and row col over columns < col
            int a = ic.row_start[i], b = ic.row_start[col];
            const int ae = base + k, be = ic.row_start[col + 1];
            while (a < ae && b < be) {
                if (ic.cols[a] == ic.cols[b]) {
                    s -= ic.vals[a] * ic.vals[b];
                    ++a;
                    ++b;
                } else if (ic.cols[a] < ic.cols[b]) {
                    ++a;
                } else {
                    ++b;
                }
            }
            ic.vals[base + k] = s / ic.ldiag[col];
        }
        double s = sys.diag[i] * (1.0 + shift);
        for (int k = base; k < ic.row_start[i + 1]; ++k) s -= ic.vals[k] * ic.vals[k];
        const double floor = 1e-12 * std::max(sys.diag[i], 1e-300);
        ic.ldiag[i] = std::sqrt(std::max(s, floor));
    }

    ic.tr_start.assign(n + 1, 0);
    for (int idx = 0; idx < static_cast<int>(ic.cols.size()); ++idx)
        ++ic.tr_start[ic.cols[idx] + 1];
    for (int i = 0; i < n; ++i) ic.tr_start[i + 1] += ic.tr_start[i];
    ic.tr_row.resize(ic.cols.size());
    ic.tr_idx.resize(ic.cols.size());
    std::vector<int> cursor(ic.tr_start.begin(), ic.tr_start.end() - 1);
    for (int i = 0; i < n; ++i)
        for (int idx = ic.row_start[i]; idx < ic.row_start[i + 1]; ++idx) {
            const int c = ic.cols[idx];
            ic.tr_row[cursor[c]] = i;
            ic.tr_idx[cursor[c]] = idx;
            ++cursor[c];
        }
    return ic;
}

void apply_preconditioner(const Ic0& ic, const std::vector<double>& r, std::vector<double>& z,
                          std::vector<double>& work) {
    const int n = static_cast<int>(ic.ldiag.size());
    // L y = r
    for (int i = 0; i < n; ++i) {
        double s = r[i];
        for (int idx = ic.row_start[i]; idx < ic.row_start[i + 1]; ++idx)
            s -= ic.vals[idx] * work[ic.cols[idx]];
        work[i] = s / ic.ldiag[i];
    }
    // L^T z = y
    for (int i = n - 1; i >= 0; --i) {
        double s = work[i];
        for (int idx = ic.tr_start[i]; idx < ic.tr_start[i + 1]; ++idx)
            s -= ic.vals[ic.tr_idx[idx]] * z[ic.tr_row[idx]];
        z[i] = s / ic.ldiag[i];
    }
}

void matvec(const Grid& g, const PressureAssembly& sys, const std::vector<double>& x,
            std::vector<double>& y) {
    const int n = g.n_cells();
    for (int i = 0; i < n; ++i) y[i] = sys.diag[i] * x[i];
    for (int f = 0; f < static_cast<int>(g.faces.size()); ++f) {
        const Face& face = g.faces[f];
        if (face.neighbour < 0 || sys.a_face[f] == 0.0) continue;
        y[face.owner] -= sys.a_face[f] * x[face.neighbour];
        y[face.neighbour] -= sys.a_face[f] * x[face.owner];
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void demean(std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

} // namespace

SolveStats solve_pressure(const Grid& g, const PressureAssembly& sys, std::vector<double>& p,
                          double tol) {
    const int n = g.n_cells();
    if (static_cast<int>(p.size()) != n) p.assign(n, 0.0);
    if (sys.singular) demean(p);

    const Ic0 ic = factor(g, sys);
    std::vector<double> r(n), z(n), d(n), q(n), work(n);

    matvec(g, sys, p, r);
    for (int i = 0; i < n; ++i) r[i] = sys.rhs[i] - r[i];

    const double bnorm = std::sqrt(dot(sys.rhs, sys.rhs));
    double rnorm = std::sqrt(dot(r, r));
    const double target = tol * std::max(rnorm, bnorm);
    SolveStats st;
    st.residual = rnorm;
    if (rnorm <= target || rnorm == 0.0) return st;

    apply_preconditioner(ic, r, z, work);
    if (sys.singular) demean(z);
    d = z;
    double rz = dot(r, z);
    const int maxit = 10 * n + 100;
    for (int it = 1; it <= maxit; ++it) {
        matvec(g, sys, d, q);
        const double dq = dot(d, q);
        if (!(dq > 0.0)) throw std::runtime_error("solve_pressure: breakdown (non-SPD system)");
        const double al = rz / dq;
        for (int i = 0; i < n; ++i) p[i] += al * d[i];
        for (int i = 0; i < n; ++i) r[i] -= al * q[i];
        rnorm = std::sqrt(dot(r, r));
        if (rnorm <= target) {
            if (sys.singular) demean(p);
            st.iterations = it;
            st.residual = rnorm;
            return st;
        }
        apply_preconditioner(ic, r, z, work);
        if (sys.singular) demean(z);
        const double rz2 = dot(r, z);
        for (int i = 0; i < n; ++i) d[i] = z[i] + (rz2 / rz) * d[i];
        rz = rz2;
    }
    throw std::runtime_error("solve_pressure: no convergence in " + std::to_string(maxit) +
                             " iterations");
}

} // namespace capflow
