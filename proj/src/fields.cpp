#include "capflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace capflow {

VectorField gradient(const ScalarField& f, const Grid& g) {
    VectorField grad(g.n_cells());
    for (const Face& face : g.faces) {
        if (face.neighbour < 0) continue; // zero-gradient closure: no contribution
        const double fm = 0.5 * (f[face.owner] + f[face.neighbour]);
        const Vec2 S = face.normal * face.area;
        grad[face.owner] += (fm - f[face.owner]) * S;
        grad[face.neighbour] -= (fm - f[face.neighbour]) * S;
    }
    for (int c = 0; c < g.n_cells(); ++c) grad[c] = grad[c] / g.cell_volume(c);
    return grad;
}

FaceField interpolate_to_faces(const ScalarField& f, const Grid& g) {
    FaceField out(static_cast<int>(g.faces.size()));
    for (int k = 0; k < out.size(); ++k) {
        const Face& face = g.faces[k];
        out[k] = face.neighbour >= 0 ? 0.5 * (f[face.owner] + f[face.neighbour])
                                     : f[face.owner];
    }
    return out;
}

ScalarField divergence(const FaceField& phi, const Grid& g) {
    ScalarField div(g.n_cells());
    for (int k = 0; k < static_cast<int>(g.faces.size()); ++k) {
        const Face& face = g.faces[k];
        div[face.owner] += phi[k];
        if (face.neighbour >= 0) div[face.neighbour] -= phi[k];
    }
    for (int c = 0; c < g.n_cells(); ++c) div[c] /= g.cell_volume(c);
    return div;
}

ScalarField smooth_alpha(const ScalarField& alpha, const Grid& g, int n_iters) {
    if (n_iters < 0) throw std::invalid_argument("smooth_alpha: n_iters must be >= 0");
    ScalarField cur = alpha;
    for (int it = 0; it < n_iters; ++it) {
        ScalarField next(g.n_cells());
        for (const Face& face : g.faces) {
            const double fm = face.neighbour >= 0
                                  ? 0.5 * (cur[face.owner] + cur[face.neighbour])
                                  : cur[face.owner];
            next[face.owner] += fm;
            if (face.neighbour >= 0) next[face.neighbour] += fm;
        }
        for (int c = 0; c < g.n_cells(); ++c) next[c] *= 0.25; // 4 faces per cell
        cur = std::move(next);
    }
    return cur;
}

NormalField interface_normal(const ScalarField& alpha_s, const Grid& g) {
    NormalField nf;
    nf.n = gradient(alpha_s, g);
    nf.usable.assign(g.n_cells(), 0);
    const double eps = 1e-8 / std::min(g.dx, g.dy);
    for (int c = 0; c < g.n_cells(); ++c) {
        const double m = nf.n[c].norm();
        if (m > eps) {
            nf.n[c] = nf.n[c] / m;
            nf.usable[c] = 1;
        } else {
            nf.n[c] = {0.0, 0.0};
        }
    }
    return nf;
}

VectorField reconstruct_cell_velocity(const FaceField& phi, const Grid& g) {
    VectorField v(g.n_cells());
    for (int k = 0; k < static_cast<int>(g.faces.size()); ++k) {
        const Face& face = g.faces[k];
        if (face.area <= 0.0) continue; // axis face: zero flux, counts as zero velocity
        const double un = phi[k] / face.area;
        if (face.normal.x != 0.0) {
            const double ux = un * face.normal.x; // signed along +x
            v[face.owner].x += 0.5 * ux;
            if (face.neighbour >= 0) v[face.neighbour].x += 0.5 * ux;
        } else {
            const double uy = un * face.normal.y;
            v[face.owner].y += 0.5 * uy;
            if (face.neighbour >= 0) v[face.neighbour].y += 0.5 * uy;
        }
    }
    return v;
}

} // namespace capflow
