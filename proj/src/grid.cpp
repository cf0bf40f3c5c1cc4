#include "capflow/grid.hpp"

#include <stdexcept>

namespace capflow {

Vec2 Grid::cell_closure(int c) const {
    Vec2 sum;
    const int i = ci(c), j = cj(c);
    const double rw = origin.x + i * dx;       // west face radius
    const double re = origin.x + (i + 1) * dx; // east face radius
    if (axisymmetric) {
        sum.x = re * dy - rw * dy - dx * dy;   // wedge side faces project -dx*dy radially
    } else {
        sum.x = dy - dy;
    }
    (void)j;
    sum.y = 0.0; // top/bottom areas cancel in both metrics
    return sum;
}

static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

Grid build_grid(int nx, int ny, double lx, double ly, Vec2 origin,
                bool axisymmetric, std::array<PatchSpec, 4> patches) {
    require(nx >= 3 && ny >= 3, "grid: nx and ny must be >= 3");
    require(lx > 0.0 && ly > 0.0, "grid: extents must be positive");
    const bool per_x = patches[side_left].kind == PatchKind::periodic ||
                       patches[side_right].kind == PatchKind::periodic;
    const bool per_y = patches[side_bottom].kind == PatchKind::periodic ||
                       patches[side_top].kind == PatchKind::periodic;
    if (per_x)
        require(patches[side_left].kind == PatchKind::periodic &&
                    patches[side_right].kind == PatchKind::periodic,
                "grid: periodic left/right must pair");
    if (per_y)
        require(patches[side_bottom].kind == PatchKind::periodic &&
                    patches[side_top].kind == PatchKind::periodic,
                "grid: periodic bottom/top must pair");
    if (axisymmetric) {
        require(origin.x >= 0.0, "grid: axisymmetric grid crosses r < 0");
        require(!per_x, "grid: axisymmetric grid cannot be x-periodic");
    }

    Grid g;
    g.nx = nx;
    g.ny = ny;
    g.dx = lx / nx;
    g.dy = ly / ny;
    g.origin = origin;
    g.axisymmetric = axisymmetric;
    g.patches = patches;

    auto xface_area = [&](double r) { return axisymmetric ? r * g.dy : g.dy; };
    auto yface_area = [&](double rc) { return axisymmetric ? rc * g.dx : g.dx; };

    // x-faces, row-major; the wrap face replaces both i=0 and i=nx positions.
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double xf = origin.x + i * g.dx;
            const double yf = origin.y + (j + 0.5) * g.dy;
            Face f;
            f.center = {xf, yf};
            f.area = xface_area(xf);
            if (i == 0 && per_x) {
                f.owner = g.cell(0, j);
                f.neighbour = g.cell(nx - 1, j);
                f.normal = {-1.0, 0.0};
                f.d = {-g.dx, 0.0};
                f.wrap = true;
                ++g.n_interior_faces;
            } else if (i == 0) {
                f.owner = g.cell(0, j);
                f.normal = {-1.0, 0.0};
                f.d = {-0.5 * g.dx, 0.0};
                f.patch = side_left;
            } else if (i == nx) {
                if (per_x) continue;
                f.owner = g.cell(nx - 1, j);
                f.normal = {1.0, 0.0};
                f.d = {0.5 * g.dx, 0.0};
                f.patch = side_right;
            } else {
                f.owner = g.cell(i - 1, j);
                f.neighbour = g.cell(i, j);
                f.normal = {1.0, 0.0};
                f.d = {g.dx, 0.0};
                ++g.n_interior_faces;
            }
            g.faces.push_back(f);
        }
    }
    // y-faces, row-major.
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double xf = origin.x + (i + 0.5) * g.dx;
            const double yf = origin.y + j * g.dy;
            Face f;
            f.center = {xf, yf};
            f.area = yface_area(xf);
            if (j == 0 && per_y) {
                f.owner = g.cell(i, 0);
                f.neighbour = g.cell(i, ny - 1);
                f.normal = {0.0, -1.0};
                f.d = {0.0, -g.dy};
                f.wrap = true;
                ++g.n_interior_faces;
            } else if (j == 0) {
                f.owner = g.cell(i, 0);
                f.normal = {0.0, -1.0};
                f.d = {0.0, -0.5 * g.dy};
                f.patch = side_bottom;
            } else if (j == ny) {
                if (per_y) continue;
                f.owner = g.cell(i, ny - 1);
                f.normal = {0.0, 1.0};
                f.d = {0.0, 0.5 * g.dy};
                f.patch = side_top;
            } else {
                f.owner = g.cell(i, j - 1);
                f.neighbour = g.cell(i, j);
                f.normal = {0.0, 1.0};
                f.d = {0.0, g.dy};
                ++g.n_interior_faces;
            }
            g.faces.push_back(f);
        }
    }
    return g;
}

Vec2 face_distance(const Grid& g, int f) {
    const Face& face = g.faces.at(f);
    if (face.neighbour < 0) throw std::invalid_argument("face_distance: boundary face");
    return face.d;
}

} // namespace capflow
