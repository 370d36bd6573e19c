#include "hmslope/measure_exact.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hmslope {

double strip_upper_measure(const StripConfig& c) {
    if (!(c.d1 > 0.0 && c.d2 > 0.0)) throw GeometryError("strip distances must be positive");
    return c.d2 / (c.d1 + c.d2);
}

double disk_arc_measure(Point z, const BoundaryArc& arc) {
    checked_point(z);
    if (std::abs(z) >= 1.0) throw GeometryError("disk_arc_measure requires |z| < 1");
    if (z == 0.0) return arc.length() / (2.0 * kPi);
    return mobius_to_zero(z)(arc).length() / (2.0 * kPi);
}

RectangleMeasures rectangle_center_measures(double d1, double d2, double u) {
    if (!(d1 > 0.0 && d2 > 0.0 && u > 0.0)) throw GeometryError("rectangle dimensions must be positive");
    const double h = d1 + d2;
    // Sides carrying 1 and sides carrying y/h, both evaluated at the centre.
    double sides = 0.0;
    double linear = 0.0;
    for (int m = 1; m < 100000; ++m) {
        const double x = m * kPi * u / (2.0 * h);
        const double e = std::exp(-x);
        const double sech = 2.0 * e / (1.0 + e * e);
        const double term = std::sin(m * kPi * d2 / h) * sech / (m * kPi);
        if (m % 2 == 1) sides += 4.0 * term;
        linear += (m % 2 == 1 ? 2.0 : -2.0) * term;
        if (sech < 1e-18 * m) break;
    }
    RectangleMeasures r;
    r.sides = sides;
    r.top = d2 / h - linear;
    r.bottom = 1.0 - r.top - r.sides;
    return r;
}

GridProblem::GridProblem(Point origin, double spacing, int nx, int ny, Point eval)
    : origin_(checked_point(origin)), spacing_(spacing), nx_(nx), ny_(ny), eval_(checked_point(eval)) {
    if (!(spacing > 0.0)) throw GridConfigError("grid spacing must be positive");
    if (nx < 3 || ny < 3) throw GridConfigError("grid needs at least 3x3 nodes");
    kinds_.assign(static_cast<std::size_t>(nx) * ny, CellKind::Interior);
    values_.assign(kinds_.size(), 0.0);
}

void GridProblem::set(int i, int j, CellKind kind) {
    const auto k = index(i, j);
    kinds_[k] = kind;
    values_[k] = kind == CellKind::One ? 1.0 : 0.0;
}

void GridProblem::set_fixed(int i, int j, double value) {
    const auto k = index(i, j);
    kinds_[k] = CellKind::Fixed;
    values_[k] = value;
}

namespace {

struct EvalStencil {
    int i0 = 0;
    int j0 = 0;
    double fx = 0.0;
    double fy = 0.0;
};

EvalStencil locate(const GridProblem& p) {
    const double gx = (p.eval().real() - p.origin().real()) / p.spacing();
    const double gy = (p.eval().imag() - p.origin().imag()) / p.spacing();
    const double snap = 1e-9;
    auto split = [snap](double g, int n, int& base, double& frac) {
        double r = std::round(g);
        if (std::abs(g - r) < snap) g = r;
        base = static_cast<int>(std::floor(g));
        frac = g - base;
        if (base == n - 1 && frac == 0.0) {
            base = n - 2;
            frac = 1.0;
        }
    };
    EvalStencil s;
    if (gx < 0.0 || gy < 0.0 || gx > p.nx() - 1 || gy > p.ny() - 1)
        throw GridConfigError("evaluation point outside the grid box");
    split(gx, p.nx(), s.i0, s.fx);
    split(gy, p.ny(), s.j0, s.fy);
    return s;
}

}  // namespace

void GridProblem::validate() const {
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            if (kind(i, j) != CellKind::Interior) continue;
            if (i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1)
                throw GridConfigError("interior node on the grid edge has no boundary label");
            const CellKind nb[4] = {kind(i - 1, j), kind(i + 1, j), kind(i, j - 1), kind(i, j + 1)};
            for (CellKind k : nb)
                if (k == CellKind::Exterior)
                    throw GridConfigError("interior node adjacent to an unlabeled exterior node");
        }
    }
    const EvalStencil s = locate(*this);
    const int ni = static_cast<int>(std::lround(s.i0 + s.fx));
    const int nj = static_cast<int>(std::lround(s.j0 + s.fy));
    if (kind(ni, nj) != CellKind::Interior) throw GridConfigError("evaluation point is not interior");
    for (int dj = 0; dj <= 1; ++dj)
        for (int di = 0; di <= 1; ++di)
            if (kind(s.i0 + di, s.j0 + dj) == CellKind::Exterior)
                throw GridConfigError("evaluation stencil touches the exterior");
}

GridProblem GridProblem::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    double spacing = 1.0;
    Point origin{0.0, 0.0};
    Point eval{0.0, 0.0};
    bool have_eval = false;
    std::vector<std::string> rows;
    bool in_grid = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (in_grid) {
            if (!line.empty()) rows.push_back(line);
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "grid") {
            in_grid = true;
        } else if (key == "spacing") {
            ls >> spacing;
        } else if (key == "origin") {
            double x = 0, y = 0;
            ls >> x >> y;
            origin = {x, y};
        } else if (key == "eval") {
            double x = 0, y = 0;
            ls >> x >> y;
            eval = {x, y};
            have_eval = true;
        } else {
            throw GridConfigError("unknown grid header key '" + key + "'");
        }
        if (ls.fail()) throw GridConfigError("malformed grid header line: " + line);
    }
    if (!have_eval) throw GridConfigError("grid file lacks an eval line");
    if (rows.empty()) throw GridConfigError("grid file has no rows");
    const int ny = static_cast<int>(rows.size());
    const int nx = static_cast<int>(rows.front().size());
    GridProblem p(origin, spacing, nx, ny, eval);
    for (int r = 0; r < ny; ++r) {
        if (static_cast<int>(rows[r].size()) != nx) throw GridConfigError("ragged grid rows");
        const int j = ny - 1 - r;
        for (int i = 0; i < nx; ++i) {
            switch (rows[r][i]) {
                case '.': p.set(i, j, CellKind::Interior); break;
                case '1': p.set(i, j, CellKind::One); break;
                case '0': p.set(i, j, CellKind::Zero); break;
                case '#': p.set(i, j, CellKind::Exterior); break;
                default: throw GridConfigError(std::string("unknown grid character '") + rows[r][i] + "'");
            }
        }
    }
    p.validate();
    return p;
}

GridProblem GridProblem::load(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw GridConfigError("cannot open grid file " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

GridSolution solve_grid(const GridProblem& p, const GridSolveOptions& opts) {
    p.validate();
    const int nx = p.nx();
    const int ny = p.ny();
    std::vector<double> u(static_cast<std::size_t>(nx) * ny, 0.0);
    std::vector<std::size_t> interior;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * nx + i;
            if (p.kind(i, j) == CellKind::Interior)
                interior.push_back(k);
            else
                u[k] = p.value(i, j);
        }
    }
    const double rho = 0.5 * (std::cos(kPi / (nx - 1)) + std::cos(kPi / (ny - 1)));
    const double omega = 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));
    const std::size_t stride = static_cast<std::size_t>(nx);

    GridSolution sol;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        for (std::size_t k : interior) {
            const double avg = 0.25 * (u[k - 1] + u[k + 1] + u[k - stride] + u[k + stride]);
            u[k] += omega * (avg - u[k]);
        }
        if (it % 10 == 0 || it == opts.max_iterations) {
            double res = 0.0;
            for (std::size_t k : interior) {
                const double avg = 0.25 * (u[k - 1] + u[k + 1] + u[k - stride] + u[k + stride]);
                res = std::max(res, std::abs(avg - u[k]));
            }
            sol.iterations = it;
            sol.residual = res;
            if (res < opts.residual_tol) break;
        }
    }
    if (!(sol.residual < opts.residual_tol))
        throw GridConfigError("grid solve did not reach the residual tolerance");

    const EvalStencil s = locate(p);
    auto at = [&](int i, int j) { return u[static_cast<std::size_t>(j) * nx + i]; };
    const double lo = (1.0 - s.fx) * at(s.i0, s.j0) + s.fx * at(s.i0 + 1, s.j0);
    const double hi = (1.0 - s.fx) * at(s.i0, s.j0 + 1) + s.fx * at(s.i0 + 1, s.j0 + 1);
    sol.value = (1.0 - s.fy) * lo + s.fy * hi;
    return sol;
}

GridProblem make_strip_grid(const StripConfig& c, int cells_across, int length_factor) {
    const double height = c.d1 + c.d2;
    if (!(c.d1 > 0.0 && c.d2 > 0.0)) throw GridConfigError("strip distances must be positive");
    if (cells_across < 2 || length_factor < 1) throw GridConfigError("strip grid too small");
    const double h = height / cells_across;
    const int nx = cells_across * length_factor + 1;
    const int ny = cells_across + 1;
    const double length = h * (nx - 1);
    GridProblem p(Point(-length / 2.0, -c.d2), h, nx, ny, Point(0.0, 0.0));
    for (int i = 0; i < nx; ++i) {
        p.set(i, 0, CellKind::Zero);
        p.set(i, ny - 1, CellKind::One);
    }
    for (int j = 1; j < ny - 1; ++j) {
        const double exact = static_cast<double>(j) / (ny - 1);
        p.set_fixed(0, j, exact);
        p.set_fixed(nx - 1, j, exact);
    }
    return p;
}

GridProblem make_disk_grid(const BoundaryArc& one_arc, int cells, Point eval) {
    if (cells < 4) throw GridConfigError("disk grid too small");
    const double h = 2.0 / cells;
    const int n = cells + 1;
    GridProblem p(Point(-1.0, -1.0), h, n, n, eval);
    auto inside = [&](int i, int j) {
        if (i < 0 || j < 0 || i >= n || j >= n) return false;
        return std::abs(p.node(i, j)) < 1.0 - 1e-12;
    };
    const double arc_len = one_arc.length();
    const double chi_arg = std::arg(one_arc.chi());
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (inside(i, j)) {
                p.set(i, j, CellKind::Interior);
                continue;
            }
            const bool touches = inside(i - 1, j) || inside(i + 1, j) || inside(i, j - 1) || inside(i, j + 1);
            if (!touches) {
                p.set(i, j, CellKind::Exterior);
                continue;
            }
            // Clockwise angle from chi to the node's direction.
            double a = std::fmod(chi_arg - std::arg(p.node(i, j)), 2.0 * kPi);
            if (a < 0.0) a += 2.0 * kPi;
            if (a == 0.0 || a == arc_len)
                p.set_fixed(i, j, 0.5);
            else
                p.set(i, j, a < arc_len ? CellKind::One : CellKind::Zero);
        }
    }
    return p;
}

GridProblem make_rect_grid(Point origin, double spacing, int nx, int ny, double one_lo, double one_hi,
                           Point eval) {
    GridProblem p(origin, spacing, nx, ny, eval);
    for (int i = 0; i < nx; ++i) {
        p.set(i, 0, CellKind::Zero);
        const double x = p.node(i, ny - 1).real();
        const bool one = x >= one_lo - 1e-12 && x <= one_hi + 1e-12;
        p.set(i, ny - 1, one ? CellKind::One : CellKind::Zero);
    }
    for (int j = 1; j < ny - 1; ++j) {
        p.set(0, j, CellKind::Zero);
        p.set(nx - 1, j, CellKind::Zero);
    }
    return p;
}

double richardson(double coarse, double fine, double order) {
    const double f = std::pow(2.0, order);
    return (f * fine - coarse) / (f - 1.0);
}

}  // namespace hmslope
