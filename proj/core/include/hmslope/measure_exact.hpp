#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hmslope/geometry.hpp"

namespace hmslope {

class GridConfigError : public std::runtime_error {
public:
    explicit GridConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation point at distance d1 below the upper edge and d2 above the lower edge.
struct StripConfig {
    double d1 = 1.0;
    double d2 = 1.0;
};

/// Harmonic measure of the upper edge of a horizontal strip: d2 / (d1 + d2).
double strip_upper_measure(const StripConfig& c);

/// Harmonic measure at z (|z| < 1) of the arc running clockwise from chi to xi.
/// Computed by pulling z back to the center, where the measure is the
/// normalized arc length.
double disk_arc_measure(Point z, const BoundaryArc& arc);

/// Harmonic measures of the three border parts of A(w, d1, d2, u) at its
/// centre w; top + bottom + sides = 1.
struct RectangleMeasures {
    double top = 0.0;
    double bottom = 0.0;
    double sides = 0.0;
};

/// Fourier series in closed form, summed to double precision.
RectangleMeasures rectangle_center_measures(double d1, double d2, double u);

enum class CellKind : std::uint8_t { Interior, One, Zero, Fixed, Exterior };

/// Node-centred grid for the 5-point Laplace oracle. Node (i, j) sits at
/// origin + spacing * (i + i*j); i runs along x, j along y.
class GridProblem {
public:
    GridProblem(Point origin, double spacing, int nx, int ny, Point eval);

    /// Text format: optional header lines `spacing h`, `origin x y`, `eval x y`
    /// (and `#` comments), then a line `grid` followed by rows from the top
    /// (largest y) down. Row characters: '.' interior, '1' One boundary,
    /// '0' Zero boundary, '#' outside the domain.
    static GridProblem parse(std::string_view text);
    static GridProblem load(const std::filesystem::path& path);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double spacing() const { return spacing_; }
    Point origin() const { return origin_; }
    Point eval() const { return eval_; }

    Point node(int i, int j) const { return origin_ + spacing_ * Point(i, j); }
    CellKind kind(int i, int j) const { return kinds_[index(i, j)]; }
    double value(int i, int j) const { return values_[index(i, j)]; }

    void set(int i, int j, CellKind kind);
    void set_fixed(int i, int j, double value);

    /// Throws GridConfigError unless every interior node has four labeled or
    /// interior neighbours inside the box and the evaluation point is usable.
    void validate() const;

private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

    Point origin_;
    double spacing_;
    int nx_;
    int ny_;
    Point eval_;
    std::vector<CellKind> kinds_;
    std::vector<double> values_;
};

struct GridSolveOptions {
    double residual_tol = 1e-10;
    int max_iterations = 500000;
};

struct GridSolution {
    double value = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

/// SOR solve of the discrete Dirichlet problem; value interpolated bilinearly
/// at the evaluation point.
GridSolution solve_grid(const GridProblem& p, const GridSolveOptions& opts = {});

inline double grid_laplace_measure(const GridProblem& p, const GridSolveOptions& opts = {}) {
    return solve_grid(p, opts).value;
}

/// Strip of total height d1+d2 discretized with `cells_across` cells vertically
/// and `length_factor` times that horizontally. Top is One, bottom Zero, the
/// two ends carry the exact strip solution. Evaluated at the centre column.
GridProblem make_strip_grid(const StripConfig& c, int cells_across, int length_factor);

/// Unit disk on a (cells+1)^2 node grid; boundary nodes are labelled by the
/// arc containing their radial projection (Fixed 1/2 exactly at an endpoint).
GridProblem make_disk_grid(const BoundaryArc& one_arc, int cells, Point eval);

/// Axis-aligned rectangle with the top edge nodes in [one_lo, one_hi] labelled
/// One and every other boundary node Zero.
GridProblem make_rect_grid(Point origin, double spacing, int nx, int ny, double one_lo,
                           double one_hi, Point eval);

/// Richardson extrapolation for an order-p method from spacings h and h/2.
double richardson(double coarse, double fine, double order = 2.0);

}  // namespace hmslope
