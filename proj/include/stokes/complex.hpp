#pragma once

// Cubical complexes on axis-aligned boxes (n <= 3), integer chains, the
// boundary operator, connected components and enclosed interiors.

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <variant>
#include <vector>

namespace stokes {

inline constexpr int max_dimension = 3;

enum class Chart { cartesian, polar };

// How a density is normalized against lower-level measure: per chart
// coordinate volume, or per induced Euclidean volume/arclength.
enum class Convention { intrinsic, coordinate };

// Chart coordinates; entries past the dimension are zero.
using Point = std::array<double, max_dimension>;
using MultiIndex = std::array<int, max_dimension>;

struct Box {
    int dimension = 0;
    Point lo{};
    Point hi{};

    [[nodiscard]] double volume() const;
    [[nodiscard]] bool contains(const Point& p, double slack = 0.0) const;
    [[nodiscard]] bool contains(const Box& other, double slack = 1e-12) const;
    bool operator==(const Box&) const = default;
};

// Annulus centred at the origin; in the polar chart it is the coordinate box
// [inner, outer] x [0, 2*pi].
struct Annulus {
    double inner = 0.0;
    double outer = 0.0;
    bool operator==(const Annulus&) const = default;
};

// Sorted, duplicate-free ids of top-dimensional cells of some complex.
struct CellSubset {
    std::vector<std::size_t> cells;
    bool operator==(const CellSubset&) const = default;
};

using RegionDescriptor = std::variant<Box, Annulus, CellSubset>;

Box make_box(std::span<const double> lo, std::span<const double> hi);
Annulus make_annulus(double inner, double outer);
Box chart_box(const Annulus& annulus);
void validate_region(const RegionDescriptor& region);

struct Cell {
    int degree = 0;
    MultiIndex index{};
    unsigned axes = 0; // bitmask of the axes the cell extends along
    bool operator==(const Cell&) const = default;
};

class GridComplex {
public:
    GridComplex(const Box& box, std::span<const int> shape, Chart chart = Chart::cartesian);

    [[nodiscard]] int dimension() const noexcept { return dimension_; }
    [[nodiscard]] Chart chart() const noexcept { return chart_; }
    [[nodiscard]] const Point& origin() const noexcept { return origin_; }
    [[nodiscard]] const Point& spacing() const noexcept { return spacing_; }
    [[nodiscard]] const MultiIndex& shape() const noexcept { return shape_; }
    [[nodiscard]] Box box() const;

    [[nodiscard]] std::size_t cell_count(int degree) const;
    [[nodiscard]] std::size_t cell_id(const Cell& cell) const;
    [[nodiscard]] Cell cell(int degree, std::size_t id) const;
    [[nodiscard]] bool contains(const Cell& cell) const;

    /// Axis subsets of size `degree`, ascending bitmask order (the basis order).
    [[nodiscard]] std::vector<unsigned> axis_subsets(int degree) const;

    [[nodiscard]] Point vertex(const MultiIndex& index) const;
    /// Product of spacings along the cell's extent axes.
    [[nodiscard]] double coordinate_volume(const Cell& cell) const;
    /// Euclidean measure of the cell embedded through its vertices
    /// (chords and straight-sided quadrilaterals in the polar chart).
    [[nodiscard]] double intrinsic_volume(const Cell& cell) const;
    [[nodiscard]] double volume(const Cell& cell, Convention convention) const;

    /// Signed faces of the standard cubical boundary of `cell`.
    [[nodiscard]] std::vector<std::pair<Cell, int>> faces(const Cell& cell) const;

    bool operator==(const GridComplex&) const = default;

private:
    [[nodiscard]] MultiIndex extents(unsigned axes) const;

    int dimension_;
    Chart chart_;
    Point origin_{};
    Point spacing_{};
    MultiIndex shape_{};
    // offsets_[k][axes]: first id of the (k, axes) block.
    std::array<std::array<std::size_t, 8>, max_dimension + 1> offsets_{};
    std::array<std::size_t, max_dimension + 1> counts_{};
};

GridComplex build_grid_complex(const Box& box, std::span<const int> shape, Chart chart = Chart::cartesian);

class Chain {
public:
    Chain(GridComplex complex, int degree);

    [[nodiscard]] int degree() const noexcept { return degree_; }
    [[nodiscard]] const GridComplex& complex() const noexcept { return complex_; }
    [[nodiscard]] const std::map<std::size_t, long long>& terms() const noexcept { return terms_; }
    [[nodiscard]] bool empty() const noexcept { return terms_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
    [[nodiscard]] long long coefficient(std::size_t id) const;

    void add(std::size_t id, long long coeff);
    void add(const Cell& cell, long long coeff);

    Chain& operator+=(const Chain& other);
    Chain& operator*=(long long factor);
    friend Chain operator+(Chain a, const Chain& b) { return a += b; }
    friend Chain operator*(long long f, Chain c) { return c *= f; }
    friend Chain operator-(const Chain& c) { return -1 * c; }
    bool operator==(const Chain&) const = default;

private:
    GridComplex complex_;
    int degree_;
    std::map<std::size_t, long long> terms_;
};

/// All top cells with coefficient one: the fundamental chain of the box.
Chain full_chain(const GridComplex& complex);
Chain cell_chain(const GridComplex& complex, std::span<const std::size_t> top_cells);

Chain boundary(const Chain& chain);

/// Terms grouped into pieces whose cell closures touch; ordered by first id.
std::vector<Chain> connected_components(const Chain& chain);

/// The unique top-degree chain with boundary `cycle`, found by flood fill from
/// the exterior with winding labels: crossing a wall cell changes the label by
/// its signed coefficient.
Chain interior_chain(const Chain& cycle);
/// Support of interior_chain: top cells enclosed a nonzero number of times.
CellSubset interior_region(const Chain& cycle);

} // namespace stokes
