#include "stokes/complex.hpp"

#include "stokes/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>

namespace stokes {

namespace {

bool has_axis(unsigned axes, int i) { return (axes >> i) & 1U; }

int axis_position(unsigned axes, int i)
{
    return std::popcount(axes & ((1U << i) - 1U));
}

} // namespace

double Box::volume() const
{
    double v = 1.0;
    for (int i = 0; i < dimension; ++i) v *= hi[i] - lo[i];
    return v;
}

bool Box::contains(const Point& p, double slack) const
{
    for (int i = 0; i < dimension; ++i)
        if (p[i] < lo[i] - slack || p[i] > hi[i] + slack) return false;
    return true;
}

bool Box::contains(const Box& other, double slack) const
{
    if (other.dimension != dimension) return false;
    for (int i = 0; i < dimension; ++i) {
        const double tol = slack * std::max(1.0, std::abs(hi[i] - lo[i]));
        if (other.lo[i] < lo[i] - tol || other.hi[i] > hi[i] + tol) return false;
    }
    return true;
}

Box make_box(std::span<const double> lo, std::span<const double> hi)
{
    if (lo.size() != hi.size() || lo.empty() || lo.size() > max_dimension)
        throw InvalidGeometryError("box corners must have equal dimension between 1 and 3");
    Box box;
    box.dimension = static_cast<int>(lo.size());
    for (int i = 0; i < box.dimension; ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(hi[i] > lo[i]))
            throw InvalidGeometryError("box extent along axis " + std::to_string(i) + " is not positive");
        box.lo[i] = lo[i];
        box.hi[i] = hi[i];
    }
    return box;
}

Annulus make_annulus(double inner, double outer)
{
    if (!(inner > 0.0) || !(outer > inner) || !std::isfinite(outer))
        throw InvalidGeometryError("annulus radii must satisfy 0 < inner < outer");
    return {inner, outer};
}

Box chart_box(const Annulus& annulus)
{
    const std::array lo{annulus.inner, 0.0};
    const std::array hi{annulus.outer, 2.0 * std::numbers::pi};
    return make_box(lo, hi);
}

void validate_region(const RegionDescriptor& region)
{
    if (const auto* box = std::get_if<Box>(&region)) {
        make_box(std::span(box->lo).first(box->dimension), std::span(box->hi).first(box->dimension));
    } else if (const auto* annulus = std::get_if<Annulus>(&region)) {
        make_annulus(annulus->inner, annulus->outer);
    } else {
        const auto& subset = std::get<CellSubset>(region);
        if (subset.cells.empty()) throw InvalidGeometryError("cell subset is empty");
        if (!std::is_sorted(subset.cells.begin(), subset.cells.end())
            || std::adjacent_find(subset.cells.begin(), subset.cells.end()) != subset.cells.end())
            throw InvalidGeometryError("cell subset must be sorted and duplicate-free");
    }
}

GridComplex::GridComplex(const Box& box, std::span<const int> shape, Chart chart)
    : dimension_(box.dimension), chart_(chart)
{
    if (dimension_ < 1 || dimension_ > max_dimension)
        throw InvalidGeometryError("complex dimension must be 1, 2 or 3");
    if (static_cast<int>(shape.size()) != dimension_)
        throw InvalidGeometryError("shape has " + std::to_string(shape.size()) + " entries for a "
                                   + std::to_string(dimension_) + "-dimensional box");
    if (chart == Chart::polar && dimension_ != 2)
        throw InvalidGeometryError("polar chart requires dimension 2");
    for (int i = 0; i < dimension_; ++i) {
        if (shape[i] <= 0) throw InvalidGeometryError("shape must be positive along every axis");
        if (!(box.hi[i] > box.lo[i])) throw InvalidGeometryError("box extent must be positive");
        origin_[i] = box.lo[i];
        shape_[i] = shape[i];
        spacing_[i] = (box.hi[i] - box.lo[i]) / shape[i];
    }
    if (chart == Chart::polar && box.lo[0] < 0.0)
        throw InvalidGeometryError("polar chart needs nonnegative radii");

    for (int k = 0; k <= dimension_; ++k) {
        std::size_t offset = 0;
        for (unsigned axes : axis_subsets(k)) {
            offsets_[k][axes] = offset;
            const auto ext = extents(axes);
            std::size_t n = 1;
            for (int i = 0; i < dimension_; ++i) n *= static_cast<std::size_t>(ext[i]);
            offset += n;
        }
        counts_[k] = offset;
    }
}

GridComplex build_grid_complex(const Box& box, std::span<const int> shape, Chart chart)
{
    return GridComplex(box, shape, chart);
}

Box GridComplex::box() const
{
    Box b;
    b.dimension = dimension_;
    for (int i = 0; i < dimension_; ++i) {
        b.lo[i] = origin_[i];
        b.hi[i] = origin_[i] + spacing_[i] * shape_[i];
    }
    return b;
}

std::vector<unsigned> GridComplex::axis_subsets(int degree) const
{
    std::vector<unsigned> out;
    for (unsigned axes = 0; axes < (1U << dimension_); ++axes)
        if (std::popcount(axes) == degree) out.push_back(axes);
    return out;
}

MultiIndex GridComplex::extents(unsigned axes) const
{
    MultiIndex ext{1, 1, 1};
    for (int i = 0; i < dimension_; ++i) ext[i] = shape_[i] + (has_axis(axes, i) ? 0 : 1);
    return ext;
}

std::size_t GridComplex::cell_count(int degree) const
{
    if (degree < 0 || degree > dimension_) return 0;
    return counts_[degree];
}

bool GridComplex::contains(const Cell& cell) const
{
    if (cell.degree < 0 || cell.degree > dimension_ || std::popcount(cell.axes) != cell.degree) return false;
    if (cell.axes >= (1U << dimension_)) return false;
    const auto ext = extents(cell.axes);
    for (int i = 0; i < max_dimension; ++i) {
        if (i >= dimension_) {
            if (cell.index[i] != 0) return false;
        } else if (cell.index[i] < 0 || cell.index[i] >= ext[i]) {
            return false;
        }
    }
    return true;
}

std::size_t GridComplex::cell_id(const Cell& cell) const
{
    if (!contains(cell)) throw MismatchError("cell does not belong to the complex");
    const auto ext = extents(cell.axes);
    std::size_t id = 0;
    for (int i = dimension_ - 1; i >= 0; --i) id = id * static_cast<std::size_t>(ext[i]) + static_cast<std::size_t>(cell.index[i]);
    return offsets_[cell.degree][cell.axes] + id;
}

Cell GridComplex::cell(int degree, std::size_t id) const
{
    if (id >= cell_count(degree)) throw MismatchError("cell id out of range");
    const auto subsets = axis_subsets(degree);
    unsigned axes = subsets.front();
    for (unsigned a : subsets)
        if (offsets_[degree][a] <= id) axes = a;
    std::size_t local = id - offsets_[degree][axes];
    const auto ext = extents(axes);
    Cell c{degree, {0, 0, 0}, axes};
    for (int i = 0; i < dimension_; ++i) {
        c.index[i] = static_cast<int>(local % static_cast<std::size_t>(ext[i]));
        local /= static_cast<std::size_t>(ext[i]);
    }
    return c;
}

Point GridComplex::vertex(const MultiIndex& index) const
{
    Point p{};
    for (int i = 0; i < dimension_; ++i) p[i] = origin_[i] + spacing_[i] * index[i];
    return p;
}

double GridComplex::coordinate_volume(const Cell& cell) const
{
    double v = 1.0;
    for (int i = 0; i < dimension_; ++i)
        if (has_axis(cell.axes, i)) v *= spacing_[i];
    return v;
}

double GridComplex::intrinsic_volume(const Cell& cell) const
{
    if (chart_ == Chart::cartesian) return coordinate_volume(cell);
    const double r0 = origin_[0] + spacing_[0] * cell.index[0];
    const double dr = spacing_[0];
    const double dtheta = spacing_[1];
    switch (cell.axes) {
    case 0b00: return 1.0;
    case 0b01: return dr;
    case 0b10: return 2.0 * r0 * std::sin(0.5 * dtheta);
    default: return 0.5 * ((r0 + dr) * (r0 + dr) - r0 * r0) * std::sin(dtheta);
    }
}

double GridComplex::volume(const Cell& cell, Convention convention) const
{
    return convention == Convention::intrinsic ? intrinsic_volume(cell) : coordinate_volume(cell);
}

std::vector<std::pair<Cell, int>> GridComplex::faces(const Cell& cell) const
{
    std::vector<std::pair<Cell, int>> out;
    for (int i = 0; i < dimension_; ++i) {
        if (!has_axis(cell.axes, i)) continue;
        const int sign = axis_position(cell.axes, i) % 2 == 0 ? 1 : -1;
        Cell lower{cell.degree - 1, cell.index, cell.axes & ~(1U << i)};
        Cell upper = lower;
        upper.index[i] += 1;
        out.emplace_back(upper, sign);
        out.emplace_back(lower, -sign);
    }
    return out;
}

Chain::Chain(GridComplex complex, int degree) : complex_(std::move(complex)), degree_(degree)
{
    if (degree < 0 || degree > complex_.dimension()) throw DegreeError("chain degree out of range");
}

long long Chain::coefficient(std::size_t id) const
{
    const auto it = terms_.find(id);
    return it == terms_.end() ? 0 : it->second;
}

void Chain::add(std::size_t id, long long coeff)
{
    if (id >= complex_.cell_count(degree_)) throw MismatchError("cell id out of range for chain");
    if (coeff == 0) return;
    auto [it, inserted] = terms_.try_emplace(id, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0) terms_.erase(it);
    }
}

void Chain::add(const Cell& cell, long long coeff)
{
    if (cell.degree != degree_) throw DegreeError("cell degree differs from chain degree");
    add(complex_.cell_id(cell), coeff);
}

Chain& Chain::operator+=(const Chain& other)
{
    if (other.degree_ != degree_) throw DegreeError("adding chains of different degree");
    if (!(other.complex_ == complex_)) throw MismatchError("adding chains on different complexes");
    for (const auto& [id, c] : other.terms_) add(id, c);
    return *this;
}

Chain& Chain::operator*=(long long factor)
{
    if (factor == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [id, c] : terms_) c *= factor;
    return *this;
}

Chain full_chain(const GridComplex& complex)
{
    const int n = complex.dimension();
    Chain chain(complex, n);
    for (std::size_t id = 0; id < complex.cell_count(n); ++id) chain.add(id, 1);
    return chain;
}

Chain cell_chain(const GridComplex& complex, std::span<const std::size_t> top_cells)
{
    Chain chain(complex, complex.dimension());
    for (std::size_t id : top_cells) chain.add(id, 1);
    return chain;
}

Chain boundary(const Chain& chain)
{
    if (chain.degree() == 0) throw DegreeError("boundary of a 0-chain is undefined");
    const auto& complex = chain.complex();
    Chain out(complex, chain.degree() - 1);
    for (const auto& [id, coeff] : chain.terms()) {
        for (const auto& [face, sign] : complex.faces(complex.cell(chain.degree(), id)))
            out.add(face, sign * coeff);
    }
    return out;
}

std::vector<Chain> connected_components(const Chain& chain)
{
    const auto& complex = chain.complex();
    const int k = chain.degree();
    std::vector<std::size_t> ids;
    for (const auto& term : chain.terms()) ids.push_back(term.first);

    std::vector<std::size_t> parent(ids.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };

    // Closures of cubical cells meet iff they share a vertex.
    std::unordered_map<std::size_t, std::size_t> owner;
    for (std::size_t t = 0; t < ids.size(); ++t) {
        const Cell cell = complex.cell(k, ids[t]);
        const auto corners = 1U << std::popcount(cell.axes);
        for (unsigned corner = 0; corner < corners; ++corner) {
            Cell v{0, cell.index, 0};
            unsigned bit = 0;
            for (int i = 0; i < complex.dimension(); ++i) {
                if (!has_axis(cell.axes, i)) continue;
                v.index[i] += static_cast<int>((corner >> bit) & 1U);
                ++bit;
            }
            const auto vid = complex.cell_id(v);
            auto [it, inserted] = owner.try_emplace(vid, t);
            if (!inserted) {
                const auto a = find(t);
                const auto b = find(it->second);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }

    std::vector<Chain> out;
    std::unordered_map<std::size_t, std::size_t> slot;
    for (std::size_t t = 0; t < ids.size(); ++t) {
        const auto root = find(t);
        auto [it, inserted] = slot.try_emplace(root, out.size());
        if (inserted) out.emplace_back(complex, k);
        out[it->second].add(ids[t], chain.coefficient(ids[t]));
    }
    return out;
}

Chain interior_chain(const Chain& cycle)
{
    const auto& complex = cycle.complex();
    const int n = complex.dimension();
    if (cycle.degree() != n - 1) throw DegreeError("interior requires a chain of codimension one");
    if (n - 1 >= 1) {
        if (!boundary(cycle).empty()) throw NotACycleError("chain has nonempty boundary");
    } else {
        long long total = 0;
        for (const auto& term : cycle.terms()) total += term.second;
        if (total != 0) throw NotACycleError("0-chain coefficients do not sum to zero");
    }

    const auto& shape = complex.shape();
    const unsigned all = (1U << n) - 1U;
    const std::size_t cells = complex.cell_count(n);
    std::vector<std::optional<long long>> label(cells);
    std::deque<std::size_t> queue;

    auto wall = [&](const MultiIndex& index, int axis) {
        return cycle.coefficient(complex.cell_id(Cell{n - 1, index, all & ~(1U << axis)}));
    };
    auto visit = [&](std::size_t id, long long value) {
        if (label[id]) return;
        label[id] = value;
        queue.push_back(id);
    };

    // The exterior (label 0) touches every perimeter face.
    for (std::size_t id = 0; id < cells; ++id) {
        const Cell c = complex.cell(n, id);
        for (int axis = 0; axis < n; ++axis) {
            const long long s = axis % 2 == 0 ? 1 : -1;
            if (c.index[axis] == 0) visit(id, -s * wall(c.index, axis));
            if (c.index[axis] == shape[axis] - 1) {
                auto up = c.index;
                up[axis] += 1;
                visit(id, s * wall(up, axis));
            }
        }
    }
    while (!queue.empty()) {
        const std::size_t id = queue.front();
        queue.pop_front();
        const Cell c = complex.cell(n, id);
        const long long here = *label[id];
        for (int axis = 0; axis < n; ++axis) {
            const long long s = axis % 2 == 0 ? 1 : -1;
            if (c.index[axis] + 1 < shape[axis]) {
                auto up = c.index;
                up[axis] += 1;
                visit(complex.cell_id(Cell{n, up, all}), here - s * wall(up, axis));
            }
            if (c.index[axis] > 0) {
                auto down = c.index;
                down[axis] -= 1;
                visit(complex.cell_id(Cell{n, down, all}), here + s * wall(c.index, axis));
            }
        }
    }

    Chain inside(complex, n);
    for (std::size_t id = 0; id < cells; ++id) inside.add(id, *label[id]);
    if (!(boundary(inside) == cycle)) throw NoInteriorError("cycle does not bound inside the complex");
    return inside;
}

CellSubset interior_region(const Chain& cycle)
{
    const Chain inside = interior_chain(cycle);
    CellSubset out;
    for (const auto& term : inside.terms()) out.cells.push_back(term.first);
    return out;
}

} // namespace stokes
