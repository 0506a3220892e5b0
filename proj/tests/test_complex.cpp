#include "helpers.hpp"
#include "stokes/complex.hpp"
#include "stokes/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

using namespace stokes;

TEST_CASE("cell counts")
{
    const auto sq = test::grid(2, 2);
    CHECK(sq.cell_count(0) == 9);
    CHECK(sq.cell_count(1) == 12);
    CHECK(sq.cell_count(2) == 4);

    const std::array lo{0.0};
    const std::array hi{1.0};
    const std::array shape1{4};
    const GridComplex line(make_box(lo, hi), shape1);
    CHECK(line.cell_count(0) == 5);
    CHECK(line.cell_count(1) == 4);

    const auto cube = test::grid3(1, 1, 1);
    CHECK(cube.cell_count(0) == 8);
    CHECK(cube.cell_count(1) == 12);
    CHECK(cube.cell_count(2) == 6);
    CHECK(cube.cell_count(3) == 1);
}

TEST_CASE("cell counts follow the axis-subset formula")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> ext(1, 6);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = test::grid3(ext(rng), ext(rng), ext(rng));
        for (int k = 0; k <= 3; ++k) {
            std::size_t expected = 0;
            for (unsigned axes : c.axis_subsets(k)) {
                std::size_t prod = 1;
                for (int i = 0; i < 3; ++i) prod *= c.shape()[i] + (((axes >> i) & 1U) ? 0 : 1);
                expected += prod;
            }
            CHECK(c.cell_count(k) == expected);
            for (std::size_t id = 0; id < c.cell_count(k); ++id) REQUIRE(c.cell_id(c.cell(k, id)) == id);
        }
    }
}

TEST_CASE("cell volumes are products of spacings")
{
    const std::array shape{4, 2};
    const GridComplex c(test::box2(0, 0, 2, 3), shape);
    CHECK(c.coordinate_volume(c.cell(2, 0)) == doctest::Approx(0.5 * 1.5));
    CHECK(c.coordinate_volume(Cell{1, {0, 0, 0}, 0b01}) == doctest::Approx(0.5));
    CHECK(c.coordinate_volume(Cell{1, {0, 0, 0}, 0b10}) == doctest::Approx(1.5));
    CHECK(c.coordinate_volume(c.cell(0, 3)) == 1.0);
}

TEST_CASE("invalid geometry")
{
    const std::array zero{0, 2};
    CHECK_THROWS_AS(GridComplex(test::box2(0, 0, 1, 1), zero), InvalidGeometryError);
    const std::array lo{0.0, 0.0};
    const std::array hi{0.0, 1.0};
    CHECK_THROWS_AS(make_box(lo, hi), InvalidGeometryError);
    const std::array shape3{1, 1, 1};
    CHECK_THROWS_AS(GridComplex(test::box3(1, 0, 0, 2, 1, 1), shape3, Chart::polar), InvalidGeometryError);
    CHECK_THROWS_AS(make_annulus(2.0, 1.0), InvalidGeometryError);
}

TEST_CASE("boundary of one square")
{
    const auto c = test::grid(1, 1);
    const Chain b = boundary(full_chain(c));
    CHECK(b.size() == 4);
    for (const auto& [id, coeff] : b.terms()) CHECK(std::abs(coeff) == 1);
    CHECK(boundary(b).empty());
}

TEST_CASE("boundary of the 2x2 grid is its perimeter")
{
    const auto c = test::grid(2, 2);
    const Chain b = boundary(full_chain(c));
    CHECK(b.size() == 8);
    for (const auto& [id, coeff] : b.terms()) {
        const Cell e = c.cell(1, id);
        const bool horizontal = e.axes == 0b01;
        const int normal = horizontal ? e.index[1] : e.index[0];
        CHECK((normal == 0 || normal == 2));
        // Counterclockwise: bottom and right edges +, top and left -.
        CHECK(coeff == (normal == 0 ? (horizontal ? 1 : -1) : (horizontal ? -1 : 1)));
    }
}

TEST_CASE("boundary of an edge is head minus tail")
{
    const std::array lo{0.0};
    const std::array hi{3.0};
    const std::array shape{3};
    const GridComplex line(make_box(lo, hi), shape);
    Chain e(line, 1);
    e.add(1, 1);
    const Chain b = boundary(e);
    CHECK(b.coefficient(2) == 1);
    CHECK(b.coefficient(1) == -1);
    CHECK(b.size() == 2);
}

TEST_CASE("boundary of a 0-chain is a degree error")
{
    const auto c = test::grid(1, 1);
    Chain v(c, 0);
    v.add(0, 1);
    CHECK_THROWS_AS(boundary(v), DegreeError);
}

TEST_CASE("chains store no zeros")
{
    const auto c = test::grid(2, 2);
    Chain a(c, 1);
    a.add(3, 2);
    a.add(3, -2);
    CHECK(a.empty());
    a.add(5, 1);
    CHECK((a + (-a)).empty());
    CHECK_THROWS(a.add(c.cell_count(1), 1));
}

TEST_CASE("boundary of boundary vanishes on random chains")
{
    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<int> side2(1, 16);
    std::uniform_int_distribution<int> side3(1, 6);
    for (int trial = 0; trial < 1000; ++trial) {
        const bool three = trial % 2 == 1;
        const GridComplex c = three ? test::grid3(side3(rng), side3(rng), side3(rng)) : test::grid(side2(rng), side2(rng));
        const int n = c.dimension();
        const int k = 2 + trial % (n - 1);
        const Chain chain = test::random_chain(c, k, rng);
        REQUIRE(boundary(boundary(chain)).empty());
    }
}

TEST_CASE("boundary of the full chain lies on the geometric perimeter")
{
    const auto c = test::grid3(3, 2, 4);
    const Chain b = boundary(full_chain(c));
    std::size_t faces = 0;
    for (const auto& [id, coeff] : b.terms()) {
        const Cell f = c.cell(2, id);
        int normal = 0;
        while ((f.axes >> normal) & 1U) ++normal;
        CHECK((f.index[normal] == 0 || f.index[normal] == c.shape()[normal]));
        CHECK(std::abs(coeff) == 1);
        ++faces;
    }
    CHECK(faces == 2 * (3 * 2 + 2 * 4 + 3 * 4));
}

TEST_CASE("connected components")
{
    const auto c = test::grid(2, 2);
    CHECK(connected_components(boundary(full_chain(c))).size() == 1);
    CHECK(connected_components(Chain(c, 1)).empty());

    const auto row = test::grid(3, 1);
    const std::array<std::size_t, 2> apart{0, 2};
    const Chain two = boundary(cell_chain(row, apart));
    const auto parts = connected_components(two);
    REQUIRE(parts.size() == 2);
    Chain sum(row, 1);
    for (const auto& p : parts) sum += p;
    CHECK(sum == two);
}

TEST_CASE("components are pairwise non-adjacent and cover the input")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = test::grid(5, 5);
        const Chain chain = test::random_chain(c, 1, rng);
        const auto parts = connected_components(chain);
        Chain sum(c, 1);
        for (const auto& p : parts) sum += p;
        CHECK(sum == chain);
        auto vertices = [&](const Chain& part) {
            std::set<std::size_t> out;
            for (const auto& [id, coeff] : part.terms())
                for (const auto& [v, s] : c.faces(c.cell(1, id))) out.insert(c.cell_id(v));
            return out;
        };
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (std::size_t j = i + 1; j < parts.size(); ++j) {
                const auto a = vertices(parts[i]);
                const auto b = vertices(parts[j]);
                std::vector<std::size_t> shared;
                std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
                CHECK(shared.empty());
            }
    }
}

TEST_CASE("interior region examples")
{
    const auto c = test::grid(2, 2);
    CHECK(interior_region(boundary(full_chain(c))).cells == std::vector<std::size_t>{0, 1, 2, 3});
    const std::array<std::size_t, 1> corner{3};
    CHECK(interior_region(boundary(cell_chain(c, corner))).cells == std::vector<std::size_t>{3});

    const auto g = test::grid(3, 3);
    const std::vector<std::size_t> ring{0, 1, 2, 3, 5, 6, 7, 8};
    const Chain b = boundary(cell_chain(g, ring));
    CHECK(connected_components(b).size() == 2);
    CHECK(interior_region(b).cells == ring);
}

TEST_CASE("interior of a non-cycle is rejected")
{
    const auto c = test::grid(2, 2);
    Chain open(c, 1);
    open.add(0, 1);
    CHECK_THROWS_AS(interior_region(open), NotACycleError);
    Chain top(c, 2);
    top.add(0, 1);
    CHECK_THROWS_AS(interior_region(top), DegreeError);
}

namespace {

bool connected(std::uint32_t mask, int w, int h)
{
    if (mask == 0) return false;
    const int start = std::countr_zero(mask);
    std::uint32_t seen = 1U << start;
    std::queue<int> todo;
    todo.push(start);
    while (!todo.empty()) {
        const int id = todo.front();
        todo.pop();
        const int x = id % w, y = id / w;
        const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
        for (const auto& nb : nbr) {
            if (nb[0] < 0 || nb[0] >= w || nb[1] < 0 || nb[1] >= h) continue;
            const int j = nb[0] + w * nb[1];
            if (((mask >> j) & 1U) && !((seen >> j) & 1U)) {
                seen |= 1U << j;
                todo.push(j);
            }
        }
    }
    return seen == mask;
}

} // namespace

TEST_CASE("interior of boundary(R) is R for every connected R up to 4x4")
{
    std::size_t checked = 0;
    for (int w = 1; w <= 4; ++w)
        for (int h = 1; h <= 4; ++h) {
            const auto c = test::grid(w, h);
            const int cells = w * h;
            for (std::uint32_t m = 1; m < (1U << cells); ++m) {
                if (!connected(m, w, h)) continue;
                std::vector<std::size_t> ids;
                for (int i = 0; i < cells; ++i)
                    if ((m >> i) & 1U) ids.push_back(static_cast<std::size_t>(i));
                REQUIRE(interior_region(boundary(cell_chain(c, ids))).cells == ids);
                ++checked;
            }
        }
    CHECK(checked > 10000);
}

TEST_CASE("interior chain recovers multiplicities in 3-D")
{
    std::mt19937_64 rng(5);
    const auto c = test::grid3(3, 3, 2);
    for (int trial = 0; trial < 100; ++trial) {
        Chain r(c, 3);
        std::uniform_int_distribution<std::size_t> pick(0, c.cell_count(3) - 1);
        for (int i = 0; i < 5; ++i) r.add(pick(rng), 1 + static_cast<long long>(pick(rng) % 3));
        CHECK(interior_chain(boundary(r)) == r);
    }
}
