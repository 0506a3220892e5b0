#pragma once

#include "stokes/complex.hpp"
#include "stokes/forms.hpp"

#include <array>
#include <cmath>
#include <random>
#include <vector>

namespace test {

inline stokes::Box box2(double x0, double y0, double x1, double y1)
{
    const std::array lo{x0, y0};
    const std::array hi{x1, y1};
    return stokes::make_box(lo, hi);
}

inline stokes::Box box3(double x0, double y0, double z0, double x1, double y1, double z1)
{
    const std::array lo{x0, y0, z0};
    const std::array hi{x1, y1, z1};
    return stokes::make_box(lo, hi);
}

/// Unit cells on [0,w]x[0,h].
inline stokes::GridComplex grid(int w, int h)
{
    const std::array shape{w, h};
    return stokes::GridComplex(box2(0, 0, w, h), shape);
}

inline stokes::GridComplex grid3(int a, int b, int c)
{
    const std::array shape{a, b, c};
    return stokes::GridComplex(box3(0, 0, 0, a, b, c), shape);
}

inline stokes::Chain random_chain(const stokes::GridComplex& complex, int degree, std::mt19937_64& rng)
{
    stokes::Chain c(complex, degree);
    const std::size_t cells = complex.cell_count(degree);
    std::uniform_int_distribution<std::size_t> pick(0, cells - 1);
    std::uniform_int_distribution<int> coeff(-3, 3);
    const std::size_t terms = 1 + pick(rng) % 12;
    for (std::size_t i = 0; i < terms; ++i) c.add(pick(rng), coeff(rng));
    return c;
}

inline std::vector<double> random_values(std::size_t n, std::mt19937_64& rng, bool integer)
{
    std::vector<double> v(n);
    std::uniform_int_distribution<int> ints(-5, 5);
    std::uniform_real_distribution<double> reals(-5.0, 5.0);
    for (auto& x : v) x = integer ? ints(rng) : reals(rng);
    return v;
}

inline bool close(double a, double b, double tol)
{
    return std::abs(a - b) <= tol;
}

inline bool close_rel(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

} // namespace test
