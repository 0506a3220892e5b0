// Times each parallel kernel against its serial reference.

#include "stokes/forms.hpp"
#include "stokes/kernels.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

using namespace stokes;

namespace {

template <class F>
double seconds(F&& f, int repeats = 3)
{
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto start = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

volatile double sink = 0.0;

void report(const char* name, double serial, double parallel)
{
    std::printf("%-20s serial %9.4fs  parallel %9.4fs  speedup %5.2fx\n", name, serial, parallel, serial / parallel);
}

} // namespace

int main()
{
    std::printf("workers: %d\n", kernels::worker_count());
    constexpr std::size_t n = 20'000'000;
    auto f = [](std::size_t i) { return std::sin(1e-6 * static_cast<double>(i)); };
    report("reduce_samples", seconds([&] { sink = kernels::reduce_samples_serial(n, f); }),
           seconds([&] { sink = kernels::reduce_samples(n, 4096, f); }));

    std::vector<double> out(n);
    report("fill_samples", seconds([&] { kernels::fill_samples_serial(out, f); }),
           seconds([&] { kernels::fill_samples(out, f); }));

    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> v(-5, 5);
    std::vector<double> values(24);
    for (auto& x : values) x = v(rng);
    report("matching_subsets", seconds([&] { sink = static_cast<double>(kernels::matching_subsets_serial(values, 3.0, 1e-9).size()); }, 1),
           seconds([&] { sink = static_cast<double>(kernels::matching_subsets(values, 3.0, 1e-9).size()); }, 1));

    const std::array lo{-1.0, -1.0};
    const std::array hi{1.0, 1.0};
    const Box box = make_box(lo, hi);
    const AnalyticForm form(2, Chart::cartesian, {parse_expression("1 + x^2 * sin(y) + exp(-x*y)")}, box);
    report("integrate_region", seconds([&] { sink = integrate_region_serial(form, box, true, 2000); }),
           seconds([&] { sink = integrate_region(form, box, true, 2000); }));
    return 0;
}
