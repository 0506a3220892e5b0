#pragma once

// Data-parallel inner loops. Every parallel kernel has a serial reference
// (`*_serial`) that takes the plain textbook route; tests compare the two and
// the benchmark target times them against each other.
//
// Reductions are bit-reproducible for any worker count: work is split into
// fixed blocks, each block is summed left to right, and block partials are
// combined in block order on one thread.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stokes::kernels {

// Exceptions may not cross an OpenMP region boundary; loop bodies park the
// first one here and it is rethrown on the calling thread.
class ExceptionSlot {
public:
    template <class Body>
    void run(Body&& body) noexcept
    {
        try {
            body();
        } catch (...) {
#pragma omp critical(stokes_exception_slot)
            if (!error_) error_ = std::current_exception();
        }
    }
    void rethrow() const
    {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::exception_ptr error_;
};

inline int worker_count()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_worker_count(int workers)
{
#ifdef _OPENMP
    if (workers > 0) omp_set_num_threads(workers);
#else
    (void)workers;
#endif
}

/// Sum of f(i) for i in [0, count), blocked by `block` samples.
template <class F>
double reduce_samples(std::size_t count, std::size_t block, F&& f)
{
    if (count == 0) return 0.0;
    block = std::max<std::size_t>(block, 1);
    const std::size_t blocks = (count + block - 1) / block;
    std::vector<double> partial(blocks, 0.0);
    const auto nb = static_cast<std::int64_t>(blocks);
    ExceptionSlot slot;
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nb; ++b) {
        slot.run([&] {
            const std::size_t lo = static_cast<std::size_t>(b) * block;
            const std::size_t hi = std::min(count, lo + block);
            double acc = 0.0;
            for (std::size_t i = lo; i < hi; ++i) acc += f(i);
            partial[static_cast<std::size_t>(b)] = acc;
        });
    }
    slot.rethrow();
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

template <class F>
double reduce_samples_serial(std::size_t count, F&& f)
{
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) total += f(i);
    return total;
}

/// out[i] = f(i) for every i.
template <class F>
void fill_samples(std::span<double> out, F&& f)
{
    const auto n = static_cast<std::int64_t>(out.size());
    ExceptionSlot slot;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        slot.run([&] { out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i)); });
    slot.rethrow();
}

template <class F>
void fill_samples_serial(std::span<double> out, F&& f)
{
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(i);
}

/// Bitmasks m in [1, 2^values.size()) whose subset sum lies within `band` of
/// `target`, ascending. Subset sums come from two half-width lookup tables, so
/// each mask costs O(1) regardless of size.
inline std::vector<std::uint32_t> matching_subsets(std::span<const double> values, double target, double band)
{
    const std::size_t n = values.size();
    if (n == 0) return {};
    const std::size_t low_bits = n / 2;
    const std::size_t high_bits = n - low_bits;
    std::vector<double> low(std::size_t{1} << low_bits, 0.0);
    std::vector<double> high(std::size_t{1} << high_bits, 0.0);
    for (std::size_t m = 1; m < low.size(); ++m) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(m));
        low[m] = low[m & (m - 1)] + values[bit];
    }
    for (std::size_t m = 1; m < high.size(); ++m) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(m));
        high[m] = high[m & (m - 1)] + values[low_bits + bit];
    }

    // One block per high-half pattern; blocks are merged in order.
    const auto nb = static_cast<std::int64_t>(high.size());
    std::vector<std::vector<std::uint32_t>> found(high.size());
    const std::uint64_t low_mask = low.size() - 1;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t hb = 0; hb < nb; ++hb) {
        const auto h = static_cast<std::size_t>(hb);
        auto& out = found[h];
        for (std::size_t l = 0; l <= low_mask; ++l) {
            if (h == 0 && l == 0) continue;
            if (std::abs(low[l] + high[h] - target) <= band)
                out.push_back(static_cast<std::uint32_t>((h << low_bits) | l));
        }
    }
    std::vector<std::uint32_t> result;
    for (auto& block : found) result.insert(result.end(), block.begin(), block.end());
    return result;
}

inline std::vector<std::uint32_t> matching_subsets_serial(std::span<const double> values, double target, double band)
{
    std::vector<std::uint32_t> result;
    const std::uint64_t end = std::uint64_t{1} << values.size();
    for (std::uint64_t m = 1; m < end; ++m) {
        double sum = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            if ((m >> i) & 1U) sum += values[i];
        if (std::abs(sum - target) <= band) result.push_back(static_cast<std::uint32_t>(m));
    }
    return result;
}

} // namespace stokes::kernels
