// Decide the sign of a sum exactly, even when cancellation destroys every
// digit of a floating-point total.
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "rsum/accumulators.hpp"
#include "rsum/io.hpp"
#include "rsum/oracle.hpp"
#include "rsum/signsum.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <dataset>\n", argv[0]);
        return 2;
    }
    std::vector<double> data;
    try {
        data = rsum::load_dataset(argv[1]);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    std::span<const double> sp(data);

    auto exact = rsum::essa_sign<double>(sp);
    auto fast = rsum::hash_sign<double>(sp);
    std::printf("%zu values\n", data.size());
    std::printf("exact sign        %+d  (%llu transformation rounds)\n",
                exact.sign, (unsigned long long)exact.iterations);
    std::printf("bucket-table sign %+d  (fast, not guaranteed under heavy "
                "cancellation)\n", fast.sign);
    std::printf("naive double sum  %s\n",
                rsum::detail::shortest(rsum::naive_sum<double>(sp).sum).c_str());
    std::printf("condition ratio   %.3g\n", rsum::condition_measure(sp).ratio);
    return 0;
}
