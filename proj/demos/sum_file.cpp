// Sum a dataset with every algorithm and show how far each lands from the
// exact result. Accepts the text format (one value per line) or the raw
// format written by `rsum gen`.
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "rsum/accumulators.hpp"
#include "rsum/io.hpp"
#include "rsum/oracle.hpp"

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

    auto cond = rsum::condition_measure(sp);
    std::printf("%zu values, condition ratio %.3g\n\n", data.size(), cond.ratio);

    auto show = [&](const rsum::sum_report<double>& r) {
        std::printf("%-24s %s  (rel err %.3g)\n", r.algorithm.c_str(),
                    rsum::detail::shortest(r.sum).c_str(),
                    rsum::relative_error(r.sum, sp));
    };
    show(rsum::naive_sum<double>(sp));
    show(rsum::compensated_sum<double>(sp));
    show(rsum::bucket_sum_recursive<double>(sp));
    show(rsum::bucket_sum_nonrecursive<double>(sp, false));
    show(rsum::bucket_sum_nonrecursive<double>(sp, true));
    std::printf("%-24s %s\n", "exact",
                rsum::detail::shortest(rsum::exact_sum(sp).rounded).c_str());
    return 0;
}
