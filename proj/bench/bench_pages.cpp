// Throughput comparison of the serial reference path against the OpenMP
// per-page kernel for corpus evaluation and loss computation.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "handoff/batch.hpp"
#include "handoff/compare.hpp"
#include "handoff/metrics.hpp"
#include "handoff/objectives.hpp"
#include "handoff/strategies.hpp"
#include "handoff/synth.hpp"

using namespace handoff;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
void time_both(const char* label, int n, F&& work) {
    auto t0 = Clock::now();
    auto serial = batch::map_pages_serial<double>(n, work);
    const double ts = seconds_since(t0);

    t0 = Clock::now();
    auto parallel = batch::map_pages<double>(n, work);
    const double tp = seconds_since(t0);

    double checksum = 0.0, checksum_p = 0.0;
    for (int i = 0; i < n; ++i) {
        checksum += serial[i];
        checksum_p += parallel[i];
    }
    std::printf("%-24s serial %7.3fs  parallel %7.3fs  speedup %5.2fx  %s\n", label, ts, tp,
                ts / tp, checksum == checksum_p ? "results match" : "RESULTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
    int pages = 400;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--pages") == 0 && i + 1 < argc) pages = std::atoi(argv[++i]);
        else if (argv[i][0] != '-') pages = std::atoi(argv[i]);
    }
    if (pages < 8) {
        std::fprintf(stderr, "usage: bench_pages [--pages N]  (N >= 8)\n");
        return 2;
    }
    const ScenarioSpec spec = ScenarioSpec::preset(Scenario::random_mixed, 99);
    const std::vector<SynthPage> corpus = generate_corpus(spec, pages);
    const HandoffConfig cfg;
    std::printf("corpus: %d pages, scenario random_mixed\n", pages);

    time_both("total_loss", pages, [&](int i) {
        return total_loss(corpus[i].pool, corpus[i].gt, cfg).l_total;
    });

    time_both("handoff+eval", pages, [&](int i) {
        const HandoffResult r = handoff_learned(corpus[i].pool, cfg);
        return evaluate_page(r.iface, corpus[i].gt).f1;
    });

    time_both("gradient_check", pages / 8, [&](int i) {
        return max_gradient_rel_error(corpus[i].pool, corpus[i].gt, cfg);
    });
    return 0;
}
