#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "handoff/core.hpp"

namespace handoff {

enum class Scenario { clean, duplicates, incomplete_survivor, dense_grid, random_mixed };

Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);

struct ScenarioSpec {
    Scenario scenario = Scenario::clean;
    std::uint64_t seed = 0;
    int elements_per_page = 8;
    int num_classes = 5;
    double duplicate_rate = 0.0;
    double split_rate = 0.0;
    double shift_sigma = 0.0;
    double false_positive_rate = 0.0;

    // Score bands: [lo, hi] uniform draws per hypothesis role.
    double true_ret_lo = 0.82, true_ret_hi = 0.99;
    double true_cls_lo = 0.85, true_cls_hi = 0.99;
    double spurious_ret_lo = 0.05, spurious_ret_hi = 0.30;
    double spurious_cls_lo = 0.30, spurious_cls_hi = 0.60;

    /// Scenario presets (rates, jitter, bands) for a given base seed.
    static ScenarioSpec preset(Scenario s, std::uint64_t seed);
};

struct SynthPage {
    GroundTruthPage gt;
    HypothesisPool pool;
    std::map<int, int> oracle;  // hypothesis id -> gt id (true candidates only)
};

/// Deterministic RNG with explicit uniform / normal mappings so output is
/// identical across platforms.
class SynthRng {
public:
    explicit SynthRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next_u64();
    double uniform(double lo = 0.0, double hi = 1.0);
    double normal(double mean, double sigma);
    int uniform_int(int lo, int hi);  // inclusive range

private:
    std::uint64_t state_;
};

/// Non-overlapping column layout with column-major reading ranks.
GroundTruthPage generate_page(const ScenarioSpec& spec, SynthRng& rng,
                              const std::string& page_id);

/// Jittered true candidates plus scenario-specific duplicates, truncated
/// fragments, and false positives; oracle records intended correspondence.
void corrupt_to_pool(const GroundTruthPage& gt, const ScenarioSpec& spec, SynthRng& rng,
                     HypothesisPool& pool_out, std::map<int, int>& oracle_out);

/// Best achievable interface: per element the highest-IoU true candidate,
/// ordered by ground-truth rank.
ParserInterface oracle_interface(const GroundTruthPage& gt, const HypothesisPool& pool,
                                 const std::map<int, int>& oracle);

/// One page, fully derived from (spec, page_index).
SynthPage generate(const ScenarioSpec& spec, int page_index);

std::vector<SynthPage> generate_corpus(const ScenarioSpec& spec, int pages);

}  // namespace handoff
