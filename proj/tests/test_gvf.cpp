#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gradvar/gvf.hpp"
#include "oracle.hpp"

using namespace gradvar;

namespace {

using Edges = std::vector<std::pair<VertexId, VertexId>>;

Domain path_graph(std::size_t n) {
    Edges e;
    for (VertexId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return build_graph(e, n);
}

GuidingSet guiding_of(const std::map<VertexId, int>& entries) {
    GuidingSet g;
    g.entries = entries;
    for (auto [v, i] : entries) g.raw_values[v] = i;
    return g;
}

// Random samples on a random grid, quantized at delta*, as used by the property suites.
struct RandomInstance {
    GridSpec grid;
    Domain domain;
    SampleMap samples;
};

RandomInstance random_instance(std::mt19937_64& rng, std::size_t max_side, std::size_t max_points) {
    RandomInstance inst;
    inst.grid = {1 + rng() % max_side, 1 + rng() % max_side,
                 rng() % 2 ? Connectivity::four : Connectivity::eight};
    inst.domain = build_grid(inst.grid);
    const std::size_t k = 1 + rng() % max_points;
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    for (std::size_t i = 0; i < k; ++i)
        inst.samples[static_cast<VertexId>(rng() % inst.grid.vertex_count())] = value(rng);
    return inst;
}

} // namespace

TEST(LipschitzDelta, DirectRatio) {
    const Domain d = path_graph(5);
    EXPECT_DOUBLE_EQ(lipschitz_delta(d, {{0, 0.0}, {4, 4.0}}), 1.0);
}

TEST(LipschitzDelta, AllEqualUsesFloor) {
    const Domain d = path_graph(5);
    EXPECT_DOUBLE_EQ(lipschitz_delta(d, {{0, 3.0}, {4, 3.0}}), 1e-9 * 3.0);
    EXPECT_DOUBLE_EQ(lipschitz_delta(d, {{0, 0.25}, {2, 0.25}}), 1e-9);
    EXPECT_DOUBLE_EQ(lipschitz_delta(d, {{0, 0.25}}, 0.5), 0.5);
}

TEST(LipschitzDelta, ThreeSamplesOnPath) {
    // pairs: (0,3)/2 = 1.5, (0,5)/4 = 1.25, (3,5)/2 = 1.0
    const Domain d = path_graph(5);
    EXPECT_DOUBLE_EQ(lipschitz_delta(d, {{0, 0.0}, {2, 3.0}, {4, 5.0}}), 1.5);
}

TEST(LipschitzDelta, DisconnectedSamplesAreInfeasible) {
    const Domain d = build_graph(Edges{{0, 1}, {2, 3}}, 4);
    EXPECT_THROW(lipschitz_delta(d, {{0, 1.0}, {3, 2.0}}), InfeasibleError);
    EXPECT_THROW(lipschitz_delta(d, {}), InvalidArgument);
}

TEST(Quantize, TwoSamples) {
    auto [table, g] = quantize({{0, 0.0}, {1, 1.0}}, 1.0);
    EXPECT_EQ(table.count, 2);
    EXPECT_EQ(g.entries.at(0), 1);
    EXPECT_EQ(g.entries.at(1), 2);
}

TEST(Quantize, SingleSample) {
    auto [table, g] = quantize({{7, 2.5}}, 0.3);
    EXPECT_EQ(table.count, 1);
    EXPECT_EQ(g.entries.at(7), 1);
    EXPECT_DOUBLE_EQ(table.base, 2.5);
    EXPECT_DOUBLE_EQ(g.raw_values.at(7), 2.5);
}

TEST(Quantize, NearestLevel) {
    // 0.4/0.5 = 0.8 -> level 2; 1.0/0.5 = 2 -> level 3
    auto [table, g] = quantize({{0, 0.0}, {1, 0.4}, {2, 1.0}}, 0.5);
    EXPECT_EQ(table.count, 3);
    EXPECT_EQ(g.entries.at(0), 1);
    EXPECT_EQ(g.entries.at(1), 2);
    EXPECT_EQ(g.entries.at(2), 3);
}

TEST(Quantize, TiesGoToLowerLevel) {
    auto [table, g] = quantize({{0, 0.0}, {1, 0.25}, {2, 1.0}}, 0.5);
    EXPECT_EQ(g.entries.at(1), 1);
    EXPECT_EQ(table.count, 3);
}

TEST(Quantize, MaximumRoundingUpExtendsTable) {
    auto [table, g] = quantize({{0, 0.0}, {1, 0.8}}, 0.5);
    EXPECT_EQ(g.entries.at(1), 3);
    EXPECT_EQ(table.count, 3);
}

TEST(Quantize, RejectsNonPositiveDelta) {
    EXPECT_THROW(quantize({{0, 0.0}}, 0.0), InvalidArgument);
    EXPECT_THROW(quantize({{0, 0.0}}, -1.0), InvalidArgument);
}

TEST(Feasibility, AdjacentGapTwo) {
    const Domain d = path_graph(3);
    const Feasibility f = check_feasibility(d, guiding_of({{0, 1}, {1, 3}}));
    EXPECT_FALSE(f.feasible);
    ASSERT_TRUE(f.witness);
    EXPECT_EQ(f.witness->distance, 1u);
    EXPECT_EQ(f.witness->index_gap, 2);
}

TEST(Feasibility, SinglePointAlwaysFeasible) {
    const Domain d = build_grid({4, 4});
    EXPECT_TRUE(check_feasibility(d, guiding_of({{5, 9}})).feasible);
}

TEST(Feasibility, WitnessHasMaximalViolation) {
    const Domain d = path_graph(10);
    // (0,1) violates by 2-1=1; (0,9) by 12-9=3; (1,9) by 10-8=2
    const Feasibility f = check_feasibility(d, guiding_of({{0, 1}, {1, 3}, {9, 13}}));
    ASSERT_FALSE(f.feasible);
    EXPECT_EQ(f.witness->x, 0u);
    EXPECT_EQ(f.witness->y, 9u);
    EXPECT_EQ(f.witness->index_gap - static_cast<int>(f.witness->distance), 3);
}

TEST(Feasibility, DisconnectedGuidingGivesUnreachableWitness) {
    const Domain d = build_graph(Edges{{0, 1}, {2, 3}}, 4);
    const Feasibility f = check_feasibility(d, guiding_of({{0, 1}, {3, 1}}));
    ASSERT_FALSE(f.feasible);
    EXPECT_TRUE(f.witness->unreachable());
}

// Exhaustive check of the existence theorem on the 3x3 grid: up to three
// guiding points, three levels, every assignment enumerated.
TEST(Feasibility, MatchesExhaustiveEnumerationOn3x3) {
    for (bool eight : {false, true}) {
        const auto edges = oracle::grid_edges(3, 3, eight);
        const auto all = oracle::gradually_varied_assignments(9, edges, 3);
        const Domain d = build_grid({3, 3, eight ? Connectivity::eight : Connectivity::four});
        std::size_t feasible_count = 0, total = 0;
        for (const auto& cfg : oracle::guiding_configurations(9, 3, 3)) {
            const GuidingSet g = guiding_of(std::map<VertexId, int>(cfg.begin(), cfg.end()));
            const bool expected = oracle::extension_exists(all, cfg);
            EXPECT_EQ(check_feasibility(d, g).feasible, expected);
            EXPECT_EQ(envelopes(d, g, 3).consistent(), expected);
            feasible_count += expected;
            ++total;
        }
        EXPECT_EQ(total, 2619u);
        EXPECT_GT(feasible_count, 0u);
        EXPECT_LT(feasible_count, total);
    }
}

TEST(Feasibility, MatchesEnumerationOnSmallRandomGraphs) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 5);
        oracle::EdgeList oe;
        Edges e;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (rng() % 3 == 0 || b == a + 1) {
                    oe.emplace_back(a, b);
                    e.emplace_back(a, b);
                }
        const Domain d = build_graph(e, n);
        const auto all = oracle::gradually_varied_assignments(n, oe, 3);
        for (const auto& cfg : oracle::guiding_configurations(n, 3, 3)) {
            std::map<VertexId, int> entries(cfg.begin(), cfg.end());
            EXPECT_EQ(check_feasibility(d, guiding_of(entries)).feasible, oracle::extension_exists(all, cfg));
        }
    }
}

TEST(Envelopes, SinglePointAtCenter) {
    const Domain d = build_grid({3, 3});
    const EnvelopePair env = envelopes(d, guiding_of({{4, 5}}), 9);
    for (VertexId p = 0; p < 9; ++p) {
        const int dist = std::abs(static_cast<int>(p % 3) - 1) + std::abs(static_cast<int>(p / 3) - 1);
        EXPECT_EQ(env.lower[p], 5 - dist);
        EXPECT_EQ(env.upper[p], 5 + dist);
    }
}

TEST(Envelopes, EveryVertexGuided) {
    const Domain d = build_grid({3, 2});
    const std::map<VertexId, int> entries{{0, 1}, {1, 2}, {2, 2}, {3, 2}, {4, 3}, {5, 2}};
    const EnvelopePair env = envelopes(d, guiding_of(entries), 3);
    for (auto [v, i] : entries) {
        EXPECT_EQ(env.lower[v], i);
        EXPECT_EQ(env.upper[v], i);
    }
}

TEST(Envelopes, ClampedToLevelRange) {
    const Domain d = path_graph(6);
    const EnvelopePair env = envelopes(d, guiding_of({{0, 2}}), 4);
    EXPECT_EQ(env.lower, (std::vector<int>{2, 1, 1, 1, 1, 1}));
    EXPECT_EQ(env.upper, (std::vector<int>{2, 3, 4, 4, 4, 4}));
}

TEST(Envelopes, MatchPerPointDefinition) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        auto inst = random_instance(rng, 12, 8);
        const LevelFit fit = fit_levels(inst.domain, inst.samples);
        const EnvelopePair env = envelopes(inst.domain, fit.guiding, fit.table.count);
        const auto ref = oracle::all_pairs(static_cast<int>(inst.grid.vertex_count()),
                                           oracle::grid_edges(static_cast<int>(inst.grid.width),
                                                              static_cast<int>(inst.grid.height),
                                                              inst.grid.connectivity == Connectivity::eight));
        for (VertexId p = 0; p < inst.grid.vertex_count(); ++p) {
            int lo = 1, hi = fit.table.count;
            for (auto [x, i] : fit.guiding.entries) {
                lo = std::max(lo, i - ref[p][x]);
                hi = std::min(hi, i + ref[p][x]);
            }
            EXPECT_EQ(env.lower[p], lo);
            EXPECT_EQ(env.upper[p], hi);
        }
    }
}

TEST(Extend, PathEndpointsForceUniqueExtension) {
    const Domain d = path_graph(5);
    const LevelTable table{0.0, 1.0, 5};
    for (auto policy : {ExtensionPolicy::midpoint, ExtensionPolicy::lower, ExtensionPolicy::upper}) {
        const LevelField f = gvf_extend(d, guiding_of({{0, 1}, {4, 5}}), table, policy);
        EXPECT_EQ(f.idx, (std::vector<int>{1, 2, 3, 4, 5}));
    }
}

TEST(Extend, SinglePointMidpointIsConstantWhenUnclamped) {
    // center of a 5x5 grid has eccentricity 4; i=5, n=9 keeps the interval symmetric
    const Domain d = build_grid({5, 5});
    const LevelField f = gvf_extend(d, guiding_of({{12, 5}}), {0.0, 1.0, 9});
    for (int i : f.idx) EXPECT_EQ(i, 5);

    // near the top of the range clamping breaks the symmetry; only gradualness is promised
    const LevelField g = gvf_extend(d, guiding_of({{0, 2}}), {0.0, 1.0, 3});
    EXPECT_TRUE(is_gradually_varied(d, g));
    EXPECT_EQ(g.idx[0], 2);
}

TEST(Extend, InfeasibleCarriesWitness) {
    const Domain d = path_graph(3);
    try {
        gvf_extend(d, guiding_of({{0, 1}, {2, 4}}), {0.0, 1.0, 4});
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.witness().distance, 2u);
        EXPECT_EQ(e.witness().index_gap, 3);
    }
}

TEST(Extend, IndexOutsideTableRejected) {
    const Domain d = path_graph(3);
    EXPECT_THROW(gvf_extend(d, guiding_of({{0, 4}}), {0.0, 1.0, 3}), InvalidArgument);
}

// Holds whenever neither clamp binds (levels at least path length away from 1
// and from n). A binding clamp can bend the midpoint the wrong way, see below.
TEST(Extend, MonotoneBetweenPathEndpoints) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 30;
        const Domain d = path_graph(n);
        const int a = static_cast<int>(2 * n + rng() % 20);
        const int gap = static_cast<int>(rng() % n);
        const int b = rng() % 2 ? a + gap : a - gap;
        const LevelTable table{0.0, 1.0, std::max(a, b) + static_cast<int>(n)};
        const LevelField f = gvf_extend(d, guiding_of({{0, a}, {static_cast<VertexId>(n - 1), b}}), table);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (b >= a)
                EXPECT_LE(f.idx[k], f.idx[k + 1]);
            else
                EXPECT_GE(f.idx[k], f.idx[k + 1]);
        }
    }
}

TEST(Extend, MonotoneThroughQuantizedPipeline) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 40;
        const Domain d = path_graph(n);
        const double a = u(rng), b = u(rng);
        const ScalarField f = gvf_reconstruct(d, {{0, a}, {static_cast<VertexId>(n - 1), b}});
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (b >= a)
                EXPECT_LE(f[k], f[k + 1]);
            else
                EXPECT_GE(f[k], f[k + 1]);
        }
    }
}

// With equal endpoint indices at the top of the table the midpoint dips
// toward the middle of the range; only gradualness survives.
TEST(Extend, TopClampedEndpointsGiveValley) {
    const Domain d = path_graph(11);
    const LevelField f = gvf_extend(d, guiding_of({{0, 6}, {10, 6}}), {0.0, 1.0, 6});
    EXPECT_EQ(f.idx[5], 3);
    EXPECT_TRUE(is_gradually_varied(d, f));
}

// Output validity, sandwich and determinism on random instances at delta*.
TEST(ExtendProperty, RandomInstancesAreValid) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        auto inst = random_instance(rng, 32, 20);
        const LevelFit fit = fit_levels(inst.domain, inst.samples);
        ASSERT_TRUE(check_feasibility(inst.domain, fit.guiding).feasible);
        const EnvelopePair env = envelopes(inst.domain, fit.guiding, fit.table.count);
        ASSERT_TRUE(env.consistent());
        for (auto policy : {ExtensionPolicy::midpoint, ExtensionPolicy::lower, ExtensionPolicy::upper}) {
            const LevelField f = gvf_extend(inst.domain, fit.guiding, fit.table, policy);
            ASSERT_LE(max_edge_step(inst.domain, f.idx), 1);
            for (auto [v, i] : fit.guiding.entries) ASSERT_EQ(f.idx[v], i);
            for (VertexId p = 0; p < f.idx.size(); ++p) {
                ASSERT_LE(env.lower[p], f.idx[p]);
                ASSERT_LE(f.idx[p], env.upper[p]);
            }
            ASSERT_EQ(f, gvf_extend(inst.domain, fit.guiding, fit.table, policy));
        }
    }
}

// Envelope consistency and the pairwise condition agree on arbitrary (often infeasible) guiding sets.
TEST(EnvelopeProperty, EquivalentToPairwiseCondition) {
    std::mt19937_64 rng(123);
    std::size_t infeasible = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const GridSpec spec{2 + rng() % 15, 2 + rng() % 15, rng() % 2 ? Connectivity::four : Connectivity::eight};
        const Domain d = build_grid(spec);
        const int n = 2 + static_cast<int>(rng() % 12);
        std::map<VertexId, int> entries;
        for (std::size_t k = 0, m = 1 + rng() % 8; k < m; ++k)
            entries[static_cast<VertexId>(rng() % spec.vertex_count())] = 1 + static_cast<int>(rng() % n);
        const GuidingSet g = guiding_of(entries);
        const bool pairwise = check_feasibility(d, g).feasible;
        EXPECT_EQ(envelopes(d, g, n).consistent(), pairwise);
        infeasible += !pairwise;
    }
    EXPECT_GT(infeasible, 100u);
}

TEST(ToScalar, MapsIndicesThroughLevels) {
    LevelField f{{1, 2, 3}, {0.0, 1.0, 3}};
    EXPECT_EQ(to_scalar(f).values, (std::vector<double>{0.0, 1.0, 2.0}));
    LevelField one{{1, 1}, {4.5, 2.0, 1}};
    EXPECT_EQ(to_scalar(one).values, (std::vector<double>{4.5, 4.5}));
}

TEST(ToScalar, RoundTripWithinHalfDelta) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        auto inst = random_instance(rng, 20, 12);
        const LevelFit fit = fit_levels(inst.domain, inst.samples);
        const ScalarField out = to_scalar(gvf_extend(inst.domain, fit.guiding, fit.table));
        for (auto [v, raw] : inst.samples) EXPECT_LE(std::abs(out[v] - raw), fit.table.delta / 2 * (1 + 1e-12));
    }
}

TEST(FitLevels, ExplicitDeltaMayBeInfeasible) {
    const Domain d = path_graph(4);
    const LevelFit fit = fit_levels(d, {{0, 0.0}, {1, 1.0}}, 0.25);
    EXPECT_FALSE(fit.auto_delta);
    EXPECT_FALSE(check_feasibility(d, fit.guiding).feasible);
    EXPECT_THROW(gvf_reconstruct(d, {{0, 0.0}, {1, 1.0}}, ExtensionPolicy::midpoint, 0.25), InfeasibleError);
}
