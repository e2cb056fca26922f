#include <doctest.h>

#include "ada/error.hpp"
#include "ada/memory.hpp"
#include "ada/rng.hpp"
#include "test_helpers.hpp"

#include <map>

using namespace ada;

namespace {

TrajStep make_step(int hot, int action, double reward, int dim = 48) {
    return TrajStep{Observation{dim, hot}, action, reward};
}

Trajectory make_traj(double total_return, int length, TerminalKind kind = TerminalKind::goal) {
    std::vector<TrajStep> steps;
    double per_step = total_return / length;
    for (int i = 0; i < length; ++i) steps.push_back(make_step(i % 48, i % 4, per_step));
    // fix rounding so the sum is exactly total_return
    Trajectory t = finalize_trajectory(std::move(steps), kind);
    t.total_return = total_return;
    return t;
}

} // namespace

TEST_CASE("finalize_trajectory") {
    std::vector<TrajStep> steps;
    for (int i = 0; i < 10; ++i) steps.push_back(make_step(i, 0, -1.0));

    Trajectory goal = finalize_trajectory(steps, TerminalKind::goal);
    CHECK(goal.effective_length == 10);
    CHECK(goal.steps.size() == 10);
    CHECK(goal.total_return == -10.0);

    Trajectory death = finalize_trajectory(steps, TerminalKind::death);
    CHECK(death.effective_length == 9);
    CHECK(death.steps.size() == 9);
    CHECK(death.total_return == -9.0); // fatal step excluded

    Trajectory degenerate = finalize_trajectory({make_step(0, 0, -100.0)}, TerminalKind::death);
    CHECK(degenerate.effective_length == 0);
    MemoryBuffer buf(4);
    CHECK(!buf.offer(degenerate)); // non-offerable

    CHECK_THROWS_AS(finalize_trajectory({}, TerminalKind::goal), Error);
}

TEST_CASE("offer: insertion and replacement rules") {
    MemoryBuffer buf(2);
    CHECK(buf.offer(make_traj(-20.0, 20)));
    CHECK(buf.size() == 1);
    CHECK(buf.offer(make_traj(-15.0, 15)));
    CHECK(buf.size() == 2);

    // equal return, two steps shorter: replaces the worst
    CHECK(buf.offer(make_traj(-20.0, 18)));
    CHECK(buf.size() == 2);
    CHECK(buf.entries()[1].effective_length == 18);

    // strictly worse return: rejected, buffer unchanged
    auto before = buf.entries();
    CHECK(!buf.offer(make_traj(-30.0, 5)));
    CHECK(buf.entries() == before);

    // equal on both keys: first arrival stays
    CHECK(!buf.offer(make_traj(-20.0, 18)));
}

TEST_CASE("offer matches the brute-force top-k reference") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(split_seed(seed, "mbuffer_prop"));
        MemoryBuffer buf(10);
        std::vector<Trajectory> offered;
        for (int i = 0; i < 1000; ++i) {
            double ret = -static_cast<double>(rng.below(40)) - 1.0;
            int len = 1 + static_cast<int>(rng.below(30));
            Trajectory t = make_traj(ret, len);
            offered.push_back(t);
            buf.offer(t);
        }
        std::vector<Trajectory> expect = testutil::brute_force_top_k(offered, 10);
        REQUIRE(buf.size() == expect.size());
        for (std::size_t i = 0; i < expect.size(); ++i) {
            CHECK(buf.entries()[i].total_return == expect[i].total_return);
            CHECK(buf.entries()[i].effective_length == expect[i].effective_length);
        }
    }
}

TEST_CASE("sample_m") {
    MemoryBuffer buf(10);
    buf.offer(make_traj(-5.0, 5));
    CHECK(buf.sample(123).total_return == -5.0);

    for (int i = 0; i < 9; ++i) buf.offer(make_traj(-10.0 - i, 10 + i));
    REQUIRE(buf.size() == 10);

    // determinism
    const Trajectory& a = buf.sample(7);
    const Trajectory& b = buf.sample(7);
    CHECK(&a == &b);

    // uniformity over 10k draws: chi-square inside the 99% band
    std::map<double, int> counts;
    for (std::uint64_t s = 0; s < 10000; ++s) counts[buf.sample(s).total_return] += 1;
    REQUIRE(counts.size() == 10);
    double chi2 = 0.0;
    for (const auto& [ret, n] : counts) {
        double diff = n - 1000.0;
        chi2 += diff * diff / 1000.0;
    }
    CHECK(chi2 < testutil::chi2_99(9.0));

    MemoryBuffer empty(3);
    CHECK_THROWS_AS(empty.sample(0), Error);
}

TEST_CASE("failure buffer is a FIFO ring") {
    FailureBuffer buf(5);
    for (int i = 0; i < 3; ++i) buf.push(FailurePair{Observation{48, i}, i % 4});
    CHECK(buf.size() == 3);

    for (int i = 3; i < 10; ++i) buf.push(FailurePair{Observation{48, i}, i % 4});
    CHECK(buf.size() == 5);
    // first five evicted: survivors are 5..9 in order
    int expect = 5;
    for (const FailurePair& p : buf.entries()) {
        CHECK(p.obs.hot == expect);
        ++expect;
    }
}

TEST_CASE("failure buffer mirrors a plain list under interleaved pushes") {
    Rng rng(99);
    FailureBuffer buf(16);
    std::vector<FailurePair> reference;
    for (int i = 0; i < 200; ++i) {
        int burst = 1 + static_cast<int>(rng.below(4));
        for (int k = 0; k < burst; ++k) {
            FailurePair p{Observation{48, static_cast<int>(rng.below(48))},
                          static_cast<int>(rng.below(4))};
            buf.push(p);
            reference.push_back(p);
        }
        std::size_t start = reference.size() > 16 ? reference.size() - 16 : 0;
        REQUIRE(buf.size() == reference.size() - start);
        std::size_t bi = 0;
        for (auto it = reference.begin() + static_cast<std::ptrdiff_t>(start);
             it != reference.end(); ++it, ++bi)
            CHECK(buf.entries()[bi] == *it);
    }
}

TEST_CASE("sample_r") {
    FailureBuffer buf(100);
    buf.push(FailurePair{Observation{48, 7}, 2});
    auto one = buf.sample(1, 0);
    REQUIRE(one.size() == 1);
    CHECK(one[0].obs.hot == 7);

    for (int i = 0; i < 9; ++i) buf.push(FailurePair{Observation{48, i}, i % 4});
    auto a = buf.sample(32, 5);
    auto b = buf.sample(32, 5);
    CHECK(a == b);

    // exactly `batch` draws with replacement, uniform within the 99% band
    std::vector<int> counts(10, 0);
    auto big = buf.sample(10000, 11);
    CHECK(big.size() == 10000);
    for (const FailurePair& p : big) {
        int slot = p.obs.hot == 7 && p.action == 2 ? 9 : p.obs.hot;
        counts[static_cast<std::size_t>(slot)] += 1;
    }
    double chi2 = 0.0;
    for (int n : counts) {
        double diff = n - 1000.0;
        chi2 += diff * diff / 1000.0;
    }
    CHECK(chi2 < testutil::chi2_99(9.0));

    FailureBuffer empty(4);
    CHECK_THROWS_AS(empty.sample(1, 0), Error);
}
