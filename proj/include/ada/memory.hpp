#pragma once

#include "ada/grid.hpp"

#include <cstdint>
#include <deque>
#include <vector>

namespace ada {

enum class TerminalKind : std::uint8_t { goal = 0, death = 1, truncated = 2 };

struct TrajStep {
    Observation obs;
    int action = 0;
    double reward = 0.0;

    bool operator==(const TrajStep&) const = default;
};

/// Finalized episode record. For death episodes the fatal step is dropped, so
/// total_return and effective_length describe the stored prefix only.
struct Trajectory {
    std::vector<TrajStep> steps;
    double total_return = 0.0;
    int effective_length = 0;
    TerminalKind terminal_kind = TerminalKind::truncated;

    bool operator==(const Trajectory&) const = default;
};

Trajectory finalize_trajectory(std::vector<TrajStep> raw_steps, TerminalKind kind);

/// Fixed-capacity store of advantageous trajectories, kept sorted by
/// (total_return descending, effective_length ascending). A full buffer
/// replaces its worst entry only by a strictly better candidate: higher
/// return, or equal return and shorter.
class MemoryBuffer {
public:
    explicit MemoryBuffer(std::size_t capacity);

    bool offer(const Trajectory& candidate);
    const Trajectory& sample(std::uint64_t rng_seed) const;

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return entries_.empty(); }
    const std::vector<Trajectory>& entries() const { return entries_; }

    // checkpoint support
    void restore(std::size_t capacity, std::vector<Trajectory> entries);

private:
    std::size_t capacity_;
    std::vector<Trajectory> entries_;
};

struct FailurePair {
    Observation obs;
    int action = 0;

    bool operator==(const FailurePair&) const = default;
};

/// FIFO ring of failed prediction pairs; oldest entries evicted first.
class FailureBuffer {
public:
    explicit FailureBuffer(std::size_t capacity);

    void push(const FailurePair& pair);
    void push_all(const std::vector<FailurePair>& pairs);

    /// Exactly `batch` uniform draws with replacement; deterministic per seed.
    std::vector<FailurePair> sample(std::size_t batch, std::uint64_t rng_seed) const;

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return entries_.empty(); }
    const std::deque<FailurePair>& entries() const { return entries_; }

    void restore(std::size_t capacity, std::deque<FailurePair> entries);

private:
    std::size_t capacity_;
    std::deque<FailurePair> entries_;
};

} // namespace ada
