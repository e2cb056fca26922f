#include "ada/memory.hpp"

#include "ada/error.hpp"
#include "ada/rng.hpp"

#include <algorithm>

namespace ada {

namespace {

// true when a ranks strictly better than b: higher return, then shorter
bool dominates(const Trajectory& a, const Trajectory& b) {
    if (a.total_return != b.total_return) return a.total_return > b.total_return;
    return a.effective_length < b.effective_length;
}

} // namespace

Trajectory finalize_trajectory(std::vector<TrajStep> raw_steps, TerminalKind kind) {
    if (raw_steps.empty()) throw validation_error("finalize_trajectory: empty step list");
    Trajectory t;
    t.terminal_kind = kind;
    if (kind == TerminalKind::death) raw_steps.pop_back(); // fatal step is not stored
    t.steps = std::move(raw_steps);
    t.effective_length = static_cast<int>(t.steps.size());
    t.total_return = 0.0;
    for (const TrajStep& s : t.steps) t.total_return += s.reward;
    return t;
}

MemoryBuffer::MemoryBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw validation_error("MemoryBuffer capacity must be positive");
}

bool MemoryBuffer::offer(const Trajectory& candidate) {
    if (candidate.effective_length <= 0 || candidate.steps.empty()) return false;

    if (entries_.size() >= capacity_) {
        const Trajectory& worst = entries_.back(); // sort order keeps worst last
        if (!dominates(candidate, worst)) return false;
        entries_.pop_back();
    }
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), candidate,
                                [](const Trajectory& a, const Trajectory& b) {
                                    return dominates(a, b);
                                });
    entries_.insert(pos, candidate);
    return true;
}

const Trajectory& MemoryBuffer::sample(std::uint64_t rng_seed) const {
    if (entries_.empty()) throw empty_buffer_error("MemoryBuffer::sample on empty buffer");
    Rng rng(split_seed(rng_seed, "mbuffer_sample"));
    return entries_[static_cast<std::size_t>(rng.below(entries_.size()))];
}

void MemoryBuffer::restore(std::size_t capacity, std::vector<Trajectory> entries) {
    if (capacity == 0 || entries.size() > capacity)
        throw validation_error("MemoryBuffer::restore: bad capacity");
    capacity_ = capacity;
    entries_ = std::move(entries);
}

FailureBuffer::FailureBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw validation_error("FailureBuffer capacity must be positive");
}

void FailureBuffer::push(const FailurePair& pair) {
    entries_.push_back(pair);
    if (entries_.size() > capacity_) entries_.pop_front();
}

void FailureBuffer::push_all(const std::vector<FailurePair>& pairs) {
    for (const FailurePair& p : pairs) push(p);
}

std::vector<FailurePair> FailureBuffer::sample(std::size_t batch, std::uint64_t rng_seed) const {
    if (entries_.empty()) throw empty_buffer_error("FailureBuffer::sample on empty buffer");
    Rng rng(split_seed(rng_seed, "rbuffer_sample"));
    std::vector<FailurePair> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i)
        out.push_back(entries_[static_cast<std::size_t>(rng.below(entries_.size()))]);
    return out;
}

void FailureBuffer::restore(std::size_t capacity, std::deque<FailurePair> entries) {
    if (capacity == 0 || entries.size() > capacity)
        throw validation_error("FailureBuffer::restore: bad capacity");
    capacity_ = capacity;
    entries_ = std::move(entries);
}

} // namespace ada
