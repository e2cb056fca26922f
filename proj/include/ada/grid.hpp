#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ada {

/// Cell coordinate: row 0 is the top row, col 0 the leftmost column.
struct Cell {
    int row = 0;
    int col = 0;
    auto operator<=>(const Cell&) const = default;
};

enum class GridAction : int { up = 0, down = 1, left = 2, right = 3 };
inline constexpr int kNumActions = 4;
const char* action_name(GridAction a);

/// Static description of a gridworld. Pure data, no hidden state.
struct GridSpec {
    std::string name;
    int width = 0;
    int height = 0;
    std::set<Cell> walls;
    std::set<Cell> cliffs;
    Cell start;
    std::optional<Cell> goal;
    double step_reward = 0.0;
    double goal_reward = 0.0;
    double cliff_reward = 0.0;
    int max_steps = 0;

    int n_cells() const { return width * height; }
    int cell_index(Cell c) const { return c.row * width + c.col; }
    Cell cell_at(int index) const { return Cell{index / width, index % width}; }
    bool in_bounds(Cell c) const {
        return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width;
    }
    bool is_wall(Cell c) const { return walls.count(c) > 0; }
    bool is_cliff(Cell c) const { return cliffs.count(c) > 0; }
    bool is_goal(Cell c) const { return goal && *goal == c; }
};

/// Optional field-by-field override of a canonical GridSpec.
struct GridOverrides {
    std::optional<int> width;
    std::optional<int> height;
    std::optional<int> max_steps;
    std::optional<double> step_reward;
    std::optional<double> goal_reward;
    std::optional<double> cliff_reward;
};

/// Agent-position one-hot over the flattened grid. Stored compactly; the
/// dense vector view materializes on demand.
struct Observation {
    int dim = 0;
    int hot = 0;

    std::vector<double> to_vector() const {
        std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
        v[static_cast<std::size_t>(hot)] = 1.0;
        return v;
    }
    auto operator<=>(const Observation&) const = default;
};

struct EnvState {
    Cell position;
    int steps_taken = 0;
    std::vector<std::uint32_t> visit_counts; // height*width, row-major
    bool done = false;
    int fall_count = 0;

    bool operator==(const EnvState&) const = default;
};

struct StepResult {
    EnvState state;
    Observation obs;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
    bool fell = false;
};

/// Canonical spec for one of {cliff_walking, four_rooms, dark_chamber},
/// with overrides applied and invariants re-validated.
GridSpec make_env(const std::string& name, const GridOverrides& overrides = {});

/// Throws validation_error when the spec breaks its own invariants.
void validate_spec(const GridSpec& spec);

std::pair<EnvState, Observation> reset(const GridSpec& spec, std::uint64_t seed);

/// Pure transition: identical inputs give identical outputs everywhere.
StepResult step(const EnvState& state, const GridSpec& spec, GridAction action);

Observation encode_observation(const GridSpec& spec, Cell position);

struct Coverage {
    int distinct_cells = 0;
    std::vector<std::uint32_t> heatmap; // copy of visit counts
};
Coverage coverage(const EnvState& state);

} // namespace ada
