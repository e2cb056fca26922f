#include "ada/grid.hpp"

#include "ada/error.hpp"

#include <algorithm>

namespace ada {

const char* action_name(GridAction a) {
    switch (a) {
        case GridAction::up: return "up";
        case GridAction::down: return "down";
        case GridAction::left: return "left";
        case GridAction::right: return "right";
    }
    return "?";
}

namespace {

GridSpec cliff_walking_spec(int width, int height) {
    GridSpec spec;
    spec.name = "cliff_walking";
    spec.width = width;
    spec.height = height;
    spec.start = Cell{height - 1, 0};
    spec.goal = Cell{height - 1, width - 1};
    // the bottom row between start and goal is all cliff
    for (int c = 1; c < width - 1; ++c) spec.cliffs.insert(Cell{height - 1, c});
    spec.step_reward = -1.0;
    spec.goal_reward = 0.0;
    spec.cliff_reward = -100.0;
    spec.max_steps = 200;
    return spec;
}

GridSpec four_rooms_spec(int width, int height) {
    GridSpec spec;
    spec.name = "four_rooms";
    spec.width = width;
    spec.height = height;
    int mid_r = height / 2;
    int mid_c = width / 2;
    // Cross wall with a single effective doorway. A full cross plus one
    // carved cell cannot join diagonal quadrants, so the vertical arm opens
    // for one cell on each side of the intersection: every top<->bottom
    // crossing then runs through the center cell, which is the doorway.
    for (int c = 0; c < width; ++c)
        if (c != mid_c) spec.walls.insert(Cell{mid_r, c});
    for (int r = 0; r < height; ++r)
        if (r < mid_r - 1 || r > mid_r + 1) spec.walls.insert(Cell{r, mid_c});
    spec.start = Cell{0, width - 1};
    spec.goal = Cell{height - 1, 0};
    spec.step_reward = 0.0;
    spec.goal_reward = 1.0;
    spec.cliff_reward = 0.0;
    spec.max_steps = 500;
    return spec;
}

GridSpec dark_chamber_spec(int width, int height) {
    GridSpec spec;
    spec.name = "dark_chamber";
    spec.width = width;
    spec.height = height;
    spec.start = Cell{height - 1, 0};
    spec.step_reward = 0.0;
    spec.goal_reward = 0.0;
    spec.cliff_reward = 0.0;
    spec.max_steps = 500;
    return spec;
}

} // namespace

void validate_spec(const GridSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0)
        throw validation_error("grid dimensions must be positive");
    if (spec.max_steps <= 0)
        throw validation_error("max_steps must be positive");
    auto check_bounds = [&](Cell c, const char* what) {
        if (!spec.in_bounds(c))
            throw validation_error(std::string(what) + " outside grid bounds");
    };
    check_bounds(spec.start, "start");
    if (spec.goal) check_bounds(*spec.goal, "goal");
    for (const Cell& c : spec.walls) check_bounds(c, "wall");
    for (const Cell& c : spec.cliffs) check_bounds(c, "cliff");
    if (spec.is_wall(spec.start) || spec.is_cliff(spec.start))
        throw validation_error("start cell collides with walls or cliffs");
    if (spec.goal && (spec.is_wall(*spec.goal) || spec.is_cliff(*spec.goal)))
        throw validation_error("goal cell collides with walls or cliffs");
}

GridSpec make_env(const std::string& name, const GridOverrides& ov) {
    int width = ov.width.value_or(0);
    int height = ov.height.value_or(0);

    GridSpec spec;
    if (name == "cliff_walking") {
        spec = cliff_walking_spec(width > 0 ? width : 12, height > 0 ? height : 4);
    } else if (name == "four_rooms") {
        spec = four_rooms_spec(width > 0 ? width : 13, height > 0 ? height : 13);
    } else if (name == "dark_chamber") {
        spec = dark_chamber_spec(width > 0 ? width : 50, height > 0 ? height : 50);
    } else {
        throw config_error("unknown environment: " + name);
    }

    if (ov.max_steps) spec.max_steps = *ov.max_steps;
    if (ov.step_reward) spec.step_reward = *ov.step_reward;
    if (ov.goal_reward) spec.goal_reward = *ov.goal_reward;
    if (ov.cliff_reward) spec.cliff_reward = *ov.cliff_reward;

    validate_spec(spec);
    return spec;
}

std::pair<EnvState, Observation> reset(const GridSpec& spec, std::uint64_t /*seed*/) {
    EnvState state;
    state.position = spec.start;
    state.steps_taken = 0;
    state.visit_counts.assign(static_cast<std::size_t>(spec.n_cells()), 0);
    state.visit_counts[static_cast<std::size_t>(spec.cell_index(spec.start))] = 1;
    state.done = false;
    state.fall_count = 0;
    return {state, encode_observation(spec, spec.start)};
}

StepResult step(const EnvState& state, const GridSpec& spec, GridAction action) {
    if (state.done) throw usage_error("step() called on a finished episode");

    Cell next = state.position;
    switch (action) {
        case GridAction::up: next.row -= 1; break;
        case GridAction::down: next.row += 1; break;
        case GridAction::left: next.col -= 1; break;
        case GridAction::right: next.col += 1; break;
    }
    if (!spec.in_bounds(next) || spec.is_wall(next)) next = state.position;

    StepResult out;
    out.state = state;
    out.state.position = next;
    out.state.steps_taken = state.steps_taken + 1;
    out.state.visit_counts[static_cast<std::size_t>(spec.cell_index(next))] += 1;

    if (spec.is_cliff(next)) {
        out.reward = spec.cliff_reward;
        out.terminated = true;
        out.fell = true;
        out.state.fall_count += 1;
    } else if (spec.is_goal(next)) {
        out.reward = spec.step_reward + spec.goal_reward;
        out.terminated = true;
    } else {
        out.reward = spec.step_reward;
    }
    if (!out.terminated && out.state.steps_taken >= spec.max_steps) out.truncated = true;
    out.state.done = out.terminated || out.truncated;
    out.obs = encode_observation(spec, next);
    return out;
}

Observation encode_observation(const GridSpec& spec, Cell position) {
    if (!spec.in_bounds(position))
        throw validation_error("encode_observation: position out of bounds");
    return Observation{spec.n_cells(), spec.cell_index(position)};
}

Coverage coverage(const EnvState& state) {
    Coverage cov;
    cov.heatmap = state.visit_counts;
    cov.distinct_cells = static_cast<int>(
        std::count_if(state.visit_counts.begin(), state.visit_counts.end(),
                      [](std::uint32_t v) { return v > 0; }));
    return cov;
}

} // namespace ada
