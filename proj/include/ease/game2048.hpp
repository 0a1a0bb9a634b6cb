#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ease/clock.hpp"
#include "ease/rng.hpp"

namespace ease::g2048 {

/// Row-major 4x4 board; 0 = empty, nonzero cells are powers of two >= 2.
using Grid = std::array<int, 16>;
using Row = std::array<int, 4>;

enum class Direction { left, right, up, down };

std::string to_string(Direction d);
std::optional<Direction> direction_from_string(const std::string& s);

struct RowResult {
    Row row{};
    int gain = 0;
    bool operator==(const RowResult&) const = default;
};

/// Compacts nonzeros left and merges equal neighbors once per pair,
/// left-to-right; gain is the sum of created merge tiles.
RowResult slide_merge_row(const Row& row);

struct MoveResult {
    Grid grid{};
    int gain = 0;
    bool changed = false;
};

MoveResult apply_move(const Grid& grid, Direction direction);

/// Fills one uniformly chosen empty cell with 2 (p=0.9) or 4 (p=0.1).
Grid spawn_tile(Grid grid, Rng& rng);

bool is_game_over(const Grid& grid);
int max_tile(const Grid& grid);
std::vector<int> empty_cells(const Grid& grid);

enum class Termination { no_moves, policy_timeout, policy_error, move_cap };

std::string to_string(Termination t);

struct GameResult {
    long long final_score = 0;
    int max_tile = 0;
    int valid_moves = 0;
    Termination termination = Termination::no_moves;
    bool operator==(const GameResult&) const = default;
};

struct PolicySpec {
    enum class Kind { builtin, external_process };

    Kind kind = Kind::builtin;
    std::string builtin_name = "random";  // random | greedy_corner | expectimax_id
    std::string command;                  // external: argv template, already substituted
    Duration move_timeout = std::chrono::milliseconds(5000);
    Duration search_budget = std::chrono::milliseconds(5000);

    bool operator==(const PolicySpec&) const = default;
};

/// Plays one seeded game. A proposed move is accepted iff it changes the
/// grid; three consecutive rejected proposals end the game as policy_error.
GameResult play_game(const PolicySpec& policy, uint64_t seed, int move_cap = 20000);

struct SolverMetrics {
    double avg_score = 0;
    double avg_max_tile = 0;
    double avg_valid_moves = 0;
    int wins = 0;  // games whose max tile reached 2048
    std::vector<GameResult> games;
};

/// Plays n games with seeds base_seed .. base_seed+n-1 and averages.
SolverMetrics evaluate_solver(const PolicySpec& policy, int n_games, uint64_t base_seed,
                              int move_cap = 20000);

/// The wire lines sent to an external policy for one move: four rows of four
/// space-separated integers, then "SCORE <n>".
std::vector<std::string> protocol_lines(const Grid& grid, long long score);

}  // namespace ease::g2048
