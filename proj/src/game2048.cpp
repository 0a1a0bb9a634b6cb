#include "ease/game2048.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "ease/errors.hpp"
#include "ease/subprocess.hpp"

namespace ease::g2048 {
namespace {

constexpr std::array<Direction, 4> kDirections = {Direction::left, Direction::right,
                                                  Direction::up, Direction::down};

Grid mirror(const Grid& g) {
    Grid out{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out[r * 4 + c] = g[r * 4 + (3 - c)];
    return out;
}

Grid transpose(const Grid& g) {
    Grid out{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out[r * 4 + c] = g[c * 4 + r];
    return out;
}

struct SlideResult {
    Grid grid{};
    int gain = 0;
};

SlideResult slide_left(const Grid& g) {
    SlideResult out;
    for (int r = 0; r < 4; ++r) {
        Row row{g[r * 4], g[r * 4 + 1], g[r * 4 + 2], g[r * 4 + 3]};
        RowResult rr = slide_merge_row(row);
        out.gain += rr.gain;
        for (int c = 0; c < 4; ++c) out.grid[r * 4 + c] = rr.row[c];
    }
    return out;
}

struct PolicyReply {
    enum class Status { ok, timeout, error };
    Status status = Status::error;
    Direction dir = Direction::left;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyReply choose(const Grid& grid, long long score) = 0;
};

class RandomPolicy : public Policy {
public:
    explicit RandomPolicy(Rng rng) : rng_(rng) {}
    PolicyReply choose(const Grid& grid, long long) override {
        std::vector<Direction> valid;
        for (Direction d : kDirections)
            if (apply_move(grid, d).changed) valid.push_back(d);
        if (valid.empty()) return {PolicyReply::Status::ok, Direction::left};
        return {PolicyReply::Status::ok, valid[rng_.next_index(valid.size())]};
    }

private:
    Rng rng_;
};

// Greedy one-ply heuristic: corner-weighted sum + 10 per empty cell + a
// count of non-increasing adjacent pairs, maximized over the four slides.
class GreedyCornerPolicy : public Policy {
public:
    PolicyReply choose(const Grid& grid, long long) override {
        double best = -1e300;
        Direction best_dir = Direction::left;
        for (Direction d : kDirections) {
            MoveResult moved = apply_move(grid, d);
            if (!moved.changed) continue;
            double h = score_board(moved.grid);
            if (h > best) {
                best = h;
                best_dir = d;
            }
        }
        return {PolicyReply::Status::ok, best_dir};
    }

private:
    static double score_board(const Grid& b) {
        static constexpr std::array<double, 16> weights = {16, 12, 8, 6, 12, 10, 6, 4,
                                                           8, 6, 4, 2, 6, 4, 2, 1};
        double weighted = 0;
        int empties = 0;
        for (int i = 0; i < 16; ++i) {
            weighted += b[i] * weights[i];
            if (b[i] == 0) ++empties;
        }
        int monotonic = 0;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 3; ++c)
                if (b[r * 4 + c] >= b[r * 4 + c + 1]) ++monotonic;
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 3; ++r)
                if (b[r * 4 + c] >= b[(r + 1) * 4 + c]) ++monotonic;
        return weighted + empties * 10 + monotonic;
    }
};

// Depth-limited expectimax under a wall-clock budget with iterative
// deepening; chance nodes average the 2/4 spawn over every empty cell.
class ExpectimaxPolicy : public Policy {
public:
    explicit ExpectimaxPolicy(Duration budget) : budget_(budget) {}

    PolicyReply choose(const Grid& grid, long long) override {
        start_ = std::chrono::steady_clock::now();
        node_count_ = 0;
        out_of_time_ = false;
        Direction best = Direction::left;
        Duration last_cost(0);
        for (int depth = 1; depth <= 7; ++depth) {
            if (elapsed() > budget_) break;
            // Going one level deeper multiplies the tree by roughly the
            // branching factor; skip depths that cannot fit in the budget.
            if (depth > 1 && elapsed() + last_cost * 8 > budget_) break;
            auto depth_start = std::chrono::steady_clock::now();
            best = best_move(grid, depth);
            last_cost = std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now() -
                                                             depth_start);
        }
        return {PolicyReply::Status::ok, best};
    }

private:
    static double evaluate_board(const Grid& b) {
        static constexpr std::array<double, 16> weights = {16, 12, 8, 4, 12, 10, 6, 3,
                                                           8, 6, 4, 2, 4, 3, 2, 1};
        double weighted = 0;
        int empties = 0;
        for (int i = 0; i < 16; ++i) {
            weighted += b[i] * weights[i];
            if (b[i] == 0) ++empties;
        }
        double smoothness = 0;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 3; ++c)
                smoothness -= std::abs(b[r * 4 + c] - b[r * 4 + c + 1]);
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 3; ++r)
                smoothness -= std::abs(b[r * 4 + c] - b[(r + 1) * 4 + c]);
        int monotonic = 0;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 3; ++c)
                if (b[r * 4 + c] >= b[r * 4 + c + 1]) ++monotonic;
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 3; ++r)
                if (b[r * 4 + c] >= b[(r + 1) * 4 + c]) ++monotonic;
        return weighted + empties * 20 + smoothness / 16 + monotonic * 2;
    }

    Duration elapsed() const {
        return std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now() - start_);
    }

    bool out_of_time() {
        if (out_of_time_) return true;
        if ((++node_count_ & 63) == 0 && elapsed() > budget_) out_of_time_ = true;
        return out_of_time_;
    }

    double expectimax(const Grid& b, int depth, bool is_chance) {
        if (out_of_time() || depth == 0) return evaluate_board(b);
        if (is_chance) {
            auto empties = empty_cells(b);
            if (empties.empty()) return evaluate_board(b);
            double expected = 0;
            Grid child = b;
            for (int cell : empties) {
                for (auto [tile, prob] : {std::pair{2, 0.9}, std::pair{4, 0.1}}) {
                    child[cell] = tile;
                    expected += prob * expectimax(child, depth - 1, false) /
                                static_cast<double>(empties.size());
                }
                child[cell] = 0;
            }
            return expected;
        }
        double best = -1e300;
        bool any = false;
        for (Direction d : kDirections) {
            MoveResult moved = apply_move(b, d);
            if (!moved.changed) continue;
            any = true;
            best = std::max(best, expectimax(moved.grid, depth - 1, true));
        }
        return any ? best : evaluate_board(b);
    }

    Direction best_move(const Grid& grid, int depth) {
        double best = -1e300;
        Direction best_dir = Direction::left;
        for (Direction d : kDirections) {
            MoveResult moved = apply_move(grid, d);
            if (!moved.changed) continue;
            double value = expectimax(moved.grid, depth, true);
            if (value > best) {
                best = value;
                best_dir = d;
            }
        }
        return best_dir;
    }

    Duration budget_;
    std::chrono::steady_clock::time_point start_;
    uint64_t node_count_ = 0;
    bool out_of_time_ = false;
};

class ExternalPolicy : public Policy {
public:
    ExternalPolicy(const std::string& command, Duration move_timeout, Duration search_budget)
        : timeout_(move_timeout),
          process_(split_command(command),
                   {{"EASE_MOVE_BUDGET_MS", std::to_string(search_budget.count())}}) {}

    PolicyReply choose(const Grid& grid, long long score) override {
        for (const auto& line : protocol_lines(grid, score))
            if (!process_.write_line(line)) return {PolicyReply::Status::error, Direction::left};
        auto reply = process_.read_line(timeout_);
        if (!reply) {
            return {process_.last_read_timed_out() ? PolicyReply::Status::timeout
                                                   : PolicyReply::Status::error,
                    Direction::left};
        }
        auto dir = direction_from_string(*reply);
        if (!dir) return {PolicyReply::Status::error, Direction::left};
        return {PolicyReply::Status::ok, *dir};
    }

private:
    Duration timeout_;
    LineProcess process_;
};

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, Rng policy_rng) {
    if (spec.kind == PolicySpec::Kind::external_process)
        return std::make_unique<ExternalPolicy>(spec.command, spec.move_timeout,
                                                spec.search_budget);
    if (spec.builtin_name == "random") return std::make_unique<RandomPolicy>(policy_rng);
    if (spec.builtin_name == "greedy_corner") return std::make_unique<GreedyCornerPolicy>();
    if (spec.builtin_name == "expectimax_id")
        return std::make_unique<ExpectimaxPolicy>(spec.search_budget);
    throw UsageError("unknown builtin policy: " + spec.builtin_name);
}

}  // namespace

std::string to_string(Direction d) {
    switch (d) {
        case Direction::left: return "left";
        case Direction::right: return "right";
        case Direction::up: return "up";
        case Direction::down: return "down";
    }
    return "left";
}

std::optional<Direction> direction_from_string(const std::string& s) {
    if (s == "left") return Direction::left;
    if (s == "right") return Direction::right;
    if (s == "up") return Direction::up;
    if (s == "down") return Direction::down;
    return std::nullopt;
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::no_moves: return "no_moves";
        case Termination::policy_timeout: return "policy_timeout";
        case Termination::policy_error: return "policy_error";
        case Termination::move_cap: return "move_cap";
    }
    return "no_moves";
}

RowResult slide_merge_row(const Row& row) {
    std::array<int, 4> condensed{};
    int n = 0;
    for (int v : row)
        if (v != 0) condensed[n++] = v;
    RowResult out;
    int w = 0;
    for (int i = 0; i < n; ++i) {
        if (i < n - 1 && condensed[i] == condensed[i + 1]) {
            out.row[w++] = condensed[i] * 2;
            out.gain += condensed[i] * 2;
            ++i;  // the merged partner is consumed
        } else {
            out.row[w++] = condensed[i];
        }
    }
    return out;
}

MoveResult apply_move(const Grid& grid, Direction direction) {
    SlideResult slid;
    switch (direction) {
        case Direction::left:
            slid = slide_left(grid);
            break;
        case Direction::right:
            slid = slide_left(mirror(grid));
            slid.grid = mirror(slid.grid);
            break;
        case Direction::up:
            slid = slide_left(transpose(grid));
            slid.grid = transpose(slid.grid);
            break;
        case Direction::down:
            slid = slide_left(mirror(transpose(grid)));
            slid.grid = transpose(mirror(slid.grid));
            break;
    }
    return {slid.grid, slid.gain, slid.grid != grid};
}

Grid spawn_tile(Grid grid, Rng& rng) {
    auto empties = empty_cells(grid);
    if (empties.empty()) throw UsageError("spawn_tile: grid is full");
    int cell = empties[rng.next_index(empties.size())];
    grid[cell] = rng.bernoulli(0.9) ? 2 : 4;
    return grid;
}

bool is_game_over(const Grid& grid) {
    for (Direction d : kDirections)
        if (apply_move(grid, d).changed) return false;
    return true;
}

int max_tile(const Grid& grid) { return *std::max_element(grid.begin(), grid.end()); }

std::vector<int> empty_cells(const Grid& grid) {
    std::vector<int> out;
    for (int i = 0; i < 16; ++i)
        if (grid[i] == 0) out.push_back(i);
    return out;
}

std::vector<std::string> protocol_lines(const Grid& grid, long long score) {
    std::vector<std::string> lines;
    for (int r = 0; r < 4; ++r) {
        std::string line;
        for (int c = 0; c < 4; ++c) {
            if (c > 0) line += ' ';
            line += std::to_string(grid[r * 4 + c]);
        }
        lines.push_back(std::move(line));
    }
    lines.push_back("SCORE " + std::to_string(score));
    return lines;
}

GameResult play_game(const PolicySpec& policy_spec, uint64_t seed, int move_cap) {
    if (move_cap < 1) throw UsageError("play_game: move_cap must be >= 1");
    SeedSplitter split(seed);
    Rng spawn_rng = split.stream("spawn");
    Grid grid{};
    grid = spawn_tile(grid, spawn_rng);
    grid = spawn_tile(grid, spawn_rng);

    GameResult result;
    long long score = 0;

    std::unique_ptr<Policy> policy;
    try {
        policy = make_policy(policy_spec, split.stream("policy"));
    } catch (const IoError&) {
        result.termination = Termination::policy_error;
        result.max_tile = max_tile(grid);
        return result;
    }

    int consecutive_invalid = 0;
    while (true) {
        if (is_game_over(grid)) {
            result.termination = Termination::no_moves;
            break;
        }
        if (result.valid_moves >= move_cap) {
            result.termination = Termination::move_cap;
            break;
        }
        PolicyReply reply = policy->choose(grid, score);
        if (reply.status == PolicyReply::Status::timeout) {
            result.termination = Termination::policy_timeout;
            break;
        }
        if (reply.status == PolicyReply::Status::error) {
            result.termination = Termination::policy_error;
            break;
        }
        MoveResult moved = apply_move(grid, reply.dir);
        if (moved.changed) {
            grid = moved.grid;
            score += moved.gain;
            ++result.valid_moves;
            consecutive_invalid = 0;
            grid = spawn_tile(grid, spawn_rng);  // a changed move frees at least one cell
        } else if (++consecutive_invalid >= 3) {
            result.termination = Termination::policy_error;
            break;
        }
    }
    result.final_score = score;
    result.max_tile = max_tile(grid);
    return result;
}

SolverMetrics evaluate_solver(const PolicySpec& policy, int n_games, uint64_t base_seed,
                              int move_cap) {
    if (n_games < 1) throw UsageError("evaluate_solver: n_games must be >= 1");
    SolverMetrics metrics;
    for (int i = 0; i < n_games; ++i) {
        GameResult game = play_game(policy, base_seed + static_cast<uint64_t>(i), move_cap);
        metrics.avg_score += static_cast<double>(game.final_score);
        metrics.avg_max_tile += game.max_tile;
        metrics.avg_valid_moves += game.valid_moves;
        if (game.max_tile >= 2048) ++metrics.wins;
        metrics.games.push_back(game);
    }
    metrics.avg_score /= n_games;
    metrics.avg_max_tile /= n_games;
    metrics.avg_valid_moves /= n_games;
    return metrics;
}

}  // namespace ease::g2048
