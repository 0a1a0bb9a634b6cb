import numpy as np
import time
import random

def move(grid: np.array, score: int) -> str:
    #Function that determines which direction to move the 2048 grid
    #Output: direction - one of possible moves 'left', 'right', 'up' or 'down'

    # ------------------ [Algorithm body] ------------------

    # --------------------------------------------------------------
    # Move mechanics: shift + merge (left), rotate/flip for others
    # --------------------------------------------------------------

    def shift_and_combine_left(row):
        merged = []
        nonzero = [x for x in row if x != 0]
        skip = False
        for i in range(len(nonzero)):
            if skip:
                skip = False
                continue
            if i < len(nonzero) - 1 and nonzero[i] == nonzero[i+1]:
                merged.append(nonzero[i] * 2)
                skip = True
            else:
                merged.append(nonzero[i])
        merged += [0]*(4-len(merged))
        return merged

    def move_left(bd):
        new_bd = np.zeros_like(bd)
        for i in range(4):
            new_bd[i] = shift_and_combine_left(bd[i])
        return new_bd

    def move_right(bd):
        flipped = np.fliplr(bd)
        merged = move_left(flipped)
        return np.fliplr(merged)

    def move_up(bd):
        transposed = bd.T
        merged = move_left(transposed)
        return merged.T

    def move_down(bd):
        transposed = bd.T
        flipped = np.fliplr(transposed)
        merged = move_left(flipped)
        unflipped = np.fliplr(merged)
        return unflipped.T

    def do_move(bd, direction):
        if direction == 'left':
            return move_left(bd)
        elif direction == 'right':
            return move_right(bd)
        elif direction == 'up':
            return move_up(bd)
        else:  # 'down'
            return move_down(bd)

    # --------------------------------------------------------------
    # Heuristic combining "snake weighting", empties, merges, smoothness
    # --------------------------------------------------------------

    def evaluate_board(bd):
        # Weighted matrix to keep large tiles in top-left "snake" pattern
        snake_weights = np.array([
            [ 65536, 32768, 16384,  8192],
            [  4096,  2048,  1024,   512],
            [   256,   128,    64,    32],
            [    16,     8,     4,     2]
        ], dtype=np.float64)
        snake_score = np.sum(bd * snake_weights)

        # Count empty cells
        empties = np.count_nonzero(bd == 0)

        # Smoothness: negative sum of differences between adjacent tiles
        smoothness = 0
        for r in range(4):
            for c in range(3):
                smoothness -= abs(bd[r][c] - bd[r][c+1])
        for c in range(4):
            for r in range(3):
                smoothness -= abs(bd[r][c] - bd[r+1][c])

        # Merges: count potential merges in both horizontal & vertical
        merges = 0
        for r in range(4):
            for c in range(3):
                if bd[r][c] != 0 and bd[r][c] == bd[r][c+1]:
                    merges += 1
        for c in range(4):
            for r in range(3):
                if bd[r][c] != 0 and bd[r][c] == bd[r+1][c]:
                    merges += 1

        # Combine factors
        return (snake_score 
                + empties * 100
                + merges * 50
                + smoothness * 0.1)

    # --------------------------------------------------------------
    # Expectimax with move ordering + optional Monte Carlo fallback
    # --------------------------------------------------------------

    TIME_LIMIT = 4.8  # a bit under 5s
    start_time = time.time()

    def expectimax(bd, depth, is_chance):
        # If we're out of time or reached depth => evaluate
        if (time.time() - start_time) > TIME_LIMIT or depth == 0:
            return evaluate_board(bd)

        if is_chance:
            # Chance node: tile (2 or 4)
            empties = [(r, c) for r in range(4) for c in range(4) if bd[r][c] == 0]
            if not empties:
                return evaluate_board(bd)
            exp_val = 0
            for (r, c) in empties:
                for val, p in [(2, 0.9), (4, 0.1)]:
                    bd[r][c] = val
                    exp_val += (p * expectimax(bd, depth - 1, False)) / len(empties)
                bd[r][c] = 0
            return exp_val
        else:
            # Player node: pick best move
            best_val = float('-inf')
            directions = ['left', 'right', 'up', 'down']
            # Move ordering: sort by a fast, single-step evaluation
            directions.sort(key=lambda d: evaluate_board(do_move(bd, d)), reverse=True)

            move_found = False
            for direc in directions:
                new_bd = do_move(bd, direc)
                if not np.array_equal(new_bd, bd):
                    move_found = True
                    val = expectimax(new_bd, depth - 1, True)
                    if val > best_val:
                        best_val = val
            if not move_found:
                return evaluate_board(bd)
            return best_val

    # --------------------------------------------------------------
    # Simple random rollout for tie-break or fallback
    # --------------------------------------------------------------

    def random_rollout_score(bd, length=50):
        # Copy board so as not to modify original
        sim_board = np.copy(bd)
        sc = 0
        for _ in range(length):
            # Try a random move
            direction = random.choice(['left','right','up','down'])
            new_bd = do_move(sim_board, direction)
            # If it doesn't change the board => probably stuck, break
            if np.array_equal(new_bd, sim_board):
                break
            sim_board = new_bd
            # 'Spawn' a random tile
            empties = [(r, c) for r in range(4) for c in range(4) if sim_board[r][c] == 0]
            if not empties:
                break
            (r, c) = random.choice(empties)
            sim_board[r][c] = 2 if random.random() < 0.9 else 4
        sc = evaluate_board(sim_board)
        return sc

    # --------------------------------------------------------------
    # Choose best move with a shallow expectimax + random rollout fallback
    # --------------------------------------------------------------

    def find_best_move(bd, depth):
        best_val = float('-inf')
        best_dir = 'left'
        directions = ['left','right','up','down']
        # Move ordering for shallow search
        directions.sort(key=lambda d: evaluate_board(do_move(bd, d)), reverse=True)

        for direc in directions:
            new_bd = do_move(bd, direc)
            if not np.array_equal(new_bd, bd):
                val = expectimax(new_bd, depth, True)
                # Tiebreaker: random rollout
                if abs(val - best_val) < 1e-6:
                    # if nearly equal => do a quick random rollout tiebreak
                    val_tiebreak = random_rollout_score(new_bd)
                    if val_tiebreak > random_rollout_score(do_move(bd, best_dir)):
                        best_dir = direc
                elif val > best_val:
                    best_val = val
                    best_dir = direc
        return best_dir

    # Iterative deepening
    max_depth = 6
    direction_chosen = 'left'
    depth = 1
    while depth <= max_depth:
        if (time.time() - start_time) > TIME_LIMIT:
            break
        direction_chosen = find_best_move(grid, depth)
        depth += 1

    direction = direction_chosen

    # ------------------ [End of Algorithm body] ------------------
    return direction
