#!/usr/bin/env python3
"""Regenerates everything under fixtures/ deterministically."""
import json
import os
import random

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def neg(m):
    return [[-x for x in row] for row in m]


def transpose(m):
    return [list(r) for r in zip(*m)]


def game(gid, row_payoffs, col_payoffs, row_names=None, col_names=None):
    n0, n1 = len(row_payoffs), len(row_payoffs[0])
    assert len(col_payoffs) == n0 and len(col_payoffs[0]) == n1, gid
    return {
        "id": gid,
        "unit_factor": 1.0,
        "actions": [
            row_names or [f"r{i}" for i in range(n0)],
            col_names or [f"c{j}" for j in range(n1)],
        ],
        "payoffs": [row_payoffs, col_payoffs],
    }


def sym(gid, m, names=None):
    """Symmetric game: column player sees the transposed matrix."""
    return game(gid, m, transpose(m), names, names)


# --- named single-game fixtures ---

NAMED = [
    game("pd", [[30, 0], [50, 10]], [[30, 50], [0, 10]], ["c", "d"], ["c", "d"]),
    game("matching_pennies", [[20, -20], [-20, 20]], [[-20, 20], [20, -20]],
         ["h", "t"], ["h", "t"]),
    game("bos", [[20, 0], [0, 10]], [[10, 0], [0, 20]], ["o", "f"], ["o", "f"]),
    game("chain3x3",
         [[30, 20, 0], [10, 10, 40], [0, 0, 20]],
         [[30, 10, 0], [20, 10, 0], [0, 40, 20]]),
    sym("dominant", [[30, 10], [40, 20]], ["a", "d"]),
    # rock-paper-scissors with a duplicated rock row: degenerate by construction
    game("rpsw",
         [[0, -10, 10], [10, 0, -10], [-10, 10, 0], [0, -10, 10]],
         [[0, 10, -10], [-10, 0, 10], [10, -10, 0], [0, 10, -10]],
         ["rock", "paper", "scissors", "rock2"], ["rock", "paper", "scissors"]),
]

# --- 30-game classification pool ---

POOL = [
    # strictly solvable, 1 round
    game("pd", [[30, 0], [50, 10]], [[30, 50], [0, 10]], ["c", "d"], ["c", "d"]),
    sym("dominant", [[30, 10], [40, 20]], ["a", "d"]),
    game("pd_big", [[45, 0], [75, 15]], [[45, 75], [0, 15]]),
    # strictly solvable, 2 rounds
    game("chain3x3",
         [[30, 20, 0], [10, 10, 40], [0, 0, 20]],
         [[30, 10, 0], [20, 10, 0], [0, 40, 20]]),
    game("chain3x3_b",
         [[90, 60, 0], [30, 30, 120], [0, 0, 60]],
         [[90, 30, 0], [60, 30, 0], [0, 120, 60]]),
    game("strict_r2b", [[30, 10], [20, 15]], [[25, 10], [20, 12]]),
    game("strict_r2c", [[12, 2], [8, 6]], [[9, 4], [7, 5]]),
    # strictly solvable, deeper
    game("strict_r3",
         [[30, 31, 5], [22, 24, 26], [2, 4, 6]],
         [[20, 10, 6], [18, 25, 8], [30, 3, 1]]),
    game("strict_deep",
         [[30, 31, 5], [22, 24, 26], [2, 4, 6]],
         [[20, 10, 6], [18, 25, 8], [1, 3, 40]]),
    # weakly (not strictly) solvable
    game("weak_r1", [[20, 10], [20, 5]], [[8, 14], [7, 13]]),
    game("weak_r1b",
         [[10, 10, 10], [10, 9, 9], [9, 10, 8]],
         [[12, 12, 11], [12, 11, 12], [11, 10, 10]]),
    game("weak_r2", [[20, 10], [20, 8]], [[15, 9], [10, 14]]),
    game("weak_deep",
         [[30, 31, 5], [22, 24, 26], [2, 4, 26]],
         [[20, 10, 6], [18, 25, 8], [1, 3, 40]]),
    # unsolvable, unique mixed equilibrium
    game("mp", [[20, -20], [-20, 20]], [[-20, 20], [20, -20]]),
    game("mp_asym", [[25, 5], [10, 20]], [[5, 25], [20, 10]]),
    game("mp_b", [[25, -15], [-10, 30]], [[-25, 15], [10, -30]]),
    game("mp_wide", [[20, -20, 8], [-20, 20, -16]], [[-20, 20, -8], [20, -20, 16]]),
    game("rps",
         [[0, -10, 10], [10, 0, -10], [-10, 10, 0]],
         [[0, 10, -10], [-10, 0, 10], [10, -10, 0]]),
    game("rps_b",
         [[0, -10, 20], [20, 0, -10], [-10, 20, 0]],
         [[0, 10, -20], [-20, 0, 10], [10, -20, 0]]),
    game("shapley",
         [[30, 0, 0], [0, 30, 0], [0, 0, 30]],
         [[0, 30, 0], [0, 0, 30], [30, 0, 0]]),
    game("dom_mix",
         [[20, -20, -5], [-20, 20, -5], [-30, -30, -40]],
         [[-20, 20, -25], [20, -20, -25], [-30, -30, -50]]),
    # unsolvable, unique pure equilibrium
    game("psne_unsolv",
         [[30, 18, 17], [10, 25, 6], [11, 5, 24]],
         [[30, 11, 10], [17, 6, 25], [18, 24, 5]]),
    game("psne_unsolv_b",
         [[40, 22, 21], [12, 30, 8], [14, 7, 29]],
         [[40, 13, 12], [21, 8, 30], [22, 29, 7]]),
    # unsolvable, multiple equilibria
    game("bos", [[20, 0], [0, 10]], [[10, 0], [0, 20]], ["o", "f"], ["o", "f"]),
    game("bos_b", [[30, 5], [0, 15]], [[10, 5], [0, 35]]),
    game("stag", [[40, 0], [30, 30]], [[40, 30], [0, 30]]),
    game("chicken", [[30, 10], [40, 0]], [[30, 40], [10, 0]]),
    game("hawk_dove_b", [[20, 5], [35, 0]], [[20, 35], [5, 0]]),
    sym("coord3", [[10, 0, 0], [0, 20, 0], [0, 0, 30]]),
    sym("coord4", [[10, 0, 0, 0], [0, 20, 0, 0], [0, 0, 30, 0], [0, 0, 0, 40]]),
]

GR10 = ["pd", "chain3x3", "mp", "rps", "bos", "stag", "coord3", "dom_mix",
        "psne_unsolv", "mp_asym"]

# Ten games chosen to pin down level-mixture parameters from 2000 draws:
# payoffs (in cents) picked by a greedy Fisher-information search so that the
# worst-parameter Cramer-Rao sd at (tau=1.5, eps=0.3, lambda=0.2) is ~0.06.
RECOVERY = [
    game("rg01", [[320, 60, 160], [80, 290, 200], [140, 60, 310]],
         [[170, 90, 330], [330, 250, 310], [210, 350, 120]]),
    game("rg02", [[130, 310, 130], [350, 150, 30], [40, 150, 250]],
         [[300, 140, 80], [40, 250, 30], [160, 40, 250]]),
    game("rg03", [[350, 250, 110], [160, 330, 300], [170, 60, 130]],
         [[10, 300, 290], [360, 180, 210], [290, 220, 170]]),
    game("rg04", [[190, 0, 250], [30, 260, 20], [50, 170, 160]],
         [[200, 320, 250], [250, 320, 360], [10, 230, 310]]),
    game("rg05", [[340, 360, 70], [160, 50, 320], [330, 50, 20]],
         [[320, 220, 360], [280, 140, 140], [60, 340, 260]]),
    game("rg06", [[120, 60, 120], [0, 250, 80], [110, 50, 210]],
         [[300, 200, 280], [60, 10, 270], [70, 340, 80]]),
    game("rg07", [[100, 100, 350], [50, 250, 230], [310, 100, 50]],
         [[350, 220, 320], [320, 330, 200], [130, 330, 90]]),
    game("rg08", [[340, 170, 30], [60, 360, 280], [150, 0, 20]],
         [[250, 310, 310], [340, 190, 270], [160, 360, 140]]),
    game("rg09", [[80, 60, 190], [240, 30, 20], [40, 10, 350]],
         [[220, 130, 150], [90, 40, 260], [340, 290, 240]]),
    game("rg10", [[210, 170, 160], [10, 290, 60]],
         [[70, 140, 270], [60, 240, 30]]),
]


def write_json(path, obj):
    with open(path, "w") as f:
        json.dump(obj, f, indent=2)
        f.write("\n")


def write_csv(path, rows):
    with open(path, "w") as f:
        f.write("game_id,player_role,action_index,count\n")
        for r in rows:
            f.write(",".join(str(x) for x in r) + "\n")


def manifest(path, source, unit_factor, game_paths, obs_path):
    write_json(path, {
        "source": source,
        "unit_factor": unit_factor,
        "games": game_paths,
        "observations": obs_path,
    })


def weighted_counts(n, weights, rng):
    """n draws from `weights`, returned as per-action counts."""
    counts = [0] * len(weights)
    total = sum(weights)
    for _ in range(n):
        u = rng.random() * total
        acc = 0.0
        for a, w in enumerate(weights):
            acc += w
            if u < acc:
                counts[a] += 1
                break
        else:
            counts[-1] += 1
    return counts


def main():
    rng = random.Random(20260823)
    by_id = {}
    for g in POOL:
        by_id[g["id"]] = g

    for d in ["games", "pool", "gr10", "tiny", "scaled", "recovery"]:
        os.makedirs(os.path.join(ROOT, d), exist_ok=True)

    for g in NAMED:
        write_json(os.path.join(ROOT, "games", g["id"] + ".json"), g)

    pool_rows = []
    for g in POOL:
        write_json(os.path.join(ROOT, "pool", g["id"] + ".json"), g)
        pool_rows.append((g["id"], 1, 0, 1))
        pool_rows.append((g["id"], 2, 0, 1))
    write_csv(os.path.join(ROOT, "pool", "observations.csv"), pool_rows)
    manifest(os.path.join(ROOT, "pool", "manifest.json"), "pool", 0.01,
             [g["id"] + ".json" for g in POOL], "observations.csv")

    # 400-observation dataset over ten pool games, 20 per (game, role),
    # weighted toward early actions
    gr_rows = []
    for gid in GR10:
        g = by_id[gid]
        for role in (1, 2):
            n_actions = len(g["actions"][role - 1])
            weights = [2.0 * (n_actions - a) for a in range(n_actions)]
            counts = weighted_counts(20, weights, rng)
            for a, c in enumerate(counts):
                if c:
                    gr_rows.append((gid, role, a, c))
    write_csv(os.path.join(ROOT, "gr10", "observations.csv"), gr_rows)
    manifest(os.path.join(ROOT, "gr10", "manifest.json"), "gr10", 0.01,
             ["../pool/" + gid + ".json" for gid in GR10], "observations.csv")

    write_csv(os.path.join(ROOT, "tiny", "observations.csv"),
              [("pd", 1, 0, 2), ("pd", 1, 1, 1), ("pd", 2, 0, 2)])
    manifest(os.path.join(ROOT, "tiny", "manifest.json"), "tiny", 0.01,
             ["../games/pd.json"], "observations.csv")

    write_csv(os.path.join(ROOT, "scaled", "observations.csv"),
              [("pd", 1, 1, 3), ("pd", 2, 1, 3)])
    manifest(os.path.join(ROOT, "scaled", "manifest.json"), "scaled", 0.02,
             ["../games/pd.json"], "observations.csv")

    recovery_rows = []
    for g in RECOVERY:
        write_json(os.path.join(ROOT, "recovery", g["id"] + ".json"), g)
        recovery_rows.append((g["id"], 1, 0, 1))
        recovery_rows.append((g["id"], 2, 0, 1))
    write_csv(os.path.join(ROOT, "recovery", "observations.csv"), recovery_rows)
    manifest(os.path.join(ROOT, "recovery", "manifest.json"), "recovery", 0.01,
             [g["id"] + ".json" for g in RECOVERY], "observations.csv")


if __name__ == "__main__":
    main()
