#!/usr/bin/env python3
"""Generates the bundled 89-cell trail (muir89.trail).

Cells 1-64 follow a turtle walk of straight runs, right-angle turns with
adjacent cells, and straight gaps of one or two cells. Cells 65-89 are placed
explicitly: a diagonal jump after #64, a short run, a second diagonal jump
after #67, then scattered short runs with corner gaps.

Run from this directory:  python3 make_trail.py > muir89.trail
"""

W, H = 32, 32
HEADINGS = "NESW"
DELTA = {"N": (0, -1), "E": (1, 0), "S": (0, 1), "W": (-1, 0)}

# (command, argument): run n = n trail cells straight ahead; gap n = n empty
# cells straight ahead; R / L = turn in place.
EASY_PART = [
    ("run", 3),
    ("R", 0), ("run", 5), ("gap", 1), ("run", 3),
    ("L", 0), ("run", 5), ("gap", 1), ("run", 3),
    ("gap", 1), ("R", 0), ("run", 4), ("gap", 2), ("run", 3),
    ("L", 0), ("run", 3), ("gap", 1), ("run", 3),
    ("gap", 1), ("L", 0), ("run", 4), ("gap", 1), ("run", 2),
    ("R", 0), ("run", 3), ("gap", 2), ("run", 3),
    ("gap", 1), ("R", 0), ("run", 4), ("gap", 1), ("run", 3),
    ("gap", 1), ("R", 0), ("run", 4), ("gap", 1), ("run", 3),
    ("L", 0), ("run", 3), ("gap", 1), ("run", 3),
]

# Absolute coordinates of cells 65-89. None of them lies in columns 21-23,
# the strip a straight scanner sweeps after losing the trail at #64.
HARD_PART = [
    # #64 ends at (22, 27) facing South; #65 is four ahead and three to the left
    (25, 31), (26, 31), (27, 31),
    # second hard gap, #67 -> #68: two ahead and three to the right
    (29, 2), (29, 3), (29, 4),
    (27, 6), (26, 6), (25, 6),
    (24, 4), (24, 3), (24, 2),
    (26, 0), (27, 0),
    (29, 29), (30, 29), (31, 29),
    (31, 27), (31, 26), (31, 25),
    (29, 23), (28, 23),
    (26, 25), (25, 25), (24, 25),
]


def build():
    x, y, h = 0, 0, "E"
    cells = []
    for cmd, n in EASY_PART:
        if cmd == "R":
            h = HEADINGS[(HEADINGS.index(h) + 1) % 4]
        elif cmd == "L":
            h = HEADINGS[(HEADINGS.index(h) + 3) % 4]
        else:
            dx, dy = DELTA[h]
            for _ in range(n):
                x, y = (x + dx) % W, (y + dy) % H
                if cmd == "run":
                    cells.append((x, y))
    assert len(cells) == 64, len(cells)
    cells.extend(HARD_PART)
    assert len(cells) == 89, len(cells)
    assert len(set(cells)) == 89, "duplicate cell"
    assert (0, 0) not in cells
    return cells


def main():
    cells = build()
    print("# Bundled 89-cell trail on a 32x32 torus, generated by make_trail.py.")
    print("# Header: width height start_x start_y heading; then one cell per line in trail order.")
    print("32 32 0 0 E")
    for i, (x, y) in enumerate(cells, 1):
        if i == 65:
            print("# cells 65-89: scattered part, first hard gap before #65")
        elif i == 68:
            print("# second hard gap before #68")
        print(f"{x} {y}")


def show():
    cells = build()
    grid = [["." for _ in range(W)] for _ in range(H)]
    for i, (x, y) in enumerate(cells, 1):
        grid[y][x] = "#" if i <= 64 else "o"
    grid[0][0] = "S"
    for row in grid:
        print("".join(row))


if __name__ == "__main__":
    import sys
    show() if "--show" in sys.argv else main()
