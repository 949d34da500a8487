"""Jitted hot loops for the step engine and batched observation extraction.

Everything here is deliberately branch-light and allocation-free; callers
own all output buffers.  Occupancy sentinels match core: -1 empty, -2 wall.
"""

import numba
import numpy as np

EMPTY = -1
WALL = -2


@numba.njit(cache=True, inline="always")
def _rot_x(dx, dy, d):
    # clockwise quarter turns in screen coords (x right, y down)
    if d == 0:
        return dx
    if d == 1:
        return -dy
    if d == 2:
        return -dx
    return dy


@numba.njit(cache=True, inline="always")
def _rot_y(dx, dy, d):
    if d == 0:
        return dy
    if d == 1:
        return dx
    if d == 2:
        return -dy
    return -dx


@numba.njit(cache=True)
def attack_phase(
    attacker_ids, adx, ady, a_x, a_y, a_dir, damage,
    occupancy, pending_damage, hit_count, out_actors, out_targets,
):
    """Resolve all attacks from pre-step positions; returns event count."""
    height, width = occupancy.shape
    n_ev = 0
    for k in range(attacker_ids.shape[0]):
        aid = attacker_ids[k]
        d = a_dir[aid]
        tx = a_x[aid] + _rot_x(adx[k], ady[k], d)
        ty = a_y[aid] + _rot_y(adx[k], ady[k], d)
        if tx < 0 or ty < 0 or tx >= width or ty >= height:
            continue
        occ = occupancy[ty, tx]
        if occ >= 0 and occ != aid:
            pending_damage[occ] += damage[k]
            hit_count[occ] += 1
            out_actors[n_ev] = aid
            out_targets[n_ev] = occ
            n_ev += 1
    return n_ev


@numba.njit(cache=True)
def move_phase(
    order_ids, mdx, mdy, bw, bh, a_x, a_y, a_dir,
    occupancy, out_actors, out_blockers,
):
    """Resolve moves sequentially in the given (pre-permuted) order.

    Writes positions and occupancy in place; returns collide event count.
    Blocker sentinel: WALL (-2) for wall or out-of-bounds cells.
    """
    height, width = occupancy.shape
    n_ev = 0
    for k in range(order_ids.shape[0]):
        aid = order_ids[k]
        d = a_dir[aid]
        rdx = _rot_x(mdx[k], mdy[k], d)
        rdy = _rot_y(mdx[k], mdy[k], d)
        nx = a_x[aid] + rdx
        ny = a_y[aid] + rdy
        w = bw[k]
        h = bh[k]
        blocker = np.int64(1)  # sentinel: no blocker found yet
        ok = True
        for by in range(h):
            for bx in range(w):
                cx = nx + bx
                cy = ny + by
                if cx < 0 or cy < 0 or cx >= width or cy >= height:
                    blocker = WALL
                    ok = False
                    break
                occ = occupancy[cy, cx]
                if occ == WALL:
                    blocker = WALL
                    ok = False
                    break
                if occ >= 0 and occ != aid:
                    blocker = occ
                    ok = False
                    break
            if not ok:
                break
        if ok:
            ox = a_x[aid]
            oy = a_y[aid]
            for by in range(h):
                for bx in range(w):
                    occupancy[oy + by, ox + bx] = EMPTY
            for by in range(h):
                for bx in range(w):
                    occupancy[ny + by, nx + bx] = aid
            a_x[aid] = nx
            a_y[aid] = ny
        else:
            out_actors[n_ev] = aid
            out_blockers[n_ev] = blocker
            n_ev += 1
    return n_ev


@numba.njit(cache=True)
def extract_views(
    ids, a_x, a_y, a_dir, a_group, hp_frac, occupancy, view_range, views,
):
    """Fill views[N, C, H, W]: channel 0 walls/out-of-bounds, then
    (presence, hp) per group.  The window is rotated so facing points up."""
    height, width = occupancy.shape
    size = 2 * view_range + 1
    for i in range(ids.shape[0]):
        aid = ids[i]
        x = a_x[aid]
        y = a_y[aid]
        d = a_dir[aid]
        for vy in range(size):
            dy = vy - view_range
            for vx in range(size):
                dx = vx - view_range
                cx = x + _rot_x(dx, dy, d)
                cy = y + _rot_y(dx, dy, d)
                if cx < 0 or cy < 0 or cx >= width or cy >= height:
                    views[i, 0, vy, vx] = 1.0
                    continue
                occ = occupancy[cy, cx]
                if occ == WALL:
                    views[i, 0, vy, vx] = 1.0
                elif occ >= 0:
                    g = a_group[occ]
                    views[i, 1 + 2 * g, vy, vx] = 1.0
                    views[i, 2 + 2 * g, vy, vx] = hp_frac[occ]
