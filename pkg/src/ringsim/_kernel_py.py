"""Pure-Python ring-stepping kernel.

Fallback used when the compiled extension is unavailable (or forced via
RINGSIM_KERNEL=py). Mirrors ``_kernel.pyx`` line-for-line, including the
order of floating-point operations, so both backends produce bit-identical
trajectories.
"""

import math


def _posmod(x, ring_length):
    r = math.fmod(x, ring_length)
    if r < 0.0:
        r += ring_length
    return r


def headways(pos, length, ring_length, out):
    """Bumper gap to the ring leader for every vehicle.

    Negative gaps (overlap) are floored to 0; returns how many were floored.
    """
    n = pos.shape[0]
    collisions = 0
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        gap = _posmod(pos[j] - pos[i], ring_length) - length[j]
        if gap < 0.0:
            gap = 0.0
            collisions += 1
        out[i] = gap
    return collisions


def idm_accel_ring(vel, gaps, a_max, b_comf, T, delta, s0, v_des,
                   b_emergency, a_bound, out):
    """IDM acceleration for every vehicle given current velocities and gaps."""
    n = vel.shape[0]
    two_sqrt_ab = 2.0 * math.sqrt(a_max * b_comf)
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        v = vel[i]
        gap = gaps[i]
        if gap <= 0.0:
            a = -b_emergency
        else:
            s_star = s0 + v * T + v * (v - vel[j]) / two_sqrt_ab
            ratio = s_star / gap
            a = a_max * (1.0 - math.pow(v / v_des, delta) - ratio * ratio)
            if a > a_bound:
                a = a_bound
            elif a < -b_emergency:
                a = -b_emergency
        out[i] = a
    return None


def euler_step(pos, vel, cmd, length, gaps, ring_length, dt, speed_limit,
               a_bound, acc_out, disp, collided):
    """One explicit-Euler step: clamp commands, integrate, resolve contacts.

    ``gaps`` holds the pre-step headways; vehicles whose gap would go
    negative are clipped to contact (velocity capped at the leader's) and
    counted. Returns the number of vehicles that collided this step.
    """
    n = pos.shape[0]
    collisions = 0

    for i in range(n):
        a = cmd[i]
        if a > a_bound:
            a = a_bound
        elif a < -a_bound:
            a = -a_bound
        v = vel[i] + a * dt
        if v < 0.0:
            v = 0.0
        elif v > speed_limit:
            v = speed_limit
        vel[i] = v
        acc_out[i] = a
        disp[i] = v * dt
        collided[i] = 0

    changed = True
    npass = 0
    while changed and npass <= n:
        changed = False
        npass += 1
        for i in range(n):
            j = i + 1
            if j == n:
                j = 0
            new_gap = gaps[i] + disp[j] - disp[i]
            if new_gap < 0.0:
                disp[i] = gaps[i] + disp[j]
                if vel[j] < vel[i]:
                    vel[i] = vel[j]
                collided[i] = 1
                changed = True

    for i in range(n):
        pos[i] = _posmod(pos[i] + disp[i], ring_length)
        if collided[i]:
            collisions += 1
    return collisions


def run_idm_rollout(pos, vel, length, ring_length, dt, speed_limit, a_max,
                    b_comf, T, delta, s0, v_des, b_emergency, a_bound,
                    n_steps, pos_log, vel_log, acc_log, gap_log, gaps, accs,
                    disp, collided):
    """Fused all-IDM stepping with per-step logging (the hot loop).

    Row ``s`` of each log records the pre-step state plus the applied
    acceleration of step ``s``. Returns the total collision count.
    """
    n = pos.shape[0]
    collisions = 0
    for s in range(n_steps):
        collisions += headways(pos, length, ring_length, gaps)
        for i in range(n):
            pos_log[s, i] = pos[i]
            vel_log[s, i] = vel[i]
            gap_log[s, i] = gaps[i]
        idm_accel_ring(vel, gaps, a_max, b_comf, T, delta, s0, v_des,
                       b_emergency, a_bound, accs)
        collisions += euler_step(pos, vel, accs, length, gaps, ring_length,
                                 dt, speed_limit, a_bound, accs, disp,
                                 collided)
        for i in range(n):
            acc_log[s, i] = accs[i]
    return collisions
