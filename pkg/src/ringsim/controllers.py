"""Longitudinal controllers: IDM, FollowerStopper, PIwS, BCM, LACC.

The law functions are pure; per-vehicle memory (LACC's actuation lag, PIwS's
previous command) lives in the binding classes that the rollout engine
attaches to robot vehicles. All controller outputs are clamped to
``[-B_EMERGENCY, ACCEL_BOUND]``; the integrator applies the tighter
``[-3, 3]`` action bound on top.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

from ringsim.world import ACCEL_BOUND, B_EMERGENCY

TRACKING_GAIN = 2.0  # velocity-command-to-acceleration proportional gain, 1/s


def clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def clamp_accel(a: float) -> float:
    return clamp(a, -B_EMERGENCY, ACCEL_BOUND)


# ---------------------------------------------------------------------------
# IDM

@dataclass
class IdmParams:
    a_max: float = 1.0
    b_comf: float = 1.5
    T: float = 1.0
    delta: float = 4.0
    s0: float = 2.0
    v_des: float = 30.0


def idm_accel(v: float, gap: float, v_lead: float, p: IdmParams) -> float:
    """IDM acceleration; degenerate gaps trigger emergency braking."""
    if gap <= 0.0:
        return -B_EMERGENCY
    two_sqrt_ab = 2.0 * math.sqrt(p.a_max * p.b_comf)
    s_star = p.s0 + v * p.T + v * (v - v_lead) / two_sqrt_ab
    ratio = s_star / gap
    a = p.a_max * (1.0 - math.pow(v / p.v_des, p.delta) - ratio * ratio)
    return clamp_accel(a)


def idm_equilibrium_speed(gap: float, p: IdmParams, tol: float = 1e-12) -> float:
    """Speed at which IDM holds the given gap with zero relative velocity."""
    lo, hi = 0.0, p.v_des
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        a = p.a_max * (1.0 - (mid / p.v_des) ** p.delta - ((p.s0 + mid * p.T) / gap) ** 2)
        if a > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# FollowerStopper

@dataclass
class FsParams:
    U: Optional[float] = None  # command velocity ceiling; None = mean speed at activation
    dx0: tuple = (4.5, 5.25, 6.0)
    d: tuple = (1.5, 1.0, 0.5)


def fs_thresholds(p: FsParams, dv_minus: float) -> tuple:
    """Gap thresholds, widened quadratically while closing in."""
    q = dv_minus * dv_minus
    return (
        p.dx0[0] + q / (2.0 * p.d[0]),
        p.dx0[1] + q / (2.0 * p.d[1]),
        p.dx0[2] + q / (2.0 * p.d[2]),
    )


def fs_command_velocity(dx: float, v_lead: float, p: FsParams,
                        dv_minus: float = 0.0) -> float:
    """Piecewise command velocity: stop, two linear ramps, then cruise at U."""
    U = p.U if p.U is not None else 0.0
    v = clamp(v_lead, 0.0, U)
    dx1, dx2, dx3 = fs_thresholds(p, dv_minus)
    if dx <= dx1:
        return 0.0
    if dx <= dx2:
        return v * (dx - dx1) / (dx2 - dx1)
    if dx <= dx3:
        return v + (U - v) * (dx - dx2) / (dx3 - dx2)
    return U


# ---------------------------------------------------------------------------
# PIwS

@dataclass
class PiwsParams:
    v_catch: float = 1.0
    g_l: float = 7.0
    g_u: float = 30.0
    beta: float = 0.9
    history_window: int = 380  # steps of network mean velocity used for U


def piws_target(dx: float, U: float, p: PiwsParams) -> float:
    frac = clamp((dx - p.g_l) / (p.g_u - p.g_l), 0.0, 1.0)
    return U + p.v_catch * frac


def piws_update(dx: float, v_lead: float, U_hist: float, prev_cmd: float,
                alpha: float, beta: float, p: PiwsParams) -> float:
    """Blend target, leader and previous command velocities."""
    v_target = piws_target(dx, U_hist, p)
    return beta * (alpha * v_target + (1.0 - alpha) * v_lead) + (1.0 - beta) * prev_cmd


# ---------------------------------------------------------------------------
# BCM

@dataclass
class BcmParams:
    k_d: float = 1.0
    k_v: float = 1.0
    k_c: float = 1.0
    v_des: Optional[float] = None  # None = mean speed at activation


def bcm_accel(delta_d: float, dv_l: float, dv_f: float, v: float,
              p: BcmParams) -> float:
    """Bilateral law over leader and follower kinematics; linear pre-clamp."""
    v_des = p.v_des if p.v_des is not None else 0.0
    a = p.k_d * delta_d + p.k_v * (dv_l - dv_f) + p.k_c * (v_des - v)
    return clamp_accel(a)


# ---------------------------------------------------------------------------
# LACC

@dataclass
class LaccParams:
    k1: float = 0.3
    k2: float = 0.4
    h: float = 1.0  # desired time gap, s
    tau: float = 0.1  # actuation lag, s


def lacc_command(s: float, v: float, dv_l: float, p: LaccParams) -> float:
    """Constant-time-headway command from gap error and relative velocity."""
    e_x = s - p.h * v
    return p.k1 * e_x + p.k2 * dv_l


def lacc_accel(prev_a: float, prev_cmd_a: float, dt: float, p: LaccParams) -> float:
    """First-order actuation lag; dt == tau passes the command through."""
    w = dt / p.tau
    return (1.0 - w) * prev_a + w * prev_cmd_a


# ---------------------------------------------------------------------------
# Velocity tracking

def velocity_tracking_accel(v: float, v_cmd: float, gain: float = TRACKING_GAIN) -> float:
    """Proportional law turning a commanded velocity into an acceleration."""
    return clamp(gain * (v_cmd - v), -ACCEL_BOUND, ACCEL_BOUND)


# ---------------------------------------------------------------------------
# Bindings: per-vehicle controller state used by the rollout engine.
# Each binding exposes activate(world, i) once and accel(world, i, gaps,
# mean_vel_history) every step after activation.

class IdmBinding:
    name = "idm"

    def __init__(self, params: Optional[IdmParams] = None):
        self.p = params or IdmParams()

    def activate(self, world, i):
        pass

    def accel(self, world, i, gaps, mean_vel_history):
        lead = world.leader(i)
        return idm_accel(world.vel[i], gaps[i], world.vel[lead], self.p)


class FsBinding:
    name = "fs"

    def __init__(self, params: Optional[FsParams] = None, gain: float = TRACKING_GAIN):
        self.p = params or FsParams()
        self.gain = gain

    def activate(self, world, i):
        if self.p.U is None:
            self.p = FsParams(U=world.mean_velocity(), dx0=self.p.dx0, d=self.p.d)

    def accel(self, world, i, gaps, mean_vel_history):
        lead = world.leader(i)
        dv_minus = min(world.vel[lead] - world.vel[i], 0.0)
        v_cmd = fs_command_velocity(gaps[i], world.vel[lead], self.p, dv_minus)
        return velocity_tracking_accel(world.vel[i], v_cmd, self.gain)


class PiwsBinding:
    name = "piws"

    def __init__(self, params: Optional[PiwsParams] = None, gain: float = TRACKING_GAIN):
        self.p = params or PiwsParams()
        self.gain = gain
        self.prev_cmd = 0.0

    def activate(self, world, i):
        self.prev_cmd = float(world.vel[i])

    def accel(self, world, i, gaps, mean_vel_history):
        lead = world.leader(i)
        window = mean_vel_history[-self.p.history_window:]
        U = sum(window) / len(window) if window else float(world.vel[i])
        dx = gaps[i]
        alpha = clamp((dx - self.p.g_l) / (self.p.g_u - self.p.g_l), 0.0, 1.0)
        v_cmd = piws_update(dx, float(world.vel[lead]), U, self.prev_cmd,
                            alpha, self.p.beta, self.p)
        self.prev_cmd = v_cmd
        return velocity_tracking_accel(world.vel[i], v_cmd, self.gain)


class BcmBinding:
    name = "bcm"

    def __init__(self, params: Optional[BcmParams] = None):
        self.p = params or BcmParams()

    def activate(self, world, i):
        if self.p.v_des is None:
            self.p = BcmParams(k_d=self.p.k_d, k_v=self.p.k_v, k_c=self.p.k_c,
                               v_des=world.mean_velocity())

    def accel(self, world, i, gaps, mean_vel_history):
        n = world.n_vehicles
        lead = world.leader(i)
        follower = (i - 1) % n
        delta_d = gaps[i] - gaps[follower]
        dv_l = world.vel[lead] - world.vel[i]
        dv_f = world.vel[i] - world.vel[follower]
        return bcm_accel(delta_d, dv_l, dv_f, world.vel[i], self.p)


class LaccBinding:
    name = "lacc"

    def __init__(self, params: Optional[LaccParams] = None):
        self.p = params or LaccParams()
        self.prev_a = 0.0
        self.prev_cmd = 0.0

    def activate(self, world, i):
        self.prev_a = 0.0
        lead = world.leader(i)
        gaps = world.headways()
        self.prev_cmd = lacc_command(float(gaps[i]), float(world.vel[i]),
                                     float(world.vel[lead] - world.vel[i]), self.p)

    def accel(self, world, i, gaps, mean_vel_history):
        a = lacc_accel(self.prev_a, self.prev_cmd, world.dt, self.p)
        a = clamp_accel(a)
        lead = world.leader(i)
        self.prev_cmd = lacc_command(float(gaps[i]), float(world.vel[i]),
                                     float(world.vel[lead] - world.vel[i]), self.p)
        self.prev_a = a
        return a


CONTROLLER_BINDINGS = {
    "idm": IdmBinding,
    "fs": FsBinding,
    "piws": PiwsBinding,
    "bcm": BcmBinding,
    "lacc": LaccBinding,
}
