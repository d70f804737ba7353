"""Ring-road world state and stepping.

Vehicle index order equals spatial order: vehicle ``i`` follows vehicle
``(i + 1) % n`` and single-lane dynamics never reorder them. Positions live
in ``[0, ring_length)``, headways are bumper-to-bumper.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ringsim import kernel

VEHICLE_LENGTH = 5.0
ACCEL_BOUND = 3.0
B_EMERGENCY = 5.0


@dataclass
class RolloutConfig:
    """Scenario geometry, horizon and seeding for one rollout."""

    n_vehicles: int = 22
    density: float = 85.0  # veh/km
    dt: float = 0.1
    speed_limit: float = 30.0
    vehicle_length: float = VEHICLE_LENGTH
    horizon_steps: int = 4500
    warmup_steps: int = 2500
    seed: int = 0
    rv_penetration: float = 0.0
    displacement: float = 1.0  # initial forward offset of vehicle 0, seeds instability
    perturbation_window: Optional[tuple[int, int]] = None  # (start, end) steps

    @property
    def ring_length(self) -> float:
        return self.n_vehicles / self.density * 1000.0

    def resolved_window(self) -> tuple[int, int]:
        if self.perturbation_window is not None:
            return self.perturbation_window
        return (self.warmup_steps, self.horizon_steps)

    def validate(self):
        if self.n_vehicles < 2:
            raise ValueError("need at least 2 vehicles on the ring")
        if self.density <= 0:
            raise ValueError("density must be positive")
        if self.ring_length <= self.n_vehicles * self.vehicle_length:
            raise ValueError(
                f"ring of {self.ring_length:.1f} m cannot hold "
                f"{self.n_vehicles} vehicles of {self.vehicle_length} m"
            )
        if not self.warmup_steps < self.horizon_steps:
            raise ValueError("warmup_steps must be smaller than horizon_steps")
        s, e = self.resolved_window()
        if not (0 <= s <= e <= self.horizon_steps):
            raise ValueError(f"perturbation window ({s}, {e}) outside horizon")


@dataclass
class VehicleState:
    """Snapshot view of one vehicle (the world itself stores arrays)."""

    id: int
    position: float
    velocity: float
    acceleration: float
    length: float
    controller: str
    active_perturbation: Optional[object] = None


@dataclass
class World:
    """Ring geometry plus the ordered vehicle arrays; stepped in place."""

    ring_length: float
    dt: float
    speed_limit: float
    pos: np.ndarray
    vel: np.ndarray
    acc: np.ndarray
    lengths: np.ndarray
    controllers: list
    step_count: int = 0
    collision_flag: bool = False
    collision_count: int = 0
    # scratch buffers for the kernel
    _gaps: np.ndarray = field(default=None, repr=False)
    _disp: np.ndarray = field(default=None, repr=False)
    _collided: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        n = self.n_vehicles
        self._gaps = np.zeros(n)
        self._disp = np.zeros(n)
        self._collided = np.zeros(n, dtype=np.uint8)

    @property
    def n_vehicles(self) -> int:
        return self.pos.shape[0]

    def vehicle(self, i: int) -> VehicleState:
        return VehicleState(
            id=i,
            position=float(self.pos[i]),
            velocity=float(self.vel[i]),
            acceleration=float(self.acc[i]),
            length=float(self.lengths[i]),
            controller=self.controllers[i],
        )

    def headways(self) -> np.ndarray:
        """Bumper gaps to each vehicle's leader; flags overlaps."""
        collisions = kernel.headways(self.pos, self.lengths, self.ring_length, self._gaps)
        if collisions:
            self.collision_flag = True
        return self._gaps

    def headway(self, i: int) -> float:
        return float(self.headways()[i])

    def leader(self, i: int) -> int:
        return (i + 1) % self.n_vehicles

    def mean_velocity(self) -> float:
        return float(np.mean(self.vel))

    def step(self, accel_commands: np.ndarray) -> "World":
        """Advance one tick: clamp commands to +/-3, integrate, resolve contacts."""
        cmd = np.asarray(accel_commands, dtype=np.float64)
        if cmd.shape != (self.n_vehicles,):
            raise ValueError(f"expected {self.n_vehicles} commands, got shape {cmd.shape}")
        gaps = self.headways().copy()
        collisions = kernel.euler_step(
            self.pos, self.vel, cmd, self.lengths, gaps, self.ring_length,
            self.dt, self.speed_limit, ACCEL_BOUND, self.acc, self._disp,
            self._collided,
        )
        if collisions:
            self.collision_flag = True
            self.collision_count += collisions
        self.step_count += 1
        return self


def init_ring(config: RolloutConfig, displacement: Optional[float] = None) -> World:
    """Equally spaced standing vehicles; vehicle 0 nudged forward to seed waves.

    RVs (``round(n * penetration)`` of them, when penetration > 0) occupy the
    contiguous index block ``0 .. n_rv-1``; the block's front vehicle is the
    platoon leader.
    """
    config.validate()
    n = config.n_vehicles
    ring_length = config.ring_length
    if displacement is None:
        displacement = config.displacement
    spacing = ring_length / n
    if displacement >= spacing - config.vehicle_length:
        raise ValueError("displacement would place vehicle 0 onto its leader")

    pos = np.arange(n, dtype=np.float64) * spacing
    pos[0] += displacement
    pos %= ring_length

    n_rv = rv_count(n, config.rv_penetration)
    controllers = ["rv" if i < n_rv else "idm" for i in range(n)]

    return World(
        ring_length=ring_length,
        dt=config.dt,
        speed_limit=config.speed_limit,
        pos=pos,
        vel=np.zeros(n),
        acc=np.zeros(n),
        lengths=np.full(n, config.vehicle_length),
        controllers=controllers,
    )


def rv_count(n_vehicles: int, penetration: float) -> int:
    """Number of robot vehicles: round-half-up of n * penetration."""
    if penetration <= 0:
        return 0
    return int(np.floor(n_vehicles * penetration + 0.5))
