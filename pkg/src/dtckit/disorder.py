"""Random spin ensembles: positions, dipolar couplings and on-site fields.

All frequencies are angular, in rad/us; lengths are in nm, so a coupling
scale ``J0`` carries rad/us * nm^3.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Poisson mean nearest-neighbour distance is 0.55396 * density^(-1/3).
POISSON_NN_FACTOR = 0.55396
MAX_PLACEMENT_ATTEMPTS = 100_000

# stream identifiers under one seed
_POSITIONS, _ONSITE, _Z3, _SIGNS = range(4)


class CapacityError(RuntimeError):
    """The hard-core constraint cannot be met at the requested density."""


def _rng(seed, stream):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def j0_for_coupling(j_at_r0, r0):
    """Coupling scale J0 giving ``j_at_r0`` (rad/us) at distance ``r0`` (nm)."""
    return j_at_r0 * r0**3


@dataclass(frozen=True)
class EnsembleParams:
    n_spins: int
    r0: float = 8.0
    r_min: float = 3.0
    J0: float = 2 * np.pi * 0.105 * 8.0**3
    W: float = 2 * np.pi * 4.0
    seed: int = 0
    angular: str = "dipolar"
    axis: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError("n_spins must be >= 1")
        if not 0 < self.r_min < self.r0:
            raise ValueError("need 0 < r_min < r0")
        if self.W < 0:
            raise ValueError("W must be non-negative")
        if self.angular not in ("dipolar", "isotropic"):
            raise ValueError(f"unknown angular mode {self.angular!r}")
        if not np.isfinite(self.J0):
            raise ValueError("J0 must be finite")

    @property
    def box_side(self):
        return self.n_spins ** (1 / 3) * self.r0 / POISSON_NN_FACTOR


@dataclass(frozen=True)
class DisorderRealization:
    """One random draw of the ensemble.

    ``couplings[i, j]`` is J_ij / r_ij^3 in rad/us; ``jbar`` its row sums.
    ``z3_fields`` holds the spin-1 shifts (Delta_i^+, Delta_i^-).
    """

    positions: np.ndarray
    couplings: np.ndarray
    onsite_fields: np.ndarray
    jbar: np.ndarray
    z3_fields: np.ndarray
    params: EnsembleParams | None = field(default=None, compare=False)

    @property
    def n_spins(self):
        return len(self.onsite_fields)

    @classmethod
    def from_couplings(cls, couplings, onsite_fields=None, z3_fields=None, positions=None):
        """Build a realization from an explicit coupling matrix (tests, ablations)."""
        couplings = np.array(couplings, dtype=float)
        n = couplings.shape[0]
        if couplings.shape != (n, n) or not np.allclose(couplings, couplings.T, rtol=0, atol=0):
            raise ValueError("couplings must be a symmetric square matrix")
        if np.any(np.diag(couplings) != 0):
            raise ValueError("couplings must have zero diagonal")
        onsite = np.zeros(n) if onsite_fields is None else np.asarray(onsite_fields, float)
        z3 = np.zeros((n, 2)) if z3_fields is None else np.asarray(z3_fields, float)
        if positions is None:
            positions = np.full((n, 3), np.nan)
        return cls(np.asarray(positions, float), couplings, onsite, couplings.sum(axis=1), z3)

    @classmethod
    def noninteracting(cls, n, onsite_fields=None, z3_fields=None):
        return cls.from_couplings(np.zeros((n, n)), onsite_fields, z3_fields)

    def with_fields(self, onsite_fields=None, z3_fields=None):
        """Copy with replaced on-site fields."""
        return DisorderRealization(
            self.positions,
            self.couplings,
            self.onsite_fields if onsite_fields is None else np.asarray(onsite_fields, float),
            self.jbar,
            self.z3_fields if z3_fields is None else np.asarray(z3_fields, float),
            self.params,
        )

    def scaled(self, factor):
        """Copy with every coupling multiplied by ``factor``."""
        c = self.couplings * factor
        return DisorderRealization(self.positions, c, self.onsite_fields,
                                   c.sum(axis=1), self.z3_fields, self.params)


def sample_positions(params: EnsembleParams):
    """Uniform points in an open cube with a hard-core cutoff ``r_min``.

    Points are placed one at a time; a candidate closer than ``r_min`` to an
    already placed point is redrawn.
    """
    rng = _rng(params.seed, _POSITIONS)
    side = params.box_side
    n = params.n_spins
    pts = np.empty((n, 3))
    r2min = params.r_min**2
    for k in range(n):
        for _ in range(MAX_PLACEMENT_ATTEMPTS):
            p = rng.uniform(0.0, side, size=3)
            if k == 0 or np.min(np.sum((pts[:k] - p) ** 2, axis=1)) >= r2min:
                pts[k] = p
                break
        else:
            raise CapacityError(
                f"could not place spin {k} after {MAX_PLACEMENT_ATTEMPTS} attempts "
                f"(r_min={params.r_min} nm too large for r0={params.r0} nm)"
            )
    return pts


def angular_factor(sep, axis):
    """1 - 3 cos^2 of the angle between separation vectors and ``axis``."""
    axis = np.asarray(axis, float)
    axis = axis / np.linalg.norm(axis)
    r = np.linalg.norm(sep, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos = (sep @ axis) / r
    return 1.0 - 3.0 * cos**2


def dipolar_coupling(pos_i, pos_j, J0, quantization_axis=(0.0, 0.0, 1.0)):
    """J0 (1 - 3 cos^2 theta_ij) / r_ij^3 for a single pair."""
    sep = np.asarray(pos_j, float) - np.asarray(pos_i, float)
    r = np.linalg.norm(sep)
    if r == 0.0:
        raise ValueError("coincident positions have no defined coupling")
    return float(J0 * angular_factor(sep, quantization_axis) / r**3)


def coupling_matrix(positions, J0, axis=(0.0, 0.0, 1.0), angular="dipolar", sign_seed=None):
    positions = np.asarray(positions, float)
    n = len(positions)
    sep = positions[None, :, :] - positions[:, None, :]
    r = np.linalg.norm(sep, axis=-1)
    np.fill_diagonal(r, 1.0)
    if angular == "dipolar":
        fac = angular_factor(sep, axis)
    elif angular == "isotropic":
        signs = _rng(sign_seed, _SIGNS).choice([-1.0, 1.0], size=(n, n))
        upper = np.triu(signs, 1)
        fac = upper + upper.T
    else:
        raise ValueError(f"unknown angular mode {angular!r}")
    C = J0 * fac / r**3
    np.fill_diagonal(C, 0.0)
    # exact symmetry, independent of rounding in the i/j orientation
    iu = np.triu_indices(n, 1)
    C.T[iu] = C[iu]
    return C


def sample_onsite_fields(n, W, seed):
    """n i.i.d. normal(0, W^2) fields in rad/us."""
    if W < 0:
        raise ValueError("W must be non-negative")
    return _rng(seed, _ONSITE).normal(0.0, 1.0, size=n) * W


def sample_z3_fields(n, W, seed):
    """Independent (Delta^+, Delta^-) pairs, each normal(0, W^2)."""
    return _rng(seed, _Z3).normal(0.0, 1.0, size=(n, 2)) * W


def make_realization(params: EnsembleParams) -> DisorderRealization:
    pos = sample_positions(params)
    C = coupling_matrix(pos, params.J0, params.axis, params.angular, sign_seed=params.seed)
    return DisorderRealization(
        positions=pos,
        couplings=C,
        onsite_fields=sample_onsite_fields(params.n_spins, params.W, params.seed),
        jbar=C.sum(axis=1),
        z3_fields=sample_z3_fields(params.n_spins, params.W, params.seed),
        params=params,
    )


def nearest_neighbor_distances(positions):
    positions = np.asarray(positions, float)
    d = np.linalg.norm(positions[None] - positions[:, None], axis=-1)
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def mean_coupling_at_r0(realization: DisorderRealization, r0):
    """Realized mean |J_ij| / r0^3 over all pairs, for calibrating J0."""
    pos = realization.positions
    n = len(pos)
    if n < 2:
        return 0.0
    iu = np.triu_indices(n, 1)
    r = np.linalg.norm(pos[:, None] - pos[None], axis=-1)[iu]
    J = realization.couplings[iu] * r**3
    return float(np.mean(np.abs(J)) / r0**3)


@dataclass(frozen=True)
class JbarDistribution:
    values: np.ndarray
    quantiles: dict

    @property
    def median_abs(self):
        return float(np.median(np.abs(self.values)))


def jbar_distribution(realizations, probs=(0.05, 0.25, 0.5, 0.75, 0.95)):
    """Pool per-spin total couplings over realizations."""
    if len(realizations) == 0:
        raise ValueError("need at least one realization")
    vals = np.concatenate([np.asarray(r.jbar, float) for r in realizations])
    q = {p: float(np.quantile(vals, p)) for p in probs}
    return JbarDistribution(vals, q)
