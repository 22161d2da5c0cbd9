"""Synthetic ground truth and observations: bounded coefficients, moving-support
schedules, and the missing-entry / sparse data-dependent corruption channels."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DimensionError, ParameterError, ScheduleError
from .linalg import check_basis, spectral_norm


@dataclass(frozen=True)
class SignalModel:
    """Low-rank signal generator: columns ell_t = P @ a_t.

    P is an n x r basis matrix, lam the non-increasing positive variance
    profile of the coefficients, eta the pathwise boundedness factor
    (a_j^2 <= eta * lam_j for every draw; 3 for the uniform law).
    """

    P: np.ndarray
    lam: np.ndarray
    eta: float = 3.0
    dist: str = "uniform"

    def __post_init__(self):
        P = check_basis(self.P, name="P")
        lam = np.asarray(self.lam, dtype=float)
        if lam.ndim != 1 or lam.size != P.shape[1]:
            raise DimensionError("lam must be a 1-D array matching the column count of P")
        if np.any(lam <= 0):
            raise ParameterError("lam entries must be strictly positive")
        if np.any(np.diff(lam) > 0):
            raise ParameterError("lam must be non-increasing")
        if self.eta <= 1.0:
            raise ParameterError(f"eta must exceed 1, got {self.eta}")
        if self.dist != "uniform":
            raise ParameterError(f"unsupported coefficient distribution {self.dist!r}")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def r(self) -> int:
        return self.P.shape[1]

    @property
    def f(self) -> float:
        return float(self.lam[0] / self.lam[-1])


def sample_coefficients(model: SignalModel, rng: np.random.Generator) -> np.ndarray:
    """One coefficient vector: entry j zero mean with variance lam_j.

    Uniform law on [-sqrt(3 lam_j), +sqrt(3 lam_j)], so the boundedness
    factor is exactly 3.
    """
    half_width = np.sqrt(3.0 * model.lam)
    return (2.0 * rng.random(model.r) - 1.0) * half_width


def _coefficient_matrix(model: SignalModel, alpha: int, rng: np.random.Generator) -> np.ndarray:
    # One batch draw, row-major fill; keeps the stream order reproducible.
    half_width = np.sqrt(3.0 * model.lam)
    return (2.0 * rng.random((model.r, alpha)) - 1.0) * half_width[:, None]


# ---------------------------------------------------------------------------
# Support schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SupportSchedule:
    """Sequence of corruption/missing index sets T_t with motion structure.

    Validated at construction:
      1. every distinct support persists at most beta_tilde consecutive
         frames (empty supports are exempt: they carry no corruption);
      2. supports rho changes apart are disjoint;
      3. either the departed-pixel sets of consecutive changes are pairwise
         disjoint (strict one-direction motion), or, failing that, no pixel
         is covered more than rho^2 * beta_tilde times over the schedule.
         The cover bound is what the block-sum norm bound actually needs,
         and it is the only form a wrapped motion can satisfy.

    `condition3_mode` records which of the two held: "strict" or "cover".
    """

    n: int
    supports: tuple[tuple[int, ...], ...]
    s: int
    rho: int
    beta_tilde: int
    condition3_mode: str = field(init=False, default="strict")

    def __post_init__(self):
        if self.n < 1 or self.s < 1 or self.rho < 1 or self.beta_tilde < 1:
            raise ParameterError("n, s, rho, beta_tilde must all be positive")
        if not self.supports:
            raise ScheduleError("schedule must contain at least one frame")
        norm_supports = []
        for t, T in enumerate(self.supports):
            T = tuple(sorted(int(i) for i in T))
            if len(set(T)) != len(T):
                raise ScheduleError(f"frame {t}: duplicate indices in support")
            if T and (T[0] < 0 or T[-1] >= self.n):
                raise ScheduleError(f"frame {t}: support index out of range [0, {self.n})")
            if len(T) > self.s:
                raise ScheduleError(f"frame {t}: support size {len(T)} exceeds s={self.s}")
            norm_supports.append(T)
        object.__setattr__(self, "supports", tuple(norm_supports))
        report = verify_schedule_conditions(self)
        if not report["condition1"]:
            raise ScheduleError(
                f"a support persists longer than beta_tilde={self.beta_tilde} consecutive frames"
            )
        if not report["condition2"]:
            raise ScheduleError(f"supports rho={self.rho} changes apart are not disjoint")
        if report["condition3"]:
            object.__setattr__(self, "condition3_mode", "strict")
        elif report["cover_bound"]:
            object.__setattr__(self, "condition3_mode", "cover")
        else:
            raise ScheduleError(
                "neither the one-direction motion condition nor the cover bound "
                f"(max cover {report['max_cover']} > rho^2*beta_tilde = {self.beta}) holds"
            )

    @property
    def alpha(self) -> int:
        return len(self.supports)

    @property
    def beta(self) -> int:
        return self.rho * self.rho * self.beta_tilde


def _runs(supports) -> list[tuple[tuple[int, ...], int]]:
    runs: list[tuple[tuple[int, ...], int]] = []
    for T in supports:
        if runs and runs[-1][0] == T:
            runs[-1] = (T, runs[-1][1] + 1)
        else:
            runs.append((T, 1))
    return runs


def verify_schedule_conditions(schedule: SupportSchedule) -> dict:
    """Independently re-check the structural conditions of a schedule."""
    runs = _runs(schedule.supports)
    cond1 = all(length <= schedule.beta_tilde for T, length in runs if T)
    cond2 = all(
        not (set(runs[k][0]) & set(runs[k + schedule.rho][0]))
        for k in range(len(runs) - schedule.rho)
    )
    cond3 = True
    departed: set[int] = set()
    for k in range(len(runs) - 1):
        gone = set(runs[k][0]) - set(runs[k + 1][0])
        if gone & departed:
            cond3 = False
            break
        departed |= gone
    counts = np.zeros(schedule.n, dtype=int)
    for T in schedule.supports:
        if T:
            counts[list(T)] += 1
    max_cover = int(counts.max()) if schedule.n else 0
    return {
        "condition1": cond1,
        "condition2": cond2,
        "condition3": cond3,
        "cover_bound": max_cover <= schedule.beta,
        "max_cover": max_cover,
    }


def generate_support_schedule(
    n: int,
    alpha: int,
    s: int,
    rho: int,
    beta_tilde: int,
    start: int = 0,
    wrap: bool = False,
) -> SupportSchedule:
    """Constant-velocity support: a contiguous block of size s starting at
    `start`, shifted right by ceil(s/rho) every beta_tilde frames.

    Without `wrap` the motion must fit inside [0, n); the minimal ambient
    dimension is start + s + ceil(s/rho)*ceil(alpha/beta_tilde).  With
    `wrap` the block moves modulo n, which is the only way long windows fit
    in small frames; construction then relies on the cover-bound form of
    the validation (see SupportSchedule).
    """
    if alpha < 1:
        raise ParameterError("alpha must be positive")
    if not 0 <= start < n:
        raise ParameterError(f"start={start} out of range [0, {n})")
    if s > n:
        raise ParameterError(f"s={s} exceeds n={n}")
    step = math.ceil(s / rho)
    if not wrap:
        required = start + s + step * math.ceil(alpha / beta_tilde)
        if required > n:
            raise CapacityError(
                f"support motion does not fit: minimal n is {required}, got {n} "
                "(pass wrap=True for cyclic motion)"
            )
    supports = []
    for t in range(alpha):
        p = start + step * (t // beta_tilde)
        if wrap:
            supports.append(tuple(sorted((p + j) % n for j in range(s))))
        else:
            supports.append(tuple(range(p, p + s)))
    return SupportSchedule(n=n, supports=tuple(supports), s=s, rho=rho, beta_tilde=beta_tilde)


def dump_schedule(path, schedule: SupportSchedule) -> None:
    """Write one line per frame: sorted 0-based indices, space-separated."""
    with open(path, "w") as fh:
        for T in schedule.supports:
            fh.write(" ".join(str(i) for i in T) + "\n")


def load_schedule(path, n: int, s: int, rho: int, beta_tilde: int) -> SupportSchedule:
    with open(path) as fh:
        supports = tuple(tuple(int(tok) for tok in line.split()) for line in fh)
    return SupportSchedule(n=n, supports=supports, s=s, rho=rho, beta_tilde=beta_tilde)


# ---------------------------------------------------------------------------
# Observation channels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MissingNoiseModel:
    """Missing-data channel: entries on T_t are zeroed."""

    schedule: SupportSchedule


@dataclass(frozen=True)
class SddcNoiseModel:
    """Sparse data-dependent corruptions: y = ell + I_T (M_st @ ell) with
    M_st entries iid N(0, q_gen^2)."""

    q_gen: float
    schedule: SupportSchedule

    def __post_init__(self):
        if self.q_gen < 0:
            raise ParameterError(f"q_gen must be non-negative, got {self.q_gen}")


def apply_missing(ell, T) -> np.ndarray:
    """Zero the entries of ell indexed by T."""
    ell = np.asarray(ell, dtype=float)
    y = ell.copy()
    idx = list(T)
    if idx and (min(idx) < 0 or max(idx) >= ell.shape[0]):
        raise DimensionError(f"support index out of range [0, {ell.shape[0]})")
    y[idx] = 0.0
    return y


def apply_sddc(ell, T, Mst) -> np.ndarray:
    """Add the corruption I_T (Mst @ ell); the change is supported within T."""
    ell = np.asarray(ell, dtype=float)
    idx = list(T)
    Mst = np.asarray(Mst, dtype=float)
    if Mst.ndim != 2 or Mst.shape != (len(idx), ell.shape[0]):
        raise DimensionError(
            f"Mst must be {len(idx)}x{ell.shape[0]}, got {Mst.shape}"
        )
    if idx and (min(idx) < 0 or max(idx) >= ell.shape[0]):
        raise DimensionError(f"support index out of range [0, {ell.shape[0]})")
    y = ell.copy()
    if idx:
        y[idx] += Mst @ ell
    return y


def generate_dataset(model: SignalModel, noise, alpha: int, rng: np.random.Generator):
    """Draw alpha columns of signal and observations under a noise channel.

    Returns (Y, L, schedule, q_measured) where q_measured is the largest
    observed operator norm of the per-frame correlation map restricted to
    the signal subspace (||I_T' P|| for missing, ||M_st P|| for the sparse
    channel).  Coefficients are drawn in one batch, then per-frame
    corruption matrices in frame order.
    """
    if alpha < 1:
        raise DimensionError("alpha must be positive")
    schedule = noise.schedule
    if schedule.n != model.n:
        raise DimensionError(f"schedule dimension {schedule.n} != model dimension {model.n}")
    if schedule.alpha < alpha:
        raise DimensionError(f"schedule has {schedule.alpha} frames, need {alpha}")

    A = _coefficient_matrix(model, alpha, rng)
    L = model.P @ A
    Y = L.copy()
    q_measured = 0.0

    if isinstance(noise, MissingNoiseModel):
        for t in range(alpha):
            T = list(schedule.supports[t])
            if not T:
                continue
            Y[T, t] = 0.0
            q_measured = max(q_measured, spectral_norm(model.P[T, :]))
    elif isinstance(noise, SddcNoiseModel):
        for t in range(alpha):
            T = list(schedule.supports[t])
            if not T:
                continue
            Mst = rng.normal(0.0, noise.q_gen, size=(len(T), model.n)) if noise.q_gen > 0 \
                else np.zeros((len(T), model.n))
            Y[T, t] += Mst @ L[:, t]
            q_measured = max(q_measured, spectral_norm(Mst @ model.P))
    else:
        raise ParameterError(f"unknown noise model {type(noise).__name__}")

    return Y, L, schedule, q_measured


def sparse_basis(n: int, r: int) -> np.ndarray:
    """First r columns of the identity."""
    if not 1 <= r <= n:
        raise DimensionError(f"r={r} out of range for n={n}")
    return np.eye(n)[:, :r].copy()


def random_basis(n: int, r: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random basis via QR of a Gaussian matrix, sign-normalized."""
    if not 1 <= r <= n:
        raise DimensionError(f"r={r} out of range for n={n}")
    Q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    idx = np.argmax(np.abs(Q), axis=0)
    signs = np.sign(Q[idx, np.arange(r)])
    signs[signs == 0.0] = 1.0
    return Q * signs
