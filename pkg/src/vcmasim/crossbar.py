"""Crossbar arrays: V/2 write classification, disturb and energy, sneak currents."""
import csv
from dataclasses import dataclass, field
import enum
import json

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .device import DeviceParams, resistance
from .waveform import Waveform


class SolverError(RuntimeError):
    """The nodal system is singular or failed its residual check."""

    def __init__(self, message, component=()):
        super().__init__(message)
        self.component = tuple(component)


class CellClass(enum.IntEnum):
    SELECTED = 0
    HALF_SELECTED = 1
    UNSELECTED = 2


#: fraction of the set voltage across a cell of each class
CLASS_VOLTAGE_FRACTION = {CellClass.SELECTED: 1.0, CellClass.HALF_SELECTED: 0.5,
                          CellClass.UNSELECTED: 0.0}


def _states_to_m(states, params):
    """Map 'P'/'AP' labels, booleans (True = AP) or (R, C, 3) vectors to unit vectors."""
    arr = np.asarray(states)
    p = np.asarray(params.pinned, dtype=float)
    if arr.ndim == 3 and arr.shape[2] == 3:
        m = arr.astype(float)
        norm = np.linalg.norm(m, axis=2, keepdims=True)
        if np.any(norm == 0):
            raise ValueError("zero magnetization vector in state array")
        return m / norm
    if arr.ndim != 2:
        raise ValueError(f"state array must be R x C or R x C x 3, got shape {arr.shape}")
    if arr.dtype.kind in "US":
        labels = np.char.upper(arr.astype(str))
        bad = ~np.isin(labels, ["P", "AP"])
        if np.any(bad):
            raise ValueError(f"unknown cell state {labels[bad][0]!r}; use P or AP")
        ap = labels == "AP"
    else:
        ap = arr.astype(bool)
    return np.where(ap[..., None], -p, p)


@dataclass
class CrossbarSpec:
    """R x C array of identical cells in the given magnetic states."""

    rows: int
    cols: int
    states: object = None
    params: DeviceParams = field(default_factory=DeviceParams)

    def __post_init__(self):
        if int(self.rows) < 1 or int(self.cols) < 1:
            raise ValueError("rows and cols must be >= 1")
        self.rows, self.cols = int(self.rows), int(self.cols)
        if self.states is None:
            self.states = np.full((self.rows, self.cols), "P")
        self.m = _states_to_m(self.states, self.params)
        if self.m.shape[:2] != (self.rows, self.cols):
            raise ValueError(f"state array is {self.m.shape[:2]}, expected {(self.rows, self.cols)}")

    @classmethod
    def uniform(cls, rows, cols, state="P", params=None):
        return cls(rows, cols, np.full((rows, cols), state), params or DeviceParams())

    def resistances(self):
        """Static cell resistances (ohm), shape (R, C)."""
        m = np.moveaxis(self.m, 2, 0).reshape(3, -1)
        return resistance(m, self.params).reshape(self.rows, self.cols)

    def conductances(self):
        return 1.0 / self.resistances()

    def labels(self):
        """'P'/'AP' label of each cell by the sign of its projection on the pinned layer."""
        cos = self.m @ np.asarray(self.params.pinned, dtype=float)
        return np.where(cos >= 0, "P", "AP")


@dataclass(frozen=True)
class WriteRequest:
    target: tuple
    waveform: Waveform
    scheme: str = "half_voltage"

    def __post_init__(self):
        if self.scheme not in ("half_voltage", "floating"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


def _check_target(spec, target):
    i, j = target
    if not (0 <= i < spec.rows and 0 <= j < spec.cols):
        raise IndexError(f"target {target} outside {spec.rows}x{spec.cols} array")
    return int(i), int(j)


def classify(spec, target):
    """Per-cell class array and class counts ``(selected, half, unselected)``."""
    i, j = _check_target(spec, target)
    cls = np.full((spec.rows, spec.cols), CellClass.UNSELECTED, dtype=np.int8)
    cls[i, :] = CellClass.HALF_SELECTED
    cls[:, j] = CellClass.HALF_SELECTED
    cls[i, j] = CellClass.SELECTED
    counts = tuple(int(np.count_nonzero(cls == c)) for c in CellClass)
    return cls, counts


@dataclass(frozen=True)
class DisturbReport:
    per_cell: float
    expected_disturbed: float
    expected_failed: float
    half_selections: int

    def to_dict(self):
        return {"per_cell_disturb": self.per_cell, "expected_disturbed": self.expected_disturbed,
                "expected_failed_targets": self.expected_failed,
                "half_selections_per_cell": self.half_selections}


def _check_prob(name, p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {p!r}")


def write_disturb(spec, p_sel, p_half):
    """Expected error statistics of writing every cell once, one at a time.

    Each cell is half-selected ``R + C - 2`` times over the whole pass and is
    counted as disturbed if any of those events flips it.
    """
    _check_prob("p_sel", p_sel)
    _check_prob("p_half", p_half)
    k = spec.rows + spec.cols - 2
    n = spec.rows * spec.cols
    # -expm1(k log1p(-p)) keeps precision when p_half is tiny
    d = 1.0 if p_half == 1.0 else float(-np.expm1(k * np.log1p(-p_half)))
    return DisturbReport(d, n * d, n * (1.0 - p_sel), k)


def simulate_disturb(rows, cols, p_sel, p_half, n_reps, rng):
    """Monte Carlo of the sequential write pass; returns per-rep (disturbed, failed) counts.

    Cells are written in raster order; on each write every half-selected cell
    flips independently with ``p_half`` and the target succeeds with ``p_sel``.
    """
    disturbed = np.zeros(n_reps, dtype=np.int64)
    failed = np.zeros(n_reps, dtype=np.int64)
    for r in range(n_reps):
        hit = np.zeros((rows, cols), dtype=bool)
        for i in range(rows):
            for j in range(cols):
                flips = rng.random((rows, cols)) < p_half
                mask = np.zeros((rows, cols), dtype=bool)
                mask[i, :] = True
                mask[:, j] = True
                mask[i, j] = False
                hit |= flips & mask
                failed[r] += rng.random() >= p_sel
        disturbed[r] = np.count_nonzero(hit)
    return disturbed, failed


def write_energy(spec, request):
    """Energy (J) dissipated in each cell class during one V/2 write."""
    if request.scheme != "half_voltage":
        raise ValueError("energy accounting is defined for the half_voltage scheme")
    cls, _ = classify(spec, request.target)
    g = spec.conductances()
    u2t = request.waveform.square_integral()
    out = {}
    for c, name in zip(CellClass, ("selected", "half", "unselected")):
        frac = CLASS_VOLTAGE_FRACTION[c]
        out[name] = float(frac * frac * u2t * g[cls == c].sum())
    out["total"] = out["selected"] + out["half"] + out["unselected"]
    return out


@dataclass
class SneakResult:
    row_v: np.ndarray
    col_v: np.ndarray
    currents: np.ndarray  # (R, C), row line to column line
    residual: float

    @property
    def sneak_currents(self):
        return self.currents

    def to_dict(self):
        return {"row_voltages": self.row_v.tolist(), "col_voltages": self.col_v.tolist(),
                "currents": self.currents.tolist(), "residual": self.residual}


def nodal_matrix(g):
    """(R+C) x (R+C) Laplacian of the bipartite row/column cell graph."""
    r, c = g.shape
    lap = np.zeros((r + c, r + c))
    lap[:r, r:] = -g
    lap[r:, :r] = -g.T
    lap[np.arange(r), np.arange(r)] = g.sum(axis=1)
    lap[r + np.arange(c), r + np.arange(c)] = g.sum(axis=0)
    return lap


def solve_lines(g, driven_row, driven_col, u):
    """Line voltages with one row at ``u``, one column at 0, the rest floating.

    ``g`` is the (R, C) conductance matrix; zero entries are missing cells.
    """
    g = np.asarray(g, dtype=float)
    r, c = g.shape
    if not (0 <= driven_row < r and 0 <= driven_col < c):
        raise IndexError("driven line out of range")
    if np.any(g < 0) or not np.all(np.isfinite(g)):
        raise ValueError("conductances must be finite and >= 0")
    lap = nodal_matrix(g)
    fixed = {driven_row: float(u), r + driven_col: 0.0}

    # floating nodes with no path to a driven line make the system singular
    n_comp, comp = connected_components(csr_matrix(lap != 0), directed=False)
    live = {comp[k] for k in fixed}
    orphans = [k for k in range(r + c) if comp[k] not in live]
    if orphans:
        names = [f"row {k}" if k < r else f"col {k - r}" for k in orphans]
        raise SolverError(f"floating component not connected to a driven line: {', '.join(names)}",
                          names)

    a = lap.copy()
    b = np.zeros(r + c)
    for k, v in fixed.items():
        a[k] = 0.0
        a[k, k] = 1.0
        b[k] = v
    v = np.linalg.solve(a, b)
    res = float(np.max(np.abs(a @ v - b)))
    scale = max(float(np.max(np.abs(b))), np.finfo(float).tiny)
    if not res < 1e-9 * scale:
        raise SolverError(f"nodal residual {res:.3e} exceeds tolerance")
    return v[:r], v[r:], res


def sneak_solve(spec, driven_row, driven_col, u):
    """Floating-line solve of the crossbar; currents flow row line to column line."""
    g = spec.conductances() if isinstance(spec, CrossbarSpec) else np.asarray(spec, dtype=float)
    row_v, col_v, res = solve_lines(g, driven_row, driven_col, u)
    currents = g * (row_v[:, None] - col_v[None, :])
    return SneakResult(row_v, col_v, currents, res)


def read_state_grid(path):
    """CSV grid of P/AP labels, one array row per line."""
    with open(path, newline="") as fh:
        rows = [[s.strip() for s in row] for row in csv.reader(fh) if row and not row[0].startswith("#")]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: state grid must be a non-empty rectangle")
    return np.array(rows)


def write_state_grid(path, labels):
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(np.asarray(labels).tolist())


def write_report(path, report):
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
