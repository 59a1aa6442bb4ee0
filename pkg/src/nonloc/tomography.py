"""Three-qubit projective tomography: counts, MaxLik reconstruction, Monte Carlo errors.

Each qubit is projected onto one of six states (the eigenstates of Z, X and
Y), giving 6**3 = 216 settings.  A setting is a triple of labels such as
``("Z0", "X+", "Y-")`` for qubits (A, B, C).
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import linalg
from .entanglement import pt_certificate
from .localizability import minimize_pt_eig

log = logging.getLogger(__name__)

_S = 1 / np.sqrt(2)
PROJECTOR_VECTORS = {
    "Z0": np.array([1, 0], dtype=complex),
    "Z1": np.array([0, 1], dtype=complex),
    "X+": np.array([_S, _S], dtype=complex),
    "X-": np.array([_S, -_S], dtype=complex),
    "Y+": np.array([_S, 1j * _S], dtype=complex),
    "Y-": np.array([_S, -1j * _S], dtype=complex),
}
LABELS = tuple(PROJECTOR_VECTORS)

MAXLIK_TOL = 1e-10
MAXLIK_MAX_ITER = 50_000
PROB_FLOOR = 1e-14

CSV_HEADER = ("setting_a", "setting_b", "setting_c", "count")

Setting = tuple[str, str, str]


class ConvergenceError(RuntimeError):
    """MaxLik iteration hit its cap before converging."""


class CountsError(ValueError):
    """Count data are malformed or insufficient."""


def full_setting_set() -> list[Setting]:
    """All 216 settings, label order Z0, Z1, X+, X-, Y+, Y-, qubit A slowest."""
    return list(itertools.product(LABELS, repeat=3))


def setting_vector(setting: Sequence[str]) -> np.ndarray:
    try:
        return linalg.tensor(*(PROJECTOR_VECTORS[s] for s in setting))
    except KeyError as exc:
        raise CountsError(f"unknown projector label {exc.args[0]!r}") from None


def _setting_matrix(settings: Sequence[Setting]) -> np.ndarray:
    return np.array([setting_vector(s) for s in settings])


_FULL_SETTINGS = tuple(full_setting_set())
_FULL_VECTORS = _setting_matrix(_FULL_SETTINGS)


def born_probability(rho: np.ndarray, setting: Sequence[str]) -> float:
    v = setting_vector(setting)
    return float(np.real(v.conj() @ rho @ v))


def born_probabilities(rho: np.ndarray, settings: Sequence[Setting] | None = None) -> np.ndarray:
    vecs = _FULL_VECTORS if settings is None else _setting_matrix(settings)
    return np.einsum("si,ij,sj->s", vecs.conj(), rho, vecs).real


@dataclass
class CountTable:
    """Counts (or relative frequencies) indexed by measurement setting."""

    values: np.ndarray
    kind: str = "counts"
    settings: tuple[Setting, ...] = _FULL_SETTINGS

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.settings = tuple(tuple(s) for s in self.settings)
        if self.kind not in ("counts", "frequencies"):
            raise CountsError(f"unknown table kind {self.kind!r}")
        if self.values.shape != (len(self.settings),):
            raise CountsError(f"{self.values.shape[0]} values for {len(self.settings)} settings")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise CountsError("counts must be finite and non-negative")
        if len(set(self.settings)) != len(self.settings):
            raise CountsError("duplicate settings")

    def __len__(self):
        return len(self.settings)

    def __getitem__(self, setting: Sequence[str]) -> float:
        return float(self.values[self.settings.index(tuple(setting))])

    def as_dict(self) -> dict[Setting, float]:
        return dict(zip(self.settings, self.values.tolist()))

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def frequencies(self) -> "CountTable":
        """Relative frequencies, normalized by the sum over all settings."""
        if self.total <= 0:
            raise CountsError("table has no positive entries")
        return CountTable(self.values / self.total, "frequencies", self.settings)

    def is_complete(self) -> bool:
        return set(self.settings) == set(_FULL_SETTINGS)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for s, v in zip(self.settings, self.values):
            w.writerow([*s, str(int(v)) if self.kind == "counts" else repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, *, require_complete: bool = True) -> "CountTable":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(h.strip() for h in rows[0]) != CSV_HEADER:
            raise CountsError(f"expected header {','.join(CSV_HEADER)}")
        entries: dict[Setting, float] = {}
        integral = True
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != 4:
                raise CountsError(f"line {lineno}: expected 4 fields")
            setting = tuple(x.strip() for x in row[:3])
            for lab in setting:
                if lab not in PROJECTOR_VECTORS:
                    raise CountsError(f"line {lineno}: unknown label {lab!r}")
            if setting in entries:
                raise CountsError(f"line {lineno}: duplicate setting {setting}")
            try:
                value = float(row[3])
            except ValueError:
                raise CountsError(f"line {lineno}: bad count {row[3]!r}") from None
            integral &= value.is_integer()
            entries[setting] = value
        if require_complete:
            missing = set(_FULL_SETTINGS) - set(entries)
            if missing:
                raise CountsError(f"{len(missing)} settings missing, e.g. {sorted(missing)[0]}")
            settings = _FULL_SETTINGS
        else:
            settings = tuple(s for s in _FULL_SETTINGS if s in entries)
        return cls(np.array([entries[s] for s in settings]),
                   "counts" if integral else "frequencies", settings)

    def save(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def load(cls, path, **kwargs) -> "CountTable":
        with open(path, newline="") as fh:
            return cls.from_csv(fh.read(), **kwargs)


def simulate_counts(rho: np.ndarray, mean_total_per_setting: float, seed: int | np.random.Generator) -> CountTable:
    """Poisson counts with mean ``mean_total_per_setting * Tr[rho Pi_s]`` per setting."""
    if not mean_total_per_setting > 0:
        raise ValueError("mean count must be positive")
    rng = np.random.default_rng(seed)
    lam = mean_total_per_setting * np.clip(born_probabilities(rho), 0.0, None)
    return CountTable(rng.poisson(lam).astype(float), "counts")


def exact_frequencies(rho: np.ndarray) -> CountTable:
    """Noiseless relative frequencies of ``rho`` over the full setting set."""
    return CountTable(np.clip(born_probabilities(rho), 0.0, None), "counts").frequencies()


def mix_frequencies(tables: Sequence[CountTable], weights: Sequence[float]) -> CountTable:
    """Convex combination of the relative frequencies of several tables."""
    weights = np.asarray(weights, dtype=float)
    if len(tables) != len(weights) or not tables:
        raise ValueError("need one weight per table")
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise ValueError("weights must be non-negative and sum to one")
    settings = tables[0].settings
    if any(t.settings != settings for t in tables):
        raise ValueError("tables are not aligned on the same settings")
    mixed = sum(w * t.frequencies().values for w, t in zip(weights, tables))
    return CountTable(mixed, "frequencies", settings)


@dataclass
class MaxLikResult:
    rho: np.ndarray
    iterations: int
    converged: bool
    loglik: float
    loglik_history: list[float] = field(default_factory=list, repr=False)
    diluted_steps: int = 0


def _loglik(f: np.ndarray, probs: np.ndarray, mask: np.ndarray) -> float:
    return float(np.dot(f[mask], np.log(np.maximum(probs[mask], PROB_FLOOR))))


def maxlik_reconstruct(
    counts: CountTable,
    *,
    tol: float = MAXLIK_TOL,
    max_iter: int = MAXLIK_MAX_ITER,
    full_output: bool = False,
    strict: bool = True,
):
    """Maximum-likelihood state from projective counts by the R rho R iteration.

    Starting from the maximally mixed state, iterate ``rho <- N[R rho R]``
    with ``R = sum_s f_s / Tr[rho Pi_s] Pi_s`` until successive iterates are
    closer than ``tol`` in trace distance.  If a plain step would lower the
    log-likelihood, a diluted step ``(I + eps R) rho (I + eps R)`` is taken
    instead with ``eps`` halved until the likelihood does not decrease, so
    the likelihood sequence is monotone.

    When the iteration cap is hit, :class:`ConvergenceError` is raised if
    ``strict``; otherwise a :class:`RuntimeWarning` is issued and the last
    iterate is returned.  With ``full_output`` a :class:`MaxLikResult` is
    returned instead of the bare matrix.
    """
    if counts.total <= 0:
        raise CountsError("no positive counts to reconstruct from")
    vecs = _FULL_VECTORS if counts.settings == _FULL_SETTINGS else _setting_matrix(counts.settings)
    f = counts.values / counts.total
    mask = f > 0
    vc = vecs.conj()
    dim = vecs.shape[1]

    def probs_of(r):
        return np.einsum("si,si->s", vc @ r, vecs).real

    def r_operator(pr):
        return (vecs.T * (f / np.maximum(pr, PROB_FLOOR))) @ vc

    rho = np.eye(dim, dtype=complex) / dim
    pr = probs_of(rho)
    ll = _loglik(f, pr, mask)
    history = [ll]
    diluted = 0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        r = r_operator(pr)
        new = r @ rho @ r
        new = linalg.hermitize(new) / np.trace(new).real
        new_pr = probs_of(new)
        new_ll = _loglik(f, new_pr, mask)
        eps = 1.0
        while new_ll < ll - 1e-13 and eps > 1e-12:
            eps /= 2
            g = np.eye(dim) + eps * r
            new = g @ rho @ g
            new = linalg.hermitize(new) / np.trace(new).real
            new_pr = probs_of(new)
            new_ll = _loglik(f, new_pr, mask)
        if eps < 1.0:
            diluted += 1
        fro = np.linalg.norm(new - rho)
        step = new - rho
        rho, pr, ll = new, new_pr, new_ll
        history.append(ll)
        # |D|_F / 2 <= trace distance <= sqrt(dim) |D|_F / 2; eigenvalues only when undecided
        if np.sqrt(dim) / 2 * fro < tol or (
            fro < 2 * tol and 0.5 * np.sum(np.abs(linalg.eigvalsh(step))) < tol
        ):
            converged = True
            break

    if not converged:
        msg = f"MaxLik did not converge in {max_iter} iterations (log-likelihood {ll:.12g})"
        if strict:
            raise ConvergenceError(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    if full_output:
        return MaxLikResult(rho, it, converged, ll, history, diluted)
    return rho


# ---------------------------------------------------------------- Monte Carlo

Statistic = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class MonteCarloResult:
    statistic_name: str
    mean: float
    std: float
    n_samples: int
    seed: int
    n_failed: int = 0


def make_statistic(name: str, reference: np.ndarray | None = None) -> Statistic:
    """Named statistic over a reconstructed 3-qubit state.

    ``alpha_A`` .. ``alpha_C``: lowest PT eigenvalue on that qubit.
    ``beta_A`` .. ``beta_C``: Bloch-sphere minimized PT eigenvalue of the
    conditional pair state after measuring that qubit (re-optimized per call).
    ``fidelity``: Uhlmann fidelity with ``reference``.
    """
    kind, _, qubit = name.partition("_")
    if kind in ("alpha", "beta") and qubit in ("A", "B", "C"):
        j = "ABC".index(qubit)
        if kind == "alpha":
            return lambda rho: pt_certificate(rho, j).min_eigenvalue
        return lambda rho: minimize_pt_eig(rho, j).beta_min
    if name == "fidelity":
        if reference is None:
            raise ValueError("fidelity statistic needs a reference state")
        return lambda rho: linalg.fidelity(rho, reference)
    raise ValueError(f"unknown statistic {name!r}")


def resample_counts(counts: CountTable, rng: np.random.Generator) -> CountTable:
    """Draw every count afresh from a Poisson law centred on the observed count."""
    if counts.kind != "counts":
        raise CountsError("Poisson resampling needs raw counts, not frequencies")
    return CountTable(rng.poisson(counts.values).astype(float), "counts", counts.settings)


def monte_carlo_many(
    counts: CountTable | Sequence[CountTable],
    n_samples: int,
    seed: int,
    statistics: Mapping[str, Statistic],
    *,
    weights: Sequence[float] | None = None,
    workers: int = 1,
) -> dict[str, MonteCarloResult]:
    """Monte Carlo error bars for several statistics sharing the same resampled states.

    ``counts`` is either one count table or several tables whose relative
    frequencies are mixed with ``weights`` (each table is resampled, then
    mixed, then reconstructed).  Sample ``k`` uses its own generator spawned
    from ``seed``, so results do not depend on ``workers``.
    """
    if n_samples < 2:
        raise ValueError("need at least two Monte Carlo samples")
    tables = [counts] if isinstance(counts, CountTable) else list(counts)
    if weights is None:
        if len(tables) != 1:
            raise ValueError("weights are required when mixing several tables")
        weights = [1.0]
    names = list(statistics)
    children = np.random.SeedSequence(seed).spawn(n_samples)

    def run(k: int):
        rng = np.random.default_rng(children[k])
        sample = mix_frequencies([resample_counts(t, rng) for t in tables], weights)
        try:
            rho = maxlik_reconstruct(sample)
        except (ConvergenceError, CountsError) as exc:
            log.warning("Monte Carlo sample %d failed: %s", k, exc)
            return None
        return [float(statistics[n](rho)) for n in names]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, range(n_samples)))
    else:
        rows = [run(k) for k in range(n_samples)]
    good = np.array([r for r in rows if r is not None], dtype=float).reshape(-1, len(names))
    n_failed = n_samples - good.shape[0]
    out = {}
    for i, n in enumerate(names):
        col = good[:, i]
        mean = float(np.mean(col)) if col.size else float("nan")
        std = float(np.std(col, ddof=1)) if col.size > 1 else float("nan")
        out[n] = MonteCarloResult(n, mean, std, n_samples, int(seed), n_failed)
    return out


def monte_carlo(
    counts: CountTable | Sequence[CountTable],
    n_samples: int,
    seed: int,
    statistic: str | Statistic,
    *,
    reference: np.ndarray | None = None,
    weights: Sequence[float] | None = None,
    workers: int = 1,
) -> MonteCarloResult:
    if isinstance(statistic, str):
        name, fn = statistic, make_statistic(statistic, reference)
    else:
        name, fn = getattr(statistic, "__name__", "statistic"), statistic
    return monte_carlo_many(counts, n_samples, seed, {name: fn}, weights=weights, workers=workers)[name]


def apply_local_filter(rho: np.ndarray, transmittances: Sequence[float]) -> np.ndarray:
    """Attenuate the ``|1>`` component of each qubit by ``sqrt(t_j)`` and renormalize.

    A crude model of state-dependent losses after the preparation gate.
    """
    t = np.asarray(transmittances, dtype=float)
    if t.shape != (3,) or np.any(t <= 0) or np.any(t > 1):
        raise ValueError("need three transmittances in (0, 1]")
    k = linalg.tensor(*(np.diag([1.0, np.sqrt(tj)]) for tj in t))
    out = k @ rho @ k.conj().T
    tr = np.trace(out).real
    if tr <= 0:
        raise ValueError("filtered state has zero trace")
    return out / tr
