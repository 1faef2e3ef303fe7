"""Continuous-time statistical checks: Poisson paths, random times, z-tests.

Determinism contract: path p draws from its own counter-based stream keyed
(master_seed, p), per-path results land in slot p of preallocated arrays, and
every reduction runs over those arrays in a fixed order.  Reports are
therefore bit-identical for any thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BadParameter, InsufficientEvents

_MASK64 = (1 << 64) - 1
_CHUNK = 1024


def _path_generator(master_seed: int, index: int) -> np.random.Generator:
    key = np.array([master_seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class ContinuousPath:
    """One simulated path: jump times of the counting process and a random time."""

    t_real: float
    x_events: np.ndarray
    tau: float = math.inf

    def __post_init__(self):
        events = np.asarray(self.x_events, dtype=float)
        if events.size and (
            np.any(np.diff(events) <= 0.0)
            or events[0] <= 0.0
            or events[-1] > self.t_real
        ):
            raise BadParameter("event times must be strictly increasing within (0, horizon]")
        if not self.tau > 0.0:
            raise BadParameter("random time must be strictly positive")
        object.__setattr__(self, "x_events", events)

    def count_at(self, t: float) -> int:
        return int(np.searchsorted(self.x_events, t, side="right"))


@dataclass(frozen=True)
class RandomTimeSpec:
    """How to draw the random time: 'exponential' (rate mu, independent),
    'midpoint' (halfway between the first two events), or 'copy_first'."""

    kind: str
    mu: float = 1.0


@dataclass(frozen=True)
class McReport:
    """One Monte Carlo measurement with its gate decision.

    ``kind`` is "z_test" for noisy statistics (pass iff |z| <= z_max) or
    "exact" for almost-sure statements (pass iff the estimate equals the
    expected value exactly; z is then 0 or inf so the z-gate reads the same).
    """

    statistic: str
    estimate: float
    std_error: float
    z_score: float
    n_paths: int
    passed: bool
    kind: str = "z_test"
    expected: float = 0.0


def z_test(name: str, samples, expected: float = 0.0, z_max: float = 4.0) -> McReport:
    samples = np.asarray(samples, dtype=float)
    n = int(samples.size)
    if n == 0:
        raise BadParameter(f"statistic {name!r} has no samples")
    estimate = float(samples.mean())
    std_error = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    if std_error > 0.0:
        z = (estimate - expected) / std_error
    else:
        z = 0.0 if estimate == expected else math.inf
    return McReport(
        statistic=name,
        estimate=estimate,
        std_error=std_error,
        z_score=float(z),
        n_paths=n,
        passed=abs(z) <= z_max,
        kind="z_test",
        expected=float(expected),
    )


def exact_check(name: str, estimate: float, expected: float, n: int) -> McReport:
    z = 0.0 if estimate == expected else math.inf
    return McReport(
        statistic=name,
        estimate=float(estimate),
        std_error=0.0,
        z_score=z,
        n_paths=int(n),
        passed=estimate == expected,
        kind="exact",
        expected=float(expected),
    )


def simulate_poisson(lam: float, t_real: float, seed) -> np.ndarray:
    """Jump times of one homogeneous Poisson path on (0, t_real].

    ``seed`` is an integer (expanded through the counter-based scheme) or an
    already-positioned generator.
    """
    if not lam > 0.0 or not t_real > 0.0:
        raise BadParameter("rate and horizon must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else _path_generator(int(seed), 0)
    block = max(16, int(lam * t_real + 10.0 * math.sqrt(lam * t_real) + 10.0))
    times = np.cumsum(rng.standard_exponential(block) / lam)
    while times[-1] <= t_real:
        more = np.cumsum(rng.standard_exponential(block) / lam)
        times = np.concatenate([times, times[-1] + more])
    return times[times <= t_real]


def sample_random_time(spec: RandomTimeSpec, x_events, seed) -> float:
    """Draw the random time for one path according to ``spec``."""
    events = np.asarray(x_events, dtype=float)
    if spec.kind == "exponential":
        rng = seed if isinstance(seed, np.random.Generator) else _path_generator(int(seed), 0)
        if not spec.mu > 0.0:
            raise BadParameter("exponential rate must be positive")
        return float(rng.standard_exponential() / spec.mu)
    if spec.kind == "midpoint":
        if events.size < 2:
            raise InsufficientEvents("midpoint needs at least two events")
        return float(0.5 * (events[0] + events[1]))
    if spec.kind == "copy_first":
        if events.size < 1:
            raise InsufficientEvents("copy_first needs at least one event")
        return float(events[0])
    raise BadParameter(f"unknown random-time kind {spec.kind!r}")


@dataclass(eq=False)
class PathSet:
    """Simulated ensemble: per-path event arrays, random times, validity flags."""

    lam: float
    t_real: float
    n_paths: int
    seed: int
    events: list
    tau: np.ndarray
    tau_valid: np.ndarray

    def path(self, p: int) -> ContinuousPath:
        return ContinuousPath(self.t_real, self.events[p], float(self.tau[p]))

    def counts_at(self, t: float) -> np.ndarray:
        return np.fromiter(
            (e.searchsorted(t, side="right") for e in self.events),
            dtype=np.int64,
            count=self.n_paths,
        )

    def first_events(self) -> np.ndarray:
        return np.fromiter(
            (e[0] if e.size else math.inf for e in self.events),
            dtype=float,
            count=self.n_paths,
        )

    def second_events(self) -> np.ndarray:
        return np.fromiter(
            (e[1] if e.size > 1 else math.inf for e in self.events),
            dtype=float,
            count=self.n_paths,
        )

    def window_hits(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Per path: 1.0 if any event lies in (lo_p, hi_p]."""
        out = np.zeros(self.n_paths)
        for p, e in enumerate(self.events):
            out[p] = 1.0 if np.any((e > lo[p]) & (e <= hi[p])) else 0.0
        return out


def simulate_path_set(
    lam: float,
    t_real: float,
    n_paths: int,
    seed: int,
    tau_spec: RandomTimeSpec | None = None,
    n_threads: int = 1,
) -> PathSet:
    """Simulate the ensemble; paths missing events for the tau spec are flagged invalid."""
    if n_paths < 1:
        raise BadParameter("need at least one path")
    events: list = [None] * n_paths
    tau = np.full(n_paths, math.inf)
    tau_valid = np.ones(n_paths, dtype=bool)

    def fill(lo: int, hi: int) -> None:
        for p in range(lo, hi):
            rng = _path_generator(seed, p)
            evs = simulate_poisson(lam, t_real, rng)
            events[p] = evs
            if tau_spec is not None:
                try:
                    tau[p] = sample_random_time(tau_spec, evs, rng)
                except InsufficientEvents:
                    tau_valid[p] = False

    spans = [(lo, min(lo + _CHUNK, n_paths)) for lo in range(0, n_paths, _CHUNK)]
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(lambda span: fill(*span), spans))
    else:
        for span in spans:
            fill(*span)
    return PathSet(
        lam=lam,
        t_real=t_real,
        n_paths=n_paths,
        seed=seed,
        events=events,
        tau=tau,
        tau_valid=tau_valid,
    )


def mc_martingale_test(
    m_fn,
    probe_fn,
    s: float,
    t: float,
    n_paths: int | None = None,
    seed: int | None = None,
    *,
    lam: float = 1.0,
    t_real: float = 10.0,
    tau_spec: RandomTimeSpec | None = None,
    paths: PathSet | None = None,
    z_max: float = 4.0,
    n_threads: int = 1,
    name: str = "martingale_increment",
) -> McReport:
    """z-test of E[(M_t - M_s) * probe] = 0 for a path functional M.

    The probe must, by caller contract, read only information available at
    time s in the relevant filtration.
    """
    if not s < t:
        raise BadParameter("need s < t")
    if paths is None:
        if n_paths is None or seed is None:
            raise BadParameter("either pass a PathSet or n_paths and seed")
        paths = simulate_path_set(lam, t_real, n_paths, seed, tau_spec, n_threads)
    samples = np.zeros(paths.n_paths)
    for p in range(paths.n_paths):
        if not paths.tau_valid[p]:
            continue
        path = paths.path(p)
        samples[p] = (m_fn(path, t) - m_fn(path, s)) * probe_fn(path)
    return z_test(name, samples[paths.tau_valid], 0.0, z_max)


def poisson_compensator_suite(
    lam: float,
    n_paths: int,
    seed: int,
    *,
    t_real: float = 10.0,
    z_max: float = 4.0,
    n_threads: int = 1,
    paths: PathSet | None = None,
) -> list[McReport]:
    """The compensated count has zero conditional drift (unit and adapted probes)."""
    if paths is None:
        paths = simulate_path_set(lam, t_real, n_paths, seed, None, n_threads)
    s, t = 0.5 * t_real, t_real
    cs = paths.counts_at(s).astype(float)
    ct = paths.counts_at(t).astype(float)
    inc = (ct - cs) - lam * (t - s)
    probe = (cs > lam * s).astype(float)
    return [
        z_test("compensated_count_increment", inc, 0.0, z_max),
        z_test("compensated_count_increment_probed", inc * probe, 0.0, z_max),
    ]


def second_moment_suite(
    lam: float,
    n_paths: int,
    seed: int,
    *,
    t_real: float = 10.0,
    z_max: float = 4.0,
    n_threads: int = 1,
    paths: PathSet | None = None,
) -> list[McReport]:
    """E[(X_t - lam t)^2] = lam t, the continuous-time bracket identity."""
    if paths is None:
        paths = simulate_path_set(lam, t_real, n_paths, seed, None, n_threads)
    out = []
    for t in (0.5 * t_real, t_real):
        c = paths.counts_at(t).astype(float)
        samples = (c - lam * t) ** 2 - lam * t
        out.append(z_test(f"compensated_square_at_{t:g}", samples, 0.0, z_max))
    return out


def azema_exponential_suite(
    lam: float,
    mu: float,
    n_paths: int,
    seed: int,
    *,
    t_real: float = 10.0,
    z_max: float = 4.0,
    n_threads: int = 1,
    paths: PathSet | None = None,
) -> list[McReport]:
    """Independent exponential time: survival law and the survival-driven compensator.

    With survival e^{-mu t}, the enlarged compensator of the single-jump
    indicator is mu * (t ^ tau), so H - mu (t ^ tau) must drift zero against
    probes known at s.
    """
    if paths is None:
        paths = simulate_path_set(
            lam, t_real, n_paths, seed, RandomTimeSpec("exponential", mu), n_threads
        )
    tau = paths.tau
    out = [
        z_test("exponential_survival_at_1", (tau > 1.0).astype(float), math.exp(-mu), z_max)
    ]
    s, t = 0.2 * t_real, 0.8 * t_real
    m_inc = ((tau <= t).astype(float) - (tau <= s).astype(float)) - mu * (
        np.minimum(tau, t) - np.minimum(tau, s)
    )
    alive = (tau > s).astype(float)
    out.append(z_test("survival_compensated_jump_probed", m_inc * alive, 0.0, z_max))
    out.append(z_test("survival_compensated_jump", m_inc, 0.0, z_max))
    return out


def _collision_fraction(paths: PathSet) -> tuple[float, int]:
    valid = paths.tau_valid
    hits = np.zeros(paths.n_paths)
    for p in range(paths.n_paths):
        if valid[p] and np.any(paths.events[p] == paths.tau[p]):
            hits[p] = 1.0
    n = int(valid.sum())
    return (float(hits[valid].mean()) if n else 0.0, n)


def avoidance_mc_suite(
    lam: float,
    mu: float,
    n_paths: int,
    seed: int,
    *,
    t_real: float = 10.0,
    z_max: float = 4.0,
    n_threads: int = 1,
    tau_spec: RandomTimeSpec | None = None,
    paths: PathSet | None = None,
) -> list[McReport]:
    """Avoidance holds pathwise-exactly for an independent exponential time.

    Reports: the collision fraction (must be exactly 0; a floating-point
    collision is reported, never silently passed), drift tests for the two
    compensated processes in the enlargement, and the no-common-jump
    certificate for their bracket.
    """
    spec = tau_spec or RandomTimeSpec("exponential", mu)
    if paths is None:
        paths = simulate_path_set(lam, t_real, n_paths, seed, spec, n_threads)
    frac, n_valid = _collision_fraction(paths)
    out = [exact_check("avoidance_collision_fraction", frac, 0.0, n_valid)]

    valid = paths.tau_valid
    tau = paths.tau
    # probe time scaled to the random-time rate so the survivor set stays populated
    s, t = min(0.2 * t_real, 1.0 / mu), 0.8 * t_real
    cs = paths.counts_at(s).astype(float)
    ct = paths.counts_at(t).astype(float)
    alive = (tau > s).astype(float)
    x_inc = (ct - cs) - lam * (t - s)
    out.append(z_test("count_compensated_in_enlargement", (x_inc * alive)[valid], 0.0, z_max))
    h_inc = ((tau <= t).astype(float) - (tau <= s).astype(float)) - mu * (
        np.minimum(tau, t) - np.minimum(tau, s)
    )
    out.append(z_test("jump_indicator_compensated", (h_inc * alive)[valid], 0.0, z_max))
    out.append(exact_check("bracket_common_jump_fraction", frac, 0.0, n_valid))
    return out


def predictable_jump_probe(
    lam: float,
    epsilon: float,
    n_paths: int,
    seed: int,
    *,
    t_real: float = 10.0,
    z_max: float = 4.0,
    n_threads: int = 1,
    announced: bool = True,
    mu: float = 1.0,
    paths: PathSet | None = None,
) -> list[McReport]:
    """Contrast the enlarged and base probabilities of a jump in a shrinking window.

    With the midpoint time, the second jump is announced in the enlargement
    as soon as the random time passes (target = 2 tau - tau_1 = second
    event), so the hit rate of the window (target - eps, target] is exactly
    1.  A window anchored at an observable-by-the-base time catches a jump
    only with probability 1 - e^{-lam eps}.  With an independent exponential
    time instead (announced=False), the "announced" target points nowhere
    special and its hit rate collapses to the base rate.
    """
    if not epsilon > 0.0:
        raise BadParameter("epsilon must be positive")
    spec = RandomTimeSpec("midpoint") if announced else RandomTimeSpec("exponential", mu)
    if paths is None:
        paths = simulate_path_set(lam, t_real, n_paths, seed, spec, n_threads)
    tau = paths.tau
    first = paths.first_events()

    if announced:
        target = paths.second_events()
        with np.errstate(invalid="ignore"):
            qualify = paths.tau_valid & (target <= t_real) & (target - tau > epsilon)
    else:
        target = 2.0 * tau - first
        qualify = (
            np.isfinite(first)
            & (target <= t_real)
            & (target - epsilon > np.maximum(tau, first))
        )
    hits = paths.window_hits(target - epsilon, target)
    n_q = int(qualify.sum())
    reports = []
    if announced:
        estimate = float(hits[qualify].mean()) if n_q else 0.0
        reports.append(
            exact_check(f"announced_window_hit_rate_eps_{epsilon:g}", estimate, 1.0, n_q)
        )
    else:
        reports.append(
            z_test(
                f"unannounced_window_hit_rate_eps_{epsilon:g}",
                hits[qualify],
                1.0 - math.exp(-lam * epsilon),
                z_max,
            )
        )

    anchor = first + 1.0
    base_ok = np.isfinite(first) & (anchor <= t_real)
    base_hits = paths.window_hits(anchor - epsilon, anchor)
    reports.append(
        z_test(
            f"base_window_hit_rate_eps_{epsilon:g}",
            base_hits[base_ok],
            1.0 - math.exp(-lam * epsilon),
            z_max,
        )
    )
    return reports


def negative_control_suite(
    lam: float,
    mu: float,
    n_paths: int,
    seed: int,
    *,
    t_real: float = 10.0,
    z_max: float = 4.0,
    n_threads: int = 1,
    paths: PathSet | None = None,
    copied_paths: PathSet | None = None,
    independent_paths: PathSet | None = None,
) -> list[McReport]:
    """Checks engineered to fail: they guard the power of the positive tests."""
    if paths is None:
        paths = simulate_path_set(lam, t_real, n_paths, seed, None, n_threads)
    s, t = 0.5 * t_real, t_real
    raw_inc = (paths.counts_at(t) - paths.counts_at(s)).astype(float)
    uncompensated = z_test("uncompensated_count_drift", raw_inc, 0.0, z_max)

    if copied_paths is None:
        copied_paths = simulate_path_set(
            lam, t_real, n_paths, seed, RandomTimeSpec("copy_first"), n_threads
        )
    frac, n_valid = _collision_fraction(copied_paths)
    collision = exact_check("copied_time_collision_fraction", frac, 0.0, n_valid)

    probe = predictable_jump_probe(
        lam,
        0.1,
        n_paths,
        seed,
        t_real=t_real,
        z_max=z_max,
        n_threads=n_threads,
        announced=False,
        mu=mu,
        paths=independent_paths,
    )
    # the unannounced hit rate must NOT reach the construction-exact value 1
    unannounced = probe[0]
    no_announcement = exact_check(
        "independent_time_announced_hit_rate", unannounced.estimate, 1.0, unannounced.n_paths
    )
    return [uncompensated, collision, no_announcement]
