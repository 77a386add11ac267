"""Exact evaluation of virtual intersection numbers on Quot schemes.

The number int a_r^N over [Quot(C^n, r, d)]^vir is a weighted sum over
r-element subsets I of the n-th roots of rootTarget (meaning the roots of
x^n = (-1)^(r-1) when rootTarget is -1):

    value = u * sum_I (prod lam)^(N+tau) * W(I)^(g-1),
    W(I)  = n^r * (prod lam)^(-1) * prod_{lam != mu in I} (lam - mu)^(-1).

All inner arithmetic happens in one fixed cyclotomic field per job (conductor
n, or 2n when the target is -1 with even r), on raw coefficient vectors; the
normalization (rootTarget, u, tau) is not hardcoded but selected by the
calibrate() battery, and every result is certified to be a rational integer.

Work is partitioned into contiguous, fixed-size rank ranges of the
lexicographic subset stream, so results are bit-identical for any worker
count.  Conjugation halving is implemented (the summand of the conjugate
subset is the conjugate summand, so only the lexicographically smaller
partner is evaluated).  A further rotation-orbit reduction (quotienting by
lam -> zeta_n * lam, which rescales summands by zeta_n^(r(N+tau)-r^2(g-1)))
is documented here but deliberately off: its phase bookkeeping depends on
N mod n and the halving already doubles throughput.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from multiprocessing import get_context

from ..cyclotomic import CycloElem, _mul_nums, as_rational_integer, cyclo_field
from . import floatkern
from .subsets import next_subset, rank_subset, unrank_subset

CHUNK = 1024

__all__ = [
    "DegreeMatchError",
    "CalibrationError",
    "VIInstance",
    "VIConvention",
    "vi_sum",
    "calibrate",
    "default_search_space",
    "run_battery",
    "BatteryCase",
    "resolve_workers",
]


class DegreeMatchError(ValueError):
    pass


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class VIConvention:
    """Normalization of the closed form: which roots, global unit, tweak."""

    root_target: int = -1
    phase: int = 1
    weight_exponent_tweak: int = 0

    def __post_init__(self) -> None:
        if self.root_target not in (1, -1):
            raise ValueError("root_target must be +1 or -1")
        if self.phase not in (1, -1):
            raise ValueError("phase must be +1 or -1")

    def as_dict(self) -> dict:
        return {
            "rootTarget": self.root_target,
            "phase": self.phase,
            "weightExponentTweak": self.weight_exponent_tweak,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VIConvention":
        return cls(
            root_target=int(data["rootTarget"]),
            phase=int(data["phase"]),
            weight_exponent_tweak=int(data["weightExponentTweak"]),
        )


@dataclass(frozen=True)
class VIInstance:
    """One evaluation job; the degree-match invariant is enforced here."""

    n: int
    r: int
    g: int
    d: int
    N: int

    def __post_init__(self) -> None:
        if not 0 < self.r < self.n:
            raise ValueError("need 0 < r < n")
        if self.g < 0 or self.d < 0 or self.N < 0:
            raise ValueError("g, d, N must be nonnegative")
        vdim = self.n * self.d - self.r * (self.n - self.r) * (self.g - 1)
        if self.r * self.N != vdim:
            raise DegreeMatchError(
                f"exponent does not match virtual dimension: r*N = {self.r * self.N}, "
                f"n*d - r(n-r)(g-1) = {vdim} for {self!r}"
            )


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, then TRIQUOT_WORKERS, then all cores."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("TRIQUOT_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _geometry(inst: VIInstance, conv: VIConvention) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
    # conductor, per-root exponents of zeta_m, conjugation permutation on root indices
    n = inst.n
    if conv.root_target == -1 and inst.r % 2 == 0:
        m = 2 * n
        exps = tuple(2 * k + 1 for k in range(n))
        conj = tuple(n - 1 - k for k in range(n))
    else:
        m = n
        exps = tuple(range(n))
        conj = tuple((n - k) % n for k in range(n))
    return m, exps, conj


def _pair_table(m: int, exps: tuple[int, ...], invert: bool):
    # table[a][b] = raw (nums, den) of (lam_a - lam_b)^2, inverted when asked
    n = len(exps)
    fld = cyclo_field(m)
    table: list[list[tuple[tuple[int, ...], int] | None]] = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            diff = CycloElem.root(m, exps[a]) - CycloElem.root(m, exps[b])
            val = diff * diff
            if invert:
                val = val.inv()
            table[a][b] = (val.num, val.den)
            table[b][a] = (val.num, val.den)
    return table


def _conj_raw(nums, fld, m):
    out = [0] * fld.phi
    for j, c in enumerate(nums):
        if c:
            row = fld.zpow[(m - j) % m]
            for i in range(fld.phi):
                out[i] += c * row[i]
    return out


def _pow_raw(nums, den, k, fld):
    rn = [0] * fld.phi
    rn[0] = 1
    rd = 1
    bn, bd = list(nums), den
    while k:
        if k & 1:
            rn = _mul_nums(rn, bn, fld)
            rd *= bd
        k >>= 1
        if k:
            bn = _mul_nums(bn, bn, fld)
            bd *= bd
    return rn, rd


def _exact_chunk(job, lo: int, hi: int):
    (n, r, m, exps, conj, E, wexp, table, fld) = job
    phi = fld.phi
    zpow = fld.zpow
    acc = [0] * phi
    acc_den = 1
    cur = unrank_subset(n, r, lo)
    for rank in range(lo, hi):
        partner = tuple(sorted(conj[i] for i in cur))
        prank = rank_subset(n, partner)
        if prank >= rank:
            if wexp == 0 or r < 2:
                nums = [0] * phi
                nums[0] = 1
                den = 1
            else:
                nums = None
                den = 1
                for ii in range(r):
                    a = cur[ii]
                    row = table[a]
                    for jj in range(ii + 1, r):
                        tn, td = row[cur[jj]]
                        nums = list(tn) if nums is None else _mul_nums(nums, tn, fld)
                        den *= td
                if wexp > 1:
                    nums, den = _pow_raw(nums, den, wexp, fld)
            pe = (E * sum(exps[i] for i in cur)) % m
            if pe:
                nums = _mul_nums(nums, zpow[pe], fld)
            if prank > rank:
                cn = _conj_raw(nums, fld, m)
                nums = [x + y for x, y in zip(nums, cn)]
            L = lcm(acc_den, den)
            fa, fb = L // acc_den, L // den
            acc = [fa * x + fb * y for x, y in zip(acc, nums)]
            acc_den = L
        cur = next_subset(n, cur)
        if cur is None:
            break
    return acc, acc_den


_JOB = None


def _chunk_worker(bounds):
    lo, hi = bounds
    return _exact_chunk(_JOB, lo, hi)


def _exact_total(job, total_ranks: int, workers: int):
    bounds = [(lo, min(lo + CHUNK, total_ranks)) for lo in range(0, total_ranks, CHUNK)]
    if workers <= 1 or len(bounds) == 1:
        parts = [_exact_chunk(job, lo, hi) for lo, hi in bounds]
    else:
        global _JOB
        _JOB = job
        try:
            ctx = get_context("fork")
            with ctx.Pool(min(workers, len(bounds))) as pool:
                parts = pool.map(_chunk_worker, bounds)
        finally:
            _JOB = None
    fld = job[-1]
    acc = [0] * fld.phi
    acc_den = 1
    for nums, den in parts:
        L = lcm(acc_den, den)
        fa, fb = L // acc_den, L // den
        acc = [fa * x + fb * y for x, y in zip(acc, nums)]
        acc_den = L
    return acc, acc_den


def vi_sum(
    inst: VIInstance,
    conv: VIConvention,
    backend: str = "exact",
    workers: int | None = None,
) -> int:
    """Evaluate the subset sum for one instance under one convention.

    The exact backend works in Q(zeta_m) throughout and certifies the result
    to be a rational integer; the float backend is a complex128 mirror with a
    residual bound, for sweeps, and is never the arbiter.
    """
    if backend not in ("exact", "float"):
        raise ValueError(f"unknown backend: {backend}")
    n, r, g, N = inst.n, inst.r, inst.g, inst.N
    tau = conv.weight_exponent_tweak
    m, exps, conj = _geometry(inst, conv)
    E = N + tau - (g - 1)
    e_w = g - 1
    wexp = abs(e_w)
    sign = -1 if (comb(r, 2) * e_w) % 2 else 1
    scale = Fraction(n) ** (r * e_w)
    u = conv.phase

    if backend == "float":
        total = floatkern.vi_sum_float(n, r, exps, E, m, wexp, invert_pairs=e_w > 0)
        value = u * sign * float(scale) * total
        rounded = round(value.real)
        tol = 1e-6 * max(1.0, abs(value.real))
        if abs(value.imag) > tol or abs(value.real - rounded) > tol:
            raise ArithmeticError(
                f"float backend lost precision: {value!r} is not near an integer"
            )
        return int(rounded)

    fld = cyclo_field(m)
    table = _pair_table(m, exps, invert=e_w > 0) if wexp else None
    job = (n, r, m, exps, conj, E, wexp, table, fld)
    total_ranks = comb(n, r)
    nums, den = _exact_total(job, total_ranks, resolve_workers(workers))
    elem = CycloElem(m, tuple(nums), den) * (u * sign * scale)
    try:
        return as_rational_integer(elem)
    except ValueError as exc:
        raise CalibrationError(f"calibration failure: {exc}") from exc


# ---------------------------------------------------------------------------
# Calibration battery


@dataclass(frozen=True)
class BatteryCase:
    name: str
    expected: int | None
    got: object
    ok: bool


def default_search_space() -> tuple[VIConvention, ...]:
    return tuple(
        VIConvention(t, u, tau)
        for t in (1, -1)
        for u in (1, -1)
        for tau in range(-2, 3)
    )


def _battery_grassmannian(conv: VIConvention, backend: str) -> list[BatteryCase]:
    # point-class identity on G(r, r+l): the sum must be exactly 1
    out = []
    for r in range(1, 5):
        for l in range(1, 5):
            inst = VIInstance(n=r + l, r=r, g=0, d=0, N=l)
            out.append(_case(f"grassmannian r={r} l={l}", 1, inst, conv, backend))
    return out


def _battery_rank_one(conv: VIConvention, backend: str) -> list[BatteryCase]:
    # rank-one projections: the value is n^g for any large d
    out = []
    for g in (2, 3):
        for n in (2, 3, 4):
            for d in (10, 15):
                N = n * d - (n - 1) * (g - 1)
                inst = VIInstance(n=n, r=1, g=g, d=d, N=N)
                out.append(_case(f"rank-one n={n} g={g} d={d}", n ** g, inst, conv, backend))
    return out


def _battery_d_shift(conv: VIConvention, backend: str) -> list[BatteryCase]:
    # values must agree across d' -> d'+r -> d'+2r and be nonnegative
    from ..triangle import DNormalizationPolicy, ModuliInput, derive_params

    out = []
    for (g, r, d, l) in ((2, 2, 0, 1), (2, 2, 1, 1)):
        base = derive_params(ModuliInput(g, r, d, l))
        vals = []
        err = None
        for k in range(3):
            p = derive_params(
                ModuliInput(g, r, d, l),
                DNormalizationPolicy(d_prime=base.d_prime + k * r),
            )
            inst = VIInstance(n=p.n, r=r, g=g, d=p.d_prime, N=p.N)
            try:
                vals.append(vi_sum(inst, conv, backend))
            except (CalibrationError, ArithmeticError) as exc:
                err = exc
                break
        name = f"d-shift g={g} r={r} d={d} l={l}"
        if err is not None:
            out.append(BatteryCase(name, None, repr(err), False))
        else:
            ok = len(set(vals)) == 1 and vals[0] >= 0
            out.append(BatteryCase(name, None, tuple(vals), ok))
    return out


def _case(name, expected, inst, conv, backend) -> BatteryCase:
    try:
        got = vi_sum(inst, conv, backend)
    except (CalibrationError, ArithmeticError) as exc:
        return BatteryCase(name, expected, repr(exc), False)
    return BatteryCase(name, expected, got, got == expected)


def run_battery(
    conv: VIConvention,
    backend: str = "exact",
    parts: tuple[str, ...] = ("grassmannian", "rank_one", "d_shift"),
) -> list[BatteryCase]:
    """Full oracle battery for one convention; conjunctive across parts."""
    out: list[BatteryCase] = []
    if "grassmannian" in parts:
        out += _battery_grassmannian(conv, backend)
    if "rank_one" in parts:
        out += _battery_rank_one(conv, backend)
    if "d_shift" in parts:
        out += _battery_d_shift(conv, backend)
    return out


def calibrate(search_space=None, backend: str = "exact") -> VIConvention:
    """Select the unique convention passing the full battery.

    Raises CalibrationError when zero or several candidates survive, with the
    failure matrix in the message (a non-unique survivor means the search
    space must be widened, not guessed around).
    """
    convs = default_search_space() if search_space is None else tuple(search_space)
    if not convs:
        raise CalibrationError("calibration failure: empty convention search space")
    survivors = []
    lines = []
    for conv in convs:
        results = run_battery(conv, backend)
        bad = [c for c in results if not c.ok]
        if not bad:
            survivors.append(conv)
        lines.append(
            f"{conv.as_dict()}: {len(results) - len(bad)}/{len(results)} ok"
            + (f", first failure: {bad[0].name} -> {bad[0].got!r}" if bad else "")
        )
    if len(survivors) != 1:
        raise CalibrationError(
            "calibration failure: expected exactly one surviving convention, got "
            f"{len(survivors)}\n" + "\n".join(lines)
        )
    return survivors[0]
