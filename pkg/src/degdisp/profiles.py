"""Time-degeneracy profiles b(t), their classification and inversion.

A profile carries b, its analytic derivative b' and a domain of interest.
``classify`` decides which of the three change-of-variables regimes applies
(strictly monotone, finitely many critical points, or an infinite critical
sequence) and ``lemma_constant`` returns the matching constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

__all__ = [
    "TimeProfile",
    "ProfileClass",
    "SummableWeight",
    "LemmaConstant",
    "DegeneratePlateauError",
    "builtin_profile",
    "profile_from_dict",
    "classify",
    "invert",
    "lemma_constant",
    "PROFILE_KINDS",
]

PROFILE_KINDS = ("power", "signed_power", "exp_profile", "sine", "cos_minus_one", "sincos", "identity")


class DegeneratePlateauError(ValueError):
    """b' vanishes (numerically) on an interval of positive length."""


@dataclass(frozen=True)
class TimeProfile:
    label: str
    kind: str
    b: Callable = field(repr=False, compare=False)
    bprime: Callable = field(repr=False, compare=False)
    domain: tuple = (-math.inf, math.inf)
    params: tuple = ()
    inverse: Callable | None = field(default=None, repr=False, compare=False)
    # k -> (t_k, t'_k) for k >= 1, positive and negative critical sequences
    critical_generator: Callable | None = field(default=None, repr=False, compare=False)
    period: float | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, t):
        return self.b(t)

    def derivative(self, t):
        return self.bprime(t)

    def param(self, name, default=None):
        return dict(self.params).get(name, default)

    def in_domain(self, t) -> bool:
        t = np.asarray(t, dtype=float)
        return bool(np.all((t >= self.domain[0]) & (t <= self.domain[1])))

    def to_dict(self) -> dict:
        return {"kind": self.kind, **dict(self.params), "domain": list(self.domain)}


def builtin_profile(kind: str, alpha: float = 1.0) -> TimeProfile:
    """Named profiles; ``alpha`` is used by power and signed_power."""
    if kind in ("power", "signed_power"):
        if not alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {alpha}")
        a1 = alpha + 1.0
        params = (("alpha", float(alpha)),)
        if kind == "power":

            def b(t):
                return np.asarray(t, dtype=float) ** a1 / a1

            def bp(t):
                return np.asarray(t, dtype=float) ** alpha

            def inv(s):
                return (a1 * np.asarray(s, dtype=float)) ** (1.0 / a1)

            return TimeProfile(f"t^{a1:g}/{a1:g}", kind, b, bp, (0.0, math.inf), params, inv)

        def b(t):
            t = np.asarray(t, dtype=float)
            return t * np.abs(t) ** alpha / a1

        def bp(t):
            return np.abs(np.asarray(t, dtype=float)) ** alpha

        def inv(s):
            s = np.asarray(s, dtype=float)
            return np.sign(s) * (a1 * np.abs(s)) ** (1.0 / a1)

        return TimeProfile(f"t|t|^{alpha:g}/{a1:g}", kind, b, bp, (-math.inf, math.inf), params, inv)

    if kind == "exp_profile":

        def b(t):
            return np.expm1(np.asarray(t, dtype=float)) - np.asarray(t, dtype=float)

        def bp(t):
            return np.expm1(np.asarray(t, dtype=float))

        return TimeProfile("e^t-t-1", kind, b, bp, (0.0, math.inf))

    if kind == "sine":
        return TimeProfile(
            "sin t", kind, lambda t: np.sin(np.asarray(t, dtype=float)),
            lambda t: np.cos(np.asarray(t, dtype=float)),
            critical_generator=lambda k: ((k - 0.5) * math.pi, -(k - 0.5) * math.pi),
            period=2 * math.pi,
        )
    if kind == "cos_minus_one":
        return TimeProfile(
            "cos t-1", kind, lambda t: np.cos(np.asarray(t, dtype=float)) - 1.0,
            lambda t: -np.sin(np.asarray(t, dtype=float)),
            critical_generator=lambda k: (k * math.pi, -k * math.pi),
            period=2 * math.pi,
        )
    if kind == "sincos":
        return TimeProfile(
            "sin t cos t", kind,
            lambda t: np.sin(np.asarray(t, dtype=float)) * np.cos(np.asarray(t, dtype=float)),
            lambda t: np.cos(2.0 * np.asarray(t, dtype=float)),
            critical_generator=lambda k: ((2 * k - 1) * math.pi / 4, -(2 * k - 1) * math.pi / 4),
            period=math.pi,
        )
    if kind == "identity":
        return TimeProfile(
            "t", kind, lambda t: np.asarray(t, dtype=float) * 1.0,
            lambda t: np.ones_like(np.asarray(t, dtype=float)),
            inverse=lambda s: np.asarray(s, dtype=float) * 1.0,
        )
    raise ValueError(f"unknown profile kind {kind!r}; expected one of {PROFILE_KINDS}")


def profile_from_dict(d: dict) -> TimeProfile:
    return builtin_profile(d["kind"], float(d.get("alpha", 1.0)))


@dataclass(frozen=True)
class ProfileClass:
    """Outcome of ``classify``; ``kind`` is StrictlyMonotone, FiniteCritical or InfiniteCritical."""

    kind: str
    interval: tuple
    direction: int = 0
    points: tuple = ()
    satisfies_H: bool = False
    generator: Callable | None = field(default=None, repr=False, compare=False)
    one_sided: bool = False
    witness: dict = field(default_factory=dict, compare=False)

    @property
    def k(self) -> int:
        return len(self.points)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "interval": [float(v) for v in self.interval],
            "direction": self.direction,
            "k": self.k if self.kind != "InfiniteCritical" else "inf",
            "points": [float(p) for p in self.points],
            "satisfies_H": self.satisfies_H,
            "witness": self.witness,
        }


def _sample_bprime(profile: TimeProfile, lo: float, hi: float, samples: int):
    t = np.linspace(lo, hi, samples + 1)
    with np.errstate(over="ignore", invalid="ignore"):
        d = np.asarray(profile.bprime(t), dtype=float)
    return t, d


def _check_plateau(t: np.ndarray, d: np.ndarray, tol: float = 1e-12) -> None:
    small = np.abs(d) < tol
    if not small.any():
        return
    length = t[-1] - t[0]
    # longest run of consecutive small samples, measured in t
    edges = np.diff(np.concatenate(([0], small.astype(int), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    for s, e in zip(starts, ends):
        if t[e] - t[s] > 0.01 * length:
            raise DegeneratePlateauError(
                f"b' below {tol:g} on [{t[s]:.6g}, {t[e]:.6g}]; classification is ambiguous"
            )


def _critical_points(profile: TimeProfile, t: np.ndarray, d: np.ndarray):
    """Sign changes of b' (refined by brentq) and touching zeros."""
    crossings = []
    touching = []
    sgn = np.sign(d)
    for i in range(len(t) - 1):
        if sgn[i] * sgn[i + 1] < 0:
            crossings.append(optimize.brentq(lambda s: float(profile.bprime(s)), t[i], t[i + 1], xtol=1e-13))
    # exact zeros on samples: sign change across them, or a touch
    scale = np.max(np.abs(d[np.isfinite(d)])) if np.isfinite(d).any() else 1.0
    for i in np.flatnonzero(sgn == 0):
        left = sgn[i - 1] if i > 0 else 0
        right = sgn[i + 1] if i < len(t) - 1 else 0
        if left * right < 0:
            crossings.append(float(t[i]))
        elif 0 < i < len(t) - 1:
            touching.append(float(t[i]))
    # near-zero local minima of |b'| that do not change sign
    ad = np.abs(d)
    for i in range(1, len(t) - 1):
        if sgn[i] == 0 or sgn[i - 1] * sgn[i + 1] <= 0:
            continue
        if ad[i] <= ad[i - 1] and ad[i] <= ad[i + 1] and ad[i] < 1e-3 * scale:
            res = optimize.minimize_scalar(
                lambda s: abs(float(profile.bprime(s))), bounds=(t[i - 1], t[i + 1]),
                method="bounded", options={"xatol": 1e-13},
            )
            if res.fun < 1e-10:
                touching.append(float(res.x))
    pts = []
    for p in sorted(crossings + touching):
        if not pts or p - pts[-1] > 1e-9:
            pts.append(p)
    return crossings, pts


def _divergence_witness(profile: TimeProfile, T_big: float, target: float = 1e6, cap: float = 1e9) -> dict:
    out = {}
    sides = []
    if math.isinf(profile.domain[1]):
        sides.append(1.0)
    if math.isinf(profile.domain[0]):
        sides.append(-1.0)
    for sign in sides:
        T = T_big
        with np.errstate(over="ignore"):
            val = abs(float(profile.b(sign * T)))
            while val <= target and T < cap:
                T *= 2.0
                val = abs(float(profile.b(sign * T)))
        out["+" if sign > 0 else "-"] = {"T": T, "abs_b": val, "ok": val > target}
    return out


def classify(profile: TimeProfile, interval=None, samples: int = 4096, T_big: float = 1e3) -> ProfileClass:
    """Classify b' on ``interval`` (default: the profile domain).

    Infinite intervals are only classified as InfiniteCritical when the
    profile ships an analytic critical-point generator; otherwise the
    monotonicity test runs on the interval clipped to [-T_big, T_big].
    """
    if samples < 4096:
        raise ValueError("classification needs at least 4096 samples")
    lo, hi = interval if interval is not None else profile.domain
    lo, hi = max(lo, profile.domain[0]), min(hi, profile.domain[1])
    if not hi > lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    key = ("classify", lo, hi, samples, T_big)
    if key in profile._cache:
        return profile._cache[key]
    one_sided = profile.domain[0] >= 0 or profile.domain[1] <= 0
    if (math.isinf(lo) or math.isinf(hi)) and profile.critical_generator is not None:
        cls = ProfileClass("InfiniteCritical", (lo, hi), 0, (), False, profile.critical_generator, one_sided)
        profile._cache[key] = cls
        return cls
    slo, shi = max(lo, -T_big), min(hi, T_big)
    t, d = _sample_bprime(profile, slo, shi, samples)
    _check_plateau(t, d)
    crossings, pts = _critical_points(profile, t, d)
    if crossings:
        cls = ProfileClass("FiniteCritical", (lo, hi), 0, tuple(pts), False, None, one_sided)
    else:
        direction = int(np.sign(np.nanmean(np.sign(d))))
        sat = False
        witness = {}
        if abs(float(profile.b(0.0))) <= 1e-14 and profile.in_domain(0.0):
            # (H) concerns the whole domain, not just the requested window
            dlo, dhi = max(profile.domain[0], -T_big), min(profile.domain[1], T_big)
            td, dd = _sample_bprime(profile, dlo, dhi, samples)
            dcross, _ = _critical_points(profile, td, dd)
            witness = _divergence_witness(profile, T_big)
            sat = not dcross and bool(witness) and all(w["ok"] for w in witness.values())
        cls = ProfileClass("StrictlyMonotone", (lo, hi), direction, tuple(pts), sat, None, one_sided, witness)
    profile._cache[key] = cls
    return cls


def invert(profile: TimeProfile, s):
    """t with b(t) = s on the profile domain; arrays are handled elementwise."""
    if np.ndim(s) > 0:
        return np.array([invert(profile, float(v)) for v in np.ravel(s)]).reshape(np.shape(s))
    s = float(s)
    lo, hi = profile.domain
    cls = classify(profile, (lo, hi))
    if cls.kind != "StrictlyMonotone":
        raise ValueError(f"profile {profile.label} is not strictly monotone; cannot invert")
    with np.errstate(over="ignore"):
        blo = float(profile.b(lo)) if math.isfinite(lo) else -math.inf * cls.direction
        bhi = float(profile.b(hi)) if math.isfinite(hi) else math.inf * cls.direction
    rlo, rhi = min(blo, bhi), max(blo, bhi)
    if math.isinf(lo) or math.isinf(hi):
        # finite witness of the range on the infinite side(s)
        for side, w in cls.witness.items():
            if not w["ok"]:
                if side == "+":
                    rhi = min(rhi, float(profile.b(w["T"]))) if cls.direction > 0 else rhi
                else:
                    rlo = max(rlo, float(profile.b(-w["T"]))) if cls.direction > 0 else rlo
    if not rlo <= s <= rhi:
        raise ValueError(f"s = {s} outside the range [{rlo}, {rhi}] of {profile.label}")
    if profile.inverse is not None:
        t = float(profile.inverse(s))
    else:
        a = lo if math.isfinite(lo) else -1.0
        b = hi if math.isfinite(hi) else 1.0
        with np.errstate(over="ignore"):
            while (float(profile.b(a)) - s) * cls.direction > 0:
                a = a * 2.0 if a < 0 else a - 1.0
            while (float(profile.b(b)) - s) * cls.direction < 0:
                b = b * 2.0 if b > 0 else b + 1.0
        t = optimize.brentq(lambda x: float(profile.b(x)) - s, a, b, xtol=1e-15, rtol=1e-15, maxiter=500)
    # one Newton polish step where the slope allows it
    d = float(profile.bprime(t))
    if d != 0.0:
        t2 = t - (float(profile.b(t)) - s) / d
        if profile.in_domain(t2) and abs(float(profile.b(t2)) - s) < abs(float(profile.b(t)) - s):
            t = t2
    return t


@dataclass
class SummableWeight:
    """Auxiliary weight c(t) with summable suprema over critical-point cells."""

    c: Callable = field(repr=False)
    label: str = "1/(1+t^2)"

    @classmethod
    def default(cls) -> "SummableWeight":
        return cls(lambda t: 1.0 / (1.0 + np.asarray(t, dtype=float) ** 2))

    def side_sum(self, points: Callable[[int], float], chunk: int = 4096, max_cells: int = 1 << 20,
                 rtol: float = 1e-8, per_cell: int = 33) -> dict:
        """Sum over k >= 0 of sup |c| on [t_k, t_{k+1}) with t_0 = 0.

        The head is summed in chunks; the remaining tail is bracketed using
        the integral of |c| divided by the cell length, and the loop stops
        once that bracket is below ``rtol`` of the head.
        """
        head = 0.0
        k0 = 0
        prev = 0.0
        u = np.linspace(0.0, 1.0, per_cell, endpoint=False)
        while True:
            ks = np.arange(k0 + 1, k0 + chunk + 1)
            right = np.array([points(int(k)) for k in ks])
            left = np.concatenate(([prev], right[:-1]))
            grid = left[:, None] + (right - left)[:, None] * u[None, :]
            head += float(np.sum(np.max(np.abs(self.c(grid)), axis=1)))
            prev = float(right[-1])
            k0 += chunk
            gap = abs(float(points(k0 + 1)) - prev)
            sign = 1.0 if prev >= 0 else -1.0
            # integral of |c| over [|prev|, inf), mapped to u = 1/t so quad sees a finite interval
            integral, _ = integrate.quad(
                lambda v: abs(float(self.c(sign / v))) / v**2 if v > 0 else 0.0, 0.0, 1.0 / abs(prev), limit=200
            )
            upper = abs(float(self.c(prev))) + integral / gap
            lower = integral / gap
            if upper - lower <= rtol * head or k0 >= max_cells:
                return {
                    "head": head,
                    "tail": 0.5 * (upper + lower),
                    "tail_bracket": upper - lower,
                    "cells": k0,
                    "converged": upper - lower <= rtol * head,
                    "value": head + 0.5 * (upper + lower),
                }

    def bound(self, cls: ProfileClass) -> dict:
        """The constant C: max of the two one-sided cell sums (right side only if one-sided)."""
        if cls.generator is None:
            raise ValueError("summable-weight bound needs an infinite critical sequence")
        pos = self.side_sum(lambda k: cls.generator(k)[0])
        out = {"positive": pos}
        C = pos["value"]
        if not cls.one_sided:
            neg = self.side_sum(lambda k: cls.generator(k)[1])
            out["negative"] = neg
            C = max(C, neg["value"])
        out["C"] = C
        return out


@dataclass(frozen=True)
class LemmaConstant:
    value: float
    case: str
    note: str = ""

    def __float__(self) -> float:
        return self.value


def lemma_constant(cls: ProfileClass, p: float, weight: SummableWeight | None = None,
                   C: float | None = None) -> LemmaConstant:
    """(k+1)^(1/p) for finitely many critical points, (2C)^(1/p) for an infinite sequence.

    For a strictly monotone profile the constant is 1 and the case is
    reported as "i". On a one-sided domain only one cell sum exists, so the
    infinite-sequence constant is C^(1/p).
    """
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if cls.kind == "StrictlyMonotone":
        return LemmaConstant(1.0, "i", "strictly monotone: constant 1")
    if cls.kind == "FiniteCritical":
        return LemmaConstant((cls.k + 1) ** (1.0 / p), "ii")
    if C is None:
        if weight is None:
            raise ValueError("an infinite critical sequence needs a SummableWeight or C")
        C = weight.bound(cls)["C"]
    if cls.one_sided:
        return LemmaConstant(C ** (1.0 / p), "iii", "one-sided domain: single cell sum")
    return LemmaConstant((2.0 * C) ** (1.0 / p), "iii")
