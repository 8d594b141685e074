"""Shipped operators and the displayed K/E solution, pinned by sha256."""

from __future__ import annotations

import hashlib
from importlib import resources
from typing import Dict, List, Tuple

from .diffop import DiffOperator, classify_singularity, local_exponents, multiply, p_curvature
from .elliptic import AnsatzSolution, verify_membership
from .modarith import QQ

REGISTRY: Dict[str, Tuple[str, str]] = {
    "V2": ("V2.lode", "4b0977c155d14c6b3dce9f26ff35608c7177f21d33d8d56d4a4a70ef79860d6e"),
    "F2": ("F2.lode", "34d15a3a3d81e2690b79e0b9036039981dd09737ce32b6b545f15ad8bbd0eb8b"),
    "L1": ("L1.lode", "086c741090d913d82d945d930ea3050b379446b8f45ee60c434d8fcbf5b6629c"),
    "F3": ("F3.lode", "c427b5d9642058b969e03dff29b4241fa448db5a1a4a9593e195e62ff9dc9836"),
    "F3tilde": ("F3tilde.lode", "5d70dae98f83307f5aba0221365b3de960f951e8975643099c50eadf7d5a5785"),
    "KE3": ("KE3.ansatz", "896caf66e285844784fcd856f1a9fc462b3a04de2bb7a5f2b01d216ac9712f72"),
}

APP_F2 = "roots:1,1,-24,-145,-192,96,0,128"

# exponents of F3tilde at its singular points
F3TILDE_EXPONENTS = {
    "0": ["0", "1", "3"],
    "1/4": ["0", "1", "3/2"],
    "-1/4": ["0", "1", "5/2"],
    "inf": ["-18", "-18", "-16"],
    "1/2": ["0", "1/2", "1"],
    "-1/2": ["0", "1/2", "1"],
    APP_F2: ["0", "2", "3"],
}

# w^2/(1-4w) * (K - 2E/(1-16w^2)) written as an ansatz
V2_SOLUTION = AnsatzSolution(1, [((0, 1), 2), ((1, -4), -1), ((1, 0, -16), -1)], [[1, 0, -16], [-2]], QQ, "w")


class FixtureIntegrityError(Exception):
    pass


def names() -> List[str]:
    return list(REGISTRY)


def path(name: str):
    fname, _ = REGISTRY[name]
    return resources.files("orefactor") / "data" / fname


def raw(name: str) -> bytes:
    if name not in REGISTRY:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(REGISTRY)}")
    return path(name).read_bytes()


def check_hash(name: str) -> bool:
    return hashlib.sha256(raw(name)).hexdigest() == REGISTRY[name][1]


def load(name: str):
    """Operator or ansatz solution, after checking the pinned hash."""
    data = raw(name)
    if hashlib.sha256(data).hexdigest() != REGISTRY[name][1]:
        raise FixtureIntegrityError(f"fixture {name} does not match its pinned hash")
    text = data.decode()
    if REGISTRY[name][0].endswith(".ansatz"):
        return AnsatzSolution.from_text(text, QQ)
    return DiffOperator.from_text(text)


def _fmt_exponents(ex) -> List[str]:
    return [QQ.fmt(e) for e in ex.sorted_list()]


def check_f3tilde_exponents() -> List[Tuple[str, bool, str]]:
    L = load("F3tilde")
    out = []
    for pt, want in F3TILDE_EXPONENTS.items():
        got = _fmt_exponents(local_exponents(L, pt))
        out.append((pt, sorted(got) == sorted(want), ", ".join(got)))
    return out


def verify_all(primes=(10007, 10009, 10037)) -> List[Tuple[str, bool]]:
    """Hash pins plus the cheap invariant checks on load."""
    results = [(f"hash {n}", check_hash(n)) for n in REGISTRY]
    results.append(("V2 annihilates its K/E solution", verify_membership(load("V2"), V2_SOLUTION)))
    for pt, ok, _ in check_f3tilde_exponents():
        results.append((f"F3tilde exponents at {pt}", ok))
    return results


def selftest_f3(primes=(10007, 10009, 10037)) -> List[Tuple[str, bool]]:
    """Desingularization of F2 by L1, the F3tilde table and nilpotence."""
    F2, L1, F3 = load("F2"), load("L1"), load("F3")
    res = [("F2 apparent at App(F2)", classify_singularity(F2, APP_F2) == "apparent")]
    prod = multiply(L1, F2.monic())
    res.append(("L1.F2 has order 3", prod.order == 3))
    res.append(("L1.F2 ordinary at App(F2)", classify_singularity(prod, APP_F2) == "ordinary"))
    for pt, ok, _ in check_f3tilde_exponents():
        res.append((f"F3tilde exponents at {pt}", ok))
    for p in primes:
        res.append((f"F3 nilpotent mod {p}", p_curvature(F3, p).nilpotent))
    return res
