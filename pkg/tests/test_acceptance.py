"""One test per acceptance criterion; each prints a single PASS/FAIL line.

The lines are also collected into RESULTS and echoed in the terminal summary
(see conftest.py), so they show up without ``-s``.  Run this file directly
with ``python3 tests/test_acceptance.py`` for the lines alone.
"""
import time
from contextlib import contextmanager

from qkadelic.cli import SUITES, Context, SuiteConfig, run_suite

RESULTS: dict = {}


@contextmanager
def criterion(number: int, title: str):
    notes: list = []
    start = time.monotonic()
    ok = False
    try:
        yield notes
        ok = True
    finally:
        secs = time.monotonic() - start
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}  [{'; '.join(notes)}; {secs:.1f}s]"
        RESULTS[number] = line
        print(line)


def suite(name: str, notes: list, **cfg) -> dict:
    entry = run_suite(name, Context(SuiteConfig(**cfg)))
    notes.append(f"{name}@{cfg.get('target', 'point')}: {entry['status']} {entry['checks']}")
    assert entry["status"] == "pass", entry
    return entry


def test_criterion_01_adelic_symplecticity():
    with criterion(1, "adelic map is symplectic") as notes:
        start = time.monotonic()
        pairs = 0
        for target in ("point", "p1"):
            ctx = Context(SuiteConfig(target=target, series_order=12, max_r=3, max_m=4))
            pairs += len(list(SUITES["adelic-symplecticity"].cases(ctx)))
            suite("adelic-symplecticity", notes, target=target, series_order=12, max_r=3, max_m=4)
        notes.append(f"{pairs} pairs")
        assert pairs >= 500
        assert time.monotonic() - start < 60


def test_criterion_02_darboux_duality():
    with criterion(2, "Darboux bases pair to -delta") as notes:
        for target in ("point", "p1"):
            suite("darboux", notes, target=target, max_M=4, max_m=4)


def test_criterion_03_box_pair():
    with criterion(3, "Box pair identity") as notes:
        for target in ("point", "p1"):
            suite("box-pair", notes, target=target, max_m=4, max_r=3)


def test_criterion_04_rearrangement():
    with criterion(4, "cyclotomic rearrangement and composite Delta") as notes:
        suite("rearrange", notes, max_M=6)


def test_criterion_05_euler_maclaurin():
    with criterion(5, "Euler-Maclaurin asymptotics") as notes:
        for target in ("point", "p1"):
            suite("euler-maclaurin", notes, target=target)


def test_criterion_06_propagator_graph():
    with criterion(6, "adelic image of K_- generators is the propagator image") as notes:
        for target in ("point", "p1"):
            suite("propagator-graph", notes, target=target, max_r=3)


def test_criterion_07_stone_von_neumann_and_wick():
    with criterion(7, "Stone-von Neumann conjugation and Wick sum") as notes:
        suite("stone-von-neumann", notes)
        suite("wick", notes)


def test_criterion_08_hurwitz_euler():
    with criterion(8, "Hurwitz-Euler formula on enumerated graphs") as notes:
        ctx = Context(SuiteConfig(max_M=4))
        graphs = len(list(SUITES["hurwitz"].cases(ctx)))
        notes.append(f"{graphs} graphs")
        assert graphs >= 1000
        suite("hurwitz", notes, max_M=4)


def test_criterion_09_mobius_and_disconnected_exp():
    with criterion(9, "Mobius inversion, disconnected exponential, S_n resummation") as notes:
        suite("mobius", notes)
        suite("disconnected-exp", notes, lambda_degree=6)


def test_criterion_10_twisted_pairing():
    with criterion(10, "twisted pairing Adams-RR identity") as notes:
        for target in ("point", "p1", "p2"):
            suite("twisted-pairing", notes, target=target, max_r=5)


def test_criterion_11_qch_and_dilaton_substitution():
    with criterion(11, "qch symplectic and dilaton input substitution") as notes:
        for target in ("point", "p1"):
            suite("qch-symplectic", notes, target=target)
        suite("input-substitution", notes)


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
