import json
from pathlib import Path

import numpy as np
import pytest

from pesto_lab.mpoly import MonomialIndex, Polynomial, parse_poly, scheme_names
from pesto_lab.scheme import load_fixture

FIXTURES = Path(__file__).parent / "fixtures"

_acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    state = {"label": None, "detail": ""}

    def set_label(label, detail=""):
        state["label"], state["detail"] = label, detail

    yield set_label
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    line = f"[{'PASS' if ok else 'FAIL'}] {state['label'] or request.node.name}"
    if state["detail"]:
        line += f" -- {state['detail']}"
    _acceptance_lines.append(line)
    print(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


@pytest.fixture(scope="session")
def toy():
    sk, pk, ipt, opt = load_fixture("toy")
    return sk, pk, ipt, opt


@pytest.fixture(scope="session")
def reference():
    """Transcribed toy data: central map G and two reduced systems (x/y names)."""
    data = json.loads((FIXTURES / "toy_reference.json").read_text())
    names = scheme_names(6, 2)
    return {
        key: [parse_poly(s, names, 3) for s in data[key]]
        for key in ("G", "G_red_groebner", "G_red_hole")
    }


def random_poly(rng, n, d, q, density=1.0):
    index = MonomialIndex(n, d)
    coeffs = rng.integers(0, q, size=len(index))
    if density < 1.0:
        coeffs = coeffs * (rng.random(len(index)) < density)
    return Polynomial.from_arrays(n, q, index.exps, coeffs)


def shifted(pk, c):
    return [g - int(v) for g, v in zip(pk.gpub, c)]
