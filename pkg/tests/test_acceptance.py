"""Acceptance criteria C1..C11, each backed by the experiment that owns it.

Each test prints one PASS/FAIL line (visible with ``pytest -s`` or in -v logs)
and asserts the criterion.
"""
import pytest

from bhx.harness import ExperimentSpec, run_experiment

OWNER = {"C1": "E1", "C2": "E2", "C3": "E1", "C4": "E8", "C5": "E9", "C6": "E3", "C7": "E5", "C8": "E6",
         "C9": "E7", "C10": "E10", "C11": "E4"}
SUMMARY = {
    "C1": "Poisson reproduction of holomorphic polynomials, n = 1, 2",
    "C2": "g-function closed form for z^k",
    "C3": "sphere moments",
    "C4": "dyadic systems, Whitney covering, CZ decomposition",
    "C5": "sparse density and local mean oscillation domination",
    "C6": "S under g* and under the tent functional",
    "C7": "optimality slopes at p = 2",
    "C8": "Volterra identity and weighted Hardy probe",
    "C9": "weak (1,1) probe for g*",
    "C10": "Green's formula",
    "C11": "weighted maximal and square-function ratios bounded",
}
_cache = {}


def _report(eid):
    if eid not in _cache:
        _cache[eid] = run_experiment(ExperimentSpec(eid))
    return _cache[eid]


@pytest.mark.parametrize("crit", [f"C{i}" for i in range(1, 12)])
def test_criterion(crit, capsys):
    r = _report(OWNER[crit])
    ok = r.criteria[crit]
    with capsys.disabled():
        print(f"\n[acceptance] {crit} {'PASS' if ok else 'FAIL'} ({OWNER[crit]}, {r.timing:.1f}s): {SUMMARY[crit]}")
    assert ok, f"{crit} failed; metrics: {r.metrics}"


def test_runtime_budgets():
    budgets = {"E1": 60, "E2": 5, "E5": 300}
    for eid, limit in budgets.items():
        assert _report(eid).timing <= limit, f"{eid} took {_report(eid).timing:.1f}s"
    total = sum(_report(e).timing for e in set(OWNER.values()))
    print(f"\n[acceptance] full suite {total:.1f}s (budget 900s)")
    assert total <= 900
