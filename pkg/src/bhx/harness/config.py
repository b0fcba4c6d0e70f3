"""TOML configuration with sections [quadrature], [dyadic], [weights], [experiments.Ek]."""
from __future__ import annotations

import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SECTIONS = ("quadrature", "dyadic", "weights", "experiments")


def load_config(path: str | None) -> dict:
    if path is None:
        return {s: {} for s in SECTIONS}
    with open(path, "rb") as fh:
        cfg = tomllib.load(fh)
    unknown = set(cfg) - set(SECTIONS)
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")
    for s in SECTIONS:
        cfg.setdefault(s, {})
    return cfg


def experiment_overrides(cfg: dict, eid: str) -> dict:
    """Parameters for one experiment: the shared sections first, then [experiments.Ek]."""
    out = {}
    q = cfg.get("quadrature", {})
    for key in ("n", "resolution", "eps_cut", "radial_nodes"):
        if key in q:
            out[key] = q[key]
    d = cfg.get("dyadic", {})
    if d:
        out["dyadic"] = dict(d)
    w = cfg.get("weights", {})
    if w:
        out["weights"] = dict(w)
    out.update(cfg.get("experiments", {}).get(eid, {}))
    return out
