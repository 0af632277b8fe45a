"""Versioned reference RatioReports for the statistical sweeps.

Each baseline file stores the recipe that produced it next to the report, so
a test can regenerate it and demand bit-identical output.

    python3 -m dkglab.baselines baselines/v1
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

from . import estimates as E
from .fieldio import atomic_write

VERSION = "v1"
RESOLUTIONS = [64, 128, 256]
ENSEMBLE = {"seed": 0, "count": 8}
BILINEAR = {"s": 0.0, "r": 0.5, "p": 2.0, "sigma": 0.6, "rho": 0.6, "eps": 0.01}


def default_recipes() -> dict:
    out = {}
    for w in E.ESTIMATES:
        name = "bilinear_" + w.replace("*", "s")
        out[name] = {"kind": "bilinear", "which": w, "params": BILINEAR}
    out["corollary21"] = {"kind": "corollary", "sigma": 0.6, "p": 2.0}
    for sign, tag in ((1, "plus"), (-1, "minus")):
        out[f"product_law_{tag}"] = {"kind": "product", "out_sign": sign,
                                     "params": dict(a=0.3, b=0.3, c=0.0, alpha=0.6, beta=0.6, gamma=0.0)}
    for key in ("2.1", "2.2", "2.3", "2.4"):
        out["embedding_" + key.replace(".", "_")] = {"kind": "embedding", "key": key, "r": 2.0, "eps": 0.01}
    for rec in out.values():
        rec.update(ensemble=ENSEMBLE, resolutions=RESOLUTIONS)
    return out


def regenerate(recipe: dict) -> E.RatioReport:
    ens = E.EnsembleSpec(**recipe["ensemble"])
    res = tuple(recipe["resolutions"])
    kind = recipe["kind"]
    if kind == "bilinear":
        return E.estimate_bilinear_constant(recipe["which"], E.BilinearParams(**recipe["params"]), ens, res)
    if kind == "corollary":
        return E.check_corollary21(recipe["sigma"], recipe["p"], ens, res)
    if kind == "product":
        return E.check_product_law(E.ProductLawParams(**recipe["params"]), ens, res, recipe["out_sign"])
    if kind == "embedding":
        return E.check_embeddings(recipe["r"], ens, recipe["eps"], res)[recipe["key"]]
    raise ValueError(f"unknown baseline kind {kind!r}")


def write_all(directory) -> list:
    directory = Path(directory)
    written = []
    for name, recipe in default_recipes().items():
        rep = regenerate(recipe)
        payload = {"version": VERSION, "recipe": recipe, "report": json.loads(rep.to_json())}
        written.append(atomic_write(directory / f"{name}.json",
                                    json.dumps(payload, indent=1, sort_keys=True) + "\n"))
    return written


def main(argv=None):
    ap = argparse.ArgumentParser(description="regenerate the baseline RatioReports")
    ap.add_argument("directory", type=Path)
    args = ap.parse_args(argv)
    for path in write_all(args.directory):
        print(path)


if __name__ == "__main__":
    main()
