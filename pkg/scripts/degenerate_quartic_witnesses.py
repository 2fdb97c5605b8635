"""Scan ``(y^3, -x^3 + c3 x^2 y^2 + c4 x y^3)`` over a rational grid and record
the AIIF verdict and the degree of the first obstruction."""
import argparse
from collections import Counter
from dataclasses import dataclass, field

from gmpy2 import mpq

from qhflow.nform import classify_aiif, normal_form, second_stage
from qhflow.qhgrade import QHType
from qhflow.ratpoly import PlanarField, X, Y


@dataclass
class Config:
    values: list = field(default_factory=lambda: [mpq(v) for v in ("-2", "-1/2", "0", "1/3", "1")])
    degree: int = 10


def run(cfg: Config) -> dict:
    h = -(X**4 + Y**4) / 4
    out = {}
    for c3 in cfg.values:
        for c4 in cfg.values:
            F = PlanarField(Y**3, -X**3 + c3 * X**2 * Y**2 + c4 * X * Y**3)
            v = classify_aiif(second_stage(normal_form(F, h, cfg.degree, QHType(1, 1))))
            out[(c3, c4)] = (v.kind, v.witness_degree)
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degree", type=int, default=Config.degree)
    res = run(Config(degree=ap.parse_args().degree))
    for (c3, c4), (kind, w) in res.items():
        print(f"c3 = {str(c3):>5}  c4 = {str(c4):>5}  {kind:16s} witness {w}")
    print(Counter(res.values()))
