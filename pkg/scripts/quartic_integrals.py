"""Monomial integrals on the orbit of ``(x^4 + y^4)/4`` through (1, 0), compared
with beta-function values, and the resulting center line for ``alpha h + beta x^2 y^2``."""
import argparse
from dataclasses import dataclass
from math import gamma

from scipy.special import beta

from qhflow.orbit import generalized_trig, poincare_integral, quartic_integral_suite
from qhflow.qhgrade import QHType
from qhflow.ratpoly import X, Y


@dataclass
class Config:
    tol: float = 1e-9
    max_nk: int = 2


def run(cfg: Config):
    h = (X**4 + Y**4) / 4
    table = generalized_trig(h, QHType(1, 1), tol=cfg.tol)
    rep = quartic_integral_suite(table, cfg.max_nk)
    ratio = poincare_integral(table, h).value / poincare_integral(table, X**2 * Y**2).value
    return table, rep, ratio


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tol", type=float, default=Config.tol)
    table, rep, ratio = run(Config(tol=ap.parse_args().tol))
    print(f"period {table.period:.12f}  B(1/4,1/4) = {beta(0.25, 0.25):.12f}")
    for (n, k), res in sorted(rep.integrals.items()):
        if n % 2 == 0 and k % 2 == 0 and n + k <= 6:
            ref = beta((n + 1) / 4, (k + 1) / 4)
            print(f"I[{n},{k}] = {res.value:.12f}  beta {ref:.12f}")
    print(f"odd integrals certified zero: {rep.odd_certified}")
    print(f"even recurrence, worst relative defect: {rep.max_relative_defect:.4f}")
    print(f"I00 / I22 = {rep.ratio_00_22:.6f}")
    print(f"center line: beta / alpha = -{ratio:.10f}  "
          f"(Gamma(1/4)^2 / (8 Gamma(3/4)^2) = {gamma(0.25) ** 2 / (8 * gamma(0.75) ** 2):.10f})")
