"""Range and corange dimensions of the homological operator, degree by degree."""
import argparse
from dataclasses import dataclass

from qhflow.lieops import operator_decomposition
from qhflow.qhgrade import QHType, dim, qh_degree_of
from qhflow.ratpoly import X, Y

SYSTEMS = {
    "cusp": (X**4 / 4 - Y**3 / 3, QHType(3, 4)),
    "quartic": ((X**4 + Y**4) / 4, QHType(1, 1)),
    "nilpotent": (-(X**4 / 4 + Y**2 / 2), QHType(1, 2)),
}


@dataclass
class Config:
    system: str = "cusp"
    degrees: int = 17  # number of degrees above r
    cyclic: bool = True


def run(cfg: Config) -> list[tuple]:
    h, t = SYSTEMS[cfg.system]
    r = qh_degree_of(h, t) - t.size
    rows = []
    for j in range(r + 1, r + 1 + cfg.degrees):
        dec = operator_decomposition(h, t, j, cfg.cyclic)
        rows.append((j, dim(t, j), dec.rank, [str(c) for c in dec.corange_basis]))
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("system", nargs="?", default=Config.system, choices=sorted(SYSTEMS))
    ap.add_argument("--degrees", type=int, default=Config.degrees)
    ap.add_argument("--monomial", action="store_true", help="plain monomial corange")
    a = ap.parse_args()
    for j, n, rank, cor in run(Config(a.system, a.degrees, not a.monomial)):
        print(f"{j:3d}  dim {n:2d}  rank {rank:2d}  Cor = {cor}")
