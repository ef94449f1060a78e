"""Central tolerance table. Every acceptance check cites one of these."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    det: float = 1e-12    # smallest admissible pivot, relative to matrix scale
    sym: float = 1e-10    # symmetry defect accepted by sym_matrix
    xval: float = 1e-6    # closed form vs generic engine, relative
    zero: float = 1e-9    # generic engine, quantities that vanish exactly
    dom: float = 1e-12    # G11(y) must exceed this
    floor: float = 1e-12  # closed-form magnitudes below this count as zero


DEFAULT = Tolerances()
