"""
Parameterized example systems and their closed-form certificates
"""

from fractions import Fraction
from typing import Tuple

from .model import INF, PtsCoalgebra
from .supermartingales import AdditiveCert, MultiplicativeCert, NonCountingCert
from .distributions import DistCert
from .tails import TailSpec


def branching_ladder(k: int) -> PtsCoalgebra:
    """
    x enters chain i with probability 2^-i (i = 1..k), chain i needs 2^i
    steps from x to its accepting end; the leftover 2^-k goes to a
    non-accepting sink. Reach(x) = 1 - 2^-k.
    """
    if k < 1:
        raise ValueError("the ladder needs k >= 1")
    states = ["x"]
    moves = {"x": {"sink": Fraction(1, 2 ** k)}}
    accepting = []
    for i in range(1, k + 1):
        moves["x"][f"x_{i}_1"] = Fraction(1, 2 ** i)
        length = 2 ** i
        for j in range(1, length + 1):
            name = f"x_{i}_{j}"
            states.append(name)
            if j < length:
                moves[name] = {f"x_{i}_{j + 1}": Fraction(1)}
            else:
                moves[name] = {name: Fraction(1)}
                accepting.append(name)
    states.append("sink")
    moves["sink"] = {"sink": Fraction(1)}
    return PtsCoalgebra.build(states, moves, accepting)


def ladder_distribution_cert(k: int, horizon: int) -> DistCert:
    """b(x) puts 2^-i on index 2^i; chain states are Dirac at their distance"""
    values = {
        "x": TailSpec(atoms={2 ** i: Fraction(1, 2 ** i) for i in range(1, k + 1)},
                      inf_mass=Fraction(1, 2 ** k)),
        "sink": TailSpec.at_infinity(),
    }
    for i in range(1, k + 1):
        for j in range(1, 2 ** i + 1):
            values[f"x_{i}_{j}"] = TailSpec.dirac(2 ** i - j)
    return DistCert(values, horizon)


def ladder_noncounting_cert(k: int, gamma: Fraction) -> NonCountingCert:
    """b(x) = Σ_{i≤k} γ^(2^i)/2^i and b(x_i_j) = γ^(2^i - j)"""
    gamma = Fraction(gamma)
    values = {
        "x": sum((gamma ** (2 ** i) / 2 ** i for i in range(1, k + 1)), Fraction(0)),
        "sink": Fraction(0),
    }
    for i in range(1, k + 1):
        for j in range(1, 2 ** i + 1):
            values[f"x_{i}_{j}"] = gamma ** (2 ** i - j)
    return NonCountingCert(gamma, values)


def two_fixed_point_pts() -> PtsCoalgebra:
    """x0 splits to x1 and x2; x1 loops with 1/2; x2 steps to the accepting x3"""
    half = Fraction(1, 2)
    return PtsCoalgebra.build(
        ["x0", "x1", "x2", "x3"],
        {
            "x0": {"x1": half, "x2": half},
            "x1": {"x1": half, "x3": half},
            "x2": {"x3": Fraction(1)},
            "x3": {"x3": Fraction(1)},
        },
        ["x3"],
    )


def additive_fixed_witnesses(epsilon: Fraction) -> Tuple[AdditiveCert, AdditiveCert]:
    """Two distinct exact fixed points of the additive step on two_fixed_point_pts"""
    epsilon = Fraction(epsilon)
    finite = AdditiveCert(epsilon, {"x0": 5 * epsilon / 2, "x1": 2 * epsilon, "x2": epsilon, "x3": Fraction(0)})
    infinite = AdditiveCert(epsilon, {"x0": INF, "x1": INF, "x2": epsilon, "x3": Fraction(0)})
    return finite, infinite


def multiplicative_fixed_witnesses(alpha: Fraction, delta: Fraction) -> Tuple[MultiplicativeCert, MultiplicativeCert]:
    """Two distinct exact fixed points of the multiplicative step (alpha > 1/2)"""
    alpha, delta = Fraction(alpha), Fraction(delta)
    if alpha <= Fraction(1, 2):
        raise ValueError("the finite witness needs alpha > 1/2")
    x1 = alpha * delta / (2 * alpha - 1)
    finite = MultiplicativeCert(alpha, delta, {
        "x0": (x1 + delta) / (2 * alpha),
        "x1": x1,
        "x2": delta,
        "x3": alpha * delta,
    })
    infinite = MultiplicativeCert(alpha, delta, {"x0": INF, "x1": INF, "x2": delta, "x3": alpha * delta})
    return finite, infinite
