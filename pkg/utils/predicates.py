# UTILS: Predicates and validators for operation preconditions
"""
Predicates and validators to centralize precondition logic
"""
from typing import Callable

from utils.errors import PreconditionError


def at_least(bound: float) -> Callable:
    """Predicate to check value >= bound"""
    def predicate(value) -> bool:
        return value >= bound
    return predicate

def greater_than(bound: float) -> Callable:
    """Predicate to check value > bound"""
    def predicate(value) -> bool:
        return value > bound
    return predicate

def in_half_open(lo: float, hi: float) -> Callable:
    """Predicate to check lo < value <= hi"""
    def predicate(value) -> bool:
        return lo < value <= hi
    return predicate

def in_range(lo: float, hi: float) -> Callable:
    """Predicate to check lo <= value < hi"""
    def predicate(value) -> bool:
        return lo <= value < hi
    return predicate

def one_of(options) -> Callable:
    """Predicate to check membership"""
    def predicate(value) -> bool:
        return value in options
    return predicate


def require(name: str, value, predicate: Callable, condition: str):
    """Return value when predicate(value) holds, otherwise raise PreconditionError"""
    if not predicate(value):
        raise PreconditionError(name, condition, value)
    return value


class ExponentRules:
    """Validators for the exponent relations shared by norms and estimates"""

    @staticmethod
    def integrability(q: float, name: str = "q") -> float:
        """q in [1, inf]"""
        return require(name, q, at_least(1.0), "q >= 1")

    @staticmethod
    def log_exponent(alpha: float, name: str = "alpha") -> float:
        """alpha >= 0"""
        return require(name, alpha, at_least(0.0), "alpha >= 0")

    @staticmethod
    def ordered_pair(r: float, q: float) -> None:
        """1 <= r <= q <= inf"""
        ExponentRules.integrability(r, "r")
        ExponentRules.integrability(q, "q")
        if r > q:
            raise PreconditionError("r", f"r <= q = {q}", r)

    @staticmethod
    def decay_pair(r: float, q: float, alpha: float, beta: float) -> None:
        """Exponents admissible for the semigroup decay estimates"""
        ExponentRules.ordered_pair(r, q)
        if r == q and alpha > beta:
            raise PreconditionError("alpha", f"alpha <= beta = {beta} when r = q", alpha)

    @staticmethod
    def holder_relation(q1: float, q2: float, alpha1: float, alpha2: float,
                        rtol: float = 1e-12) -> float:
        """1 = 1/q1 + 1/q2; returns alpha = alpha1/q1 + alpha2/q2"""
        ExponentRules.integrability(q1, "q1")
        ExponentRules.integrability(q2, "q2")
        inverse_sum = 1.0 / q1 + 1.0 / q2
        if abs(inverse_sum - 1.0) > rtol:
            raise PreconditionError("q1, q2", "1/q1 + 1/q2 = 1", (q1, q2))
        return alpha1 / q1 + alpha2 / q2

    @staticmethod
    def order(theta: float) -> float:
        """theta in (0, 2]"""
        return require("theta", theta, in_half_open(0.0, 2.0), "0 < theta <= 2")
