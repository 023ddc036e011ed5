"""Exception hierarchy for the ffht package.

Every domain error derives from FFHTError so callers (and the CLI) can
catch one type and surface the class name, which identifies the violated
precondition.
"""


class FFHTError(Exception):
    """Base class for all domain errors raised by this package."""


class NotPrime(FFHTError):
    """Modulus is not a prime number."""


class BadResidueClass(FFHTError):
    """Modulus is prime but not congruent to 3 mod 4."""


class ModulusTooLarge(FFHTError):
    """Modulus exceeds the 2**31 cap that keeps products in 64 bits."""


class DivisionByZero(FFHTError):
    """Inverse or negative power of the zero element."""


class NoSuchOrder(FFHTError):
    """Requested multiplicative order does not divide p**2 - 1."""


class OrderMismatch(FFHTError):
    """Claimed order N differs from the element's true order."""


class LengthMismatch(FFHTError):
    """Signal length differs from the kernel's order N."""


class NonInvertibleLength(FFHTError):
    """Inverse transform undefined because p divides N."""


class RealInputRequired(FFHTError):
    """Operation restricted to real-valued signals got a full element."""


class UnknownPlan(FFHTError):
    """No builtin plan registered under the requested name."""


class UnvalidatedPlan(FFHTError):
    """Strict execution refused because the plan failed validation."""


class ImpurePlan(FFHTError):
    """Cost model undefined: a slot or coefficient mixes components."""


class OverlappingPairs(FFHTError):
    """Pairing steps in one layer reuse a column index."""


class SearchSpaceTooLarge(FFHTError):
    """Exhaustive derivation requested beyond its size bound."""


class ParseError(FFHTError):
    """Malformed element text or plan file."""
