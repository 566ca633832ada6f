"""Exception types shared by all modules."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class SingularPointError(DomainError):
    """A map was evaluated at the origin, where it is undefined."""


class StencilTooLargeError(DomainError):
    """A finite-difference stencil would reach too close to the origin."""


class DivergentIntegral(ArithmeticError):
    """A radial integral over the ball is infinite.

    Raised instead of returning a large number; ``net_power`` is the power of
    ``r`` of the integrand on ``[0, 1]`` after absorbing the volume element.
    """

    def __init__(self, net_power: float, message: str | None = None):
        self.net_power = net_power
        super().__init__(
            message
            or f"integrand behaves like r^{net_power:g} at the origin; integral diverges"
        )
