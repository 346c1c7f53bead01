class KickMapsError(Exception):
    """Base class for library errors."""


class ParameterError(KickMapsError, ValueError):
    """Invalid or inconsistent physical/numerical parameters."""


class ShapeError(KickMapsError, ValueError):
    """Lattice windows or array shapes do not match."""


class NumericalError(KickMapsError, ArithmeticError):
    """An eigensolve or fit failed its quality checks."""


class WindowOverflowError(NumericalError):
    """Probability leaked into the edges of the truncated momentum window."""

    def __init__(self, kick, tail, n_sites):
        self.kick = kick
        self.tail = tail
        self.n_sites = n_sites
        super().__init__(
            f"edge-tail probability {tail:.3e} exceeds tolerance after kick {kick} "
            f"(window of {n_sites} sites); rerun with a larger window"
        )
