"""Exception types shared across the package."""


class LayerscatError(Exception):
    """Base class for all package errors."""


class GeometryError(LayerscatError):
    """Invalid geometry: self-intersection, bad nesting, degenerate contour."""


class SceneParseError(LayerscatError):
    """Scene file could not be parsed; message carries line information."""

    def __init__(self, message, line_no=None):
        self.bare_message = message
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class SceneValidationError(LayerscatError):
    """Scene parsed but violates a structural invariant (nesting, media)."""


class SingularMatrixError(LayerscatError):
    """An LU factorization met a (numerically) singular matrix.

    ``label`` names the offending matrix in the recursion (diagnostics
    vocabulary, e.g. ``"P(1|1)"`` or ``"final L+P_hat*Y_s"``).
    """

    def __init__(self, label):
        super().__init__(f"singular matrix in solve: {label}")
        self.label = label


class SeriesConvergenceError(LayerscatError):
    """Cylindrical-harmonic series failed to converge below tolerance."""
