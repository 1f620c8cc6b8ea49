"""Exception types shared across the package."""


class MeshkitError(Exception):
    """Base class for all meshkit errors."""


class ConfigError(MeshkitError):
    """Invalid run configuration; message carries the field path."""


class SingularJacobian(MeshkitError):
    """Jacobian determinant at or below the tangling threshold."""


class NonPositiveMetric(MeshkitError):
    """Metric tensor is not positive definite."""


class AsymmetricJacobian(MeshkitError):
    """A nominally symmetric matrix failed the symmetry check."""


class ZeroGradient(MeshkitError):
    """Level-set gradient too small to define a feature normal."""


class StepRejected(MeshkitError):
    """A relaxation step broke convexity; the time step is too large."""


class NonMonotoneTable(MeshkitError):
    """Cumulative table is not strictly increasing."""
