"""Exception hierarchy shared by every module of the package."""


class LpRegionsError(Exception):
    """Base class for all package errors."""


# geometry
class GeometryError(LpRegionsError):
    pass


class DuplicateSeeds(GeometryError):
    pass


class SeedOutsideBox(GeometryError):
    pass


class PointOutsideSubdivision(GeometryError):
    pass


class DegenerateCrossing(GeometryError):
    pass


class PointNotInFace(GeometryError):
    pass


class DimensionUnsupported(GeometryError):
    pass


# norms
class NormError(LpRegionsError):
    pass


class InvalidExponent(NormError):
    pass


class UnsupportedExponent(NormError):
    pass


class ZeroVector(NormError):
    pass


# model / solver
class ModelError(LpRegionsError):
    pass


class NumericalTrouble(LpRegionsError):
    pass


class Infeasible(LpRegionsError):
    pass


class InvalidPath(LpRegionsError):
    pass


class TooManyPaths(LpRegionsError):
    pass


# formulations
class DisconnectedGraph(LpRegionsError):
    pass


class MissingFaceNorm(LpRegionsError):
    pass


# verification
class VerificationFailed(LpRegionsError):
    """A property that holds mathematically failed numerically."""
