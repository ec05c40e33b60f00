"""Exception types shared across the package.

Every error raised on a decision path derives from AnglekitError so the CLI
can map structured failures to exit code 2 uniformly.
"""


class AnglekitError(Exception):
    pass


class MalformedIndex(AnglekitError):
    """A tetrahedron, face, vertex or edge index is out of range or a vertex
    bijection is not a bijection onto the target face."""


class DuplicateGluing(AnglekitError):
    """The same (tet, face) side appears in more than one gluing."""


class IdealHyperidealMismatch(AnglekitError):
    """A gluing bijection pairs an ideal vertex with a hyperideal one."""


class DimensionMismatch(AnglekitError):
    """A coordinate or assignment vector has the wrong length."""


class DisconnectedDualGraph(AnglekitError):
    """The face-gluing dual graph of a decomposition is not connected."""


class ApexOnFace(AnglekitError):
    """A fan apex was requested for a face that does not contain it."""


class ConeVertexOnBase(AnglekitError):
    """cone_polyhedron was asked to fan a base face containing the cone vertex."""


class NotAFan(AnglekitError):
    """A pillow side triangulation is not a fan from the recorded apex."""


class SizeCap(AnglekitError):
    """An enumeration would exceed the configured size cap."""


class ZeroValence(AnglekitError):
    """A disc coordinate references an edge class of valence zero."""


class NegativeQuad(AnglekitError):
    """integerize was given a solution with a negative quad coordinate."""


class MissingSemiAngle(AnglekitError):
    """An operation requiring a semi-angle structure was given none."""


class OpenFace(AnglekitError):
    """A closed-up complex was requested but some internal face is unglued."""


class TriSyntaxError(AnglekitError):
    """A .tri or .dec file is malformed; carries line information."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class UnknownDirective(TriSyntaxError):
    pass


class BadPermutation(TriSyntaxError):
    """A gluing permutation does not map a face onto the target face."""


class PreconditionViolated(AnglekitError):
    """An operation's documented precondition failed; message says which."""


class CertificateUnavailable(AnglekitError):
    """No normalized infeasibility certificate could be extracted."""
