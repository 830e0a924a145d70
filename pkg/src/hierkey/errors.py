"""Exception types shared across the toolkit.

Everything derives from HierKeyError so callers (and the CLI) can catch
domain failures in one place and leave genuine bugs to surface as-is.
"""


class HierKeyError(Exception):
    """Base class for all domain errors raised by hierkey."""


# --- modular / polynomial algebra ---

class InvalidModulus(HierKeyError):
    """Modulus is not an odd prime >= 3 (or exceeds the supported range)."""


class NotInvertible(HierKeyError):
    """Attempted to invert a residue that has no inverse (zero mod p)."""


class DuplicateRoot(HierKeyError):
    """Two linear factors coincide; the filter construction collided."""


class ModulusMismatch(HierKeyError):
    """Operands live over different prime moduli."""


class DegreeTooLow(HierKeyError):
    """Polynomial degree is too small for the requested operation."""


class ScanBudgetExceeded(HierKeyError):
    """Exhaustive root scan refused: modulus above the configured bound."""


# --- radix shifting ---

class OutOfRange(HierKeyError):
    """Value lies outside [0, p) for the given radix context."""


# --- elliptic curve ---

class InvalidCurve(HierKeyError):
    """Curve parameters fail validation (discriminant, base point, order)."""


class OffCurve(HierKeyError):
    """A supposed curve point does not satisfy the curve equation."""


class InfinityPoint(HierKeyError):
    """The point at infinity has no affine coordinates to map."""


class DegenerateEphemeral(HierKeyError):
    """Key transport hit the point at infinity; caller must pick a new nonce."""


# --- hierarchy ---

class UnknownClass(HierKeyError):
    """Referenced security class id is not in the hierarchy."""


class DuplicateId(HierKeyError):
    """Security class id already exists."""


class CycleCreated(HierKeyError):
    """Requested edge set would make the hierarchy cyclic."""


# --- schemes / dynamics ---

class UnknownScheme(HierKeyError):
    """Scheme tag is not one of: akl, wu, jw, linhsu, m1, m2."""


class NotPredecessor(HierKeyError):
    """Viewer does not dominate the target class."""


class RootCollision(HierKeyError):
    """Could not find distinct filter roots within the retry budget."""


class NotShiftable(HierKeyError):
    """Key fails the digit conditions required for cyclic-shift masking."""


class NotARoot(HierKeyError):
    """Exact synthetic division failed: the claimed root leaves a remainder."""


# --- attacks ---

class DegreeMismatch(HierKeyError):
    """Filter pair does not have the degree relation the attack requires."""


# --- board persistence ---

class ParseError(HierKeyError):
    """Persisted board or secret store is malformed."""


class VersionMismatch(HierKeyError):
    """Persisted file carries an unsupported format version."""


class SchemeMismatch(HierKeyError):
    """Boards being compared were produced under different schemes or moduli."""
