"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured size cap."""


class InvariantError(AssertionError):
    """An internal structural invariant failed; indicates a classification bug."""


# Cells of a dense matrix or enumerated (polynomial, point) pairs.
DEFAULT_MAX_CELLS = 50_000_000
# Ground-set size limit for exhaustive subset enumeration (2**22 subsets).
DEFAULT_MAX_SUBSET_POINTS = 22


def check_cells(cells: int, cap: int | None, what: str) -> None:
    cap = DEFAULT_MAX_CELLS if cap is None else cap
    if cells > cap:
        raise ResourceLimitError(f"{what} needs {cells} cells, cap is {cap}")
