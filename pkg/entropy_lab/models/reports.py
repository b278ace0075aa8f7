"""Evaluated functionals shared by the Euclidean and spherical modules."""

from dataclasses import dataclass
from typing import Any

from ..core.utils import build_record
from .params import Params


@dataclass(slots=True, frozen=True)
class FunctionalReport:
    """Lp norm, entropy, p-Dirichlet energy and entropy deficit of one profile.

    ``deficit`` is None when it is undefined (non-normalized input or zero
    Dirichlet energy).
    """

    lp_mass: float
    entropy: float
    dirichlet: float
    deficit: float | None
    params: Params
    provenance: str

    def to_record(self, **extra: Any) -> dict[str, Any]:
        return build_record(
            n=self.params.n,
            p=self.params.p,
            q=self.params.q,
            lp_mass=self.lp_mass,
            entropy=self.entropy,
            dirichlet=self.dirichlet,
            deficit=self.deficit,
            profile=self.provenance,
            **extra,
        )
