"""
Regularity of the free boundary on doubly symmetric domains: one closed
component and a gradient bounded away from zero.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..exceptions import InvalidInputError
from ..geometry import DomainSpec, rasterize_domain
from ..optimizer.models import OptimalPair
from .levelset import gradient_on_contour

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SymmetryVerdict:
    passed: bool
    n_components: int
    closed: bool
    min_grad: float
    threshold: float

    @property
    def reason(self) -> str:
        if self.passed:
            return "ok"
        if self.n_components != 1 or not self.closed:
            return f"{self.n_components} component(s), closed={self.closed}"
        return f"min |grad u| {self.min_grad:.4g} below {self.threshold:.4g}"


def symmetry_singularity_check(
    pair: OptimalPair, spec: Optional[DomainSpec] = None, tau: Optional[float] = None
) -> SymmetryVerdict:
    """
    Pass iff ``{u = c}`` is a single closed polyline with ``min |grad u| >= tau * max |grad u|``.

    ``spec`` must declare two symmetry axes and rasterize to the pair's own mask.
    """
    spec = spec or pair.spec
    if spec.symmetry_axes != 2:
        raise InvalidInputError(f"{spec.shape} declares {spec.symmetry_axes} symmetry axes, need 2")
    if not np.array_equal(rasterize_domain(spec, pair.grid).inside, pair.omega.inside):
        raise InvalidInputError("pair was solved on a different domain mask")

    result = gradient_on_contour(pair.u, pair.c, tau)
    polylines = result.contour.polylines
    closed = len(polylines) == 1 and polylines[0].closed
    verdict = SymmetryVerdict(
        passed=closed and result.min_grad >= result.threshold,
        n_components=len(polylines),
        closed=closed,
        min_grad=result.min_grad,
        threshold=result.threshold,
    )
    log = logger.info if verdict.passed else logger.warning
    log("symmetric-domain check on %s: %s", spec.shape, verdict.reason)
    return verdict
