"""Jump estimators as plain ``Spectrum1D -> JumpSet`` callables."""

from __future__ import annotations

from .concentration import ConcentrationFactor, DetectionConfig, detect
from .prony import PronyConfig, prony_estimate

ESTIMATORS = ("prony", "concentration")


class Estimator:
    """Callable wrapper carrying a name for tables."""

    def __init__(self, name, fn):
        self.name = name
        self._fn = fn

    def __call__(self, spec1d):
        return self._fn(spec1d)

    def __repr__(self):
        return f"Estimator({self.name!r})"


def make_estimator(kind, prony=None, factor="trigonometric", detection=None, alpha=None, poly_order=1):
    """Build a named estimator.

    Parameters
    ----------
    kind : {"prony", "concentration"}
    prony : PronyConfig, optional
        Used when ``kind == "prony"``.
    factor : str
        Concentration factor family.
    detection : DetectionConfig, optional
    alpha, poly_order
        Factor parameters; ``alpha=None`` takes the family default.
    """
    if kind in ("prony",):
        cfg = prony or PronyConfig()
        return Estimator("prony", lambda c: prony_estimate(c, cfg))
    if kind in ("concentration", "conc"):
        det = detection or DetectionConfig()

        def run(c):
            fac = ConcentrationFactor.default(factor, c.N)
            if alpha is not None or poly_order != 1:
                fac = ConcentrationFactor(fac.family, c.N, alpha or fac.alpha, poly_order)
            return detect(c, fac, det)

        return Estimator("concentration", run)
    raise ValueError(f"unknown estimator {kind!r}; choose from {ESTIMATORS}")
