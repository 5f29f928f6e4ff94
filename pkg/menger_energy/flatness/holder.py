"""Empirical Hölder exponent of DF_x over a graph patch."""
from dataclasses import dataclass
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import linregress

from menger_energy.errors import InsufficientPairs
from menger_energy.flatness.graph import GraphPatch
import menger_energy.metadata.flatness as metadata

logger = logging.getLogger(__name__)

# differences at or below this are numerical zeros
NOISE_FLOOR = 1e-12


@dataclass
class HolderFit:
    exponent: float
    constant: float
    rvalue: float
    stderr: float
    pairs: int
    envelope_exponent: float
    envelope_constant: float
    bins: int

    def to_dict(self) -> Dict:
        return {
            "exponent": self.exponent,
            "constant": self.constant,
            "rvalue": self.rvalue,
            "stderr": self.stderr,
            "pairs": self.pairs,
            "envelope_exponent": self.envelope_exponent,
            "envelope_constant": self.envelope_constant,
            "bins": self.bins,
        }


def _envelope(logs: np.ndarray, log_differences: np.ndarray, bins: int) -> Tuple[List[float], List[float]]:
    """The largest log difference in each of `bins` equal bins of log separation."""
    edges = np.linspace(logs.min(), logs.max() + 1e-12, bins + 1)
    which = np.clip(np.digitize(logs, edges) - 1, 0, bins - 1)
    xs, ys = [], []
    for b in range(bins):
        members = np.flatnonzero(which == b)
        if len(members):
            top = members[np.argmax(log_differences[members])]
            xs.append(float(logs[top]))
            ys.append(float(log_differences[top]))
    return xs, ys


def holder_exponent(
    patch: GraphPatch, bins: int = metadata.HOLDER_BINS, min_separation: Optional[float] = None
) -> HolderFit:
    """Fit ‖DF(w_i) − DF(w_j)‖ ≈ C |w_i − w_j|^α by least squares in log-log coordinates over node pairs.

    Pairs closer than `min_separation` (three resolutions by default) or with a difference at the noise
    floor are dropped; every remaining pair enters the fit. The envelope fit through the largest difference
    in each log-separation bin, the quantity a Hölder bound controls, is reported alongside.
    """
    valid = np.flatnonzero(patch.valid)
    if len(valid) < metadata.HOLDER_MIN_NODES:
        raise InsufficientPairs(f"Need at least {metadata.HOLDER_MIN_NODES} nodes with DF, got {len(valid)}.")
    min_separation = 3 * patch.resolution if min_separation is None else min_separation
    domain = patch.domain[valid]
    derivatives = patch.derivatives[valid]
    i, j = np.triu_indices(len(valid), k=1)
    separations = np.linalg.norm(domain[i] - domain[j], axis=1)
    differences = np.linalg.norm(derivatives[i] - derivatives[j], ord=2, axis=(1, 2))
    keep = (separations >= min_separation) & (differences > NOISE_FLOOR)
    separations, differences = separations[keep], differences[keep]
    if len(separations) < metadata.HOLDER_MIN_BINS:
        raise InsufficientPairs(f"Only {len(separations)} node pairs above separation {min_separation:.3g}.")

    logs, log_differences = np.log(separations), np.log(differences)
    if np.ptp(logs) == 0:
        raise InsufficientPairs(f"All {len(logs)} node pairs share one separation; no slope to fit.")
    fit = linregress(logs, log_differences)
    xs, ys = _envelope(logs, log_differences, bins)
    if len(xs) < metadata.HOLDER_MIN_BINS:
        raise InsufficientPairs(f"Only {len(xs)} populated separation bins.")
    envelope = linregress(xs, ys)
    logger.info(
        "Hölder fit: exponent %.4g over %d pairs, envelope %.4g over %d bins",
        fit.slope,
        len(logs),
        envelope.slope,
        len(xs),
    )
    return HolderFit(
        exponent=float(fit.slope),
        constant=float(np.exp(fit.intercept)),
        rvalue=float(fit.rvalue),
        stderr=float(fit.stderr),
        pairs=int(len(logs)),
        envelope_exponent=float(envelope.slope),
        envelope_constant=float(np.exp(envelope.intercept)),
        bins=len(xs),
    )
