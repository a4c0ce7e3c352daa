"""
Verification reports and the verdict rule
"""
from dataclasses import dataclass, field
import logging

from moduli.counterfunctions import ExtendedIndex

logger = logging.getLogger(__name__)

PASS = 'pass'
FAIL = 'fail'
INCONCLUSIVE = 'inconclusive'

VERDICT_CHOICES = [
    (PASS, 'Pass'),
    (FAIL, 'Fail'),
    (INCONCLUSIVE, 'Inconclusive'),
]

CSV_COLUMNS = ('claim', 'bound', 'point', 'ci_low', 'ci_high', 'n_paths', 'horizon', 'seed', 'verdict')


def verdict_for(estimate, bound, strict=True):
    """pass iff ci_high < bound (≤ when not strict); fail iff ci_low > bound"""
    if estimate.ci_high < bound or (not strict and estimate.ci_high <= bound):
        return PASS
    if estimate.ci_low > bound:
        return FAIL
    return INCONCLUSIVE


def combine_verdicts(verdicts):
    """fail if any part fails, pass if every part passes"""
    verdicts = list(verdicts)
    if FAIL in verdicts:
        return FAIL
    if verdicts and all(verdict == PASS for verdict in verdicts):
        return PASS
    return INCONCLUSIVE


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, ExtendedIndex):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of checking one claim: the bound the estimate was held against,
    the verdict, and everything needed to rerun the check

    What ``bound`` holds depends on what the estimate measures:

    - a probability (boundedness, B-sum, compensator, liminf, metastable
      and solution search claims): the confidence λ the probability must stay below,
      with the modulus value (level, window or index) in ``details``
    - a count of bad windows (learnable claims): φ(λ, ε)
    - an expected crossing count: 2p·E[U₀]/M + 1
    - a sum of window probabilities (partition claims): (p+1)(pλ+1)
    - the fluctuation count of a deterministic trace: 8L(K+M)/ε
    """

    claim: str
    bound: object
    estimate: object
    verdict: str
    repro: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        logger.info(f"{self.claim}: {self.verdict} (bound {_cell(self.bound)})")

    @property
    def passed(self):
        return self.verdict == PASS

    @property
    def failed(self):
        return self.verdict == FAIL

    def to_dict(self):
        from .serializers import VerificationReportSerializer
        return VerificationReportSerializer(self).data

    def to_csv_row(self):
        """Cells in CSV_COLUMNS order"""
        estimate = self.estimate
        return [
            self.claim,
            _cell(self.bound),
            _cell(estimate.point if estimate else None),
            _cell(estimate.ci_low if estimate else None),
            _cell(estimate.ci_high if estimate else None),
            _cell(self.repro.get('n_paths')),
            _cell(self.repro.get('horizon')),
            _cell(self.repro.get('seed')),
            self.verdict,
        ]
