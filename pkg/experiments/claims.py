"""
Claim registry

A claim names one bound of the calculus together with the verification
procedure that holds it against simulated paths. Configs and the explain
command refer to claims by identifier; a claim's options come from the
config entry (λ, ε, g, scheme, ...).
"""
from dataclasses import dataclass, replace
from typing import Callable
import logging

from estimators.montecarlo import mc_expectation
from estimators.schemes import IntervalScheme
from estimators.statistics import fluctuation_statistic
from moduli.bounds import _Bound
from moduli.calculus import (
    crossing_bound, crossing_partition, crossing_partition_bound, learnable_from_fluctuations, metastable_rate,
    ville_boundedness,
)
from moduli.counterfunctions import Counterfunction, iteration_count
from moduli.exceptions import CertificateError, DivergenceHorizonError, InvalidParameterError
from moduli.leaves import constant_boundedness, constant_liminf, constant_rate
from moduli.provenance import Provenance
from moduli.robbins_monro import (
    MetastableBound, liminf_modulus, liminf_transfer, metastable_bound, solution_search_index,
)
from moduli.robbins_siegmund import (
    nonstochastic_rs, rs_bsum_boundedness, rs_learnable_closed, rs_learnable_pipeline, rs_x_boundedness,
    supermartingale_learnable,
)
from processes.schedules import CONSTANT
from verify import procedures

logger = logging.getLogger(__name__)

DYADIC = 'dyadic'
SLIDING = 'sliding'
GREEDY = 'greedy'


@dataclass(frozen=True)
class ScalarBound(_Bound):
    """A plain number together with the tree that produced it"""

    value: float
    provenance: Provenance


@dataclass(frozen=True)
class UnresolvedBound(_Bound):
    """A bound whose construction stopped short; verification reports it inconclusive"""

    reason: str
    provenance: Provenance


@dataclass(frozen=True)
class RunSettings:
    n_paths: int
    horizon: int
    seed: int
    workers: int = None


def parse_scheme(text):
    """'dyadic', 'greedy' or 'sliding:W' -> (kind, width)"""
    kind, _, width = str(text).partition(':')
    if kind in (DYADIC, GREEDY) and not width:
        return kind, None
    if kind == SLIDING:
        try:
            width = int(width)
        except ValueError:
            width = 0
        if width >= 1:
            return kind, width
    raise InvalidParameterError('scheme', text, "'dyadic', 'greedy' or 'sliding:W' with a positive width W")


def build_scheme(text, family, options, run):
    kind, width = parse_scheme(text)
    if kind == DYADIC:
        return IntervalScheme.dyadic(run.horizon)
    if kind == SLIDING:
        return IntervalScheme.sliding(width, run.horizon)
    # the pilot run uses its own seed so windows are not fitted to the verified paths
    return IntervalScheme.greedy_pilot(
        family, options['eps'], options['lam'], run.n_paths, run.horizon, run.seed + 1,
    )


def _certificates(family):
    return family.K, family.rho(), family.sigma()


def _counterfunction(options):
    g = options['g']
    return g if isinstance(g, Counterfunction) else Counterfunction.parse(g)


def _liminf_v(family, options=None):
    K, rho, sigma = _certificates(family)
    return liminf_modulus(rs_bsum_boundedness(K, rho, sigma), family.rate_of_divergence())


def _liminf_x(family, options=None):
    K, rho, sigma = _certificates(family)
    return liminf_transfer(_liminf_v(family), family.delta(), rs_x_boundedness(K, rho, sigma))


def _gamma(family, options):
    K, rho, sigma = _certificates(family)
    phi, Psi = rs_learnable_pipeline(K, rho, sigma), _liminf_x(family)
    try:
        return metastable_bound(options['lam'], options['eps'], options['g'], phi, Psi, cap=options.get('cap'))
    except DivergenceHorizonError as exc:
        logger.warning(f"Metastable bound for {family.kind} left unresolved: {exc}")
        g = _counterfunction(options)
        return UnresolvedBound(
            reason=str(exc),
            provenance=Provenance(
                'rm_metastable',
                {'lam': options['lam'], 'eps': options['eps'], 'g': g.describe()},
                children=(('phi', phi.provenance), ('Psi', Psi.provenance)),
                notes=(str(exc),),
            ),
        ).labelled('Γ')


def _supermartingale_metastable(family, options):
    lam, eps = options['lam'], options['eps']
    g = _counterfunction(options)
    if options.get('cap') is not None:
        g = g.with_cap(options['cap'])
    phi = supermartingale_learnable(family.K)
    return MetastableBound(
        value=metastable_rate(phi, g, eps, lam=lam),
        counterfunction=g,
        iterations=iteration_count(phi(lam, eps)),
        provenance=Provenance(
            'metastable_rate', {'lam': lam, 'eps': eps, 'g': g.describe(), 'cap': g.cap},
            children=(('phi', phi.provenance),),
        ),
    ).labelled('Φ')


def _partition(family, options):
    K, lam, eps = family.K, options['lam'], options['eps']
    return ScalarBound(
        value=float(crossing_partition_bound(K, lam, eps)),
        provenance=Provenance(
            'crossing_partition_bound',
            {'K': K, 'lam': lam, 'eps': eps, 'p': len(crossing_partition(K, lam, eps)) - 1},
        ),
    )


def _fluctuation_rate(family, options, run):
    """E[J_ε]/λ with E[J_ε] taken from the upper end of a pilot estimate"""
    eps = options['eps']
    pilot = mc_expectation(
        family, fluctuation_statistic(eps), run.n_paths, run.horizon, run.seed + 1, run.workers,
    )
    rate = learnable_from_fluctuations([[eps, pilot.ci_high]])
    note = f"E[J_{eps!r}] ≤ {pilot.ci_high!r} from {run.n_paths} pilot paths, seed {run.seed + 1}"
    logger.info(f"{family.kind}: {note}")
    return replace(rate, provenance=replace(rate.provenance, notes=(note,)))


def _crossing(family, options):
    M, p = options['M'], options['p']
    return ScalarBound(
        value=crossing_bound(M, p, family.initial_mean),
        provenance=Provenance('crossing_bound', {'M': M, 'p': p, 'initial_mean': family.initial_mean}),
    )


def _solution_bound(family, options):
    if family.steps is None or family.steps.kind != CONSTANT:
        raise CertificateError(f"{family.kind} needs constant step sizes for the solution search bound")
    K, rho, sigma = _certificates(family)
    u = family.steps.params['u']
    delta = family.delta()
    N = solution_search_index(K, rho, sigma, u, delta, options['lam'], options['eps'])
    return ScalarBound(
        value=N,
        provenance=Provenance(
            'solution_search_index',
            {'K': K, 'u': u, 'lam': options['lam'], 'eps': options['eps']},
            children=(('rho', rho.provenance), ('sigma', sigma.provenance), ('delta', delta.provenance)),
        ),
    )


def _deterministic(family, options):
    rate, _ = nonstochastic_rs(family.K, family.L(), family.M())
    return rate


def _scalar_override(family, value):
    return ScalarBound(value=value, provenance=Provenance('override', {'value': value}))


def _deterministic_override(family, value):
    """The override replaces L, the bound on Π(1+α_i)"""
    rate, _ = nonstochastic_rs(family.K, value, family.M())
    return rate


# checkers: (family, bound, options, run, claim) -> VerificationReport

def _check_boundedness(track):
    def check(family, bound, options, run, claim):
        return procedures.verify_boundedness(
            family, bound, options['lam'], run.n_paths, run.horizon, run.seed, run.workers,
            claim=claim, track=track,
        )
    return check


def _check_learnable(family, bound, options, run, claim):
    scheme = build_scheme(options['scheme'], family, options, run)
    return procedures.verify_learnable(
        family, bound, options['lam'], options['eps'], scheme, run.n_paths, run.horizon, run.seed, run.workers,
        claim=claim,
    )


def _check_crossing(family, bound, options, run, claim):
    return procedures.verify_crossing_inequality(
        family, options['M'], options['p'], run.n_paths, run.horizon, run.seed, run.workers,
        claim=claim, bound=bound.value,
    )


def _check_partition(family, bound, options, run, claim):
    scheme = build_scheme(options['scheme'], family, options, run)
    return procedures.verify_partition_sum(
        family, family.K, options['lam'], options['eps'], scheme, run.n_paths, run.horizon, run.seed,
        run.workers, claim=claim, bound=bound.value,
    )


def _check_compensator(family, bound, options, run, claim):
    return procedures.verify_compensator(
        family, bound, options['lam'], run.n_paths, run.horizon, run.seed, run.workers, claim=claim,
    )


def _check_bsum(family, bound, options, run, claim):
    return procedures.verify_bsum(
        family, bound, options['lam'], run.n_paths, run.horizon, run.seed, run.workers, claim=claim,
    )


def _check_liminf(track):
    def check(family, bound, options, run, claim):
        return procedures.verify_liminf(
            family, bound, options['lam'], options['eps'], options['start_n'], run.n_paths, run.seed,
            horizon=options.get('horizon'), workers=run.workers, claim=claim, track=track,
        )
    return check


def _check_metastable(oscillation=False):
    def check(family, bound, options, run, claim):
        if isinstance(bound, UnresolvedBound):
            return procedures.unresolved(
                claim, options['lam'], run.n_paths, run.horizon, run.seed, bound.reason,
                eps=options['eps'], modulus=bound.to_dict(),
            )
        value = bound.value if isinstance(bound, ScalarBound) else bound
        return procedures.verify_metastable(
            family, value, options['lam'], options['eps'], _counterfunction(options), run.n_paths, run.seed,
            horizon=options.get('horizon'), workers=run.workers, claim=claim, oscillation=oscillation,
        )
    return check


def _check_solution_search(family, bound, options, run, claim):
    return procedures.verify_solution_search(
        family, int(bound.value), options['lam'], options['eps'], run.n_paths, run.seed,
        horizon=options.get('horizon'), workers=run.workers, claim=claim,
    )


def _check_deterministic(family, bound, options, run, claim):
    params = bound.provenance.params
    return procedures.verify_nonstochastic(
        family, params['K'], params['L'], params['M'], options['eps'], run.horizon, claim=claim,
    )


@dataclass(frozen=True)
class Claim:
    identifier: str
    description: str
    builder: Callable
    checker: Callable
    override: Callable
    requires: str = None
    pilot: bool = False

    def build(self, family, options, run=None):
        """The bound for ``family``, or the constant the config overrides it with

        A pilot claim estimates part of its bound from simulated paths and
        needs the run settings to do so.
        """
        if self.requires and not getattr(family.hypotheses, self.requires):
            raise CertificateError(f"{self.identifier} needs a family certifying {self.requires}, which {family.kind} does not")
        if options.get('override') is not None:
            logger.warning(f"{self.identifier}: bound overridden with {options['override']!r}")
            return self.override(family, options['override'])
        if self.pilot:
            if run is None:
                raise InvalidParameterError('run', run, f"run settings for the {self.identifier} pilot")
            return self.builder(family, options, run)
        return self.builder(family, options)

    def verify(self, family, options, run, bound=None):
        if bound is None:
            bound = self.build(family, options, run)
        logger.info(f"Verifying {self.identifier} on {family.kind} ({run.n_paths} paths, seed {run.seed})")
        return self.checker(family, bound, options, run, self.identifier)


CLAIMS = {
    claim.identifier: claim
    for claim in (
        Claim(
            'ville.boundedness', "P(sup U ≥ K/λ) < λ for a nonnegative supermartingale",
            lambda family, options: ville_boundedness(family.K), _check_boundedness('x'),
            lambda family, value: constant_boundedness(value), requires='is_supermartingale',
        ),
        Claim(
            'supermartingale.learnable', "at most c(K/λε)² windows oscillate by ε with probability ≥ λ",
            lambda family, options: supermartingale_learnable(family.K), _check_learnable,
            lambda family, value: constant_rate(value), requires='is_supermartingale',
        ),
        Claim(
            'crossing.inequality', "E[C[a, b]] ≤ 2p·E[U₀]/M + 1 on each interval of the partition of [0, M]",
            _crossing, _check_crossing, _scalar_override, requires='is_supermartingale',
        ),
        Claim(
            'supermartingale.metastable', "metastable rate g̃^(⌈c(K/λε)²⌉)(0) of a nonnegative supermartingale",
            _supermartingale_metastable, _check_metastable(oscillation=True), _scalar_override,
            requires='is_supermartingale',
        ),
        Claim(
            'crossing.partition', "Σ P(oscillation by ε from below 2K/λ) ≤ (p+1)(pλ+1) over disjoint windows",
            _partition, _check_partition, _scalar_override, requires='is_supermartingale',
        ),
        Claim(
            'fluctuations.learnable', "at most E[J_ε]/λ windows oscillate by ε with probability ≥ λ",
            _fluctuation_rate, _check_learnable, lambda family, value: constant_rate(value), pilot=True,
        ),
        Claim(
            'rs.phi', "learnable rate of X built by the calculus",
            lambda family, options: rs_learnable_pipeline(*_certificates(family)), _check_learnable,
            lambda family, value: constant_rate(value), requires='is_rs',
        ),
        Claim(
            'rs.phi_closed', "closed-form learnable rate c̄(ρ(λ/8)(K+σ(λ/16))/(λε))²",
            lambda family, options: rs_learnable_closed(*_certificates(family)), _check_learnable,
            lambda family, value: constant_rate(value), requires='is_rs',
        ),
        Claim(
            'rs.chi', "modulus of uniform boundedness for Σ B_i",
            lambda family, options: rs_bsum_boundedness(*_certificates(family)), _check_bsum,
            lambda family, value: constant_boundedness(value), requires='is_rs',
        ),
        Claim(
            'rs.tau', "modulus of uniform boundedness for X",
            lambda family, options: rs_x_boundedness(*_certificates(family)), _check_boundedness('x'),
            lambda family, value: constant_boundedness(value), requires='is_rs',
        ),
        Claim(
            'rs.sigma', "P(the discounted Σ C_i passes σ(λ) within the horizon) < λ",
            lambda family, options: family.sigma(), _check_compensator,
            lambda family, value: constant_boundedness(value), requires='is_rs',
        ),
        Claim(
            'rm.liminf_v', "liminf-modulus Φ for V from χ and the rate of divergence",
            _liminf_v, _check_liminf('v'),
            lambda family, value: constant_liminf(value), requires='is_rm',
        ),
        Claim(
            'rm.psi', "liminf-modulus Ψ for X through the drift modulus",
            _liminf_x, _check_liminf('x'),
            lambda family, value: constant_liminf(value), requires='is_rm',
        ),
        Claim(
            'rm.gamma', "metastable rate Γ(λ, ε, g) of X",
            _gamma, _check_metastable(), _scalar_override, requires='is_rm',
        ),
        Claim(
            'rm.solution_bound', "some k ≤ N has X_k < ε with probability > 1−λ (constant steps)",
            _solution_bound, _check_solution_search, _scalar_override, requires='is_rm',
        ),
        Claim(
            'deterministic.rs', "J_ε ≤ 8L(K+M)/ε and Σβ < L(K+M) on the deterministic trace",
            _deterministic, _check_deterministic, _deterministic_override, requires='is_deterministic',
        ),
    )
}


def get_claim(identifier):
    try:
        return CLAIMS[identifier]
    except KeyError:
        raise InvalidParameterError('claim', identifier, f"one of {', '.join(CLAIMS)}") from None
