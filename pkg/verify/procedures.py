"""
Verification procedures

Each procedure estimates the probability (or expectation) a theorem bounds
and holds the conservative side of the interval against the bound. Reports
are pass, fail or inconclusive; a saturated bound, a window beyond the
simulated horizon or a rate of divergence past its scan cap never fails.
"""
from itertools import takewhile
import logging

from moduli.bounds import check_accuracy, check_confidence, check_index
from moduli.calculus import crossing_bound, crossing_partition, crossing_partition_bound, uniform_partition
from moduli.counterfunctions import Counterfunction, ExtendedIndex
from moduli.exceptions import DivergenceHorizonError, InvalidParameterError
from moduli.robbins_monro import MetastableBound
from moduli.robbins_siegmund import nonstochastic_rs
from estimators.intervals import Estimate
from estimators.montecarlo import mc_expectation, mc_expectations, mc_probabilities, mc_probability
from estimators.statistics import (
    bad_window_count, compensator_exceeds, count_fluctuations, crossing_statistic, oscillates, reaches,
    stays_at_least, sum_at_least, sup_at_least,
)
from .reports import FAIL, INCONCLUSIVE, PASS, VerificationReport, combine_verdicts, verdict_for

logger = logging.getLogger(__name__)

# horizon simulated when a procedure has to pick one itself
MAX_AUTO_HORIZON = 1 << 16


def _repro(seed, n_paths, horizon, **parameters):
    return {'seed': seed, 'n_paths': n_paths, 'horizon': horizon, 'parameters': parameters}


def _require_track(family, track):
    if track not in family.tracks:
        raise InvalidParameterError('track', track, f"one of the {family.kind} tracks ({', '.join(family.tracks)})")


def _require_horizon(horizon):
    horizon = check_index(horizon, 'horizon')
    if horizon == 0:
        raise InvalidParameterError('horizon', horizon, 'a positive horizon')
    return horizon


def verify_boundedness(family, rho, lam, n_paths, horizon, seed, workers=None, claim='boundedness', track='x'):
    """P(sup_{n ≤ N} |X_n| ≥ ρ(λ)) < λ"""
    lam = check_confidence(lam)
    horizon = _require_horizon(horizon)
    _require_track(family, track)
    level = rho(lam)
    estimate = mc_probability(family, sup_at_least(level, track), n_paths, horizon, seed, workers)
    return VerificationReport(
        claim=claim, bound=lam, estimate=estimate, verdict=verdict_for(estimate, lam),
        repro=_repro(seed, n_paths, horizon, lam=lam, track=track),
        details={'level': level, 'modulus': rho.provenance.to_dict()},
    )


def verify_learnable(family, phi, lam, eps, scheme, n_paths, horizon, seed, workers=None,
                     claim='learnable', track='x'):
    """At most φ(λ, ε) windows of the scheme oscillate by ε with probability ≥ λ

    The estimate is the number of bad windows: point counts windows whose
    estimated probability is ≥ λ, ci_low those certainly bad, ci_high
    those not certainly good. The check passes when that upper count is
    ≤ φ and a certainly good window occurs at an index n ≤ φ.
    """
    lam = check_confidence(lam)
    eps = check_accuracy(eps)
    horizon = _require_horizon(horizon)
    _require_track(family, track)
    windows = scheme.within(horizon)
    if not len(windows):
        raise InvalidParameterError('scheme', scheme.name, f'at least one window within horizon {horizon}')

    bound = phi(lam, eps)
    estimates = mc_probabilities(
        family, [oscillates(window, eps, track) for window in windows], n_paths, horizon, seed, workers,
    )
    count = Estimate(
        point=float(sum(e.point >= lam for e in estimates)),
        ci_low=float(sum(e.ci_low > lam for e in estimates)),
        ci_high=float(sum(e.ci_high >= lam for e in estimates)),
        n_samples=n_paths, method=estimates[0].method,
    )
    good = [n for n, e in enumerate(estimates) if e.ci_high < lam]
    first_good = good[0] if good else None

    if count.ci_low > bound:
        verdict = FAIL
    elif count.ci_high <= bound and first_good is not None and first_good <= bound:
        verdict = PASS
    else:
        verdict = INCONCLUSIVE

    return VerificationReport(
        claim=claim, bound=bound, estimate=count, verdict=verdict,
        repro=_repro(seed, n_paths, horizon, lam=lam, eps=eps, scheme=windows.name, track=track),
        details={
            'scheme': windows.to_dict(),
            'first_good_window': first_good,
            'windows': [
                {'window': list(window), 'point': e.point, 'ci_low': e.ci_low, 'ci_high': e.ci_high}
                for window, e in zip(windows, estimates)
            ],
            'modulus': phi.provenance.to_dict(),
        },
    )


def _inconclusive(claim, bound, repro, note, **details):
    logger.warning(f"{claim}: {note}")
    return VerificationReport(
        claim=claim, bound=bound, estimate=None, verdict=INCONCLUSIVE, repro=repro,
        details={'note': note, **details},
    )


def unresolved(claim, lam, n_paths, horizon, seed, note, **details):
    """Inconclusive report for a claim whose bound could not be built"""
    return _inconclusive(claim, lam, _repro(seed, n_paths, horizon, lam=lam), note, **details)


def verify_liminf(family, Phi, lam, eps, start_n, n_paths, seed, horizon=None, workers=None,
                  claim='liminf', track='v'):
    """P(∀k ∈ [n; n+Φ(λ, ε, n)]: V_k ≥ ε) < λ

    A window reaching past the horizon is checked on its observed part;
    that event contains the full one, so a pass stays sound and a would-be
    fail is reported inconclusive.
    """
    lam = check_confidence(lam)
    eps = check_accuracy(eps)
    start_n = check_index(start_n, 'start_n')
    _require_track(family, track)
    try:
        stop = start_n + Phi(lam, eps, start_n)
    except DivergenceHorizonError as exc:
        return _inconclusive(claim, lam, _repro(seed, n_paths, horizon, lam=lam, eps=eps, n=start_n), str(exc))
    if horizon is None:
        horizon = min(stop, MAX_AUTO_HORIZON)
    horizon = check_index(horizon, 'horizon')
    truncated = stop > horizon
    if start_n > horizon:
        return _inconclusive(
            claim, lam, _repro(seed, n_paths, horizon, lam=lam, eps=eps, n=start_n),
            f"window starts at {start_n}, past horizon {horizon}", required_horizon=stop,
        )
    if truncated:
        logger.warning(f"{claim}: window [{start_n}; {stop}] truncated at horizon {horizon}")

    estimate = mc_probability(family, stays_at_least((start_n, stop), eps, track), n_paths, horizon, seed, workers)
    verdict = verdict_for(estimate, lam)
    if verdict == FAIL and truncated:
        verdict = INCONCLUSIVE
    return VerificationReport(
        claim=claim, bound=lam, estimate=estimate, verdict=verdict,
        repro=_repro(seed, n_paths, horizon, lam=lam, eps=eps, n=start_n, track=track),
        details={
            'window': [start_n, stop], 'truncated': truncated, 'required_horizon': stop,
            'modulus': Phi.provenance.to_dict(),
        },
    )


def _candidates(bound, g):
    """Start indices 0, f̃(0), f̃²(0), … the metastable bound ranges over"""
    if isinstance(bound, MetastableBound):
        return bound.counterfunction.orbit(0, limit=bound.iterations + 1), bound.value
    value = bound if isinstance(bound, ExtendedIndex) else ExtendedIndex(int(bound))
    limit = None if value.saturated else value.value
    orbit = g.orbit(0)
    if limit is not None:
        orbit = takewhile(lambda n: n <= limit, orbit)
    return orbit, value


def verify_metastable(family, bound, lam, eps, g, n_paths, seed, horizon=None, workers=None,
                      claim='metastable', track='x', oscillation=False):
    """Some n ≤ Γ among the scanned iterates has P(∃k ∈ [n; n+g(n)]: X_k ≥ ε) < λ

    With ``oscillation`` the window event is ∃i, j ∈ [n; n+g(n)]: |X_i − X_j| ≥ ε,
    the metastable form of a learnable rate.
    """
    lam = check_confidence(lam)
    eps = check_accuracy(eps)
    _require_track(family, track)
    if not isinstance(g, Counterfunction):
        g = Counterfunction.parse(g)
    candidates, value = _candidates(bound, g)
    if horizon is None:
        horizon = MAX_AUTO_HORIZON if value.saturated else min(max(value.value + g(value.value), 1), MAX_AUTO_HORIZON)
    horizon = _require_horizon(horizon)

    windows = []
    exhausted = True
    try:
        for n in candidates:
            stop = n + g(n)
            if stop > horizon:
                exhausted = False
                break
            windows.append((n, stop))
    except DivergenceHorizonError as exc:
        logger.warning(f"{claim}: candidate scan stopped: {exc}")
        exhausted = False
    repro = _repro(seed, n_paths, horizon, lam=lam, eps=eps, g=g.describe(), track=track, oscillation=oscillation)
    if not windows:
        return _inconclusive(claim, lam, repro, f"no window [n; n+g(n)] fits horizon {horizon}", bound=str(value))

    event = oscillates if oscillation else reaches
    estimates = mc_probabilities(family, [event(w, eps, track) for w in windows], n_paths, horizon, seed, workers)
    good = [i for i, e in enumerate(estimates) if e.ci_high < lam]
    if good:
        verdict, chosen = PASS, good[0]
    else:
        chosen = min(range(len(estimates)), key=lambda i: estimates[i].ci_high)
        certainly_bad = all(e.ci_low > lam for e in estimates)
        verdict = FAIL if certainly_bad and exhausted and not value.saturated else INCONCLUSIVE
    if value.saturated:
        logger.warning(f"{claim}: bound {value} is saturated")

    return VerificationReport(
        claim=claim, bound=lam, estimate=estimates[chosen], verdict=verdict, repro=repro,
        details={
            'bound': str(value), 'saturated': value.saturated, 'window': list(windows[chosen]),
            'scanned': [list(w) for w in windows], 'exhausted': exhausted,
        },
    )


def verify_crossing_inequality(family, M, p, n_paths, horizon, seed, workers=None, claim='crossing', bound=None):
    """E[C_N[a, b]] ≤ 2p·E[U₀]/M + 1 on each of the p intervals partitioning [0, M]

    ``bound`` replaces the right-hand side when given.
    """
    if not family.hypotheses.is_supermartingale:
        raise InvalidParameterError('family', family.kind, 'a certified nonnegative supermartingale')
    horizon = _require_horizon(horizon)
    intervals = uniform_partition(M, p)
    if bound is None:
        bound = crossing_bound(M, p, family.initial_mean)
    estimates = mc_expectations(
        family, [crossing_statistic(a, b) for a, b in intervals], n_paths, horizon, seed, workers,
    )
    verdict = combine_verdicts(verdict_for(e, bound, strict=False) for e in estimates)
    worst = max(range(len(estimates)), key=lambda i: estimates[i].ci_high)
    return VerificationReport(
        claim=claim, bound=bound, estimate=estimates[worst], verdict=verdict,
        repro=_repro(seed, n_paths, horizon, M=M, p=p),
        details={
            'intervals': [
                {'interval': [a, b], 'point': e.point, 'ci_low': e.ci_low, 'ci_high': e.ci_high}
                for (a, b), e in zip(intervals, estimates)
            ],
            'worst_interval': list(intervals[worst]),
        },
    )


def verify_partition_sum(family, K, lam, eps, scheme, n_paths, horizon, seed, workers=None,
                         claim='crossing_partition', track='x', bound=None):
    """Σ_i P(Q_i) ≤ (p+1)(pλ+1) over the windows of the scheme

    Q_i is the event that X oscillates by ε in window i after starting it
    below 2K/λ. Each Q_i forces a crossing of one of the p+1 intervals of
    ``crossing_partition(K, λ, ε)``, which is where the bound comes from.
    ``bound`` replaces it when given.
    """
    if not family.hypotheses.is_supermartingale:
        raise InvalidParameterError('family', family.kind, 'a certified nonnegative supermartingale')
    lam = check_confidence(lam)
    eps = check_accuracy(eps)
    horizon = _require_horizon(horizon)
    _require_track(family, track)
    windows = scheme.within(horizon)
    if not len(windows):
        raise InvalidParameterError('scheme', scheme.name, f'at least one window within horizon {horizon}')
    intervals = crossing_partition(K, lam, eps)
    if bound is None:
        bound = crossing_partition_bound(K, lam, eps)
    top = 2 * K / lam

    estimate = mc_expectation(
        family, bad_window_count(windows, eps, top, track), n_paths, horizon, seed, workers,
        support=(0, len(windows)),
    )
    return VerificationReport(
        claim=claim, bound=bound, estimate=estimate, verdict=verdict_for(estimate, bound, strict=False),
        repro=_repro(seed, n_paths, horizon, K=K, lam=lam, eps=eps, scheme=windows.name, track=track),
        details={
            'p': len(intervals) - 1, 'width': intervals[0][1], 'top': top,
            'scheme': windows.to_dict(),
        },
    )


def verify_bsum(family, chi, lam, n_paths, horizon, seed, workers=None, claim='bsum'):
    """P(Σ_{i<N} B_i ≥ χ(λ)) < λ"""
    lam = check_confidence(lam)
    horizon = _require_horizon(horizon)
    _require_track(family, 'b')
    level = chi(lam)
    estimate = mc_probability(family, sum_at_least(level, 'b'), n_paths, horizon, seed, workers)
    return VerificationReport(
        claim=claim, bound=lam, estimate=estimate, verdict=verdict_for(estimate, lam),
        repro=_repro(seed, n_paths, horizon, lam=lam),
        details={'level': level, 'modulus': chi.provenance.to_dict()},
    )


def verify_compensator(family, sigma, lam, n_paths, horizon, seed, workers=None, claim='compensator'):
    """P(T_σ(λ) ≤ N) < λ, T_x the first n with Σ_{i≤n} C_i/Π_{j≤i}(1+A_j) > x"""
    lam = check_confidence(lam)
    horizon = _require_horizon(horizon)
    _require_track(family, 'c')
    level = sigma(lam)
    estimate = mc_probability(family, compensator_exceeds(level), n_paths, horizon, seed, workers)
    return VerificationReport(
        claim=claim, bound=lam, estimate=estimate, verdict=verdict_for(estimate, lam),
        repro=_repro(seed, n_paths, horizon, lam=lam),
        details={'level': level, 'modulus': sigma.provenance.to_dict()},
    )


def verify_nonstochastic(family, K, L, M, eps, horizon, claim='deterministic'):
    """J_ε ≤ 8L(K+M)/ε and Σβ < L(K+M) on the single deterministic trace"""
    horizon = _require_horizon(horizon)
    rate, beta_bound = nonstochastic_rs(K, L, M)
    limit = rate(eps)
    trace = family.sample(0, horizon)
    fluctuations = count_fluctuations(trace, eps)
    beta_sum = family.beta_sum(horizon)
    estimate = Estimate.exact(fluctuations)
    verdict = combine_verdicts([
        verdict_for(estimate, limit, strict=False),
        PASS if beta_sum < beta_bound else FAIL,
    ])
    return VerificationReport(
        claim=claim, bound=limit, estimate=estimate, verdict=verdict,
        repro=_repro(0, 1, horizon, K=K, L=L, M=M, eps=eps),
        details={
            'beta_sum': beta_sum, 'beta_bound': beta_bound,
            'clamped': family.clamp_events(horizon), 'modulus': rate.provenance.to_dict(),
        },
    )


def verify_solution_search(family, N, lam, eps, n_paths, seed, horizon=None, workers=None,
                           claim='solution_search', track='x'):
    """P(∃k ≤ N: X_k < ε) > 1 − λ, checked through P(∀k ≤ N: X_k ≥ ε) < λ"""
    lam = check_confidence(lam)
    if not eps > 0:
        raise InvalidParameterError('eps', eps, 'a positive real')
    N = check_index(N, 'N')
    _require_track(family, track)
    if horizon is None:
        horizon = min(N, MAX_AUTO_HORIZON)
    horizon = check_index(horizon, 'horizon')
    truncated = N > horizon
    estimate = mc_probability(family, stays_at_least((0, N), eps, track), n_paths, horizon, seed, workers)
    verdict = verdict_for(estimate, lam)
    if verdict == FAIL and truncated:
        verdict = INCONCLUSIVE
    return VerificationReport(
        claim=claim, bound=lam, estimate=estimate, verdict=verdict,
        repro=_repro(seed, n_paths, horizon, N=N, lam=lam, eps=eps),
        details={'N': N, 'truncated': truncated, 'solution_probability': 1 - estimate.point},
    )
