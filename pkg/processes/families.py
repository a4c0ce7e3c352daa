"""
Process families with certified moduli

A family is a seeded causal sampler plus the certificate asserting which
hypotheses it satisfies: K > E[X₀], the moduli ρ and σ of Π(1+A_i) and
Σ C_i, the step sizes u_n with their rate of divergence, and the drift
modulus δ. Samplers are vectorised across a batch of paths; each path's
noise comes from its own stream, so a path is bit-identical whichever
batch it was simulated in.
"""
from dataclasses import asdict, dataclass
import math
import logging

import numpy as np

from moduli.bounds import check_index
from moduli.exceptions import CertificateError, InvalidParameterError
from moduli.leaves import constant_boundedness, identity_drift
from .schedules import StepSchedule, strict_upper
from .streams import normals, uniforms
from .traces import batch_traces

logger = logging.getLogger(__name__)

TWO_POINT = "two_point"
GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class Hypotheses:
    is_supermartingale: bool = False
    is_rs: bool = False
    is_rm: bool = False
    is_deterministic: bool = False


def _default_K(initial_mean, K, floor=1.0):
    """max(2, E[X₀]+1) unless overridden; an override must exceed E[X₀] and the floor"""
    if K is None:
        return max(2.0, initial_mean + 1.0)
    minimum = max(initial_mean, floor)
    if not K > minimum:
        raise InvalidParameterError("K", K, f"a real above {minimum}")
    return float(K)


class ProcessFamily:
    """Base class: subclasses implement simulate() and the certificates they can back"""

    kind = None
    tracks = ("x",)

    def __init__(self, params, initial_mean, K=None, hypotheses=None, steps=None, K_floor=1.0):
        self.params = params
        self.initial_mean = float(initial_mean)
        self.K = _default_K(self.initial_mean, K, K_floor)
        self.hypotheses = hypotheses or Hypotheses()
        self.steps = steps

    def __repr__(self):
        return f"<{type(self).__name__} {self.params}>"

    def simulate(self, seed, horizon, path_indices):
        """Return {track: array of shape (paths, horizon+1)}"""
        raise NotImplementedError

    def sample_batch(self, seed, horizon, path_indices):
        check_index(horizon, "horizon")
        return self.simulate(seed, horizon, list(path_indices))

    def traces(self, seed, horizon, path_indices):
        path_indices = list(path_indices)
        batch = self.sample_batch(seed, horizon, path_indices)
        return batch_traces(batch, self.tracks, seed, horizon, path_indices)

    def sample(self, seed, horizon, path_index=0):
        """PathTrace of path ``path_index`` under base seed ``seed``"""
        return self.traces(seed, horizon, [path_index])[0]

    def rho(self):
        raise CertificateError(f"{self.kind} does not certify a modulus for Π(1+A_i)")

    def sigma(self):
        raise CertificateError(f"{self.kind} does not certify a modulus for Σ C_i")

    def rate_of_divergence(self):
        if self.steps is None:
            raise CertificateError(f"{self.kind} has no step sizes")
        return self.steps.rate_of_divergence()

    def delta(self):
        raise CertificateError(f"{self.kind} does not certify a drift modulus")

    def certificate(self):
        """Summary of every certificate, with the reason for each missing one"""
        summary = {"K": self.K, "initial_mean": self.initial_mean, "notes": []}
        for name in ("rho", "sigma", "rate_of_divergence", "delta"):
            try:
                summary[name] = getattr(self, name)().to_dict()
            except CertificateError as exc:
                summary[name] = None
                summary["notes"].append(str(exc))
        summary["steps"] = self.steps.to_dict() if self.steps is not None else None
        return summary

    def describe(self):
        from .serializers import FamilyDescriptorSerializer
        return FamilyDescriptorSerializer(self).data

    @property
    def hypothesis_flags(self):
        return asdict(self.hypotheses)


class MultiplicativeSupermartingale(ProcessFamily):
    """U_{n+1} = U_n·ξ_n with ξ iid from a finite distribution of mean ≤ 1"""

    kind = "multiplicative_supermartingale"

    def __init__(self, u0, factors, K=None):
        pairs = [(float(value), float(prob)) for value, prob in factors]
        if not pairs:
            raise InvalidParameterError("factors", factors, "at least one [value, probability] pair")
        values = np.array([value for value, _ in pairs])
        probs = np.array([prob for _, prob in pairs])
        if np.any(values < 0):
            raise InvalidParameterError("factors", factors, "nonnegative factor values")
        if np.any(probs < 0) or not math.isclose(probs.sum(), 1.0, abs_tol=1e-9):
            raise InvalidParameterError("factors", factors, "probabilities summing to 1")
        mean = float(values @ probs)
        if mean > 1.0 + 1e-12:
            raise InvalidParameterError("factors", factors, f"mean at most 1, got {mean}")
        if u0 < 0:
            raise InvalidParameterError("u0", u0, "a nonnegative real")

        self.u0 = float(u0)
        self.values = values
        self.cumulative = np.cumsum(probs)
        self.cumulative[-1] = 1.0
        super().__init__(
            params={"u0": self.u0, "factors": [list(pair) for pair in pairs]},
            initial_mean=self.u0, K=K,
            hypotheses=Hypotheses(is_supermartingale=True, is_rs=True),
        )

    def simulate(self, seed, horizon, path_indices):
        draws = uniforms(seed, path_indices, horizon)
        picks = np.minimum(np.searchsorted(self.cumulative, draws, side="right"), len(self.values) - 1)
        steps = np.concatenate([np.full((len(path_indices), 1), self.u0), self.values[picks]], axis=1)
        return {"x": np.cumprod(steps, axis=1)}

    def rho(self):
        return constant_boundedness(1.0)

    def sigma(self):
        return constant_boundedness(1.0)


class SGDQuadratic(ProcessFamily):
    """x_{n+1} = x_n − u_n(x_n + ζ_n), the Robbins-Monro iteration for M(x) = x

    ζ_n is two-point ±s_n (default) or Gaussian with sd s_n, where
    s_n = s·qⁿ for a noise decay q ∈ (0, 1] (q = 1 keeps the noise level).
    Tracks X_n = x_n², B_n = u_n(2−u_n)X_n, C_n = u_n²s_n² and
    V_n = (2−u_n)X_n, so that E[X_{n+1} | F_n] = X_n − u_n V_n + C_n holds
    with equality.
    """

    kind = "sgd_quadratic"
    tracks = ("x", "b", "c", "v")

    def __init__(self, x0, steps, noise_sd, noise=TWO_POINT, noise_decay=1.0, K=None):
        steps = StepSchedule.from_dict(steps)
        if steps.sup() > 1:
            raise InvalidParameterError("steps", steps.describe(), "step sizes in [0, 1]")
        if noise_sd < 0:
            raise InvalidParameterError("noise_sd", noise_sd, "a nonnegative real")
        if noise not in (TWO_POINT, GAUSSIAN):
            raise InvalidParameterError("noise", noise, f"'{TWO_POINT}' or '{GAUSSIAN}'")
        if not 0 < noise_decay <= 1:
            raise InvalidParameterError("noise_decay", noise_decay, "a ratio in (0, 1]")

        self.x0 = float(x0)
        self.noise_sd = float(noise_sd)
        self.noise = noise
        self.noise_decay = float(noise_decay)
        super().__init__(
            params={
                "x0": self.x0, "steps": steps.to_dict(), "noise_sd": self.noise_sd,
                "noise": noise, "noise_decay": self.noise_decay,
            },
            initial_mean=self.x0 ** 2, K=K,
            hypotheses=Hypotheses(is_supermartingale=self.noise_sd == 0, is_rs=True, is_rm=True),
            steps=steps,
        )

    def noise_levels(self, count):
        """s_0, ..., s_{count-1}"""
        return self.noise_sd * np.power(self.noise_decay, np.arange(count, dtype=np.float64))

    def _noise(self, seed, path_indices, horizon):
        if self.noise == GAUSSIAN:
            draws = normals(seed, path_indices, horizon)
        else:
            draws = np.where(uniforms(seed, path_indices, horizon) < 0.5, -1.0, 1.0)
        return draws * self.noise_levels(horizon)

    def simulate(self, seed, horizon, path_indices):
        u = self.steps.values(horizon + 1)
        noise = self._noise(seed, path_indices, horizon).T
        iterates = np.empty((horizon + 1, len(path_indices)))
        iterates[0] = self.x0
        for n in range(horizon):
            iterates[n + 1] = (1 - u[n]) * iterates[n] - u[n] * noise[n]

        X = np.ascontiguousarray((iterates ** 2).T)
        c = np.broadcast_to(u ** 2 * self.noise_levels(horizon + 1) ** 2, X.shape).copy()
        return {"x": X, "b": u * (2 - u) * X, "c": c, "v": (2 - u) * X}

    def rho(self):
        return constant_boundedness(1.0)

    def sigma(self):
        if self.noise_sd == 0:
            return constant_boundedness(1.0)
        # Σ u_n²s²q^{2n} ≤ min(s²Σu_n², s²·sup u²/(1−q²))
        totals = [self.noise_sd ** 2 * self.steps.square_total()]
        if self.noise_decay < 1:
            totals.append(self.noise_sd ** 2 * self.steps.sup() ** 2 / (1 - self.noise_decay ** 2))
        total = min(totals)
        if math.isinf(total):
            raise CertificateError(
                f"steps {self.steps.describe()} are not square-summable and the noise does not decay, "
                "so Σ C_i diverges"
            )
        return constant_boundedness(max(1.0, strict_upper(total)))

    def delta(self):
        # V_n = (2−u_n)X_n ≥ X_n for u_n ≤ 1
        return identity_drift()


class GeneralRS(ProcessFamily):
    """X_{n+1} = ((1+a_n)X_n + C_n)·ξ_n with C_n uniform on [0, cbar_n]

    ξ_n is 1−s or 1+s with probability 1/2 each, so the residual is a
    martingale difference and E[X_{n+1} | F_n] = (1+a_n)X_n + C_n with B ≡ 0.
    """

    kind = "general_rs"
    tracks = ("x", "a", "b", "c")

    def __init__(self, x0, a, cbar, noise_sd=0.0, K=None):
        a = StepSchedule.from_dict(a)
        cbar = StepSchedule.from_dict(cbar)
        for name, schedule in (("a", a), ("cbar", cbar)):
            if math.isinf(schedule.total()):
                raise InvalidParameterError(name, schedule.describe(), "a summable schedule")
        if not 0 <= noise_sd <= 1:
            raise InvalidParameterError("noise_sd", noise_sd, "a real in [0, 1]")
        if x0 < 0:
            raise InvalidParameterError("x0", x0, "a nonnegative real")

        self.x0 = float(x0)
        self.a = a
        self.cbar = cbar
        self.noise_sd = float(noise_sd)
        super().__init__(
            params={"x0": self.x0, "a": a.to_dict(), "cbar": cbar.to_dict(), "noise_sd": self.noise_sd},
            initial_mean=self.x0, K=K,
            hypotheses=Hypotheses(is_supermartingale=a.total() == 0 and cbar.total() == 0, is_rs=True),
        )

    def simulate(self, seed, horizon, path_indices):
        a = self.a.values(horizon + 1)
        draws = uniforms(seed, path_indices, horizon + 1, width=2)
        c = draws[:, :, 0] * self.cbar.values(horizon + 1)
        factors = np.where(draws[:, :horizon, 1] < 0.5, 1 - self.noise_sd, 1 + self.noise_sd).T
        c_by_step = c.T
        iterates = np.empty((horizon + 1, len(path_indices)))
        iterates[0] = self.x0
        for n in range(horizon):
            iterates[n + 1] = ((1 + a[n]) * iterates[n] + c_by_step[n]) * factors[n]

        X = np.ascontiguousarray(iterates.T)
        return {
            "x": X,
            "a": np.broadcast_to(a, X.shape).copy(),
            "b": np.zeros_like(X),
            "c": np.ascontiguousarray(c),
        }

    def rho(self):
        return constant_boundedness(max(1.0, strict_upper(self.a.product_one_plus())))

    def sigma(self):
        return constant_boundedness(max(1.0, strict_upper(self.cbar.total())))


class DeterministicRS(ProcessFamily):
    """x_{n+1} = (1+α_n)x_n − β_n + γ_n, the same single trace for every seed

    β is a schedule or "tight" (β_n = α_n x_n + γ_n, so x stays at x₀). A β_n
    that would drive x below 0 is clamped and the index recorded.
    """

    kind = "deterministic_rs"
    tracks = ("x", "a", "b", "c")

    def __init__(self, x0, alpha, beta, gamma, K=None):
        self.alpha = StepSchedule.from_dict(alpha)
        self.gamma = StepSchedule.from_dict(gamma)
        self.tight = beta == "tight"
        self.beta = None if self.tight else StepSchedule.from_dict(beta)
        if x0 < 0:
            raise InvalidParameterError("x0", x0, "a nonnegative real")
        self.x0 = float(x0)
        super().__init__(
            params={
                "x0": self.x0, "alpha": self.alpha.to_dict(),
                "beta": "tight" if self.tight else self.beta.to_dict(), "gamma": self.gamma.to_dict(),
            },
            initial_mean=self.x0, K=K, K_floor=0.0,
            hypotheses=Hypotheses(is_deterministic=True),
        )

    def run(self, horizon):
        """(x, α, β, γ) as lists of length horizon+1, plus the clamped indices"""
        alpha = self.alpha.values(horizon + 1).tolist()
        gamma = self.gamma.values(horizon + 1).tolist()
        scheduled = None if self.tight else self.beta.values(horizon + 1).tolist()
        x, beta, clamped = [self.x0], [], []
        for n in range(horizon + 1):
            current = x[-1]
            ceiling = (1 + alpha[n]) * current + gamma[n]
            if self.tight:
                step = alpha[n] * current + gamma[n]
                following = current
            else:
                step = scheduled[n]
                if step > ceiling:
                    clamped.append(n)
                    step = ceiling
                following = ceiling - step
            beta.append(step)
            if n < horizon:
                x.append(following)

        if clamped:
            logger.warning(f"β clamped at {len(clamped)} indices to keep x nonnegative, first at n={clamped[0]}")
        return x, alpha, beta, gamma, clamped

    def clamp_events(self, horizon):
        return self.run(horizon)[4]

    def beta_sum(self, horizon):
        """Σ_{n<horizon} β_n, over the same indices as the other partial sums"""
        return math.fsum(self.run(horizon)[2][:horizon])

    def simulate(self, seed, horizon, path_indices):
        x, alpha, beta, gamma, _ = self.run(horizon)
        paths = len(path_indices)
        return {
            name: np.tile(np.asarray(values, dtype=np.float64), (paths, 1))
            for name, values in (("x", x), ("a", alpha), ("b", beta), ("c", gamma))
        }

    def L(self):
        """A float strictly above Π(1+α_i)"""
        return strict_upper(self.alpha.product_one_plus())

    def M(self):
        """A float strictly above Σγ_i"""
        return strict_upper(self.gamma.total())


def multiplicative_supermartingale(u0=1.0, factors=((0.5, 0.5), (1.5, 0.5)), K=None):
    return MultiplicativeSupermartingale(u0, factors, K=K)


def sgd_quadratic(x0=1.0, steps=None, noise_sd=1.0, noise=TWO_POINT, noise_decay=1.0, K=None):
    steps = steps if steps is not None else StepSchedule.harmonic(1.0)
    return SGDQuadratic(x0, steps, noise_sd, noise, noise_decay, K=K)


def general_rs(x0=1.0, a=0.0, cbar=0.0, noise_sd=0.0, K=None):
    return GeneralRS(x0, a, cbar, noise_sd, K=K)


def deterministic_rs(x0=0.5, alpha=0.0, beta=0.0, gamma=0.0, K=None):
    return DeterministicRS(x0, alpha, beta, gamma, K=K)


FAMILY_KINDS = {
    MultiplicativeSupermartingale.kind: multiplicative_supermartingale,
    SGDQuadratic.kind: sgd_quadratic,
    GeneralRS.kind: general_rs,
    DeterministicRS.kind: deterministic_rs,
}


def build_family(descriptor):
    """Build a family from {"kind": ..., **params}"""
    descriptor = dict(descriptor)
    kind = descriptor.pop("kind", None)
    if kind not in FAMILY_KINDS:
        raise InvalidParameterError("kind", kind, f"one of {', '.join(FAMILY_KINDS)}")
    try:
        return FAMILY_KINDS[kind](**descriptor)
    except TypeError as exc:
        raise InvalidParameterError("family", kind, f"valid parameters ({exc})") from exc
