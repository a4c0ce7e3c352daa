"""
Experiment configs

A config is a JSON document naming a process family, the claims to verify
against it and the sampling budget:

    {
      "family": {"kind": "sgd_quadratic", "steps": 0.5, "noise_sd": 1.0},
      "n_paths": 2000, "horizon": 1024, "seed": 20240917,
      "claims": [{"claim": "rs.chi", "lam": 0.25}, ...]
    }

Validation goes through DRF serializers; every error is reported against
the line of the config it points at.
"""
from dataclasses import dataclass, field
from pathlib import Path
import json
import logging
import re

from rest_framework import serializers

from moduli.bounds import check_accuracy, check_confidence
from moduli.counterfunctions import Counterfunction
from moduli.exceptions import QuantRSError
from processes.families import FAMILY_KINDS, build_family
from .claims import CLAIMS, RunSettings, get_claim, parse_scheme

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).resolve().parent / "configs"
DEFAULT_CONFIG = CONFIG_DIR / "sgd_quadratic.json"

_WHITESPACE = re.compile(r'[ \t\n\r]*')
_decoder = json.JSONDecoder()


class ConfigError(QuantRSError):
    """A config that cannot be read or fails validation"""

    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        self.message = message
        super().__init__(f"{path}:{line}: {message}")


def _skip(text, pos):
    return _WHITESPACE.match(text, pos).end()


def value_offsets(text):
    """Map each path (tuple of keys and list indices) of a valid JSON
    document to the offset where its value starts"""
    offsets = {}

    def walk(pos, path):
        pos = _skip(text, pos)
        offsets[path] = pos
        opening = text[pos]
        if opening not in '{[':
            return _decoder.raw_decode(text, pos)[1]

        closing = '}' if opening == '{' else ']'
        pos = _skip(text, pos + 1)
        index = 0
        while text[pos] != closing:
            if opening == '{':
                key, pos = _decoder.raw_decode(text, pos)
                pos = _skip(text, pos) + 1  # ':'
                pos = walk(pos, path + (key,))
            else:
                pos = walk(pos, path + (index,))
                index += 1
            pos = _skip(text, pos)
            if text[pos] == ',':
                pos = _skip(text, pos + 1)
        return pos + 1

    walk(0, ())
    return offsets


def _flatten(errors, path=()):
    """Yield (path, message) for every leaf of a DRF error structure"""
    if isinstance(errors, dict):
        for key, value in errors.items():
            yield from _flatten(value, path if key == 'non_field_errors' else path + (key,))
    elif isinstance(errors, list):
        if all(isinstance(item, str) for item in errors):
            for message in errors:
                yield path, str(message)
        else:
            for index, item in enumerate(errors):
                yield from _flatten(item, path + (index,))
    else:
        yield path, str(errors)


def line_of(text, offsets, path):
    """Line of the deepest prefix of ``path`` present in the document"""
    path = tuple(path)
    while path not in offsets:
        path = path[:-1]
    return text.count('\n', 0, offsets[path]) + 1


class FamilySerializer(serializers.Serializer):
    """Family descriptor: a kind plus the factory's keyword parameters"""

    kind = serializers.ChoiceField(choices=sorted(FAMILY_KINDS))

    def to_internal_value(self, data):
        attrs = super().to_internal_value(data)
        try:
            attrs['family'] = build_family(data)
        except QuantRSError as exc:
            name = getattr(exc, 'name', None)
            raise serializers.ValidationError({name if name in data else 'kind': [str(exc)]})
        return attrs


class ClaimSerializer(serializers.Serializer):
    """One claim to verify, with the options its bound and procedure take"""

    claim = serializers.ChoiceField(choices=sorted(CLAIMS))
    lam = serializers.FloatField(default=0.25)
    eps = serializers.FloatField(default=0.25)
    g = serializers.CharField(default='identity')
    scheme = serializers.CharField(default='dyadic')
    start_n = serializers.IntegerField(default=0, min_value=0)
    M = serializers.FloatField(default=4.0)
    p = serializers.IntegerField(default=8, min_value=1)
    cap = serializers.IntegerField(required=False, min_value=1)
    horizon = serializers.IntegerField(required=False, min_value=1)
    override = serializers.FloatField(required=False, min_value=0.0)

    def validate_lam(self, value):
        try:
            return check_confidence(value)
        except QuantRSError as exc:
            raise serializers.ValidationError(str(exc))

    def validate_eps(self, value):
        try:
            return check_accuracy(value)
        except QuantRSError as exc:
            raise serializers.ValidationError(str(exc))

    def validate_g(self, value):
        try:
            return Counterfunction.parse(value)
        except QuantRSError as exc:
            raise serializers.ValidationError(str(exc))

    def validate_scheme(self, value):
        try:
            parse_scheme(value)
        except QuantRSError as exc:
            raise serializers.ValidationError(str(exc))
        return value

    def validate_M(self, value):
        if not value > 0:
            raise serializers.ValidationError("M must be positive.")
        return value


class ExperimentConfigSerializer(serializers.Serializer):
    """Serializer for a whole experiment config"""

    family = FamilySerializer()
    claims = ClaimSerializer(many=True, allow_empty=False)
    n_paths = serializers.IntegerField(min_value=1)
    horizon = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0)
    workers = serializers.IntegerField(required=False, min_value=1)
    output_dir = serializers.CharField(required=False)

    def validate(self, attrs):
        # build every bound now so certificate gaps surface as config errors
        family = attrs['family']['family']
        run = RunSettings(attrs['n_paths'], attrs['horizon'], attrs['seed'], attrs.get('workers'))
        errors = []
        for options in attrs['claims']:
            try:
                options['bound'] = get_claim(options['claim']).build(family, options, run)
                errors.append({})
            except QuantRSError as exc:
                errors.append({'claim': [str(exc)]})
        if any(errors):
            raise serializers.ValidationError({'claims': errors})
        return attrs


@dataclass
class ExperimentConfig:
    path: Path
    family: object
    claims: list
    n_paths: int
    horizon: int
    seed: int
    workers: int = None
    output_dir: str = None
    lines: dict = field(default_factory=dict)

    @property
    def run_settings(self):
        return RunSettings(self.n_paths, self.horizon, self.seed, self.workers)


def parse_config(text, path='config.json'):
    """Validate config text; raises ConfigError naming the offending line"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(path, exc.lineno, exc.msg) from exc
    offsets = value_offsets(text)
    if not isinstance(data, dict):
        raise ConfigError(path, 1, "a config is a JSON object")

    serializer = ExperimentConfigSerializer(data=data)
    if not serializer.is_valid():
        error_path, message = next(_flatten(serializer.errors))
        line = line_of(text, offsets, error_path)
        name = '.'.join(str(part) for part in error_path)
        logger.error(f"{path}:{line}: {name}: {message}")
        raise ConfigError(path, line, f"{name}: {message}" if name else message)

    validated = serializer.validated_data
    return ExperimentConfig(
        path=Path(path),
        family=validated['family']['family'],
        claims=[dict(options) for options in validated['claims']],
        n_paths=validated['n_paths'],
        horizon=validated['horizon'],
        seed=validated['seed'],
        workers=validated.get('workers'),
        output_dir=validated.get('output_dir'),
        lines={index: line_of(text, offsets, ('claims', index)) for index in range(len(validated['claims']))},
    )


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(path, 0, f"cannot read config ({exc.strerror})") from exc
    return parse_config(text, path)
