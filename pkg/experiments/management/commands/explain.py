"""
Management command to print how a claim's bound is built.

The bound is built against the family of a config (the bundled SGD
experiment by default) and printed as its provenance tree.

Usage examples:
  python manage.py explain rs.chi
  python manage.py explain rm.gamma --config experiments/configs/sgd_quadratic.json --json
"""
import json

from django.core.management.base import BaseCommand, CommandError

from experiments.claims import get_claim
from experiments.config import DEFAULT_CONFIG, ClaimSerializer, ConfigError, load_config
from moduli.exceptions import QuantRSError


class Command(BaseCommand):
    help = "Print the provenance tree of a claim's bound"

    def add_arguments(self, parser):
        parser.add_argument("claim", type=str, help="Claim identifier, e.g. rs.chi")
        parser.add_argument("--config", type=str, help="Config whose family the bound is built for")
        parser.add_argument("--json", action="store_true", help="Print the tree as JSON")

    def handle(self, *args, **options):
        try:
            claim = get_claim(options["claim"])
            config = load_config(options["config"] or DEFAULT_CONFIG)
        except QuantRSError as exc:
            raise CommandError(str(exc), returncode=1)

        claim_options = self._options(claim.identifier, config)
        try:
            bound = claim_options.get("bound") or claim.build(config.family, claim_options, config.run_settings)
        except QuantRSError as exc:
            raise CommandError(f"{claim.identifier}: {exc}", returncode=1)

        if options["json"]:
            self.stdout.write(json.dumps(bound.to_dict(), indent=2, ensure_ascii=False))
            return
        self.stdout.write(f"{claim.identifier}: {claim.description}")
        self.stdout.write(f"family: {config.family.kind} {config.family.params}\n")
        self.stdout.write(bound.explain())

    def _options(self, identifier, config):
        """The config's entry for the claim, or its defaults"""
        for claim_options in config.claims:
            if claim_options["claim"] == identifier:
                return claim_options
        serializer = ClaimSerializer(data={"claim": identifier})
        if not serializer.is_valid():
            raise CommandError(str(ConfigError(config.path, 0, serializer.errors)), returncode=1)
        return dict(serializer.validated_data)
