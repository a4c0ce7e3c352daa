"""
Management command to list the process families a config can name.

Usage examples:
  python manage.py list_families
  python manage.py list_families --json
"""
import json

from django.core.management.base import BaseCommand

from processes.families import FAMILY_KINDS


class Command(BaseCommand):
    help = "List the process families with their default parameters and certificates"

    def add_arguments(self, parser):
        parser.add_argument("--json", action="store_true", help="Print full family descriptors as JSON")

    def handle(self, *args, **options):
        descriptors = [factory().describe() for factory in FAMILY_KINDS.values()]

        if options["json"]:
            self.stdout.write(json.dumps(descriptors, indent=2, ensure_ascii=False))
            return

        for descriptor in descriptors:
            hypotheses = [name for name, held in descriptor["hypotheses"].items() if held]
            self.stdout.write(self.style.SUCCESS(descriptor["kind"]))
            self.stdout.write(f"  defaults: {json.dumps(descriptor['params'])}")
            self.stdout.write(f"  certifies: {', '.join(hypotheses) or 'nothing'}")
            missing = descriptor["certificate"]["notes"]
            for note in missing:
                self.stdout.write(self.style.WARNING(f"  ! {note}"))
