"""
Management command to verify the claims of an experiment config.

Writes one JSON report per claim and a summary CSV to the output directory,
plus per-path trace CSVs with --emit-traces. Exit status is 0 when no claim
fails, 2 when one does and 1 when the config is rejected.

Usage examples:
  python manage.py run experiments/configs/sgd_quadratic.json
  python manage.py run experiments/configs/martingale.json --paths 500 --workers 4 --emit-traces
"""
from dataclasses import replace
from pathlib import Path
import csv
import json
import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from experiments.claims import get_claim
from experiments.config import ConfigError, load_config
from moduli.exceptions import QuantRSError
from processes.traces import write_trace_csv
from verify.reports import CSV_COLUMNS, FAIL, PASS

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.csv"


class Command(BaseCommand):
    help = "Verify every claim of an experiment config and write JSON reports plus a summary CSV"

    def add_arguments(self, parser):
        parser.add_argument("config", type=str, help="Path to the experiment config (JSON)")
        parser.add_argument("--seed", type=int, help="Override the config seed")
        parser.add_argument("--paths", type=int, help="Override the number of simulated paths")
        parser.add_argument("--horizon", type=int, help="Override the simulated horizon")
        parser.add_argument("--workers", type=int, help="Monte-Carlo worker threads")
        parser.add_argument("--output-dir", type=str, help="Directory for reports (default: QRS_OUTPUT_DIR)")
        parser.add_argument(
            "--emit-traces",
            action="store_true",
            help="Also dump the first QRS_TRACE_DUMP_LIMIT paths as CSV for plotting",
        )

    def handle(self, *args, **options):
        try:
            config = load_config(options["config"])
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=1)

        run = self._run_settings(config, options)
        output_dir = Path(options["output_dir"] or config.output_dir or settings.QRS_OUTPUT_DIR)
        output_dir.mkdir(parents=True, exist_ok=True)

        self.stdout.write(
            f"{config.family.kind}: {len(config.claims)} claims, {run.n_paths} paths, "
            f"horizon {run.horizon}, seed {run.seed}"
        )

        reports = []
        for index, claim_options in enumerate(config.claims):
            claim = get_claim(claim_options["claim"])
            # a pilot fitted to the config's paths, horizon and seed is redone when they are overridden
            refit = claim.pilot and replace(run, workers=None) != replace(config.run_settings, workers=None)
            bound = None if refit else claim_options.get("bound")
            try:
                report = claim.verify(config.family, claim_options, run, bound)
            except QuantRSError as exc:
                raise CommandError(f"{config.path}:{config.lines[index]}: {claim.identifier}: {exc}", returncode=1)
            reports.append(report)
            self._write_report(output_dir / f"{index:02d}_{claim.identifier}.json", report)
            line = f"[{index + 1}/{len(config.claims)}] {claim.identifier}: {report.verdict}"
            self.stdout.write(self._styled(line, report.verdict))

        self._write_summary(output_dir / SUMMARY_FILE, reports)
        if options["emit_traces"]:
            self._emit_traces(config.family, run, output_dir / "traces")

        failed = [report.claim for report in reports if report.failed]
        if failed:
            raise CommandError(f"{len(failed)} claim(s) failed: {', '.join(failed)}", returncode=2)
        self.stdout.write(self.style.SUCCESS(f"\n✓ Reports written to {output_dir}"))

    def _run_settings(self, config, options):
        run = config.run_settings
        overrides = {
            "seed": (options["seed"], 0),
            "n_paths": (options["paths"], 1),
            "horizon": (options["horizon"], 1),
            "workers": (options["workers"], 1),
        }
        for name, (value, minimum) in overrides.items():
            if value is None:
                continue
            if value < minimum:
                raise CommandError(f"--{name.replace('n_', '')} must be at least {minimum}, got {value}", returncode=1)
            run = replace(run, **{name: value})
        return run

    def _styled(self, text, verdict):
        if verdict == PASS:
            return self.style.SUCCESS(text)
        if verdict == FAIL:
            return self.style.ERROR(text)
        return self.style.WARNING(text)

    def _write_report(self, path, report):
        path.write_text(json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        logger.info(f"Wrote {path}")

    def _write_summary(self, path, reports):
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for report in reports:
                writer.writerow(report.to_csv_row())
        logger.info(f"Wrote {path}")

    def _emit_traces(self, family, run, directory):
        directory.mkdir(parents=True, exist_ok=True)
        count = min(settings.QRS_TRACE_DUMP_LIMIT, run.n_paths)
        for trace in family.traces(run.seed, run.horizon, range(count)):
            write_trace_csv(trace, directory / f"path_{trace.path_index:04d}.csv", diagnostics=True)
        self.stdout.write(f"Dumped {count} traces to {directory}")
