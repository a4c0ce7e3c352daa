from io import StringIO
from pathlib import Path
import csv
import json
import tempfile
from unittest.mock import patch

from django.core.management import call_command
from django.core.management.base import CommandError
from django.conf import settings
from django.test import SimpleTestCase, override_settings

from experiments.config import CONFIG_DIR, DEFAULT_CONFIG, load_config
from verify.reports import CSV_COLUMNS

SMALL_MARTINGALE = {
    "family": {"kind": "multiplicative_supermartingale"},
    "n_paths": 100,
    "horizon": 20,
    "seed": 5,
    "claims": [{"claim": "ville.boundedness"}],
}


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        self.tmp = Path(directory.name)

    def write_config(self, data, name="config.json"):
        path = self.tmp / name
        path.write_text(json.dumps(data, indent=2), encoding="utf-8")
        return path

    def call(self, *args, **options):
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO(), **options)
        return out.getvalue()


class RunCommandTests(CommandTestCase):
    def run_sgd(self, output_dir):
        return self.call(
            "run", str(CONFIG_DIR / "sgd_quadratic.json"),
            "--paths", "300", "--horizon", "256", "--output-dir", str(output_dir),
        )

    def test_acceptance_config(self):
        output = self.run_sgd(self.tmp / "first")
        self.assertIn("sgd_quadratic", output)

        with (self.tmp / "first" / "summary.csv").open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], list(CSV_COLUMNS))
        self.assertGreaterEqual(len(rows) - 1, 6)
        self.assertNotIn("fail", [row[-1] for row in rows[1:]])

        reports = sorted((self.tmp / "first").glob("*.json"))
        self.assertEqual(len(reports), len(rows) - 1)
        first = json.loads(reports[0].read_text(encoding="utf-8"))
        self.assertEqual(first["claim"], "rs.chi")
        self.assertEqual(first["repro"]["n_paths"], 300)

    def test_same_seed_same_summary(self):
        self.run_sgd(self.tmp / "first")
        self.run_sgd(self.tmp / "second")
        self.assertEqual(
            (self.tmp / "first" / "summary.csv").read_text(encoding="utf-8"),
            (self.tmp / "second" / "summary.csv").read_text(encoding="utf-8"),
        )

    def test_invalid_config_exits_with_1(self):
        path = self.write_config(dict(SMALL_MARTINGALE, n_paths=0))
        with self.assertRaises(CommandError) as ctx:
            self.call("run", str(path), "--output-dir", str(self.tmp))
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn("n_paths", str(ctx.exception))

    def test_bad_flag_exits_with_1(self):
        path = self.write_config(SMALL_MARTINGALE)
        with self.assertRaises(CommandError) as ctx:
            self.call("run", str(path), "--paths", "0", "--output-dir", str(self.tmp))
        self.assertEqual(ctx.exception.returncode, 1)

    def test_planted_failures_exit_with_2(self):
        for name in ("planted_failure.json", "planted_bsum_failure.json"):
            with self.subTest(config=name), self.assertRaises(CommandError) as ctx:
                self.call("run", str(CONFIG_DIR / name), "--output-dir", str(self.tmp / name))
            self.assertEqual(ctx.exception.returncode, 2)

        with (self.tmp / "planted_failure.json" / "summary.csv").open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[1][0], "ville.boundedness")
        self.assertEqual(rows[1][-1], "fail")

    def test_emit_traces(self):
        path = self.write_config(SMALL_MARTINGALE)
        output = self.call("run", str(path), "--output-dir", str(self.tmp / "out"), "--emit-traces")
        traces = sorted((self.tmp / "out" / "traces").glob("path_*.csv"))
        self.assertEqual(len(traces), 10)
        self.assertEqual(traces[0].name, "path_0000.csv")
        header = traces[0].read_text(encoding="utf-8").splitlines()[0]
        self.assertTrue(header.endswith("P,X_tilde,U,V"))
        self.assertIn("Dumped 10 traces", output)

    def test_default_output_dir(self):
        path = self.write_config(SMALL_MARTINGALE)
        with override_settings(QRS_OUTPUT_DIR=self.tmp / "default"):
            self.call("run", str(path))
        self.assertTrue((self.tmp / "default" / "summary.csv").exists())
        self.assertTrue((self.tmp / "default" / "00_ville.boundedness.json").exists())


class ExplainCommandTests(CommandTestCase):
    def test_text_tree(self):
        output = self.call("explain", "rs.chi")
        self.assertIn("χ = combine_boundedness", output)
        self.assertIn("[modulus of uniform boundedness]", output)

        output = self.call("explain", "rm.gamma")
        self.assertIn("Γ = rm_metastable", output)
        self.assertIn("liminf_transfer", output)

    def test_json_tree(self):
        tree = json.loads(self.call("explain", "rm.psi", "--json"))
        self.assertEqual(tree["rule"], "liminf_transfer")
        self.assertEqual(tree["label"], "Ψ")

    @patch("experiments.management.commands.explain.load_config", wraps=load_config)
    def test_default_config(self, mocked_load):
        self.call("explain", "rs.tau")
        mocked_load.assert_called_once_with(DEFAULT_CONFIG)

    def test_config_family(self):
        output = self.call("explain", "ville.boundedness", "--config", str(CONFIG_DIR / "martingale.json"))
        self.assertIn("multiplicative_supermartingale", output)

    def test_unknown_claim(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("explain", "rs.nope")
        self.assertEqual(ctx.exception.returncode, 1)

    def test_claim_the_family_cannot_certify(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("explain", "deterministic.rs")
        self.assertEqual(ctx.exception.returncode, 1)


class ListFamiliesCommandTests(CommandTestCase):
    def test_text(self):
        output = self.call("list_families")
        for kind in ("multiplicative_supermartingale", "sgd_quadratic", "general_rs", "deterministic_rs"):
            self.assertIn(kind, output)

    def test_json(self):
        descriptors = json.loads(self.call("list_families", "--json"))
        self.assertEqual(len(descriptors), 4)
        self.assertTrue(all("hypotheses" in descriptor for descriptor in descriptors))


class ProjectSettingsTests(CommandTestCase):
    def test_no_database_or_auth(self):
        # an unset DATABASES is filled in with the dummy backend on first use
        self.assertTrue(all(db["ENGINE"] == "django.db.backends.dummy" for db in settings.DATABASES.values()))
        self.assertFalse([app for app in settings.INSTALLED_APPS if app.startswith("django.contrib.")])
        self.call("check")
