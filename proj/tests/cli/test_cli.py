#!/usr/bin/env python3
"""End-to-end checks of the amvp executable.

usage: test_cli.py <path-to-amvp> <schemas-dir>
"""

import json
import math
import os
import subprocess
import sys
import unittest
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

AMVP = None
SCHEMAS = None


def run(*args, stdin=None, env=None):
    full_env = dict(os.environ)
    full_env.pop("CI_STRICT", None)
    full_env.update(env or {})
    return subprocess.run([AMVP, *args], input=stdin, capture_output=True, text=True, env=full_env, timeout=600)


def load_schemas():
    registry = Registry()
    schemas = {}
    for path in Path(SCHEMAS).glob("*.schema.json"):
        doc = json.loads(path.read_text())
        schemas[path.name] = doc
        registry = registry.with_resource(doc["$id"], Resource.from_contents(doc))
    return schemas, registry


class Cli(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.schemas, cls.registry = load_schemas()

    def validate(self, doc, schema_name):
        validator = jsonschema.Draft202012Validator(self.schemas[schema_name], registry=self.registry)
        validator.validate(doc)

    def json_ok(self, *args, schema, **kw):
        r = run(*args, **kw)
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = json.loads(r.stdout)
        self.validate(doc, schema)
        return doc

    # examples

    def test_constants_heisenberg_p2(self):
        doc = self.json_ok("constants", "--group", "heisenberg", "--n", "1", "--p", "2", schema="constants.schema.json")
        self.assertAlmostEqual(doc["c"], 1 / (3 * math.pi), places=15)
        self.assertEqual(doc["Q"], 4)
        self.assertEqual(doc["manifest"]["subcommand"], "constants")
        self.assertIsNone(doc["manifest"]["seed"])

    def test_constants_infinity(self):
        doc = self.json_ok("constants", "--group", "heisenberg", "--n", "1", "--p", "inf", schema="constants.schema.json")
        self.assertEqual(doc["p"], "inf")
        self.assertEqual(doc["c"], 0.5)

    def test_constants_full_group_spec(self):
        doc = self.json_ok("constants", "--group", "group=stratified layers=2,1,1", "--p", "3",
                           schema="constants.schema.json")
        self.assertAlmostEqual(doc["c"], 0.093860607074571383805, places=14)

    def test_median_midrange(self):
        r = run("median", "--p", "inf", stdin="-1\n3\n")
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual(r.stdout.strip(), "1")
        manifest = json.loads(r.stderr.strip().splitlines()[-1])
        self.validate(manifest, "manifest.schema.json")

    def test_median_weighted_and_p1(self):
        r = run("median", "--p", "1", stdin="# values\n0\n5\n1\n\n")
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual(r.stdout.strip(), "1")
        r = run("median", "--p", "2", stdin="0,1\n10,3\n")
        self.assertEqual(float(r.stdout), 7.5)

    def test_oracle_dirichlet(self):
        doc = self.json_ok("oracle", "--target", "dirichlet", "--alphas", "0,0", "--samples", "1000000", "--seed", "1",
                           schema="oracle.schema.json")
        self.assertAlmostEqual(doc["value"], math.pi / 4, delta=5e-3)
        self.assertLessEqual(abs(doc["z_score"]), 3)
        self.assertEqual(doc["manifest"]["seed"], 1)

    def test_oracle_targets(self):
        for target in ("momentI", "gamma0", "volume"):
            doc = self.json_ok("oracle", "--target", target, "--group", "heisenberg", "--n", "1", "--p", "3",
                               "--samples", "200000", "--seed", "2", schema="oracle.schema.json")
            self.assertLessEqual(abs(doc["z_score"]), 4, target)

    def test_info(self):
        doc = self.json_ok("info", schema="info.schema.json")
        self.assertEqual(doc["subcommands"], ["info", "constants", "median", "oracle", "sweep", "solve"])

    def test_sweep_json_and_csv(self):
        args = ["sweep", "--group", "heisenberg", "--n", "1", "--p", "3", "--samples", "50000", "--seed", "4",
                "--levels", "3"]
        doc = self.json_ok(*args, "--out", "json", schema="sweep.schema.json")
        self.assertEqual(len(doc["eps_list"]), 3)
        r = run(*args, "--out", "csv")
        self.assertEqual(r.returncode, 0, r.stderr)
        lines = r.stdout.splitlines()
        self.assertTrue(lines[0].startswith("# "))
        header = json.loads(lines[0][2:])
        self.validate(header["manifest"], "manifest.schema.json")
        self.assertEqual(lines[1], "eps,mu,mu_minus_q0,predicted,fitted,rel_error")
        self.assertEqual(len(lines), 5)

    def test_solve(self):
        r = run("solve", "--h", "0.0625", "--eps", "0.25", "--p", "3")
        self.assertEqual(r.returncode, 0, r.stderr)
        lines = r.stdout.splitlines()
        header = json.loads(lines[0][2:])
        self.validate(header, "solve_header.schema.json")
        self.assertTrue(header["converged"])
        self.assertEqual(lines[1], "y1,y2,value")
        self.assertEqual(len(lines) - 2, 17 * 17)
        for row in lines[2:]:
            y1, y2, value = map(float, row.split(","))
            self.assertGreaterEqual(value, header["data_min"] - 1e-9)
            self.assertLessEqual(value, header["data_max"] + 1e-9)

    # reproducibility

    def test_deterministic_outputs_are_bit_identical(self):
        a = run("constants", "--group", "heisenberg", "--n", "2", "--p", "7")
        b = run("constants", "--group", "heisenberg", "--n", "2", "--p", "7")
        da, db = json.loads(a.stdout), json.loads(b.stdout)
        self.assertEqual(da["manifest"]["output_digest"], db["manifest"]["output_digest"])
        da.pop("manifest"), db.pop("manifest")
        self.assertEqual(da, db)
        m1 = run("median", "--p", "3.5", stdin="0.1\n0.7\n2\n")
        m2 = run("median", "--p", "3.5", stdin="0.1\n0.7\n2\n")
        self.assertEqual(m1.stdout, m2.stdout)

    def test_seeded_outputs_do_not_depend_on_threads(self):
        args = ["oracle", "--target", "gamma0", "--group", "heisenberg", "--n", "1", "--p", "3", "--samples", "200000",
                "--seed", "9"]
        one = json.loads(run("--threads", "1", *args).stdout)
        four = json.loads(run("--threads", "4", *args).stdout)
        self.assertEqual(one["manifest"]["output_digest"], four["manifest"]["output_digest"])
        self.assertEqual(one["value"], four["value"])
        self.assertEqual(four["manifest"]["threads"], 4)
        s1 = run("--threads", "1", "solve", "--h", "0.125", "--eps", "0.3", "--p", "inf").stdout.splitlines()[1:]
        s3 = run("--threads", "3", "solve", "--h", "0.125", "--eps", "0.3", "--p", "inf").stdout.splitlines()[1:]
        self.assertEqual(s1, s3)

    # exit codes and environment

    def test_usage_errors(self):
        self.assertEqual(run().returncode, 2)
        self.assertEqual(run("frobnicate").returncode, 2)
        self.assertEqual(run("constants", "--bogus").returncode, 2)
        self.assertEqual(run("constants", "--group", "torus").returncode, 2)
        self.assertEqual(run("median", "--p", "2", stdin="1\n2,1\n").returncode, 2)
        self.assertEqual(run("solve", "--bc", "wave").returncode, 2)

    def test_domain_errors(self):
        self.assertEqual(run("constants", "--group", "heisenberg", "--n", "1", "--p", "1").returncode, 3)
        self.assertEqual(run("median", "--p", "0.5", stdin="1\n").returncode, 3)
        self.assertEqual(run("median", "--p", "2", stdin="").returncode, 3)
        self.assertEqual(run("solve", "--h", "0.0625", "--eps", "0.1").returncode, 3)

    def test_nonconvergence_and_feasibility(self):
        r = run("solve", "--h", "0.0625", "--eps", "0.25", "--max-iters", "3")
        self.assertEqual(r.returncode, 4)
        self.assertTrue(r.stdout.startswith("# "))
        r = run("oracle", "--target", "volume", "--group", "euclidean", "--n", "40", "--samples", "10000000",
                "--seed", "1")
        self.assertEqual(r.returncode, 4)

    def test_ci_strict_requires_seed(self):
        strict = {"CI_STRICT": "1"}
        r = run("oracle", "--target", "dirichlet", "--alphas", "1", "--samples", "1000", env=strict)
        self.assertEqual(r.returncode, 2)
        self.assertIn("--seed", r.stderr)
        r = run("sweep", "--group", "heisenberg", "--n", "1", "--samples", "1000", "--levels", "2", env=strict)
        self.assertEqual(r.returncode, 2)
        r = run("oracle", "--target", "dirichlet", "--alphas", "1", "--samples", "1000", "--seed", "5", env=strict)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual(run("constants", "--group", "heisenberg", "--n", "1", "--p", "2", env=strict).returncode, 0)

    def test_no_color_in_pipes(self):
        r = run("constants", "--group", "heisenberg", "--n", "1", "--p", "1", env={"NO_COLOR": "1"})
        self.assertNotIn("\x1b[", r.stderr)
        r = run("constants", "--group", "heisenberg", "--n", "1", "--p", "1")
        self.assertNotIn("\x1b[", r.stderr)


if __name__ == "__main__":
    AMVP, SCHEMAS = sys.argv[1], sys.argv[2]
    unittest.main(argv=[sys.argv[0], "-v"])
