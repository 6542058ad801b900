"""
Tests for the fci command line
"""

import contextlib
import io
import json
import os
import sys
import tempfile
import unittest
from pathlib import Path

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from cli_tools.fci import main
from fcilab.utils import file_digest, manifest_path


def run_cli(*argv):
    """Run the CLI; returns (exit status, stdout)"""
    stdout = io.StringIO()
    with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(io.StringIO()):
        try:
            main(list(argv))
        except SystemExit as e:
            return e.code, stdout.getvalue()
    return 0, stdout.getvalue()


class TestCliSuccess(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_classical_with_manifest(self):
        out = self.dir / "gs.json"
        status, _ = run_cli('classical', '--size', '4x4', '--particles', '4', '--dp', '--out', str(out))
        self.assertEqual(status, 0)
        report = json.loads(out.read_text(encoding='utf-8'))
        self.assertEqual(report['degeneracy'], 4)
        self.assertEqual(report['dp_zero_energy_count'], 4)
        self.assertEqual(report['minimum'], {'m1': 0, 'm2': 0})

        manifest = json.loads(manifest_path(out).read_text(encoding='utf-8'))
        self.assertEqual(manifest['subcommand'], 'classical')
        self.assertEqual(manifest['parameters']['size'], '4x4')
        self.assertEqual(manifest['outputs'], {str(out): file_digest(out)})

    def test_lexicographic_alias(self):
        out = self.dir / "gs.json"
        status, _ = run_cli('classical', '--size', '4x4', '--particles', '6', '--mode', 'lex', '--out', str(out))
        self.assertEqual(status, 0)
        report = json.loads(out.read_text(encoding='utf-8'))
        self.assertEqual(report['mode'], 'lexicographic')
        self.assertEqual(report['minimum'], {'m1': 0, 'm2': 8})
        self.assertEqual(report['degeneracy'], 24)

    def test_chern_to_stdout(self):
        status, stdout = run_cli('chern', '--t1', '1', '--t2', '1', '--td', '1', '--method', 'analytic')
        self.assertEqual(status, 0)
        self.assertEqual(json.loads(stdout)['chern'], 1)

    def test_chern_map_and_bands(self):
        out = self.dir / "chern.json"
        curvature = self.dir / "curvature.csv"
        bands = self.dir / "bands.csv"
        status, _ = run_cli('chern', '--t1', '1', '--t2', '1', '--td', '-1', '--grid', '16',
                            '--map', str(curvature), '--bands', str(bands), '--out', str(out))
        self.assertEqual(status, 0)
        self.assertEqual(json.loads(out.read_text(encoding='utf-8'))['chern'], -1)
        self.assertEqual(curvature.read_text(encoding='utf-8').splitlines()[0], "k1,k2,F")
        self.assertEqual(len(bands.read_text(encoding='utf-8').splitlines()), 16 * 16 + 1)
        manifest = json.loads(manifest_path(out).read_text(encoding='utf-8'))
        self.assertEqual(set(manifest['outputs']), {str(curvature), str(bands), str(out)})

    def test_phase_diagram_deterministic(self):
        serial = self.dir / "serial.csv"
        parallel = self.dir / "parallel.csv"
        self.assertEqual(run_cli('phase-diagram', '--td-range', '-1:1:0.25', '--jobs', '1', '--out', str(serial))[0], 0)
        self.assertEqual(run_cli('phase-diagram', '--td-range', '-1:1:0.25', '--jobs', '8', '--out', str(parallel))[0], 0)
        self.assertEqual(serial.read_bytes(), parallel.read_bytes())
        lines = serial.read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], "td,gap,chern")
        self.assertEqual(len(lines), 10)
        self.assertTrue(lines[1].startswith("-1,") and lines[1].endswith(",-1"))
        self.assertTrue(lines[5].startswith("0,") and lines[5].endswith(",gapless"))
        self.assertTrue(lines[9].startswith("1,") and lines[9].endswith(",1"))

    def test_negative_values_after_options(self):
        """Values starting with a minus sign are not taken for flags"""
        out = self.dir / "equals.csv"
        self.assertEqual(run_cli('phase-diagram', '--td-range=-0.5:0.5:0.5', '--out', str(out))[0], 0)
        self.assertEqual(len(out.read_text(encoding='utf-8').splitlines()), 4)
        status, stdout = run_cli('composite', '--sector-params', '-1,1,1', '1,1,1', '1,1,1', '1,1,1',
                                 '--method', 'analytic')
        self.assertEqual(status, 0)
        self.assertEqual(json.loads(stdout)['sigma'], [-1, 1, 1, 1])

    def test_phase_diagram_empty_range(self):
        out = self.dir / "empty.csv"
        status, _ = run_cli('phase-diagram', '--td-range', '1:0:0.5', '--out', str(out))
        self.assertEqual(status, 0)
        self.assertEqual(out.read_bytes(), b"td,gap,chern\n")

    def test_composite(self):
        status, stdout = run_cli('composite', '--sector-params', '1,1,1', '1,1,1', '1,1,1', '1,1,-1',
                                 '--method', 'analytic')
        self.assertEqual(status, 0)
        report = json.loads(stdout)
        self.assertEqual(report['sigma'], [1, 1, 1, -1])
        self.assertEqual(report['average'], '1/2')
        self.assertEqual(report['phase'], 'FCI')

    def test_ed_spectrum(self):
        out = self.dir / "ed.json"
        status, _ = run_cli('ed', '--size', '4x4', '--particles', '2', '--levels', '4', '--out', str(out))
        self.assertEqual(status, 0)
        data = json.loads(out.read_text(encoding='utf-8'))
        self.assertEqual(data['dimension'], 120)
        self.assertEqual(len(data['energies']), 4)
        table = (self.dir / "ed.table.csv").read_text(encoding='utf-8').splitlines()
        self.assertEqual(table[0], "index,energy")
        self.assertEqual(len(table), 5)

    def test_ed_csv_out_keeps_table(self):
        """A .csv --out does not overwrite the level table"""
        out = self.dir / "ed.csv"
        table = self.dir / "ed.table.csv"
        status, _ = run_cli('ed', '--size', '4x4', '--particles', '1', '--levels', '3',
                            '--twists', '-0.5,0.25', '--out', str(out))
        self.assertEqual(status, 0)
        self.assertEqual(json.loads(out.read_text(encoding='utf-8'))['dimension'], 16)
        self.assertEqual(table.read_text(encoding='utf-8').splitlines()[0], "index,energy")
        manifest = json.loads(manifest_path(out).read_text(encoding='utf-8'))
        self.assertEqual(set(manifest['outputs']), {str(out), str(table)})


class TestCliFailures(unittest.TestCase):

    def test_usage_errors_exit_2(self):
        self.assertEqual(run_cli('classical', '--size', '5x4', '--particles', '2')[0], 2)
        self.assertEqual(run_cli('phase-diagram', '--td-range', '0:1', '--out', 'x.csv')[0], 2)
        self.assertEqual(run_cli('chern', '--t1', '1')[0], 2)
        self.assertEqual(run_cli()[0], 2)

    def test_domain_errors_exit_1(self):
        self.assertEqual(run_cli('chern', '--t1', '1', '--t2', '-1', '--td', '1', '--method', 'analytic')[0], 1)
        self.assertEqual(run_cli('chern', '--t1', '1', '--t2', '1', '--td', '0')[0], 1)
        self.assertEqual(run_cli('classical', '--size', '8x8', '--particles', '16')[0], 1)
        self.assertEqual(run_cli('composite', '--sector-params', '1,1,1', '1,1,1', '1,1,1', '1,1,1',
                                 '--size', '4x6')[0], 1)


if __name__ == '__main__':
    unittest.main()
