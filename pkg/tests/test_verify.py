"""Self-verification suites."""

import pytest

from fgamma.verify import SUITES, Check, run_suite


class TestSuites:
    @pytest.mark.parametrize("suite", SUITES)
    def test_quick_suite_passes(self, suite):
        rep = run_suite(suite, "quick", seed=0)
        assert rep.checks
        failed = [c.line() for c in rep.checks if not c.passed]
        assert not failed, "\n".join(failed)
        assert all(c.suite == suite for c in rep.checks)

    def test_report_counts(self):
        rep = run_suite("generators")
        d = rep.to_dict()
        assert d["passed"] == rep.n_pass == len(rep.checks)
        assert d["failed"] == 0

    def test_seed_changes_nothing_structural(self):
        a = [c.name for c in run_suite("divergence", seed=0).checks]
        b = [c.name for c in run_suite("divergence", seed=5).checks]
        assert a == b


class TestCheck:
    def test_line_format(self):
        assert Check("cgf", "shift", True, 0.5).line() == "PASS  cgf: shift  margin=5.000e-01"
        assert Check("cgf", "shift", False, -1.0, "off by one").line() == "FAIL  cgf: shift  margin=-1.000e+00  off by one"


class TestErrors:
    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_suite("nope")

    def test_unknown_budget(self):
        with pytest.raises(ValueError):
            run_suite("cgf", "huge")
