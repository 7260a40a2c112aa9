import json
import math

import pytest

from meanforge.chains import get_chain, verify_chain
from meanforge.means import ToleranceConfig
from meanforge.ratios import RatioPair
from meanforge.report import build_report, chain_text, constants_markdown, ratio_row, ratio_rows, ratio_text, to_json
from meanforge.sampling import SamplingSpec


class TestJsonWriter:
    def test_seventeen_digits(self):
        text = to_json({"x": 0.1, "n": 3, "ok": True, "none": None, "s": "≤"})
        assert '"x": 0.10000000000000001' in text
        assert json.loads(text) == {"x": 0.1, "n": 3, "ok": True, "none": None, "s": "≤"}

    def test_round_trip_exact(self):
        for v in (1 / 3, 2.0**-1074, 1.7976931348623157e308, -0.0):
            assert json.loads(to_json([v]))[0] == v

    def test_non_finite_is_null(self):
        assert json.loads(to_json([math.nan, math.inf])) == [None, None]

    def test_unsupported(self):
        with pytest.raises(TypeError):
            to_json({"x": object()})


class TestReport:
    def test_schema(self):
        rep = verify_chain(get_chain("eq96-as-printed"), SamplingSpec(count=100))
        rows = ratio_rows([RatioPair("SA", "SH"), RatioPair("SN2", "AN2")])
        doc = json.loads(to_json(build_report("0.1.0", 1, ToleranceConfig(), [rep], rows)))
        assert set(doc) == {"tool_version", "seed", "tolerance", "chains", "ratios"}
        ch = doc["chains"][0]
        for key in ("id", "source", "holds", "violations", "worst_margin", "witness", "per_pair"):
            assert key in ch
        assert ch["witness"] == {"a": 1.0, "b": 2.0}
        r0, r1 = doc["ratios"]
        for key in ("num", "den", "value_at_1", "sup", "inf", "pattern", "paper_constant", "matches_paper"):
            assert key in r0
        assert r0["matches_paper"] is True
        assert r1["matches_paper"] is False and r1["note"]

    def test_text(self):
        rep = verify_chain(get_chain("eq96-as-printed"), SamplingSpec(count=10))
        assert "witness (a, b) = (1, 2)" in chain_text(rep)
        assert ratio_text(ratio_row(RatioPair("SA", "SH"))).startswith("sup = 0.333333333 at x=1; M_SA ≤ (1/3) M_SH")

    def test_unpublished_pair(self):
        row = ratio_row(RatioPair("SA", "AG"))
        assert row.published is None and row.matches_published is None
        assert "no published constant" in ratio_text(row)

    def test_markdown(self):
        md = constants_markdown(ratio_rows())
        assert md.count("\n| ") == 14
        assert "| SN3/SN1 | 8/9 |" in md
