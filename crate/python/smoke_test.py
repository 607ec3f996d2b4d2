"""Smoke test for the stemeval Python bindings.

Build and install first:  pip install --no-build-isolation ./crates/python
"""
import json
import math
import pathlib

import stemeval_py as se

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "crates" / "core" / "data" / "english_mini.tsv"


def main():
    assert se.stem("running") == "run"
    assert se.stem("generously") == "generous"
    assert se.tokenize("Hello, World!") == ["hello", "world"]
    assert se.levenshtein("kitten", "sitting") == 3
    assert math.isclose(se.normalized_distance("running", "run"), 4 / 7)
    assert f"{se.compression_ratio(2175, 1555):.2f}" == "1.40"
    assert abs(se.ses(0.80, 1.64) - 1.312) < 1e-12
    assert se.safety_gate(0.26) == "unsafe" and se.safety_gate(0.20) == "safe"
    assert se.consistency_flag(1.61, 0.91, 1.672)
    assert abs(se.mcnemar(5, 0) - 0.0625) < 1e-9
    assert se.paired_t_test([0.0] * 5) == 1.0

    trunc = se.Normalizer("truncate:3")
    assert trunc.name == "truncate:3" and trunc.normalize("walking") == "wal"
    try:
        se.Normalizer("truncate:0")
    except ValueError:
        pass
    else:
        raise AssertionError("truncate:0 accepted")

    config = json.loads(se.default_config(str(CORPUS), ["identity", "snowball-en"]))
    config["classifiers"] = config["classifiers"][:1]
    result = json.loads(se.evaluate(json.dumps(config)))
    assert result["schema"] == "1"
    identity, snowball = result["reports"]
    assert identity["status"] == "ok" and identity["ses"]["ses"] == 1.0
    assert snowball["compression"]["cr"] > 1.0
    md = se.render_markdown(json.dumps(result))
    assert "snowball-en" in md

    intrinsic = json.loads(se.evaluate_intrinsic(json.dumps(config)))
    assert intrinsic["reports"][1]["distortion"]["anld"] > 0
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
