"""Smoke test for the coverforge_py extension module.

Build first:
    cargo build --release -p coverforge-python --features extension-module
then run this script; it loads the shared library from target/ directly.
"""

import glob
import importlib.machinery
import importlib.util
import json
import math
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    candidates = []
    for profile in ("release", "debug"):
        candidates += glob.glob(os.path.join(ROOT, "target", profile, "libcoverforge_py.*"))
    candidates = [c for c in candidates if c.endswith((".so", ".dylib", ".pyd"))]
    if not candidates:
        sys.exit("coverforge_py not built; see the docstring")
    path = max(candidates, key=os.path.getmtime)
    loader = importlib.machinery.ExtensionFileLoader("coverforge_py", path)
    spec = importlib.util.spec_from_file_location("coverforge_py", path, loader=loader)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


def main():
    cf = load()
    golden = json.dumps({"type": "sft", "m": 2, "forbidden": ["11"]})
    even = json.dumps({
        "type": "sofic",
        "vertices": ["v1", "v2"],
        "edges": [["v1", "v1", "1"], ["v1", "v2", "0"], ["v2", "v1", "0"]],
    })
    phi = (1 + math.sqrt(5)) / 2

    g = json.loads(cf.krieger(golden))
    assert len(g["vertices"]) == 2 and len(g["edges"]) == 3, g
    f = json.loads(cf.fischer(even))
    assert len(f["vertices"]) == 2 and len(f["edges"]) == 3, f
    assert abs(cf.entropy(even) - math.log(phi)) < 1e-10
    assert abs(cf.perron(cf.fischer(even)) - phi) < 1e-10
    assert cf.class_counts(json.dumps({"type": "oracle", "oracle": "square-gap"}), 4) == [2, 4, 6, 8, 9]
    fib = json.loads(cf.substitution_cover(json.dumps({"type": "substitution", "rules": {"a": "ab", "b": "a"}})))
    assert len(fib["edges"]) == 3
    try:
        cf.krieger("{not json")
    except ValueError as e:
        assert str(e).startswith("input:"), e
    else:
        raise AssertionError("malformed input accepted")
    print("python smoke test: ok (coverforge_py %s)" % cf.__version__)


if __name__ == "__main__":
    main()
