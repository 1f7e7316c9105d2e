"""Smoke test for the bandrec_py extension module.

Build the extension first:

    cargo build -p bandrec-py

then run this script with the same Python the build linked against:

    python3 python/smoke_test.py
"""

import shutil
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("debug", "release")
        for name in ("libbandrec_py.so", "bandrec_py.so", "libbandrec_py.dylib")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("extension not built; run `cargo build -p bandrec-py` first")

    tmp = Path(tempfile.mkdtemp(prefix="bandrec_py_"))
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy2(built, tmp / f"bandrec_py{suffix}")
    sys.path.insert(0, str(tmp))
    import bandrec_py

    return bandrec_py


def main():
    bandrec_py = load_module()

    ident = bandrec_py.MinorOp.identity()
    op = bandrec_py.MinorOp.parse("(1;2)")
    assert str(op.compose(ident)) == "(1;2)"
    assert str(bandrec_py.MinorOp([1], [2]).compose(op)) == "(1,2;2,3)"
    target, shift = bandrec_py.MinorOp.parse("(1,2,4;1,2,5)").reduce()
    assert (str(target), shift) == ("(2;3)", 2)

    d = bandrec_py.Derivation(3)
    ops = [str(o) for o in d.operators()]
    assert ops == ["(0;0)", "(1;2)", "(1;3)", "(1,2;2,3)", "(1,2;2,4)", "(1,2;3,4)"]
    assert d.e_sets() == [[[2], [3]], [[2, 3], [2, 4], [3, 4]]]
    assert d.equations()[0] == "(0;0) = a y (0;0) - b y (1;2) + c y (1;3)"
    assert d.recursion_coefficients() == [
        "1",
        "-a",
        "bd - ce",
        "2ace - b^2e - cd^2",
        "bcde - c^2e^2",
        "-ac^2e^2",
        "c^3e^3",
    ]
    assert d.recursion_degree() == 6
    assert d.verify_annihilation(seed=42, trials=3)

    d5 = bandrec_py.Derivation(5)
    assert len(d5.operators()) == 70
    assert len(d5.numeric_coefficients(seed=7)) == 71
    try:
        d5.recursion_coefficients()
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for symbolic recursion at order 5")

    print("smoke test passed")


if __name__ == "__main__":
    main()
