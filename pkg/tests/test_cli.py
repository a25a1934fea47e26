import io
import subprocess
import sys

import pytest

from shiftgroups.cli import run
from shiftgroups.multigraph import format_graph, mp_graph, loops_graph

SWAP = "element over r2\npair x1 -> x2\npair x2 -> x1\n"
IDENT = "element over r2\npair x1 -> x1\npair x2 -> x2\n"


def call(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err, io.StringIO(stdin))
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    (tmp_path / "mp2.graph").write_text(format_graph(mp_graph(2)))
    (tmp_path / "r2.graph").write_text(format_graph(loops_graph(2)))
    (tmp_path / "id.elem").write_text(IDENT)
    (tmp_path / "swap.elem").write_text(SWAP)
    return tmp_path


def test_matui_piped_into_homology():
    code, graph_text, _ = call("matui", "--d", "2", "--k", "1")
    assert code == 0
    code, out, _ = call("homology", "-", stdin=graph_text)
    assert code == 0 and out == "H0 = trivial\nH1 = trivial\n"


def test_matsumoto_example(files):
    code, out, _ = call("matsumoto", str(files / "mp2.graph"), "X", str(files / "r2.graph"), "X")
    assert code == 0 and out.strip() == "matsumoto: MET"
    code, out, _ = call("matsumoto", "r3", "X", "r2", "X")
    assert code == 1 and out.strip() == "matsumoto: NOT-MET"


def test_elem_eq(files):
    assert call("elem", "eq", str(files / "id.elem"), str(files / "swap.elem"))[0] == 1
    code, out, _ = call("elem", "eq", str(files / "swap.elem"), str(files / "swap.elem"))
    assert code == 0 and out.strip() == "true"


def test_elem_algebra(files):
    code, out, _ = call("elem", "compose", str(files / "swap.elem"), str(files / "swap.elem"))
    assert code == 0 and out == "element over r2\npair @a -> @a\n"
    code, out, _ = call("elem", "canon", str(files / "id.elem"))
    assert out == "element over r2\npair @a -> @a\n"
    code, out, _ = call("elem", "apply", str(files / "swap.elem"), "- (x1)")
    assert code == 0 and out.strip() == "point x2 (x1)"


def test_homology_degrees_and_abelianization():
    assert call("homology", "r3", "--degree", "0")[1].strip() == "H0 = Z/2"
    assert call("homology", "r3", "--degree", "2")[1].strip() == "H2 = trivial"
    assert call("abelianization", "r3")[1].strip().endswith("Z/2")


def test_class_and_realize():
    code, out, _ = call("class-of", "r3", "@a")
    assert code == 0 and out.splitlines()[-1] == "class([Y]) = (1;)"
    code, out, _ = call("realize-class", "r3", "(0;)")
    assert code == 0 and out.startswith("clopen realized:")


def test_certificate_in_fresh_process(tmp_path):
    code, cert, _ = call("build-completion", "m3", "X", "--primes", "2,3")
    assert code == 0
    path = tmp_path / "c.cert"
    path.write_text(cert)
    proc = subprocess.run([sys.executable, "-m", "shiftgroups", "validate-certificate", str(path)],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.splitlines()[-1] == "certificate: VALID"
    path.write_text(cert.replace("primes: 2,3", "primes: 2,5"))
    assert call("validate-certificate", str(path))[0] == 1


def test_exit_codes(tmp_path):
    assert call("nonsense-command")[0] == 2
    bad = tmp_path / "bad.graph"
    bad.write_text("graph g\nvertex a\nedge e a b\n")
    code, _, err = call("check-graph", str(bad))
    assert code == 2 and f"{bad}:3" in err
    assert call("build-completion", "r2", "X", "--primes", "4")[0] == 2
    inf = tmp_path / "inf.graph"
    inf.write_text("graph twotwo\nvertex a\nvertex b\nedge p a a\nedge q a a\nedge r a b\n"
                   "edge s b a\nedge t b b\nedge u b b\n")
    assert call("build-completion", str(inf), "X", "--primes", "2")[0] == 3
    assert call("--cap-closure", "3", "lpc", "r2", "-", stdin="pattern a: (x1 x2)\n")[0] == 0
    assert call("--cap-closure", "1", "lpc", "r2", "-", stdin="pattern a: (x1 x2)\n")[0] == 3


def test_lpc_and_fix_index():
    code, out, _ = call("lpc", "m3", "-", stdin="pattern 2: (l1 l2 l3)\n")
    assert code == 0 and out.splitlines()[-1] == "lpc = {3}"
    code, out, _ = call("fix-index", "m3", "-", "X", "@2", stdin="pattern 2: (l1 l2 l3)\n")
    assert code == 0 and out.splitlines()[0] == "index = 3"


def test_deterministic_output():
    first = [call("elem", "random", "m2", "--depth", "3", "--seed", "9")[1] for _ in range(2)]
    assert first[0] == first[1] and first[0].startswith("element over m2")
    assert call("export-dot", "m2") == call("export-dot", "m2")
    assert call("--seed", "9", "elem", "random", "m2", "--depth", "3")[1] == first[0]
