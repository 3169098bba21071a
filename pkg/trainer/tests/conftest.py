import shutil
import subprocess

import pytest

EMLANG = shutil.which("emlang")


def emlang_gen(out_dir, seed, num_points, sizes, lexicon=None):
    """Generate game data through the toolkit CLI (the wire interface)."""
    cmd = [
        EMLANG, "gen-data",
        "--seed", str(seed),
        "--num-points", str(num_points),
        "--sizes", sizes,
        "--out", str(out_dir),
    ]
    if lexicon is not None:
        cmd += ["--lexicon", str(lexicon)]
    subprocess.run(cmd, check=True, capture_output=True)
    return out_dir


@pytest.fixture(scope="session")
def small_data(tmp_path_factory):
    """A tiny unmarked dataset for shape and wiring tests."""
    out = tmp_path_factory.mktemp("small")
    return emlang_gen(out, seed=5, num_points=20, sizes="600,200,200")


@pytest.fixture(scope="session")
def marked_data(tmp_path_factory):
    """A tiny dataset with ground-truth messages (for serve tests)."""
    root = tmp_path_factory.mktemp("marked")
    lexicon = root / "lexicon.json"
    subprocess.run(
        [EMLANG, "gen-lexicon", "--style", "nc", "--seed", "5",
         "--num-points", "20", "--out", str(lexicon)],
        check=True,
        capture_output=True,
    )
    out = root / "data"
    return emlang_gen(out, seed=6, num_points=20, sizes="600,200,200",
                      lexicon=lexicon)
