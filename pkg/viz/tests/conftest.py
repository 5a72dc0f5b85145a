import json
import subprocess
import sys

import pytest

# the octagon experiment configuration, in the simulator's config format;
# the log is produced through the simulator CLI, the only coupling between
# the two packages
OCTAGON_CONFIG = {
    "schema_version": 1,
    "plant": {"m": 1.0, "J": 0.2, "l": 0.2, "g": 9.81},
    "gains": {"k1": 1.0, "k3": 1.0, "k4": 1.0},
    "safe_set": {"xbar1": [7.0, 5.0], "xbar2": [0.5, 0.5],
                 "chi_clamp": 1e-9, "zeta_clamp": 30.0},
    "f_epsilon": 0.1,
    "plan": {"type": "octagon", "margin_fraction": 0.18,
             "chamfer_fraction": 0.5, "v_max": 1.0, "a_max": 1.0},
    "x0": {"x1": [0.0, 0.0], "x2": [0.0, 0.0], "x3": [0.0, 9.81],
           "x4": [0.0, 0.0]},
    "dt": 1e-3,
    "t_end": 48.0,
}


@pytest.fixture(scope="session")
def octagon_log(tmp_path_factory):
    """Octagon scenario log generated through the simulator CLI."""
    root = tmp_path_factory.mktemp("octagon")
    config = root / "octagon.json"
    config.write_text(json.dumps(OCTAGON_CONFIG), encoding="utf-8")
    log = root / "octagon_log.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "bicopter_safe.cli", "simulate",
         "--config", str(config), "--out", str(log)],
        capture_output=True, text=True)
    if proc.returncode != 0:
        pytest.skip("bicopter-safe CLI unavailable or failed: "
                    f"{proc.stderr.strip()[:200]}")
    return log
