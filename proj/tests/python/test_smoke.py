# Copyright 2026 The msim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Smoke tests for the msim Python module."""

import csv
import os
from pathlib import Path

import pytest

import msim

CONFIG_DIR = Path(os.environ.get("MSIM_CONFIG_DIR", Path(__file__).resolve().parents[2] / "configs"))

SMALL = """
name = "small"
[hw]
preset = "rtx3080"
[workload.vector_add]
tasks = 2
elems = 262144
iterations = 8
[scheduler]
# Shorter than one iteration so the tasks interleave.
timeslice_s = 0.00002
[mode]
modes = ["um", "proactive", "ideal"]
[sweep]
ratios = [1.0, 2.0]
"""


def test_presets():
    names = msim.preset_names()
    assert "rtx5080" in names and "rtx3080" in names
    hw = msim.preset("rtx3080")
    assert hw.hbm_capacity_bytes == 10 * 2**30
    assert hw.hbm_pages() == hw.hbm_capacity_bytes // hw.page_size_bytes


def test_parse_config_fields():
    cfg = msim.parse_config(SMALL)
    assert cfg.name == "small"
    assert cfg.workload == "vector_add"
    assert cfg.modes == ["um", "proactive", "ideal"]
    assert cfg.ratios == [1.0, 2.0]


def test_load_config_microbench():
    cfg = msim.load_config(str(CONFIG_DIR / "microbench.toml"))
    assert cfg.name == "microbench"
    assert cfg.modes[0] == "um:128"


def test_unknown_key_raises_config_error():
    with pytest.raises(msim.ConfigError, match=r"\[hw\] bogus"):
        msim.parse_config('[hw]\nbogus = 1\n[workload.vector_add]\n')
    # The whole hierarchy derives from msim.Error.
    assert issubclass(msim.ConfigError, msim.Error)


def test_sweep_rows_ordered_and_bounded():
    cfg = msim.parse_config(SMALL)
    rows = msim.sweep(cfg)
    assert [(r["ratio"], r["mode"]) for r in rows] == [
        (1.0, "um"), (1.0, "proactive"), (1.0, "ideal"),
        (2.0, "um"), (2.0, "proactive"), (2.0, "ideal"),
    ]
    for r in rows:
        assert 0.0 < r["normalized_throughput"] <= 1.0 + 1e-9
        assert r["tasks"] == 2
    by = {(r["ratio"], r["mode"]): r for r in rows}
    assert by[(1.0, "um")]["metrics"]["faults"] == 0
    assert by[(2.0, "um")]["metrics"]["faults"] > 0
    assert by[(2.0, "proactive")]["metrics"]["faults"] == 0
    assert by[(2.0, "proactive")]["normalized_throughput"] > by[(2.0, "um")]["normalized_throughput"]
    assert by[(2.0, "ideal")]["normalized_throughput"] >= by[(2.0, "proactive")]["normalized_throughput"]


def test_sweep_is_independent_of_jobs():
    cfg = msim.parse_config(SMALL)
    assert msim.sweep(cfg, [2.0], jobs=1) == msim.sweep(cfg, [2.0], jobs=3)


def test_set_modes_rejects_unknown():
    cfg = msim.parse_config(SMALL)
    cfg.set_modes(["proactive-alloc-serial", "um:64"])
    assert cfg.modes == ["proactive-alloc-serial", "um:64"]
    with pytest.raises(msim.Error):
        cfg.set_modes(["warp-speed"])


def test_cli_generate_then_analyze(tmp_path):
    code, out, err = msim.main(["generate", "planted", "corpus.trace", "--out-dir", str(tmp_path), "--seed", "3"])
    assert code == 0, err
    traces = list(tmp_path.glob("*.trace"))
    assert len(traces) == 1
    result = msim.analyze(str(traces[0]))
    shares = result["shares"]
    assert abs(sum(shares.values()) - 1.0) < 1e-9
    # Clean planted corpus: every region is predictable.
    assert shares["others"] == 0.0
    assert result["regions"] > 0
    assert set(r for rules in result["kernels"].values() for r in rules) <= {"FIXED", "LINEAR", "STRIDED"}


def test_cli_run_writes_metrics(tmp_path):
    cfg = tmp_path / "small.toml"
    cfg.write_text(SMALL)
    code, _, err = msim.main(["run", str(cfg), "--out-dir", str(tmp_path / "out")])
    assert code == 0, err
    with open(tmp_path / "out" / "metrics.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    assert [r["mode"] for r in rows] == ["um", "proactive", "ideal"]
    assert all(r["version"] == "1" for r in rows)


def test_cli_usage_error_exit_code():
    code, _, _ = msim.main(["no-such-command"])
    assert code == 2
