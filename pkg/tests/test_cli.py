from __future__ import annotations

import json

import numpy as np
import pytest

from conftest import build_seg_dataset, rand_group, rand_label_map
from segfuse import parse_seg, partitions_equal, write_seg
from segfuse.cli import main


def _identical_group_dir(root, copies=3, shape=(10, 12)):
    rng = np.random.default_rng(0)
    member = rand_label_map(rng, shape=shape, regions=4)
    directory = root / "img000"
    directory.mkdir(parents=True)
    for j in range(copies):
        (directory / f"seg_{j}.seg").write_bytes(write_seg(member))
    return directory, member


def test_fuse_writes_consensus_products(tmp_path, capsys):
    group_dir, _ = _identical_group_dir(tmp_path / "data")
    out = tmp_path / "out"
    code = main(["fuse", str(group_dir), "--out", str(out)])
    assert code == 0
    assert (out / "consensus.png").is_file()
    assert (out / "consensus_colors.png").is_file()
    assert (out / "manifest.txt").is_file()
    stdout = capsys.readouterr().out
    assert "image: img000" in stdout
    assert "members: 3" in stdout


def test_fuse_of_identical_members_costs_nothing(tmp_path):
    group_dir, member = _identical_group_dir(tmp_path / "data")
    out = tmp_path / "out"
    assert main(["fuse", str(group_dir), "--out", str(out)]) == 0
    manifest = (out / "manifest.txt").read_text()
    assert "cost: 0" in manifest
    # unanimity at confidence 1.0 leaves no background, so a .seg is written
    assert "seg_file: consensus.seg" in manifest
    assert (out / "consensus.seg").is_file()
    assert partitions_equal(parse_seg((out / "consensus.seg").read_bytes()), member)


def test_fuse_missing_directory_fails_cleanly(tmp_path, capsys):
    code = main(["fuse", str(tmp_path / "nowhere"), "--out", str(tmp_path / "o")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_fuse_flags_reach_the_manifest(tmp_path):
    group_dir, _ = _identical_group_dir(tmp_path / "data")
    out = tmp_path / "out"
    code = main(
        [
            "fuse",
            str(group_dir),
            "--init",
            "attr",
            "--threshold",
            "0.9",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    manifest = (out / "manifest.txt").read_text()
    assert "init: attribute_density" in manifest
    assert "threshold: 0.9" in manifest


def test_fuse_random_init_accepts_a_seed(tmp_path):
    group_dir, _ = _identical_group_dir(tmp_path / "data")
    code = main(
        [
            "fuse",
            str(group_dir),
            "--init",
            "random",
            "--seed",
            "7",
            "--out",
            str(tmp_path / "out"),
        ]
    )
    assert code == 0


def test_fuse_k_override_is_clamped_not_fatal(tmp_path):
    group_dir, _ = _identical_group_dir(tmp_path / "data")
    out = tmp_path / "out"
    with pytest.warns(UserWarning):
        code = main(["fuse", str(group_dir), "--k", "99", "--out", str(out)])
    assert code == 0
    manifest = (out / "manifest.txt").read_text()
    assert "k_requested: 99" in manifest


def test_eval_perfect_candidate_scores_zero_error(tmp_path, capsys):
    rng = np.random.default_rng(1)
    member = rand_label_map(rng, shape=(9, 11), regions=4)
    refs = tmp_path / "refs"
    refs.mkdir()
    (refs / "r0.seg").write_bytes(write_seg(member))
    (refs / "r1.seg").write_bytes(write_seg(member))
    candidate = tmp_path / "cand.seg"
    candidate.write_bytes(write_seg(member))

    assert main(["eval", str(candidate), str(refs)]) == 0
    stdout = capsys.readouterr().out
    assert "gce: 0.000000" in stdout
    assert "pri: 1.000000" in stdout
    record = json.loads(stdout.strip().splitlines()[-1])
    assert record["image_id"] == "cand"
    assert record["voi"] == 0.0


def test_eval_writes_a_json_record_file(tmp_path, capsys):
    rng = np.random.default_rng(2)
    group = rand_group(rng, members=2, shape=(8, 10))
    refs = tmp_path / "refs"
    refs.mkdir()
    (refs / "r0.seg").write_bytes(write_seg(group.members[0]))
    candidate = tmp_path / "cand.seg"
    candidate.write_bytes(write_seg(group.members[1]))
    out = tmp_path / "scores.jsonl"

    assert main(["eval", str(candidate), str(refs), "--out", str(out)]) == 0
    record = json.loads(out.read_text())
    assert set(record) >= {"image_id", "gce", "voi", "pri", "bde", "covering"}
    # with --out the JSON goes to the file, not stdout
    assert "{" not in capsys.readouterr().out


def test_eval_missing_refs_dir_fails_cleanly(tmp_path, capsys):
    rng = np.random.default_rng(3)
    candidate = tmp_path / "cand.seg"
    candidate.write_bytes(write_seg(rand_label_map(rng)))
    code = main(["eval", str(candidate), str(tmp_path / "none")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_bench_runs_a_dataset_end_to_end(tmp_path, capsys):
    rng = np.random.default_rng(4)
    data = tmp_path / "data"
    ids = build_seg_dataset(data, rng, images=3, members=3, shape=(12, 14))
    out = tmp_path / "bench"
    code = main(["bench", str(data), "--out", str(out)])
    assert code == 0
    lines = (out / "records.jsonl").read_text().splitlines()
    assert len(lines) == len(ids)
    stdout = capsys.readouterr().out
    assert "images: 3 ok, 0 failed" in stdout
    assert "elapsed_seconds:" in stdout


def test_bench_leave_one_out_and_image_selection(tmp_path):
    rng = np.random.default_rng(5)
    data = tmp_path / "data"
    ids = build_seg_dataset(data, rng, images=3, members=3, shape=(10, 12))
    out = tmp_path / "bench"
    code = main(
        [
            "bench",
            str(data),
            "--leave-one-out",
            "--images",
            ids[1],
            "--out",
            str(out),
        ]
    )
    assert code == 0
    lines = (out / "records.jsonl").read_text().splitlines()
    assert len(lines) == 1
    record = json.loads(lines[0])
    assert record["image_id"] == ids[1]
    assert record["protocol"] == "leave_one_out"


def test_bench_reports_failures_with_exit_one(tmp_path, capsys):
    rng = np.random.default_rng(6)
    data = tmp_path / "data"
    build_seg_dataset(data, rng, images=2, members=3)
    broken = data / "broken"
    broken.mkdir()
    (broken / "bad.seg").write_text("not a header\n")
    code = main(["bench", str(data), "--out", str(tmp_path / "bench")])
    assert code == 1
    captured = capsys.readouterr()
    assert "failed: broken" in captured.err
    assert "images: 2 ok, 1 failed" in captured.out


def test_bench_jobs_flag_is_accepted(tmp_path):
    rng = np.random.default_rng(7)
    data = tmp_path / "data"
    build_seg_dataset(data, rng, images=2, members=3, shape=(9, 10))
    code = main(["bench", str(data), "--jobs", "2", "--out", str(tmp_path / "b")])
    assert code == 0


def test_unknown_command_is_a_usage_error():
    with pytest.raises(SystemExit):
        main(["explode"])
