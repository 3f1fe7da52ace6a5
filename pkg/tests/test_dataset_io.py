import json

import numpy as np
import pytest

from foawave.dataset_io import (load_fixations_csv, load_frames, load_pgm, parse_pgm,
                                read_saliency_pgm, read_scanpath_json, scan_dataset,
                                sidecar_path, write_pgm, write_saliency_pgm, write_scanpath_json)
from foawave.errors import (MalformedData, MalformedHeader, MissingColumn, TruncatedData,
                            UnparsableRow, UnsupportedMaxval)
from foawave.foa import Fixation, Scanpath
from foawave.grid import Grid


def test_p2_example(tmp_path):
    f = tmp_path / "a.pgm"
    f.write_bytes(b"P2 2 2 255 0 255 128 64")
    b = load_pgm(f).brightness
    np.testing.assert_allclose(b, [[0.0, 1.0], [128 / 255, 64 / 255]])
    assert b[1, 0] == pytest.approx(0.50196, abs=1e-5)
    assert b[1, 1] == pytest.approx(0.25098, abs=1e-5)


def test_p5_16bit_matches_p2(tmp_path, rng):
    samples = rng.integers(0, 65536, (5, 7))
    write_pgm(tmp_path / "a.pgm", samples, 65535, binary=True)
    write_pgm(tmp_path / "b.pgm", samples, 65535, binary=False)
    raw = (tmp_path / "a.pgm").read_bytes()
    assert raw.startswith(b"P5\n7 5\n65535\n")
    # big-endian sample order
    assert raw[-2:] == int(samples[-1, -1]).to_bytes(2, "big")
    np.testing.assert_array_equal(load_pgm(tmp_path / "a.pgm").brightness,
                                  load_pgm(tmp_path / "b.pgm").brightness)


def test_p5_8bit_round_trip(tmp_path, rng):
    samples = rng.integers(0, 256, (4, 9))
    write_pgm(tmp_path / "a.pgm", samples)
    arr, maxval = parse_pgm((tmp_path / "a.pgm").read_bytes())
    assert maxval == 255
    np.testing.assert_array_equal(arr, samples)


def test_header_comments():
    arr, _ = parse_pgm(b"P2\n# made by hand\n3 1 # width height\n255\n1 2 3\n")
    np.testing.assert_array_equal(arr, [[1, 2, 3]])


@pytest.mark.parametrize("data,exc", [
    (b"P6 2 2 255\n", MalformedHeader),
    (b"P3 2 2 255 0 0 0 0", MalformedHeader),
    (b"P2 2 x 255 0 0 0 0", MalformedHeader),
    (b"P2 2 2", MalformedHeader),
    (b"P2 0 2 255", MalformedHeader),
    (b"P2 2 2 1023 0 0 0 0", UnsupportedMaxval),
    (b"P2 2 2 255 0 0 0", TruncatedData),
    (b"P5 2 2 255\n\x00\x01", TruncatedData),
    (b"P5 2 2 65535\n\x00\x01\x00\x02\x00\x03", TruncatedData),
    (b"P2 2 2 255 0 1 2 x", MalformedData),
    (b"P2 2 2 255 0 1 2 300", MalformedData),
    (b"P2 1 1 255 0 5", MalformedData),
])
def test_pgm_errors(data, exc):
    with pytest.raises(exc):
        parse_pgm(data)


def test_load_frames_directory(tmp_path):
    for i in range(3):
        write_pgm(tmp_path / f"f{i:02d}.pgm", np.full((4, 4), 50 * i))
    frames = load_frames(tmp_path, fps=25)
    assert [f.timestamp for f in frames] == pytest.approx([0.0, 0.04, 0.08])
    assert frames[2].brightness[0, 0] == pytest.approx(100 / 255)
    with pytest.raises(FileNotFoundError):
        load_frames(tmp_path / "nothing")


def _csv(tmp_path, text):
    p = tmp_path / "s.csv"
    p.write_text(text, encoding="utf-8")
    return p


def test_csv_two_rows(tmp_path):
    p = _csv(tmp_path, "subject,x,y,onset,duration\nA,1,2,0.0,0.2\nA,3,4,0.5,0.1\n")
    paths, clamped = load_fixations_csv(p, Grid(10, 10))
    assert list(paths) == ["A"] and clamped == 0
    assert [(f.x, f.y) for f in paths["A"].fixations] == [(1.0, 2.0), (3.0, 4.0)]
    assert paths["A"].stimulus == "s"


def test_csv_sorted_and_grouped(tmp_path):
    p = _csv(tmp_path, "onset,subject,duration,x,y\n0.9,B,0.1,1,1\n0.5,A,0.1,2,2\n0.1,B,0.2,3,3\n")
    paths, _ = load_fixations_csv(p, Grid(10, 10))
    assert [f.onset for f in paths["B"].fixations] == [0.1, 0.9]
    assert len(paths["A"]) == 1


def test_csv_clamps(tmp_path):
    p = _csv(tmp_path, "subject,x,y,onset,duration\nA,20,3,0,0.1\n")
    paths, clamped = load_fixations_csv(p, Grid(10, 10))
    assert clamped == 1 and paths["A"].fixations[0].x == 9.0


def test_csv_missing_column(tmp_path):
    with pytest.raises(MissingColumn):
        load_fixations_csv(_csv(tmp_path, "subject,x,y,duration\nA,1,1,0.1\n"), Grid(5, 5))


@pytest.mark.parametrize("row", ["A,1,one,0,0.1", "A,1,1,0,-0.1", "A,1,1,0", ",1,1,0,0.1",
                                 "A,nan,1,0,0.1"])
def test_csv_bad_row(tmp_path, row):
    p = _csv(tmp_path, f"subject,x,y,onset,duration\nA,1,1,0,0.1\n{row}\n")
    with pytest.raises(UnparsableRow) as info:
        load_fixations_csv(p, Grid(5, 5))
    assert info.value.row == 3


def test_scanpath_json_round_trip(tmp_path):
    sp = Scanpath([Fixation(1.25, 2.5, 0.0, 0.3), Fixation(7.0, 3.125, 0.4, 1.2)],
                  stimulus="img", seed=4, model="DW")
    write_scanpath_json(tmp_path / "p.json", sp)
    assert read_scanpath_json(tmp_path / "p.json") == sp
    doc = json.loads((tmp_path / "p.json").read_text())
    assert set(doc) == {"stimulus", "seed", "model", "fixations"}
    assert set(doc["fixations"][0]) == {"x", "y", "onset", "duration"}


def test_saliency_constant_map(tmp_path):
    write_saliency_pgm(tmp_path / "s.pgm", np.full((4, 5), 0.25))
    arr, maxval = parse_pgm((tmp_path / "s.pgm").read_bytes())
    assert maxval == 65535 and np.all(arr == 0)
    scale = json.loads(sidecar_path(tmp_path / "s.pgm").read_text())
    assert scale["min"] == scale["max"] == 0.25
    np.testing.assert_array_equal(read_saliency_pgm(tmp_path / "s.pgm"), np.full((4, 5), 0.25))


def test_saliency_round_trip_quantization(tmp_path, rng):
    sal = rng.uniform(size=(8, 8))
    write_saliency_pgm(tmp_path / "s.pgm", sal)
    back = read_saliency_pgm(tmp_path / "s.pgm")
    assert np.max(np.abs(back - sal)) <= 1 / 65535
    assert back.min() == sal.min() and back.max() == pytest.approx(sal.max(), abs=1e-15)


def test_scan_dataset(tmp_path):
    stim, fix = tmp_path / "stim", tmp_path / "fix"
    stim.mkdir()
    fix.mkdir()
    for name in ("a", "b", "c"):
        write_pgm(stim / f"{name}.pgm", np.zeros((4, 4), dtype=int))
    (stim / "v").mkdir()
    write_pgm(stim / "v" / "0001.pgm", np.zeros((4, 4), dtype=int))
    (stim / "notes.txt").write_text("ignored")
    for name in ("a", "c", "v"):
        (fix / f"{name}.csv").write_text("subject,x,y,onset,duration\n")
    matched, unmatched = scan_dataset(stim, fix)
    assert [r.id for r in matched] == ["a", "c", "v"]
    assert unmatched == ["b"]
    assert matched[2].frame_paths == [stim / "v" / "0001.pgm"]
