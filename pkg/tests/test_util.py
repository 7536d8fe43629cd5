import os

import numpy as np
import pandas as pd
import pytest

from pinnlab.Error import DimensionMismatch, ZeroReference
from pinnlab.Performance import Performance
from pinnlab.Util import Util


@pytest.mark.travis
def test_write_dataframe_append_follows_header(tmp_path):
    path = os.path.join(str(tmp_path), "log.csv")
    Util.write_dataframe(pd.DataFrame({"a": [1, 2], "b": [0.5, 0.25]}), "first", path)
    Util.write_dataframe(pd.DataFrame({"b": [0.125], "a": [3]}), "second", path, append=True)
    Util.write_dataframe(pd.DataFrame({"a": [], "b": []}), "empty", path, append=True)

    df = pd.read_csv(path)
    assert list(df.columns) == ["a", "b"]
    assert df["a"].tolist() == [1, 2, 3]
    assert df["b"].tolist() == [0.5, 0.25, 0.125]


@pytest.mark.travis
def test_write_json_converts_numpy(tmp_path):
    path = os.path.join(str(tmp_path), "metrics.json")
    Util.write_json({"x": np.float64(0.5), "n": np.int64(3), "ok": np.bool_(True), "v": np.arange(3)}, "metrics", path)
    text = open(path).read()
    assert '"n": 3' in text
    assert '"ok": true' in text
    assert Util.to_builtin({"v": np.arange(2)}) == {"v": [0, 1]}


@pytest.mark.travis
@pytest.mark.parametrize("colormap", Util.PPM_COLORMAPS)
def test_write_ppm(tmp_path, colormap):
    path  = os.path.join(str(tmp_path), "field.ppm")
    field = np.arange(12, dtype=np.float64).reshape(3, 4)
    Util.write_ppm(field, path, colormap)
    data = open(path, "rb").read()
    assert data.startswith(b"P6\n4 3\n255\n")
    assert len(data) == len(b"P6\n4 3\n255\n") + 3*12

    with pytest.raises(DimensionMismatch):
        Util.write_ppm(np.zeros(4), path)
    with pytest.raises(ValueError):
        Util.write_ppm(field, path, "viridis")


@pytest.mark.travis
def test_relative_l2():
    ref = np.array([3.0, 4.0])
    assert Util.relative_l2(np.array([3.0, 4.0]), ref) == 0.0
    assert Util.relative_l2(np.array([0.0, 0.0]), ref) == pytest.approx(1.0)
    assert Util.relative_l2(np.array([0.0, 4.0]), ref, mask=np.array([False, True])) == 0.0
    with pytest.raises(ZeroReference):
        Util.relative_l2(ref, np.zeros(2))
    with pytest.raises(DimensionMismatch):
        Util.relative_l2(ref, np.zeros(3))


@pytest.mark.travis
def test_process_memory():
    assert Util.get_process_mem_use_bytes() > 0


@pytest.mark.travis
def test_performance_records_steps_per_run(tmp_path):
    performance = Performance()
    performance.record_step_start("adpinn", "build")
    performance.record_step_start("adpinn", "train")
    performance.record_step_start("fdm", "solve")
    performance.record_step_end("fdm")
    performance.record_step_end("missing")
    performance.write(str(tmp_path))

    df = pd.read_csv(os.path.join(str(tmp_path), Performance.OUTPUT_PERFORMANCE_FILE))
    print(df)
    assert df[Performance.PERFORMANCE_COL_RUN].tolist()       == ["adpinn", "fdm", "adpinn"]
    assert df[Performance.PERFORMANCE_COL_STEP_NAME].tolist() == ["build", "solve", "train"]
    assert (df[Performance.PERFORMANCE_COL_STEP_DURATION] >= 0.0).all()
    assert len(performance.open_steps) == 0


@pytest.mark.travis
def test_performance_without_steps_writes_nothing(tmp_path):
    Performance().write(str(tmp_path))
    assert not os.path.exists(os.path.join(str(tmp_path), Performance.OUTPUT_PERFORMANCE_FILE))
