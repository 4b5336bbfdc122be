"""Dataset parsing, smoothing policy, and serialization round trips."""

import json
import os

import numpy as np
import pytest

from jeffreys import ValidationError, load_dataset, parse_dataset, read_pgm, write_dataset
from jeffreys.datasets import FORMAT_CSV, FORMAT_JSON, FORMAT_PGM


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def write_pgm(path, width, height, pixels, maxval=255, comment=True):
    header = b"P5\n"
    if comment:
        header += b"# synthetic test image\n"
    header += f"{width} {height}\n{maxval}\n".encode()
    path.write_bytes(header + bytes(pixels))
    return path


class TestCSV:
    def test_basic(self, tmp_path):
        p = write(tmp_path, "x.csv", "1,2,3\n4,5,6\n")
        s = parse_dataset(p, FORMAT_CSV, "positive")
        assert s.n == 2 and s.d == 3
        assert np.allclose(s.weights, [0.5, 0.5])
        assert np.allclose(s.matrix, [[1, 2, 3], [4, 5, 6]])

    def test_weight_prefix(self, tmp_path):
        p = write(tmp_path, "w.csv", "weight:0.25,1,2\nweight:0.75,3,4\n")
        s = parse_dataset(p, FORMAT_CSV, "positive")
        assert np.allclose(s.weights, [0.25, 0.75])

    def test_mixed_weight_rows_rejected(self, tmp_path):
        p = write(tmp_path, "m.csv", "weight:0.25,1,2\n3,4\n")
        with pytest.raises(ValidationError, match="all rows or none"):
            parse_dataset(p, FORMAT_CSV, "positive")

    def test_malformed_cell_reports_position(self, tmp_path):
        p = write(tmp_path, "bad.csv", "1,2\n1,zap\n")
        with pytest.raises(ValidationError, match=r"bad\.csv:2:2"):
            parse_dataset(p, FORMAT_CSV, "positive")

    def test_ragged_rows_rejected(self, tmp_path):
        p = write(tmp_path, "ragged.csv", "1,2,3\n1,2\n")
        with pytest.raises(ValidationError, match="expected 3"):
            parse_dataset(p, FORMAT_CSV, "positive")

    def test_frequency_validation(self, tmp_path):
        good = write(tmp_path, "f.csv", "0.5,0.5\n0.9,0.1\n")
        s = parse_dataset(good, FORMAT_CSV, "frequency")
        assert s.is_frequency()
        bad = write(tmp_path, "g.csv", "0.5,0.4\n0.9,0.1\n")
        with pytest.raises(ValidationError, match="declared frequency"):
            parse_dataset(bad, FORMAT_CSV, "frequency")

    def test_zero_bins_smoothed(self, tmp_path):
        p = write(tmp_path, "z.csv", "0,4\n2,2\n")
        s = parse_dataset(p, FORMAT_CSV, "positive")
        assert s.matrix[0, 0] == pytest.approx(2e-10)
        assert np.all(s.matrix > 0.0)


class TestJSON:
    def test_with_weights(self, tmp_path):
        payload = {"weights": [0.25, 0.75], "histograms": [[1, 2], [3, 4]]}
        p = write(tmp_path, "d.json", json.dumps(payload))
        s = parse_dataset(p, FORMAT_JSON, "positive")
        assert np.allclose(s.weights, [0.25, 0.75])

    def test_without_weights(self, tmp_path):
        p = write(tmp_path, "d.json", json.dumps({"histograms": [[1, 2], [3, 4]]}))
        s = parse_dataset(p, FORMAT_JSON, "positive")
        assert np.allclose(s.weights, [0.5, 0.5])

    def test_malformed(self, tmp_path):
        p = write(tmp_path, "d.json", "{nope")
        with pytest.raises(ValidationError, match="malformed JSON"):
            parse_dataset(p, FORMAT_JSON, "positive")
        q = write(tmp_path, "e.json", json.dumps({"rows": []}))
        with pytest.raises(ValidationError, match="histograms"):
            parse_dataset(q, FORMAT_JSON, "positive")

    def test_non_positive_weight(self, tmp_path):
        payload = {"weights": [0.0, 1.0], "histograms": [[1, 2], [3, 4]]}
        p = write(tmp_path, "d.json", json.dumps(payload))
        with pytest.raises(ValidationError, match="weights"):
            parse_dataset(p, FORMAT_JSON, "positive")


class TestPGM:
    def test_four_pixel_image(self, tmp_path):
        p = write_pgm(tmp_path / "t.pgm", 2, 2, [0, 0, 255, 255])
        pixels = read_pgm(p)
        assert list(pixels) == [0, 0, 255, 255]
        s = parse_dataset(p, FORMAT_PGM, "positive")
        assert s.d == 256
        # the two populated bins keep their counts (plus epsilon smoothing)
        assert s.matrix[0, 0] == pytest.approx(2.0, abs=1e-6)
        assert s.matrix[0, 255] == pytest.approx(2.0, abs=1e-6)
        assert np.all(s.matrix[0] > 0.0)

    def test_frequency_kind_normalizes_counts(self, tmp_path):
        p = write_pgm(tmp_path / "t.pgm", 2, 2, [7, 7, 7, 9])
        s = parse_dataset(p, FORMAT_PGM, "frequency")
        assert s.matrix[0].sum() == pytest.approx(1.0, abs=1e-12)
        # 3/4 of the pixels, up to the 256-bin epsilon smoothing mass
        assert s.matrix[0, 7] == pytest.approx(0.75, abs=1e-7)

    def test_directory_ingestion(self, tmp_path):
        d = tmp_path / "imgs"
        d.mkdir()
        write_pgm(d / "b.pgm", 1, 2, [1, 2])
        write_pgm(d / "a.pgm", 2, 1, [3, 4])
        s = parse_dataset(d, FORMAT_PGM, "positive")
        assert s.n == 2
        # sorted order: a.pgm first
        assert s.matrix[0, 3] == pytest.approx(1.0, abs=1e-6)
        assert s.matrix[1, 1] == pytest.approx(1.0, abs=1e-6)

    def test_rejects_16_bit(self, tmp_path):
        p = write_pgm(tmp_path / "t.pgm", 1, 1, [0, 0], maxval=65535)
        with pytest.raises(ValidationError, match="8-bit"):
            read_pgm(p)

    def test_rejects_truncated(self, tmp_path):
        p = write_pgm(tmp_path / "t.pgm", 4, 4, [1, 2, 3])
        with pytest.raises(ValidationError, match="truncated"):
            read_pgm(p)

    def test_rejects_wrong_magic(self, tmp_path):
        p = tmp_path / "t.pgm"
        p.write_bytes(b"P2\n1 1\n255\n0")
        with pytest.raises(ValidationError, match="P5"):
            read_pgm(p)


class TestEpsilonOverride:
    def test_env_variable(self, tmp_path, monkeypatch):
        p = write(tmp_path, "z.csv", "0,4\n2,2\n")
        monkeypatch.setenv("JEFFREYS_EPSILON", "1e-6")
        s = parse_dataset(p, FORMAT_CSV, "positive")
        assert s.matrix[0, 0] == pytest.approx(2e-6)
        monkeypatch.setenv("JEFFREYS_EPSILON", "bogus")
        with pytest.raises(ValidationError, match="JEFFREYS_EPSILON"):
            parse_dataset(p, FORMAT_CSV, "positive")

    def test_reported_in_dataset(self, tmp_path):
        p = write(tmp_path, "z.csv", "1,4\n")
        ds = load_dataset(p, FORMAT_CSV, "positive")
        assert ds.epsilon_scale == pytest.approx(1e-10)
        assert ds.declared_kind == "positive"


class TestRoundTrip:
    @pytest.mark.parametrize("fmt", [FORMAT_CSV, FORMAT_JSON])
    def test_serialize_parse_exact(self, tmp_path, fmt, rng):
        rows = rng.uniform(0.01, 1.0, size=(4, 7))
        weights = rng.uniform(0.2, 1.0, size=4)
        weights /= weights.sum()
        from jeffreys import WeightedHistogramSet

        s = WeightedHistogramSet.from_rows(rows, weights)
        ext = "csv" if fmt == FORMAT_CSV else "json"
        path = tmp_path / f"round.{ext}"
        write_dataset(s, path, fmt)
        back = parse_dataset(path, fmt, "positive")
        # shortest round-trip decimals reproduce every bin bit for bit
        assert np.array_equal(back.matrix, s.matrix)
        assert np.allclose(back.weights, s.weights, atol=1e-15)
