# pyre-strict
import io
import json
import os
import sys
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path
from typing import Any
from unittest.mock import patch

from evtcrypt.cli import EXIT_DATA, EXIT_KEY, EXIT_OK, EXIT_USAGE, SECRET_ENV, main, read_secret
from evtcrypt.formats.text import read_text

HAND_EXAMPLE = b"# evt v1 3 3\n100 1 1 1\n200 1 1 -1\n"


class CliTestCase(unittest.TestCase):
    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.env = patch.dict(os.environ, {SECRET_ENV: "0x5eed"})
        self.env.start()

    def tearDown(self) -> None:
        self.env.stop()
        self._tmp.cleanup()

    def path(self, name: str) -> str:
        return str(self.tmp / name)

    def run_cli(self, *argv: str) -> tuple[int, dict[str, Any]]:
        buf = io.StringIO()
        with redirect_stdout(buf):
            code = main(list(argv))
        return code, json.loads(buf.getvalue())

    def write_hand_example(self) -> str:
        path = self.path("hand.txt")
        Path(path).write_bytes(HAND_EXAMPLE)
        return path


class TestSecret(unittest.TestCase):
    def test_hex_and_decimal(self) -> None:
        with patch.dict(os.environ, {SECRET_ENV: "0xff"}):
            self.assertEqual(read_secret(), 255)
        with patch.dict(os.environ, {SECRET_ENV: "42"}):
            self.assertEqual(read_secret(), 42)

    def test_missing_secret_without_terminal(self) -> None:
        env = {k: v for k, v in os.environ.items() if k != SECRET_ENV}
        with patch.dict(os.environ, env, clear=True), patch.object(sys, "stdin", io.StringIO()):
            with redirect_stdout(io.StringIO()):
                self.assertEqual(main(["encrypt", "a.txt", "b.txt", "c.key"]), EXIT_USAGE)


class TestEncryptDecrypt(CliTestCase):
    def test_hand_example(self) -> None:
        src = self.write_hand_example()
        code, summary = self.run_cli("encrypt", src, self.path("enc.txt"), self.path("hand.key"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(summary["command"], "encrypt")
        self.assertEqual(summary["input_events"], 2)
        self.assertEqual(summary["output_events"], 18)
        self.assertEqual(summary["mask_pixels"], 8)
        self.assertEqual(summary["saturated_pixels"], 0)
        self.assertIn("elapsed_ms", summary)

    def test_zero_sigma(self) -> None:
        src = self.write_hand_example()
        code, _ = self.run_cli("encrypt", src, self.path("enc.txt"), self.path("k.key"), "--sigma", "0")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(set(read_text(self.path("enc.txt")).data["t"].to_list()), {100, 200})

    def test_round_trip_is_byte_identical(self) -> None:
        src = self.path("scene.evb")
        self.assertEqual(self.run_cli("gen", "edge-sweep", src, "--width", "32", "--height", "24", "--rate", "5000")[0], EXIT_OK)
        self.run_cli("encrypt", src, self.path("enc.evb"), self.path("scene.key"), "--seed", "9")
        code, summary = self.run_cli("decrypt", self.path("enc.evb"), self.path("scene.key"), self.path("dec.evb"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(summary["output_events"], 5000)
        self.assertEqual(Path(self.path("dec.evb")).read_bytes(), Path(src).read_bytes())

    def test_repeatable(self) -> None:
        src = self.write_hand_example()
        self.run_cli("encrypt", src, self.path("a.txt"), self.path("a.key"), "--seed", "3")
        self.run_cli("encrypt", src, self.path("b.txt"), self.path("b.key"), "--seed", "3")
        self.assertEqual(Path(self.path("a.txt")).read_bytes(), Path(self.path("b.txt")).read_bytes())
        self.assertEqual(Path(self.path("a.key")).read_bytes(), Path(self.path("b.key")).read_bytes())

    def test_missing_input(self) -> None:
        code, summary = self.run_cli("encrypt", self.path("nope.txt"), self.path("o.txt"), self.path("o.key"))
        self.assertEqual(code, EXIT_DATA)
        self.assertIn("error", summary)
        self.assertFalse(Path(self.path("o.txt")).exists())
        self.assertFalse(Path(self.path("o.key")).exists())

    def test_missing_input_without_secret(self) -> None:
        env = {k: v for k, v in os.environ.items() if k != SECRET_ENV}
        with patch.dict(os.environ, env, clear=True), patch.object(sys, "stdin", io.StringIO()):
            code, _ = self.run_cli("encrypt", self.path("nope.txt"), self.path("o.txt"), self.path("o.key"))
        self.assertEqual(code, EXIT_DATA)

    def test_overwrite_leaves_no_backups(self) -> None:
        src = self.write_hand_example()
        Path(self.path("o.txt")).write_bytes(b"old")
        code, _ = self.run_cli("encrypt", src, self.path("o.txt"), self.path("o.key"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(sorted(os.listdir(self.tmp)), ["hand.txt", "o.key", "o.txt"])
        self.assertNotEqual(Path(self.path("o.txt")).read_bytes(), b"old")

    def test_failed_rename_restores_outputs(self) -> None:
        src = self.write_hand_example()
        Path(self.path("o.txt")).write_bytes(b"old")
        key = Path(self.path("o.key"))
        real_replace = os.replace

        def replace(src_path: str, dst_path: str | Path) -> None:
            if Path(dst_path) == key:
                raise OSError("No space left on device")
            real_replace(src_path, dst_path)

        with patch("evtcrypt.cli.os.replace", side_effect=replace):
            code, _ = self.run_cli("encrypt", src, self.path("o.txt"), str(key))
        self.assertEqual(code, EXIT_DATA)
        self.assertEqual(Path(self.path("o.txt")).read_bytes(), b"old")
        self.assertEqual(sorted(os.listdir(self.tmp)), ["hand.txt", "o.txt"])

    def test_empty_stream(self) -> None:
        src = self.path("empty.txt")
        Path(src).write_bytes(b"# evt v1 3 3\n")
        code, _ = self.run_cli("encrypt", src, self.path("o.txt"), self.path("o.key"))
        self.assertEqual(code, EXIT_DATA)
        self.assertEqual(sorted(os.listdir(self.tmp)), ["empty.txt"])

    def test_invalid_config(self) -> None:
        src = self.write_hand_example()
        code, _ = self.run_cli("encrypt", src, self.path("o.txt"), self.path("o.key"), "--sigma", "-1")
        self.assertEqual(code, EXIT_USAGE)

    def test_wrong_secret(self) -> None:
        src = self.write_hand_example()
        self.run_cli("encrypt", src, self.path("enc.txt"), self.path("hand.key"))
        with patch.dict(os.environ, {SECRET_ENV: "0x5eee"}):
            code, _ = self.run_cli("decrypt", self.path("enc.txt"), self.path("hand.key"), self.path("dec.txt"))
        self.assertEqual(code, EXIT_KEY)
        self.assertFalse(Path(self.path("dec.txt")).exists())

    def test_corrupt_key(self) -> None:
        src = self.write_hand_example()
        self.run_cli("encrypt", src, self.path("enc.txt"), self.path("hand.key"))
        Path(self.path("hand.key")).write_bytes(b"EVK1garbage")
        code, _ = self.run_cli("decrypt", self.path("enc.txt"), self.path("hand.key"), self.path("dec.txt"))
        self.assertEqual(code, EXIT_KEY)

    def test_resolution_mismatch(self) -> None:
        src = self.write_hand_example()
        self.run_cli("encrypt", src, self.path("enc.txt"), self.path("hand.key"))
        tiny = self.path("tiny.txt")
        Path(tiny).write_bytes(b"# evt v1 1 1\n5 0 0 1\n")
        code, _ = self.run_cli("decrypt", tiny, self.path("hand.key"), self.path("dec.txt"))
        self.assertEqual(code, EXIT_DATA)


class TestAttackCommands(CliTestCase):
    def test_nnf_on_isolated_event(self) -> None:
        src = self.path("one.txt")
        Path(src).write_bytes(b"# evt v1 4 4\n100 1 1 1\n")
        code, summary = self.run_cli("attack", src, self.path("out.txt"), "--filter", "nnf")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(summary["output_events"], 0)
        self.assertEqual(Path(self.path("out.txt")).read_bytes(), b"# evt v1 4 4\n")

    def test_inject_then_attack_with_labels(self) -> None:
        src = self.path("scene.txt")
        self.run_cli("gen", "edge-sweep", src, "--width", "32", "--height", "24", "--rate", "4000")
        code, summary = self.run_cli("inject", src, self.path("noisy.txt"), "--snr", "1", "--seed", "2")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(summary["output_events"], 8000)
        self.assertTrue(Path(self.path("noisy.txt.labels")).exists())

        code, summary = self.run_cli("snr", self.path("noisy.txt"), self.path("noisy.txt.labels"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(summary["snr"], 1.0)
        self.assertEqual(summary["scale"], "linear")

        code, summary = self.run_cli(
            "attack", self.path("noisy.txt"), self.path("clean.txt"),
            "--labels", self.path("noisy.txt.labels"),
        )
        self.assertEqual(code, EXIT_OK)
        self.assertGreater(summary["post_snr"], summary["pre_snr"])
        self.assertTrue(Path(self.path("clean.txt.labels")).exists())

    def test_density_filter(self) -> None:
        src = self.path("scene.txt")
        self.run_cli("gen", "two-blobs", src, "--width", "32", "--height", "24", "--rate", "2000")
        code, summary = self.run_cli(
            "attack", src, self.path("out.txt"), "--filter", "density", "--voxel", "2", "2", "10000", "--min-count", "1"
        )
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(summary["output_events"], summary["input_events"])

    def test_label_length_mismatch(self) -> None:
        src = self.write_hand_example()
        labels = self.path("bad.labels")
        Path(labels).write_text("1\n")
        code, _ = self.run_cli("attack", src, self.path("out.txt"), "--labels", labels)
        self.assertEqual(code, EXIT_DATA)
        self.assertFalse(Path(self.path("out.txt")).exists())

    def test_label_encrypted(self) -> None:
        src = self.write_hand_example()
        self.run_cli("encrypt", src, self.path("enc.txt"), self.path("hand.key"))
        code, summary = self.run_cli("label", src, self.path("enc.txt"), self.path("enc.labels"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual((summary["signal"], summary["noise"]), (2, 16))


class TestFrameAndBench(CliTestCase):
    def test_empty_window(self) -> None:
        src = self.write_hand_example()
        code, _ = self.run_cli("frame", src, self.path("f.pgm"), "--t0", "300", "--t1", "400")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(Path(self.path("f.pgm")).read_bytes(), b"P5\n3 3\n255\n" + bytes([128] * 9))

    def test_edge_sweep_golden(self) -> None:
        src = self.path("sweep.txt")
        self.run_cli("gen", "edge-sweep", src, "--width", "8", "--height", "4", "--duration", "1000", "--rate", "8000000", "--seed", "1")
        code, summary = self.run_cli("frame", src, self.path("f.pgm"), "--t0", "0", "--t1", "124", "--mode", "count", "--html", self.path("f.html"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(summary["t1"], 124)
        pgm = Path(self.path("f.pgm")).read_bytes()
        header = b"P5\n8 4\n255\n"
        self.assertEqual(pgm[: len(header)], header)
        pixels = list(pgm[len(header) :])
        # leading edge is in column 0 and only rows 1 and 2 carry the bar
        self.assertEqual([pixels[r * 8] > 0 for r in range(4)], [False, True, True, False])
        self.assertEqual(sum(pixels[r * 8 + c] for r in range(4) for c in range(1, 8)), 0)
        self.assertIn(b"plotly", Path(self.path("f.html")).read_bytes().lower())

    def test_bench(self) -> None:
        code, summary = self.run_cli("bench", "--width", "16", "--height", "12", "--count", "200", "--trials", "2")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(summary["total_events"], 400)
        self.assertGreater(summary["events_per_sec"], 0)

    def test_usage_error(self) -> None:
        code, _ = self.run_cli("shred", "x")
        self.assertEqual(code, EXIT_USAGE)
        code, _ = self.run_cli("attack", "in.txt", "out.txt", "--filter", "median")
        self.assertEqual(code, EXIT_USAGE)


if __name__ == "__main__":
    unittest.main()
