import socket
import threading
import time

import pytest

from pairid.cli import main
from pairid.records import load_key, load_transcript


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture
def keyfiles(tmp_path):
    sk = tmp_path / "id.key"
    pk = tmp_path / "id.pub"
    assert main(["keygen", "--scheme", "owfid", "--seed", "cli", "--out", str(sk), "--pub-out", str(pk)]) == 0
    return sk, pk


class TestKeygen:
    def test_writes_loadable_records(self, keyfiles):
        sk, pk = keyfiles
        scheme, kp, _ = load_key(str(sk))
        assert scheme.value == "owfid" and kp.s is not None
        _, pub, _ = load_key(str(pk))
        assert pub.s is None

    def test_curve_backend_keygen(self, tmp_path):
        out = tmp_path / "curve.key"
        assert main(["keygen", "--scheme", "cdhid", "--backend", "tate", "--q", "59", "--out", str(out)]) == 0
        _, kp, _ = load_key(str(out))
        assert kp.suite.describe()["backend"] == "tate"


class TestProveVerify:
    def test_tcp_session(self, keyfiles, tmp_path):
        sk, pk = keyfiles
        port = free_port()
        transcript = tmp_path / "session.transcript"
        prover_rc = []

        def prove():
            prover_rc.append(main(["prove", "--key", str(sk), "--listen", f"127.0.0.1:{port}"]))

        thread = threading.Thread(target=prove)
        thread.start()
        # the prover accepts exactly one connection, so retry the real session
        # rather than probing the port
        deadline = time.monotonic() + 5
        while True:
            try:
                rc = main(["verify", "--pk", str(pk), "--connect", f"127.0.0.1:{port}",
                           "--transcript-out", str(transcript)])
                break
            except OSError:
                if time.monotonic() > deadline:
                    raise
                time.sleep(0.05)
        thread.join(timeout=5)
        assert rc == 0 and prover_rc == [0]
        t, _, _ = load_transcript(str(transcript))
        assert t.decision

    def test_public_record_cannot_prove(self, keyfiles):
        _, pk = keyfiles
        with pytest.raises(SystemExit):
            main(["prove", "--key", str(pk), "--listen", "127.0.0.1:1"])


class TestSignatures:
    def test_bls_roundtrip(self, tmp_path, capsys):
        sk = tmp_path / "bls.key"
        pk = tmp_path / "bls.pub"
        main(["keygen", "--scheme", "blsid", "--out", str(sk), "--pub-out", str(pk)])
        assert main(["sign", "--key", str(sk), "--message", "hello"]) == 0
        sig = capsys.readouterr().out.strip().splitlines()[-1].split(" = ")[1]
        assert main(["sigverify", "--pk", str(pk), "--message", "hello", "--sig", sig]) == 0
        assert "valid" in capsys.readouterr().out
        assert main(["sigverify", "--pk", str(pk), "--message", "other", "--sig", sig]) == 1

    def test_bb_roundtrip(self, tmp_path, capsys):
        sk = tmp_path / "bb.key"
        pk = tmp_path / "bb.pub"
        main(["keygen", "--scheme", "sdhid", "--out", str(sk), "--pub-out", str(pk)])
        capsys.readouterr()
        main(["sign", "--key", str(sk), "--message-hex", "0abc"])
        lines = dict(line.split(" = ") for line in capsys.readouterr().out.strip().splitlines())
        rc = main(["sigverify", "--pk", str(pk), "--message-hex", "0abc",
                   "--sig", lines["sig"], "--r", lines["r"]])
        assert rc == 0

    def test_signing_needs_secret(self, tmp_path):
        pk = tmp_path / "only.pub"
        main(["keygen", "--scheme", "blsid", "--out", str(tmp_path / "x.key"), "--pub-out", str(pk)])
        with pytest.raises(SystemExit):
            main(["sign", "--key", str(pk), "--message", "m"])


class TestBenchCommand:
    def test_all_schemes(self, capsys):
        assert main(["bench", "--all", "--sessions", "2"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 6
        assert all(line.endswith("ok") for line in lines)

    def test_single_scheme(self, capsys):
        assert main(["bench", "--scheme", "hls", "--sessions", "1"]) == 0
        assert capsys.readouterr().out.startswith("hls")


class TestLabCommand:
    @pytest.mark.parametrize("game", ["invert-cdh", "invert-ddh", "heavyrow", "extractor", "mitm"])
    def test_quick_games(self, game):
        assert main(["lab", "--game", game, "--p", "101", "--trials", "10", "--seed", "t"]) == 0

    def test_omcdh_game(self):
        assert main(["lab", "--game", "omcdh", "--p", "101", "--trials", "20", "--eps", "0.8"]) == 0

    def test_forgery_game(self):
        assert main(["lab", "--game", "forgery", "--p", "101", "--trials", "10", "--queries", "4"]) == 0


def test_selftest_runs():
    assert main(["selftest"]) == 0
