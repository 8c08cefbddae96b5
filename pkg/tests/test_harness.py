import json

import pytest

from narrfunc import annotation, harness, metrics
from narrfunc.annotation import AnnotatedSegment, parse_inline
from narrfunc.errors import BackendUnreachable, MissingSidecar, ReplayMiss
from narrfunc.harness import (
    BackendConfig,
    ContinuationRun,
    RecognitionRun,
    ReplayBackend,
    build_payload,
    make_backend,
    parse_model_output,
    request_digest,
    run_continuation,
    run_recognition,
)

from conftest import DATA


@pytest.fixture
def segments(passages):
    out = []
    for i, text in enumerate(passages, start=1):
        clean, anns = parse_inline(text)
        out.append(AnnotatedSegment(f"passage{i}", "Fantasy", clean, anns))
    return out


class TestParseModelOutput:
    def test_inline_markers(self):
        pred = parse_model_output("…way out. (K) … later (J)", 2)
        assert pred.per_instance == ["K", "J"]
        assert pred.extras == 0

    def test_trailing_hyphen_line(self):
        text = "Analysis follows.\n\nA-Lo-E-Q-P-S\n"
        pred = parse_model_output(text, 6)
        assert pred.per_instance == ["A", "Lo", "E", "Q", "P", "S"]

    def test_free_prose(self):
        pred = parse_model_output("no recognizable structure at all", 3)
        assert pred.per_instance == [None, None, None]
        assert pred.extras == 0

    def test_surplus_counts_as_extras(self):
        pred = parse_model_output("(A) (K) (Q) (S)", 2)
        assert pred.per_instance == ["A", "K"]
        assert pred.extras == 2

    def test_shortfall_padded_absent(self):
        pred = parse_model_output("(A)", 3)
        assert pred.per_instance == ["A", None, None]

    def test_empty_text(self):
        pred = parse_model_output("", 2)
        assert pred.per_instance == [None, None]


class TestMockRecognition:
    def test_echo_gold_scores_perfect(self, segments):
        cfg = BackendConfig(kind="mock")
        run = RecognitionRun(segments=segments, rounds=3, preds_per_round=2)
        result = run_recognition(cfg, run)
        assert result.errors == []
        assert result.requests == 3 * 2 * len(segments)
        for split in (result.report.common, result.report.rare,
                      result.report.sum):
            for summary in split.values():
                assert summary.mean == 1.0 and summary.std == 0.0

    def test_deterministic_across_runs(self, segments):
        cfg = BackendConfig(kind="mock", max_parallel=4)
        run = RecognitionRun(segments=segments, rounds=2, preds_per_round=3,
                             seed=7)
        a = run_recognition(cfg, run)
        b = run_recognition(cfg, run)
        assert a.report == b.report
        assert a.errors == b.errors


class TestReplayRecognition:
    def _fixture_path(self, tmp_path, segments, responses):
        """Record one response per (round, pred, segment) request digest."""
        cfg = BackendConfig(kind="replay", replay_path="unused")
        system = harness.DEFAULT_RECOGNITION_TEMPLATE.format(
            functions=harness.functions_block())
        path = tmp_path / "replay.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            for r in range(10):
                for p in range(5):
                    for seg in segments:
                        tag = (f"recognition:seed=0:round={r}:pred={p}"
                               f":seg={seg.id}")
                        payload = build_payload(cfg, system, seg.clean_text, tag)
                        fh.write(json.dumps({
                            "request_digest": request_digest(payload),
                            "response_text": responses[seg.id],
                        }, ensure_ascii=False) + "\n")
        return str(path)

    def test_four_of_eleven_hits(self, tmp_path, segments):
        # correct on K,J,K,De of passage1; valid-but-wrong elsewhere
        responses = {
            "passage1": "K-J-K-De-B-B-B",
            "passage2": "B-C-D-H",
        }
        path = self._fixture_path(tmp_path, segments, responses)
        cfg = BackendConfig(kind="replay", replay_path=path)
        run = RecognitionRun(segments=segments, rounds=10, preds_per_round=5,
                             seed=0)
        result = run_recognition(cfg, run)
        assert result.errors == []
        assert result.report.sum["accuracy"].mean == pytest.approx(
            0.364, abs=5e-4)
        assert result.report.sum["accuracy"].std == pytest.approx(0.0, abs=1e-12)

    def test_replay_miss_lands_in_ledger(self, tmp_path, segments):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        cfg = BackendConfig(kind="replay", replay_path=str(path))
        run = RecognitionRun(segments=segments, rounds=2, preds_per_round=2)
        result = run_recognition(cfg, run)
        assert len(result.errors) == result.requests
        assert all(e["error"] == "ReplayMiss" for e in result.errors)
        for summary in result.report.sum.values():
            assert summary.mean == 0.0

    def test_missing_fixture_file(self):
        with pytest.raises(BackendUnreachable):
            make_backend(BackendConfig(kind="replay", replay_path="/no/file"))

    def test_replay_miss_digest(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        backend = ReplayBackend(str(path))
        with pytest.raises(ReplayMiss):
            backend.complete({"model": "m", "messages": [], "tag": "t"})


class TestContinuation:
    def test_mock_is_deterministic(self, segments):
        cfg = BackendConfig(kind="mock")
        run = ContinuationRun(preface=segments[0], n_episodes=2)
        episodes_a, seqs_a = run_continuation(cfg, run)
        episodes_b, seqs_b = run_continuation(cfg, run)
        assert episodes_a == episodes_b
        assert len(episodes_a) == 2
        assert [s.symbols for s in seqs_a] == [s.symbols for s in seqs_b]
        assert all(s.symbols == ["A", "Q", "S"] for s in seqs_a)

    def test_replay_with_episodes_sidecars(self, tmp_path, segments):
        doubao_lines = [
            line for line in
            (DATA / "episodes_doubao.seq").read_text().splitlines()
            if line and not line.startswith("#")]
        sidecars = []
        for i, line in enumerate(doubao_lines):
            p = tmp_path / f"ep{i}.seq"
            p.write_text(line + "\n")
            sidecars.append(str(p))
        cfg = BackendConfig(kind="replay", replay_path=str(tmp_path / "r.jsonl"))
        replay = tmp_path / "r.jsonl"
        with open(replay, "w") as fh:
            for i in range(5):
                payload = build_payload(
                    cfg, harness.DEFAULT_CONTINUATION_TEMPLATE,
                    segments[0].clean_text, f"continuation:seed=0:episode={i}")
                fh.write(json.dumps({
                    "request_digest": request_digest(payload),
                    "response_text": f"episode {i} text",
                }) + "\n")
        run = ContinuationRun(preface=segments[0], n_episodes=5,
                              annotation_mode="file", sidecar_paths=sidecars)
        episodes, seqs = run_continuation(cfg, run)
        assert len(episodes) == 5
        assert ["-".join(s.symbols) for s in seqs] == doubao_lines

    def test_missing_sidecar(self, segments):
        cfg = BackendConfig(kind="mock")
        run = ContinuationRun(preface=segments[0], n_episodes=5,
                              annotation_mode="file",
                              sidecar_paths=["a", "b", "c", "d"])
        with pytest.raises(MissingSidecar):
            run_continuation(cfg, run)


class TestHttpConfig:
    def test_requires_endpoint_and_model(self):
        with pytest.raises(BackendUnreachable):
            make_backend(BackendConfig(kind="http"))

    def test_env_endpoint_override(self, monkeypatch):
        monkeypatch.setenv(harness.ENV_API_URL, "http://example.test/v1")
        backend = make_backend(BackendConfig(kind="http", model_name="m"))
        assert backend.endpoint == "http://example.test/v1"
