import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emlang.corpus import (
    Corpus,
    EnvConfig,
    EpisodeRecord,
    audit_overlap,
    dumps_record,
    generate_split,
    make_episode,
    read_jsonl,
    record_observation,
    validate_record,
    write_jsonl,
)
from emlang.env import ObservationKind, extract_window
from emlang.errors import ConfigError, ParseError, ValidationError

CFG16 = EnvConfig(num_points=16, num_distractors=3, vocab_size=26)
SEQ16 = (7, 5, 2, 12, 10, 4, 3, 15, 16, 13, 14, 6, 9, 8, 11, 1)


def record_for(seq, target_index, k=3, message=()):
    obs = extract_window(seq, target_index)
    candidates = [v for v in range(len(seq)) if v != seq[target_index]][:k]
    candidates.insert(0, seq[target_index])
    return EpisodeRecord(
        seq=tuple(seq),
        obs=obs.window,
        obs_kind=obs.kind,
        target_value=seq[target_index],
        target_index=target_index,
        candidates=tuple(candidates),
        target_position=0,
        message=tuple(message),
    )


class TestConfig:
    def test_roundtrip(self):
        cfg = EnvConfig(num_points=20, seed=5)
        assert EnvConfig.from_json_dict(cfg.to_json_dict()) == cfg

    def test_schema_keys_exact(self):
        keys = list(EnvConfig().to_json_dict())
        assert keys == [
            "num_points",
            "num_distractors",
            "vocab_size",
            "message_length",
            "window",
            "seed",
        ]

    def test_rejects_bad_values(self):
        with pytest.raises(ConfigError):
            EnvConfig(num_points=4).validate()
        with pytest.raises(ConfigError):
            EnvConfig(window=7).validate()
        with pytest.raises(ConfigError):
            EnvConfig(num_points=5, num_distractors=5).validate()
        with pytest.raises(ValidationError):
            EnvConfig.from_json_dict({"num_points": 10, "bogus": 1})


class TestMakeEpisode:
    def test_deterministic(self):
        assert make_episode(42, CFG16) == make_episode(42, CFG16)

    def test_consistency_invariants(self):
        for seed in range(30):
            record = make_episode(seed, CFG16)
            validate_record(record, CFG16)

    def test_paper_shaped_middle_record(self):
        # a record over the worked 16-point sequence with target index 5
        record = record_for(SEQ16, 5)
        assert record.obs == (12, 10, -1, 3, 15)
        validate_record(record, CFG16)

    def test_whole_sequence_window(self):
        cfg = EnvConfig(num_points=5, num_distractors=3)
        record = make_episode(0, cfg)
        rebuilt = list(record.obs)
        rebuilt[record.obs.index(-1)] = record.target_value
        assert tuple(rebuilt) == record.seq

    def test_record_observation_roundtrip(self):
        record = make_episode(7, CFG16)
        obs = record_observation(record)
        assert obs.window == record.obs
        assert obs.kind == record.obs_kind
        assert obs.window[obs.mask_slot - 1] == -1


class TestGenerateSplit:
    def test_sizes_and_determinism(self):
        a = generate_split(5, 50, CFG16, "train")
        b = generate_split(5, 50, CFG16, "train")
        assert len(a) == 50
        assert a.records == b.records

    def test_different_seeds_differ(self):
        a = generate_split(1, 20, EnvConfig(num_points=60))
        b = generate_split(2, 20, EnvConfig(num_points=60))
        assert {r.seq for r in a.records}.isdisjoint({r.seq for r in b.records})

    def test_n_must_be_positive(self):
        with pytest.raises(ConfigError):
            generate_split(0, 0, CFG16)


class TestJsonl:
    def test_roundtrip_identity(self):
        corpus = generate_split(9, 40, CFG16, "t")
        buf = io.StringIO()
        write_jsonl(corpus, buf)
        back = read_jsonl(io.StringIO(buf.getvalue()), CFG16, "t")
        assert back.records == corpus.records

    def test_canonical_bytes(self):
        corpus = generate_split(9, 25, CFG16)
        first = io.StringIO()
        second = io.StringIO()
        write_jsonl(corpus, first)
        write_jsonl(corpus, second)
        assert first.getvalue() == second.getvalue()

    def test_field_order_fixed(self):
        record = make_episode(3, CFG16)
        keys = list(json.loads(dumps_record(record)))
        assert keys == [
            "seq",
            "obs",
            "obs_kind",
            "target_value",
            "target_index",
            "candidates",
            "target_position",
            "message",
        ]

    def test_target_position_serialized_one_based(self):
        record = make_episode(3, CFG16)
        data = json.loads(dumps_record(record))
        assert data["target_position"] == record.target_position + 1
        assert data["candidates"][data["target_position"] - 1] == data["target_value"]

    def test_missing_field_is_error_with_line(self):
        record = make_episode(3, CFG16)
        data = json.loads(dumps_record(record))
        del data["message"]
        text = dumps_record(make_episode(4, CFG16)) + "\n" + json.dumps(data) + "\n"
        with pytest.raises(ParseError) as err:
            read_jsonl(io.StringIO(text), CFG16)
        assert "line 2" in str(err.value)

    def test_bad_message_length_is_error(self):
        record = make_episode(3, CFG16)
        data = json.loads(dumps_record(record))
        data["message"] = [1, 2]
        with pytest.raises(ParseError):
            read_jsonl(io.StringIO(json.dumps(data) + "\n"), CFG16)

    def test_malformed_json_is_error_with_line(self):
        with pytest.raises(ParseError) as err:
            read_jsonl(io.StringIO("{not json}\n"), CFG16)
        assert err.value.line == 1

    def test_empty_corpus_is_error(self):
        with pytest.raises(ValidationError):
            read_jsonl(io.StringIO(""), CFG16)

    def test_inferred_config(self):
        corpus = generate_split(9, 10, CFG16)
        buf = io.StringIO()
        write_jsonl(corpus, buf)
        back = read_jsonl(io.StringIO(buf.getvalue()))
        assert back.config.num_points == 16
        assert back.config.num_distractors == 3

    @given(st.integers(0, 10**6), st.integers(1, 30))
    @settings(max_examples=25, deadline=None)
    def test_roundtrip_property(self, seed, n):
        corpus = generate_split(seed, n, CFG16)
        buf = io.StringIO()
        write_jsonl(corpus, buf)
        assert read_jsonl(io.StringIO(buf.getvalue()), CFG16).records == corpus.records


class TestOverlapAudit:
    def test_self_overlap(self):
        corpus = generate_split(1, 30, CFG16)
        assert audit_overlap(corpus, corpus) == 1.0

    def test_disjoint(self):
        cfg = EnvConfig(num_points=60)
        a = generate_split(10, 30, cfg)
        b = generate_split(20, 30, cfg)
        assert audit_overlap(a, b) == 0.0

    def test_partial(self):
        corpus = generate_split(1, 10, CFG16)
        half = Corpus(records=corpus.records[:5], config=CFG16)
        assert audit_overlap(half, corpus) == 1.0
        assert audit_overlap(corpus, half) == 0.5

    def test_config_mismatch(self):
        a = generate_split(1, 5, CFG16)
        b = generate_split(1, 5, EnvConfig(num_points=60))
        with pytest.raises(ConfigError):
            audit_overlap(a, b)

    def test_sequence_key(self):
        corpus = generate_split(1, 10, CFG16)
        shifted = Corpus(
            records=[
                EpisodeRecord(
                    seq=r.seq,
                    obs=extract_window(r.seq, (r.target_index + 5) % 16).window,
                    obs_kind=extract_window(r.seq, (r.target_index + 5) % 16).kind,
                    target_value=r.seq[(r.target_index + 5) % 16],
                    target_index=(r.target_index + 5) % 16,
                    candidates=r.candidates,
                    target_position=r.target_position,
                )
                for r in corpus.records
            ],
            config=CFG16,
        )
        # same sequences, different targets
        assert audit_overlap(corpus, shifted, key="sequence") == 1.0
        assert audit_overlap(corpus, shifted, key="episode") == 0.0

    def test_thousand_random_split_pairs_never_overlap(self):
        # sequence space at N=60 is astronomically larger than any sample
        cfg = EnvConfig(num_points=60)
        splits = [generate_split(seed, 20, cfg) for seed in range(100)]
        checked = 0
        for i in range(100):
            for j in range(i + 1, 100):
                if checked >= 1000:
                    break
                assert audit_overlap(splits[i], splits[j]) == 0.0
                checked += 1
        assert checked == 1000
