"""Temporal beam search: decay oracle, hand-scored chains, exhaustive
enumeration equality, admissibility, and gating."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentseek.corpus import Keyframe
from momentseek.errors import NegativeGap, NoValidSequence, ScorerFailure
from momentseek.rerank import ConstantScorer, CrossScorer
from momentseek.temporal import (
    EventCandidate,
    TemporalConfig,
    beam_search,
    decay,
    finalize,
)

from oracles import exhaustive_sequences, series_exp


class TestDecay:
    def test_zero_gap_is_exactly_one(self):
        assert decay(0.01, 0.0) == 1.0

    def test_against_series_oracle(self):
        assert decay(0.01, 100.0) == pytest.approx(series_exp(-1.0, terms=30), abs=1e-9)

    def test_alpha_zero_disables_decay(self):
        for dt in (0.0, 5.0, 500.0):
            assert decay(0.0, dt) == 1.0

    def test_negative_gap_rejected(self):
        with pytest.raises(NegativeGap):
            decay(0.01, -1.0)

    def test_strictly_monotone_on_grid(self):
        values = [decay(0.01, float(dt)) for dt in range(0, 301)]
        assert all(a > b for a, b in zip(values, values[1:]))


def cand(kf_id, t, s, video="v1"):
    return EventCandidate(kf_id, video, float(t), float(s))


def random_instance(rng, k: int, m: int, n_videos: int = 1):
    per_event = []
    for event in range(k):
        pool = []
        for j in range(m):
            video = f"v{rng.integers(n_videos)}"
            pool.append(EventCandidate(
                keyframe_id=f"e{event}_c{j}",
                video_id=video,
                t=float(rng.uniform(0, 120)),
                s=float(rng.uniform(0, 1)),
            ))
        per_event.append(pool)
    return per_event


class TestBeamSearch:
    def test_single_event_ranks_by_score(self):
        pool = [cand("a", 5, 0.3), cand("b", 2, 0.9), cand("c", 9, 0.6)]
        out = beam_search([pool], TemporalConfig())
        assert [s.events[0][0].keyframe_id for s in out] == ["b", "c", "a"]
        assert all(s.events[0][1] == 1.0 for s in out)
        assert out[0].cumulative == pytest.approx(0.9)

    def test_compact_chain_beats_spread_chain(self):
        # two chains, equal scores s=0.9: gaps (2s, 2s) vs (30s, 30s)
        per_event = [
            [cand("a1", 10, 0.9), cand("b1", 40, 0.9)],
            [cand("a2", 12, 0.9), cand("b2", 70, 0.9)],
            [cand("a3", 14, 0.9), cand("b3", 100, 0.9)],
        ]
        out = beam_search(per_event, TemporalConfig(alpha=0.01, beam_width=8))
        compact = 0.9 + 0.9 * math.exp(-0.02) + 0.9 * math.exp(-0.02)
        spread = 0.9 + 0.9 * math.exp(-0.3) + 0.9 * math.exp(-0.3)
        assert out[0].keyframe_ids == ("a1", "a2", "a3")
        assert out[0].cumulative == pytest.approx(compact)  # ~2.6644
        best_spread = next(s for s in out if s.keyframe_ids[0] == "b1")
        assert best_spread.cumulative == pytest.approx(spread)  # ~2.2335
        assert compact > spread

    def test_matches_exhaustive_oracle_when_beam_wide(self):
        rng = np.random.Generator(np.random.PCG64(7))
        per_event = random_instance(rng, k=3, m=4)
        cfg = TemporalConfig(alpha=0.01, beam_width=16 + 5, max_sequences=5)
        out = beam_search(per_event, cfg)
        expected = exhaustive_sequences(per_event, 0.01, 5)
        assert len(out) == len(expected)
        for state, (score, ids, video) in zip(out, expected):
            assert state.keyframe_ids == ids
            assert state.video_id == video
            assert state.cumulative == pytest.approx(score, abs=1e-9)

    def test_no_valid_sequence(self):
        per_event = [[cand("a", 10, 0.5)], [cand("b", 5, 0.5)]]  # b earlier than a
        with pytest.raises(NoValidSequence):
            beam_search(per_event, TemporalConfig())

    def test_events_across_videos_only_rejected(self):
        per_event = [[cand("a", 1, 0.5, video="v1")], [cand("b", 2, 0.5, video="v2")]]
        with pytest.raises(NoValidSequence):
            beam_search(per_event, TemporalConfig())

    def test_lambda_first_event_is_one(self):
        per_event = [[cand("a", 50, 0.5)], [cand("b", 60, 0.5)]]
        out = beam_search(per_event, TemporalConfig(alpha=0.01))
        (first, lam1), (second, lam2) = out[0].events
        assert lam1 == 1.0
        assert lam2 == pytest.approx(math.exp(-0.1))

    def test_additive_robustness_zero_event(self):
        # single-candidate chains: zeroing one event's s removes exactly
        # s*lambda from the total and never collapses it
        chain = [[cand("a", 0, 0.8)], [cand("b", 10, 0.6)], [cand("c", 20, 0.9)]]
        full = beam_search(chain, TemporalConfig(alpha=0.01))[0]
        lam_b = full.events[1][1]
        zeroed = [[cand("a", 0, 0.8)], [cand("b", 10, 0.0)], [cand("c", 20, 0.9)]]
        partial = beam_search(zeroed, TemporalConfig(alpha=0.01))[0]
        assert partial.cumulative == pytest.approx(full.cumulative - 0.6 * lam_b)
        assert partial.cumulative > 0.0

    def test_monotone_gap_penalty(self):
        # widening a single gap strictly lowers the score (alpha>0, s>0)
        for gap in (5.0, 10.0, 40.0):
            chain = [[cand("a", 0, 0.8)], [cand("b", gap, 0.6)]]
            score = beam_search(chain, TemporalConfig(alpha=0.01))[0].cumulative
            wider = [[cand("a", 0, 0.8)], [cand("b", gap + 1, 0.6)]]
            assert beam_search(wider, TemporalConfig(alpha=0.01))[0].cumulative < score

    @given(seed=st.integers(min_value=0, max_value=10_000),
           k=st.integers(min_value=1, max_value=3),
           m=st.integers(min_value=1, max_value=5))
    @settings(max_examples=60, deadline=None)
    def test_properties_on_random_instances(self, seed, k, m):
        rng = np.random.Generator(np.random.PCG64(seed))
        per_event = random_instance(rng, k, m, n_videos=2)
        cfg = TemporalConfig(alpha=0.01, beam_width=4, max_sequences=5)
        try:
            out = beam_search(per_event, cfg)
        except NoValidSequence:
            return
        oracle_best = exhaustive_sequences(per_event, 0.01, 1)[0][0]
        for state in out:
            times = [c.t for c, _ in state.events]
            assert all(t2 > t1 for t1, t2 in zip(times, times[1:]))
            assert len({c.video_id for c, _ in state.events}) == 1
            # recomputed cumulative matches stored cumulative
            recomputed = state.events[0][0].s
            for (prev, _), (cur, _) in zip(state.events, state.events[1:]):
                recomputed += cur.s * math.exp(-0.01 * (cur.t - prev.t))
            assert state.cumulative == pytest.approx(recomputed, abs=1e-9)
        # admissibility: beam never beats the exhaustive optimum
        assert out[0].cumulative <= oracle_best + 1e-9


class FailingScorer(CrossScorer):
    def score(self, query_text, keyframe):
        raise ScorerFailure([keyframe.keyframe_id], "down")


class MapScorer(CrossScorer):
    def __init__(self, table):
        self.table = table

    def score(self, query_text, keyframe):
        return self.table[keyframe.keyframe_id]


def keyframes_for(per_event):
    return {
        c.keyframe_id: Keyframe(c.keyframe_id, "s", c.video_id, c.t, caption="x")
        for pool in per_event for c in pool
    }


class TestFinalize:
    def chains(self):
        compact = [
            [cand("a1", 10, 0.9), cand("b1", 40, 0.9)],
            [cand("a2", 12, 0.9), cand("b2", 70, 0.9)],
            [cand("a3", 14, 0.9), cand("b3", 100, 0.9)],
        ]
        return beam_search(compact, TemporalConfig(alpha=0.01, beam_width=8)), compact

    def test_identity_scorer_preserves_totals_and_order(self):
        sequences, per_event = self.chains()
        final, degraded = finalize(sequences, ["q1", "q2", "q3"],
                                   ConstantScorer(1.0), keyframes_for(per_event))
        assert not degraded
        assert [f.keyframe_ids for f in final] == [s.keyframe_ids for s in sequences]
        for f, s in zip(final, sequences):
            assert f.total_final == pytest.approx(s.cumulative)

    def test_zero_gate_removes_event_contribution(self):
        sequences, per_event = self.chains()
        table = {k: 1.0 for k in keyframes_for(per_event)}
        table["a2"] = 0.0
        final, _ = finalize(sequences[:1], ["q1", "q2", "q3"],
                            MapScorer(table), keyframes_for(per_event))
        seq = final[0]
        gated = next(e for e in seq.events if e.candidate.keyframe_id == "a2")
        assert gated.final == 0.0
        assert seq.total_final == pytest.approx(
            sum(e.final for e in seq.events if e.candidate.keyframe_id != "a2"))

    def test_gating_flips_order(self):
        # SS 2.664 vs 2.233; b=(1,0,0) vs (1,1,1) -> 0.9 vs 2.233
        sequences, per_event = self.chains()
        compact = next(s for s in sequences if s.keyframe_ids == ("a1", "a2", "a3"))
        spread = next(s for s in sequences if s.keyframe_ids == ("b1", "b2", "b3"))
        table = {"a1": 1.0, "a2": 0.0, "a3": 0.0, "b1": 1.0, "b2": 1.0, "b3": 1.0}
        final, _ = finalize([compact, spread], ["q1", "q2", "q3"],
                            MapScorer(table), keyframes_for(per_event))
        assert final[0].keyframe_ids == ("b1", "b2", "b3")
        assert final[0].total_final == pytest.approx(spread.cumulative)
        assert final[1].total_final == pytest.approx(0.9)

    def test_scorer_failure_falls_back_to_one(self):
        sequences, per_event = self.chains()
        final, degraded = finalize(sequences, ["q1", "q2", "q3"],
                                   FailingScorer(), keyframes_for(per_event))
        assert degraded
        assert [f.keyframe_ids for f in final] == [s.keyframe_ids for s in sequences]
        for f, s in zip(final, sequences):
            assert f.total_final == pytest.approx(s.cumulative)

    def test_duration_computed(self):
        sequences, per_event = self.chains()
        final, _ = finalize(sequences[:1], ["q1", "q2", "q3"],
                            ConstantScorer(1.0), keyframes_for(per_event))
        assert final[0].duration_s == pytest.approx(4.0)  # t 10 -> 14
