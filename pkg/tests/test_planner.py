"""Query planner: routing rules, expansion determinism, the LLM wire
contract with clamping and fallback, temporal event splitting."""

import httpx
import pytest

from momentseek.errors import EmptyEvent, EmptyQuery, LlmUnavailable, SchemaViolation
from momentseek.fusion import ASR, OCR, VIS
from momentseek.planner import (
    FALLBACK_FAIL,
    PlannerConfig,
    plan_llm,
    plan_rule_based,
    plan_temporal,
)


class TestRuleBased:
    def test_quoted_span_routes_to_ocr(self):
        plan = plan_rule_based('children holding a sign "Program: Financial Support"')
        assert plan.sub_queries[OCR] == "Program: Financial Support"
        assert plan.weights.w_ocr == 0.7
        assert plan.sub_queries[VIS].strip() == "children holding a sign"
        assert plan.weights.w_vis == 0.5

    def test_plain_visual_query_gets_solo_weight(self):
        plan = plan_rule_based("a blue bird on a branch")
        assert set(plan.sub_queries) == {VIS}
        assert plan.weights.w_vis == 0.8
        assert plan.weights.w_ocr == 0.0 and plan.weights.w_asr == 0.0

    def test_speech_cue_routes_clause_to_asr(self):
        plan = plan_rule_based("reporter says inflation is rising")
        assert plan.sub_queries[ASR] == "inflation is rising"
        assert plan.weights.w_asr == 0.6
        assert plan.sub_queries[VIS] == "reporter"
        assert plan.weights.w_vis == 0.5

    def test_quote_and_cue_combined(self):
        plan = plan_rule_based('anchor mentions the storm "WEATHER ALERT" tonight')
        assert plan.sub_queries[OCR] == "WEATHER ALERT"
        assert ASR in plan.sub_queries
        assert VIS in plan.sub_queries

    def test_deterministic(self):
        q = 'a red car "SALE 50" parked, announcer says go now'
        assert plan_rule_based(q) == plan_rule_based(q)

    def test_expansion_count_and_identity_slot(self):
        cfg = PlannerConfig(n_expansions=4)
        plan = plan_rule_based("a blue bird on a branch", cfg)
        assert len(plan.expansions) == 4
        assert plan.expansions[0] == "a blue bird on a branch"

    def test_expansions_vary_with_n(self):
        for n in (1, 2, 6):
            plan = plan_rule_based("big dog running", PlannerConfig(n_expansions=n))
            assert len(plan.expansions) == n

    def test_synonym_variant_applied(self):
        plan = plan_rule_based("a blue bird on a branch")
        assert "azure fowl" in plan.expansions[1]

    def test_empty_query_rejected(self):
        with pytest.raises(EmptyQuery):
            plan_rule_based("   ")
        with pytest.raises(EmptyQuery):
            plan_rule_based("!!!")

    def test_rationale_names_fired_rules(self):
        plan = plan_rule_based('crowd "EXIT" sign')
        assert "OCR" in plan.rationale
        assert plan.rationale == plan.weights.rationale


def llm_cfg(**kwargs) -> PlannerConfig:
    return PlannerConfig(llm_endpoint="http://planner.test/plan", **kwargs)


def transport_returning(payload: dict) -> httpx.MockTransport:
    return httpx.MockTransport(lambda request: httpx.Response(200, json=payload))


class TestLlmPlanner:
    def test_valid_plan_passthrough(self):
        payload = {
            "expansions": ["children with a sign", "kids with a placard",
                           "children holding a banner", "kids and a sign"],
            "sub_queries": {"vis": "children with a sign", "ocr": "Financial Support"},
            "weights": {"vis": 0.4, "ocr": 0.7, "asr": 0.0},
            "rationale": "sign text is distinctive",
        }
        plan = plan_llm("children ...", llm_cfg(), transport=transport_returning(payload))
        assert plan.source == "llm"
        assert plan.weights.w_vis == 0.4
        assert plan.weights.w_ocr == 0.7
        assert plan.sub_queries[OCR] == "Financial Support"
        assert list(plan.expansions) == payload["expansions"]

    def test_weights_clamped(self):
        payload = {
            "expansions": ["q"],
            "sub_queries": {"vis": "q"},
            "weights": {"vis": 1.4, "ocr": -0.2, "asr": 0.5},
        }
        plan = plan_llm("q", llm_cfg(), transport=transport_returning(payload))
        assert plan.weights.w_vis == 1.0
        assert plan.weights.w_ocr == 0.0
        assert plan.weights.w_asr == 0.5

    def test_expansions_padded_and_truncated(self):
        payload = {"expansions": ["only one"], "sub_queries": {"vis": "x"},
                   "weights": {"vis": 1.0}}
        plan = plan_llm("q", llm_cfg(n_expansions=3), transport=transport_returning(payload))
        assert plan.expansions == ("only one",) * 3
        payload["expansions"] = [f"v{i}" for i in range(9)]
        plan = plan_llm("q", llm_cfg(n_expansions=3), transport=transport_returning(payload))
        assert plan.expansions == ("v0", "v1", "v2")

    def test_unreachable_falls_back_to_rule_based(self):
        def handler(request):
            raise httpx.ConnectError("refused")

        cfg = llm_cfg()
        plan = plan_llm("a blue bird on a branch", cfg,
                        transport=httpx.MockTransport(handler))
        reference = plan_rule_based("a blue bird on a branch", cfg)
        assert plan.source == "llm_fallback"
        assert plan.sub_queries == reference.sub_queries
        assert plan.weights == reference.weights
        assert plan.expansions == reference.expansions

    def test_unreachable_with_fail_policy_raises(self):
        def handler(request):
            raise httpx.ConnectError("refused")

        with pytest.raises(LlmUnavailable):
            plan_llm("q", llm_cfg(fallback=FALLBACK_FAIL),
                     transport=httpx.MockTransport(handler))

    def test_schema_violation_with_fail_policy(self):
        payload = {"expansions": "not a list", "sub_queries": {}, "weights": {}}
        with pytest.raises(SchemaViolation):
            plan_llm("q", llm_cfg(fallback=FALLBACK_FAIL),
                     transport=transport_returning(payload))

    def test_missing_sub_queries_tolerated_if_one_present(self):
        payload = {"expansions": ["q"], "sub_queries": {"asr": "spoken words"},
                   "weights": {"asr": 0.9}}
        plan = plan_llm("q", llm_cfg(), transport=transport_returning(payload))
        assert plan.sub_queries == {ASR: "spoken words"}

    def test_request_wire_format(self):
        seen = {}

        def handler(request):
            import json
            seen.update(json.loads(request.content))
            return httpx.Response(200, json={
                "expansions": ["q"], "sub_queries": {"vis": "q"},
                "weights": {"vis": 1.0}})

        plan_llm("find the moment", llm_cfg(n_expansions=5),
                 transport=httpx.MockTransport(handler))
        assert seen == {"query": "find the moment", "n_expansions": 5,
                        "schema_version": "1"}


class TestTemporalPlan:
    def test_three_events_split(self):
        plan = plan_temporal(
            "car frame assembled -> worker turning handle -> workers assemble doors")
        assert plan.events == ("car frame assembled", "worker turning handle",
                               "workers assemble doors")

    def test_single_event_no_delimiter(self):
        plan = plan_temporal("a dog barking")
        assert plan.events == ("a dog barking",)

    def test_empty_event_rejected(self):
        with pytest.raises(EmptyEvent):
            plan_temporal("a -> -> b")

    def test_pre_split_events_accepted(self):
        plan = plan_temporal(["first thing", "second thing"])
        assert plan.events == ("first thing", "second thing")

    def test_empty_list_rejected(self):
        with pytest.raises(EmptyQuery):
            plan_temporal([])
