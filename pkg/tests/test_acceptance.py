"""One test per acceptance criterion; each records a pass/fail line."""

import json
import time
from pathlib import Path

from enrint import cli
from enrint.cosmos import size
from enrint.enriched import weighted_cone_data
from enrint.grothendieck import counit_epsilon, groth, unit_eta
from enrint.internal import (ar_x_comparison, arrow_hom_comparison, composable_square_is_pullback,
                             element, elements, functor_from_element, hom_cst_comparison, identity_functor,
                             internalize, internalize_functor, is_discrete_fibration,
                             is_iso_functor, is_iso_vfunctor,
                             pullback_internal, transpose_to_int, transpose_to_und,
                             underlying_data)
from enrint.limits import (WEIGHTED_ROUTES, Outcome, WeightedLimitProblem, cone_comma_cross_check,
                           representability_report, tensor_bridge_terminal, weighted_limit_report)
from enrint.testkit import (GenConfig, OracleRefusal, cones_at, functor_count_constructive,
                            gen_fibration, gen_internal, gen_presheaf, gen_vcategory, gen_vfunctor,
                            gen_weighted_instance, nat_count_constructive, oracle_functor_enum,
                            oracle_isoofslices, oracle_nat_enum)

COSMOSES = ("finset", "fincat")
BUDGET = 60.0
GOLDENS = Path(__file__).parent / "goldens"


class Clock:
    def __init__(self):
        self.start = time.perf_counter()

    @property
    def elapsed(self):
        return time.perf_counter() - self.start

    def within(self):
        return self.elapsed <= BUDGET


def test_criterion_1_equivalence(criterion):
    clock = Clock()
    counts, failures = {}, []
    for cosmos in COSMOSES:
        counts[cosmos] = 0
        for seed in range(100):
            cfg = GenConfig(seed, cosmos)
            C = gen_vcategory(cfg)
            F = gen_presheaf(cfg, C)
            eta = unit_eta(F, groth(C, F))
            eps = counit_epsilon(gen_fibration(cfg, C))
            if not (eta.certificate and eps.certificate):
                failures.append((cosmos, seed))
            counts[cosmos] += 1
    ok = not failures and min(counts.values()) >= 100 and clock.within()
    assert criterion(1, "equivalence", ok,
                     f"{counts} instances, {len(failures)} failures, {clock.elapsed:.1f}s"), failures


def test_criterion_2_fibrations(criterion):
    clock = Clock()
    cases, failures = 0, []
    for cosmos in COSMOSES:
        for seed in range(100):
            cfg = GenConfig(seed, cosmos, max_objects=3)
            C = gen_vcategory(cfg)
            g = groth(C, gen_presheaf(cfg, C))
            packet = is_discrete_fibration(g.projection)
            moved = gen_fibration(cfg, C)
            checks = [packet.certificate, moved.certificate,
                      composable_square_is_pullback(g.projection),
                      composable_square_is_pullback(moved.P)]
            B = moved.P.target
            for b in elements(B)[:2]:
                _, (_, Q) = pullback_internal(moved.P, functor_from_element(b))
                checks.append(is_discrete_fibration(Q).certificate)
            D = gen_vcategory(GenConfig(seed + 1000, cosmos, max_objects=2))
            K = internalize_functor(gen_vfunctor(cfg, D, C), internalize(D), B)
            _, (_, Q) = pullback_internal(moved.P, K)
            checks.append(is_discrete_fibration(Q).certificate)
            checks.append(composable_square_is_pullback(Q))
            cases += 1
            if not all(checks):
                failures.append((cosmos, seed))
    ok = not failures and cases >= 200 and clock.within()
    assert criterion(2, "fibrations", ok,
                     f"{cases} cases, {len(failures)} failures, {clock.elapsed:.1f}s"), failures


def test_criterion_3_representation(criterion, P1):
    clock = Clock()
    instances, hyp_held, failures = 0, 0, []
    for cosmos in COSMOSES:
        for seed in range(60):
            cfg = GenConfig(seed, cosmos, max_objects=3)
            C = gen_vcategory(cfg)
            F = gen_presheaf(cfg, C)
            V = C.cosmos
            for c in C.objects:
                for x in V.global_elements(F.on[c]):
                    r = representability_report(F, c, x)
                    instances += 1
                    base = r["direct"] == r["elements"] == r["shifted"]
                    und = r["und-tensors"]
                    if und is not Outcome.NOT_APPLICABLE:
                        hyp_held += 1
                        base = base and und == r["direct"]
                    if not base:
                        failures.append((cosmos, seed, c))
    p = P1.problems["rep:F0at1"]
    fixture_true = set(representability_report(p["presheaf"], p["object"],
                                               p["element"]).values()) == {Outcome.TRUE}
    F1 = P1.presheaves["F1"]
    V = F1.base.cosmos
    fixture_none = all(representability_report(F1, c, x)["direct"] is Outcome.FALSE
                       for c in F1.base.objects for x in V.global_elements(F1.on[c]))
    ok = not failures and fixture_true and fixture_none and instances > 0 and clock.within()
    assert criterion(3, "representation", ok,
                     f"{instances} instances, und-tensors applicable on {hyp_held}, "
                     f"P1 F0 representable {fixture_true}, P1 F1 none {fixture_none}, "
                     f"{clock.elapsed:.1f}s"), failures


def test_criterion_4_counterexample(criterion, P2):
    clock = Clock()
    D = P2.internal["D"]
    rep = tensor_bridge_terminal(D, element(D, "*"))
    ok = (rep.und and not rep.internal and not rep.hypotheses_hold
          and rep.expected_divergence and not rep.violation and clock.within())
    assert criterion(4, "counterexample", ok,
                     f"v-terminal in und {rep.und}, internal terminal {rep.internal}, "
                     f"tensor hypothesis flagged {not rep.hypotheses_hold}")


def test_criterion_5_weighted_limits(criterion, P3):
    clock = Clock()
    problems, certified, instances, failures = 0, 0, 0, []
    for cosmos in COSMOSES:
        for seed in range(60):
            inst = gen_weighted_instance(GenConfig(seed, cosmos))
            instances += 1
            if cone_comma_cross_check(inst.W, inst.G).certificate:
                certified += 1
            else:
                failures.append((cosmos, seed, "cross-check"))
            for L in inst.C.objects:
                for lam in cones_at(inst.W, inst.G, L):
                    prob = WeightedLimitProblem(inst.C, inst.G, inst.W, L, lam)
                    report = weighted_limit_report(prob)
                    verdicts = {v for v in report.values() if v is not Outcome.NOT_APPLICABLE}
                    problems += 1
                    if len(verdicts) != 1:
                        failures.append((cosmos, seed, L))
    p = P3.problems["wl:x"]
    x_true = set(weighted_limit_report(WeightedLimitProblem(
        p["C"], p["G"], p["W"], p["L"], p["lam"])).values()) == {Outcome.TRUE}
    top = P3.problems["wl:top"]
    top_cones = cones_at(top["W"], top["G"], top["L"])
    E = weighted_cone_data(top["W"], top["G"]).presheaf
    top_mismatch = size(E.on["top"]) == 0 and size(top["C"]("top", "top")) == 1
    searched = cli.run_problem(top, None, True)["routes"]
    top_false = not top_cones and top_mismatch and set(searched.values()) == {"false"} \
        and set(searched) == set(WEIGHTED_ROUTES)
    bot_false = all(set(weighted_limit_report(WeightedLimitProblem(
        p["C"], p["G"], p["W"], "bot", lam)).values()) == {Outcome.FALSE}
        for lam in cones_at(p["W"], p["G"], "bot"))
    p3_cert = cone_comma_cross_check(p["W"], p["G"]).certificate
    ok = (not failures and problems >= 100 and x_true and top_false and bot_false and p3_cert
          and clock.within())
    assert criterion(5, "weighted limits", ok,
                     f"{problems} problems, cross-check {certified}/{instances}, "
                     f"P3 x true {x_true}, top false {top_false} with no cone, bot false {bot_false}, "
                     f"{clock.elapsed:.1f}s"), failures


def test_criterion_6_oracles(criterion):
    clock = Clock()
    nats = functors = slices = refused = 0
    failures = []
    for cosmos in COSMOSES:
        for seed in range(40):
            cfg = GenConfig(seed, cosmos, max_objects=3)
            C = gen_vcategory(cfg)
            F = gen_presheaf(cfg, C)
            G = gen_presheaf(GenConfig(seed + 500, cosmos, max_objects=3), C)
            try:
                expected = oracle_nat_enum(F, G)
            except OracleRefusal:
                refused += 1
            else:
                nats += 1
                if nat_count_constructive(F, G) != expected:
                    failures.append(("end", cosmos, seed))
            small = GenConfig(seed, cosmos, max_objects=2, max_cells=3)
            I = gen_internal(small)
            A = gen_internal(GenConfig(seed + 7, cosmos, max_objects=2, max_cells=3))
            try:
                expected = oracle_functor_enum(I, A)
            except OracleRefusal:
                refused += 1
            else:
                functors += 1
                if functor_count_constructive(I, A) != expected:
                    failures.append(("internal hom", cosmos, seed))
        for seed in range(12):
            inst = gen_weighted_instance(GenConfig(seed, cosmos))
            V = inst.C.cosmos
            for X in V.generators().probes:
                for A in inst.C.objects:
                    slices += 1
                    if not oracle_isoofslices(inst.W, inst.G, A, X).agree:
                        failures.append(("slices", cosmos, seed, A))
    ok = not failures and slices >= 30 and nats >= 60 and functors >= 60 and clock.within()
    assert criterion(6, "oracles", ok,
                     f"{nats} end counts, {functors} internal-hom counts, {refused} refused, "
                     f"{slices} slice tuples, {clock.elapsed:.1f}s"), failures


def test_criterion_7_adjunction_and_shortcuts(criterion):
    clock = Clock()
    roundtrips = samples = 0
    failures = []
    for cosmos in COSMOSES:
        for seed in range(15):
            cfg = GenConfig(seed, cosmos, max_objects=3)
            C = gen_vcategory(cfg)
            A = internalize(C)
            U = underlying_data(A)
            H = identity_functor(A)
            K = transpose_to_und(H, U)
            back = transpose_to_int(K, A, source=A, und=U)
            again = transpose_to_und(back, U)
            roundtrips += 1
            if not (back == H and again.on == K.on and again.homs == K.homs):
                failures.append(("transpose", cosmos, seed))
            V = C.cosmos
            samples += 1
            if not is_iso_functor(arrow_hom_comparison(A)):
                failures.append(("arrow hom", cosmos, seed))
            for X in V.generators().probes:
                if not is_iso_functor(hom_cst_comparison(X, A)):
                    failures.append(("constant hom", cosmos, seed))
                if not is_iso_vfunctor(ar_x_comparison(C, X)):
                    failures.append(("shifted arrows", cosmos, seed))
    ok = not failures and roundtrips >= 25 and clock.within()
    assert criterion(7, "adjunction and shortcuts", ok,
                     f"{roundtrips} roundtrips, {samples} comparison samples, "
                     f"{clock.elapsed:.1f}s"), failures


def test_criterion_8_cli_goldens(criterion, capsys):
    clock = Clock()
    cases = json.loads((GOLDENS / "cases.json").read_text())
    failures = []
    for name, case in sorted(cases.items()):
        code = cli.main(case["argv"])
        out, _ = capsys.readouterr()
        if out != (GOLDENS / f"{name}.out").read_text() or code != case["exit"]:
            failures.append(name)
    code = cli.main(["check", "fixtures/P1", "--problem", "missing"])
    capsys.readouterr()
    if code != 2:
        failures.append("error exit")
    fixtures = {c["argv"][1] for c in cases.values()}
    ok = not failures and fixtures == {"fixtures/P1", "fixtures/P2", "fixtures/P3"} \
        and clock.within()
    assert criterion(8, "cli goldens", ok,
                     f"{len(cases)} goldens over {len(fixtures)} fixtures, "
                     f"{len(failures)} mismatches"), failures
