"""Witness extraction on the machine, and transcript checking."""
import io
import json

import pytest
from hypothesis import given, strategies as st

from witnessbench import extract as X
from witnessbench import kam, sol2
from witnessbench.extract import GameTranscript, Move, PrenexStatement, Violation

from conftest import checked

EQ, ZERO, COPY2 = X.MATRICES["eq"], X.MATRICES["zero"], X.MATRICES["copy2"]
L = kam.parse_lterm


@pytest.fixture(scope="module")
def id_theta():
    return checked("id_proof.drv", {"f": EQ.fn})


@pytest.fixture(scope="module")
def zero_theta():
    return checked("sigma2_zero.drv", {"phi": ZERO.fn})


@pytest.fixture(scope="module")
def backtrack_theta():
    return checked("sigma2_backtrack.drv", {"phi": ZERO.fn})


@pytest.fixture(scope="module")
def copy_theta():
    return checked("prenex2.drv", {"phi": COPY2.fn})


# --------------------------------------------------------------------------
# Pi_2

@pytest.mark.parametrize("n", range(11))
def test_pi2_answers_n(id_theta, n):
    r = X.extract_pi2(id_theta, "eq", n)
    assert r.ok and r.witnesses == (n,)
    assert EQ.holds((n,), r.witnesses)
    assert r.steps <= 10_000
    # the step count is linear in n for this proof (12 + 4n is what the machine takes)
    assert r.steps == 12 + 4 * n
    assert X.verify_transcript(r.transcript, PrenexStatement(1, EQ, "forall"))


@pytest.mark.parametrize("n", [0, 2, 9])
def test_pi2_storage_insensitive(id_theta, n):
    plain = X.extract_pi2(id_theta, "eq", n)
    wrapped = X.extract_pi2(id_theta, "eq", n, nu=kam.App(kam.identity(), kam.church(n)))
    assert wrapped.witnesses == plain.witnesses == (n,)


def test_pi2_budget(id_theta):
    r = X.extract_pi2(id_theta, "eq", 5, budget=3)
    assert r.outcome == "BudgetExceeded" and not r.ok and r.witnesses == ()


def test_pi2_backtracking_proof():
    th = checked("backtrack_pi2.drv", {"f": EQ.fn})
    r = X.extract_pi2(th, "eq", 4)
    assert r.witnesses == (4,)
    # y := 0 is proposed and refuted before y := x
    assert [m.value for m in r.transcript.moves] == [4, 0, 4]
    assert X.verify_transcript(r.transcript, PrenexStatement(1, EQ, "forall"))
    assert X.extract_pi2(th, "eq", 0).witnesses == (0,)


def test_theta_type_checked(id_theta, zero_theta):
    with pytest.raises(X.TypeMismatch):
        X.extract_pi2(zero_theta, "eq", 1)
    with pytest.raises(X.TypeMismatch):
        X.extract_pi2(L("(lam n x)"), "eq", 1)
    with pytest.raises(X.TypeMismatch):
        X.extract_sigma2_strategy(id_theta, "zero", L("(lam n n)"))


def test_open_hypotheses_rejected():
    open_ = sol2.check_script("(rule 1 () x A)")
    with pytest.raises(X.TypeMismatch):
        X.extract_pi2(open_, "eq", 0)


def test_unknown_matrix():
    with pytest.raises(KeyError):
        X.get_matrix("nope")


# --------------------------------------------------------------------------
# Sigma_2

OPPONENTS = {
    "identity": lambda: X.HostFunctions([lambda n: n]),
    "constant-7": lambda: X.HostFunctions([lambda n: 7]),
    "scripted": lambda: X.Interactive.scripted([5, 6, 7]),
}


@pytest.mark.parametrize("name", sorted(OPPONENTS))
def test_sigma2_kappa_route(zero_theta, name):
    r = X.extract_prenex(zero_theta, "zero", OPPONENTS[name]())
    assert r.ok and r.witnesses[0] == 0
    assert X.verify_transcript(r.transcript, PrenexStatement(1, ZERO))
    assert X.kappa_order_violations(r.events) == []


@pytest.mark.parametrize("term,gamma", [
    ("(lam n n)", lambda n: n),
    ("(lam n (church 7))", lambda n: 7),
    ("(lam n (app (named s) n))", lambda n: n + 1),
])
def test_sigma2_strategy_route(zero_theta, backtrack_theta, term, gamma):
    for th in (zero_theta, backtrack_theta):
        r = X.extract_sigma2_strategy(th, "zero", L(term), gamma=gamma)
        assert r.witnesses == (0,)
        assert X.verify_transcript(r.transcript, PrenexStatement(1, ZERO))


def test_sigma2_backtracking_transcript(backtrack_theta):
    r = X.extract_prenex(backtrack_theta, "zero", X.Interactive.scripted([7, 8, 9]))
    assert r.witnesses == (0, 8)
    assert [(m.player, m.value) for m in r.transcript.moves] == [
        ("Exists", 1), ("Forall", 7), ("Exists", 0), ("Forall", 8)]
    assert r.events == [("kappa", 0, (), 1, 7), ("kappa", 0, (), 0, 8)]


def test_representation_violation(zero_theta, backtrack_theta):
    # the term computes n, the declared host function says n + 1
    with pytest.raises(X.RepresentationViolation):
        X.extract_sigma2_strategy(backtrack_theta, "zero", L("(lam n n)"), gamma=lambda n: n + 1)


def test_interactive_prompt_and_abort(zero_theta):
    out = io.StringIO()
    op = X.Interactive(1, io.StringIO("x\n4\n"), out)
    r = X.extract_prenex(zero_theta, "zero", op)
    assert r.witnesses == (0, 4)
    assert "y1?" in out.getvalue() and "natural number" in out.getvalue()
    with pytest.raises(X.InteractiveAbort):
        X.extract_prenex(zero_theta, "zero", X.Interactive.scripted("q\n"))
    with pytest.raises(X.InteractiveAbort):
        X.extract_prenex(zero_theta, "zero", X.Interactive.scripted(""))


def test_opponent_arity_checked(zero_theta):
    with pytest.raises(ValueError):
        X.extract_prenex(zero_theta, "zero", X.HostFunctions([lambda n: 0, lambda a, b: 0]))


# --------------------------------------------------------------------------
# two alternations

@pytest.mark.parametrize("a,b", [(7, 3), (0, 0), (2, 9)])
def test_prenex_k2_kappa(copy_theta, a, b):
    r = X.extract_prenex(copy_theta, "copy2", X.HostFunctions([lambda n: a, lambda n, m: b]))
    assert r.witnesses == (0, a, a, b)
    (n1, p1), (n2, p2) = r.transcript.final
    assert COPY2.holds((n1, n2), (p1, p2))
    assert X.verify_transcript(r.transcript, PrenexStatement(2, COPY2))
    assert X.kappa_order_violations(r.events) == []


def test_prenex_k2_zeta_equals_kappa(copy_theta):
    terms = [L("(lam n (church 7))"), L("(lam a b (church 3))")]
    z = X.extract_prenex(copy_theta, "copy2", X.TermStrategy(terms))
    k = X.extract_prenex(copy_theta, "copy2", X.TermStrategy(terms), via="kappa")
    h = X.extract_prenex(copy_theta, "copy2", X.HostFunctions([lambda n: 7, lambda a, b: 3]))
    assert z.witnesses == k.witnesses == h.witnesses == (0, 7, 7, 3)
    assert [e[0] for e in z.events] == ["zeta", "zeta"]


def test_replay_is_deterministic(copy_theta):
    host = X.extract_prenex(copy_theta, "copy2", X.HostFunctions([lambda n: 7, lambda a, b: 3]))
    script = X.extract_prenex(copy_theta, "copy2", X.Interactive.scripted([7, 3], k=2))
    assert host.transcript.dumps() == script.transcript.dumps()
    assert host.steps == script.steps


def test_transcript_json_roundtrip(copy_theta):
    r = X.extract_prenex(copy_theta, "copy2", X.HostFunctions([lambda n: 1, lambda a, b: 2]))
    back = GameTranscript.from_json(json.loads(r.transcript.dumps()))
    assert back.dumps() == r.transcript.dumps()
    assert X.verify_transcript(back, PrenexStatement(2, COPY2))


# --------------------------------------------------------------------------
# transcript checker

def _tr(moves, final):
    return GameTranscript([Move(*m) for m in moves], final)


S1 = PrenexStatement(1, ZERO)


def test_verify_accepts_restart():
    t = _tr([("Exists", 0, 1), ("Forall", 0, 7), ("Exists", 0, 0), ("Forall", 0, 8)], [(0, 8)])
    assert X.verify_transcript(t, S1)


@pytest.mark.parametrize("moves,final,where", [
    # final position fails the matrix
    ([("Exists", 0, 1), ("Forall", 0, 7)], [(1, 7)], 2),
    # final position never played
    ([("Exists", 0, 1), ("Forall", 0, 7)], [(0, 7)], 2),
    # two existential moves in a row
    ([("Exists", 0, 1), ("Exists", 0, 0)], [(0, 0)], 1),
    # answer left pending
    ([("Exists", 0, 0)], [(0, 0)], 0),
])
def test_verify_rejects_k1(moves, final, where):
    with pytest.raises(Violation) as e:
        X.verify_transcript(_tr(moves, final), S1)
    assert e.value.move_index == where


def test_verify_rejects_restart_from_unreached_position():
    S2 = PrenexStatement(2, COPY2)
    bad = _tr([("Exists", 0, 0), ("Forall", 0, 7),
               ("Exists", 1, 7, ((0, 5),)), ("Forall", 1, 3, ((0, 5),))], [(0, 5), (7, 3)])
    with pytest.raises(Violation, match="never reached"):
        X.verify_transcript(bad, S2)
    good = _tr([("Exists", 0, 0), ("Forall", 0, 7),
                ("Exists", 1, 7, ((0, 7),)), ("Forall", 1, 3, ((0, 7),))], [(0, 7), (7, 3)])
    assert X.verify_transcript(good, S2)


def test_verify_forall_polarity():
    S = PrenexStatement(1, EQ, "forall")
    assert X.verify_transcript(_tr([("Forall", 0, 3), ("Exists", 0, 3)], [(3, 3)]), S)
    with pytest.raises(Violation):
        X.verify_transcript(_tr([("Forall", 0, 3), ("Exists", 0, 2)], [(3, 2)]), S)
    with pytest.raises(Violation):
        X.verify_transcript(_tr([("Exists", 0, 3)], [(3, 3)]), S)


def test_kappa_order_violations():
    ok = [("kappa", 0, (), 1, 7), ("kappa", 0, (), 0, 8), ("kappa", 1, ((0, 8),), 2, 2)]
    assert X.kappa_order_violations(ok) == []
    bad = [("kappa", 0, (), 1, 7), ("kappa", 1, ((1, 6),), 2, 2), ("zeta", 1, (1,), 2)]
    assert X.kappa_order_violations(bad) == [1]


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=6))
def test_kappa_order_of_honest_play(pairs):
    """A play that always restarts from a prefix of what it has seen is legal."""
    events, seen = [], [()]
    for i, (n, p) in enumerate(pairs):
        h = seen[i % len(seen)]
        if len(h) >= 2:
            h = ()
        events.append(("kappa", len(h), h, n, p))
        seen.append(h + ((n, p),))
    assert X.kappa_order_violations(events) == []


def test_statement_validation():
    with pytest.raises(ValueError):
        PrenexStatement(0, ZERO)
    with pytest.raises(ValueError):
        PrenexStatement(1, ZERO, "sometimes")


# --------------------------------------------------------------------------
# implication, padding, bottom

def test_pad_matrix_ignores_extra_arguments():
    padded = X.pad_matrix(ZERO, 2, 3)
    assert (padded.nx, padded.ny) == (2, 3)
    for x in range(3):
        for junk in range(3):
            assert padded.value((x, junk), (junk, 1, 2)) == ZERO.value((x,), (junk,))
    with pytest.raises(ValueError):
        X.pad_matrix(COPY2, 1, 1)


def test_combine_implication_selector():
    m = X.combine_implication(EQ, ZERO)
    assert (m.nx, m.ny) == (1, 2)
    for x in range(4):
        for y in range(4):
            assert m.holds((x,), (0, y)) == EQ.holds((x,), (y,))
            assert m.holds((x,), (1, y)) == ZERO.holds((x,), (y,))


def test_combine_implication_depths():
    m = X.combine_implication(ZERO, COPY2)
    assert (m.nx, m.ny) == (2, 3)
    with pytest.raises(X.DepthMismatch):
        X.combine_implication(ZERO, COPY2, padding=False)


def test_double_bottom_probe():
    ident = L("(lam x x)")
    r = X.double_bottom_probe(ident, stack=[kam.Inert("c")])
    assert r.reached_c and not r.reached_c_prime and not r.contradiction
    assert r.verdict == "c"
    r2 = X.double_bottom_probe(ident, stack=[kam.Inert("c'")])
    assert r2.verdict == "c'"
    loop = L("(app (lam x (app x x)) (lam x (app x x)))")
    r3 = X.double_bottom_probe(loop, budget=200)
    assert r3.outcome_c == r3.outcome_c_prime == "budget"
    assert "deterministic" in r3.explain()
    with pytest.raises(ValueError):
        X.double_bottom_probe(L("y"))


@given(st.sampled_from(["(lam x x)", "(lam x y z (app z x))", "(lam k (app cc k))",
                        "(lam a b a)", "(lam a b b)"]),
       st.lists(st.sampled_from(["c", "c'", "d"]), max_size=3))
def test_probe_never_reaches_both(src, consts):
    r = X.double_bottom_probe(L(src), budget=500, stack=[kam.Inert(c) for c in consts])
    assert not r.contradiction


def test_f_term_and_h_terms_closed():
    assert X.f_term(L("(lam n n)")).fv() == frozenset()
    for k in (1, 2, 3):
        assert X.h_terms(k).fv() == frozenset(f"f{i}" for i in range(1, k + 1))
