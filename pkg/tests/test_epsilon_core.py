import random

import pytest
from hypothesis import given, strategies as st

from witnessbench import epsilon_core as E
from witnessbench import proofgen
from witnessbench.epsilon_core import (
    Add, AxiomII, Critical, Eps, Eq, FnApp, Imp, MP, Mul, Not, Pred, ProofStep, Succ, Var, Zero,
    numeral,
)

ONE, TWO = numeral(1), numeral(2)


def eps(x, body):
    return Eps(x, body)


# a handful of terms reused below
E_SIMPLE = eps("x", Eq(Var("x"), ONE))                                  # e_x(x=0')
E_INNER = eps("y", Eq(Var("y"), TWO))                                   # e_y(y=0'')
E_NESTED = eps("x", Eq(Add(ONE, E_INNER), eps("z", Eq(Succ(Var("z")), Var("x")))))
E_OWN = eps("x", Eq(Add(E_INNER, Var("x")), Succ(Succ(Var("x")))))


class TestParse:
    def test_constructors(self):
        assert E.parse_term("(succ 0)") == Succ(Zero())
        assert E.parse_term("(eps x (= x (succ 0)))") == E_SIMPLE

    def test_exists_sugar(self):
        f = E.parse_formula("(exists y (= y (succ 0)))")
        assert f == Eq(eps("y", Eq(Var("y"), ONE)), ONE)

    def test_forall_sugar(self):
        f = E.parse_formula("(forall y (= y y))")
        w = eps("y", Not(Eq(Var("y"), Var("y"))))
        assert f == Eq(w, w)

    def test_digits_are_numerals(self):
        assert E.parse_term("3") == numeral(3)

    @pytest.mark.parametrize("bad", ["(frob 0)", "(succ)", "(= 0)", "(eps (x) (= x 0))", "(succ 0", ")"])
    def test_rejects_malformed(self, bad):
        with pytest.raises((SyntaxError, E.ArityError)):
            E.parse_formula(bad) if bad.startswith("(=") else E.parse_term(bad)

    def test_syntax_error_has_position(self):
        with pytest.raises(E.EpsSyntaxError) as ei:
            E.parse_term("(succ\n  (frob 0))")
        assert "line 2" in str(ei.value)

    def test_fn_arity_from_table(self):
        with pytest.raises(E.ArityError):
            E.parse_term("(fn f 0 0)", {"f": 1})


def _terms(depth):
    leaf = st.sampled_from([Zero(), Var("x"), Var("y"), ONE])
    if depth == 0:
        return leaf
    sub = _terms(depth - 1)
    return st.one_of(
        leaf,
        st.builds(Succ, sub), st.builds(Pred, sub), st.builds(Add, sub, sub), st.builds(Mul, sub, sub),
        st.builds(lambda a, b: FnApp("g", (a, b)), sub, sub),
        st.builds(lambda a, b: Eps("z", Eq(Var("z"), Add(a, b))), sub, sub),
    )


def _formulas(depth):
    atom = st.builds(Eq, _terms(2), _terms(2))
    if depth == 0:
        return atom
    sub = _formulas(depth - 1)
    return st.one_of(atom, st.builds(Not, sub), st.builds(Imp, sub, sub))


class TestRoundTrip:
    @given(_terms(3))
    def test_terms(self, t):
        assert E.parse_term(E.to_sexp(t), {"g": 2}) == t

    @given(_formulas(2))
    def test_formulas(self, f):
        assert E.parse_formula(E.to_sexp(f), {"g": 2}) == f

    def test_generated_proofs(self):
        for p in proofgen.corpus(25, seed=3):
            assert E.parse_proof(E.proof_to_text(p)) == p


class TestCategories:
    def test_example_with_closed_side(self):
        c = E.category_of(E_NESTED)
        assert c.arity == 1
        assert c.skeleton == eps("x", Eq(Var("_w1"), eps("z", Eq(Succ(Var("z")), Var("x")))))
        assert E.rank(c) == 2

    def test_example_is_its_own_category(self):
        c = E.category_of(E_OWN)
        assert c.arity == 0 and c.skeleton == E_OWN
        assert E.rank(c) == 2

    def test_simple_term_abstracts_closed_side(self):
        # every closed equation side becomes a placeholder (see the ledger)
        c = E.category_of(E_SIMPLE)
        assert c.arity == 1 and E.rank(c) == 1

    def test_same_category_different_parameters(self):
        a = eps("x", Eq(Var("x"), ONE))
        b = eps("x", Eq(Var("x"), Add(TWO, TWO)))
        assert E.category_of(a) == E.category_of(b)
        assert E.category_of(a) != E.category_of(E_OWN)

    def test_alpha_variants_share_category(self):
        assert E.category_of(eps("u", Eq(Var("u"), ONE))) == E.category_of(E_SIMPLE)

    def test_idempotent_on_skeletons(self):
        for t in (E_SIMPLE, E_NESTED, E_OWN):
            c = E.category_of(t)
            assert E.category_of(c.skeleton) == c

    def test_not_an_eps_term(self):
        with pytest.raises(E.NotAnEpsTerm):
            E.category_of(ONE)


class TestDegree:
    def test_values(self):
        assert E.degree(Zero()) == 0
        assert E.degree(TWO) == 2
        assert E.degree(Add(TWO, E_SIMPLE)) == 3
        assert E.degree(Succ(E_NESTED)) == 1

    def test_tiny_proof_constants(self):
        pc = E.proof_constants(proofgen.tiny_proof())
        assert (pc.e, pc.g) == (1, 1)
        assert pc.m >= 1


class TestEnumeration:
    def test_singleton(self):
        p = proofgen.tiny_proof()
        assert E.enumerate_eps_terms(p) == [eps("y", Eq(Var("y"), ONE))]

    def test_subterm_first(self):
        p = [ProofStep(Eq(E_OWN, E_OWN), AxiomII(1, (E_OWN,)))]
        ts = E.enumerate_eps_terms(p)
        assert ts.index(E_INNER) < ts.index(E_OWN)
        cs = E.enumerate_categories(p)
        assert cs.index(E.category_of(E_INNER)) < cs.index(E.category_of(E_OWN))

    def test_distinct(self):
        p = [ProofStep(Eq(E_SIMPLE, E_SIMPLE), AxiomII(1, (E_SIMPLE,)))] * 2
        assert len(E.enumerate_eps_terms(p)) == 1

    def test_constraint_star_on_corpus(self):
        # an epsilon subterm mentioning the bound variable of an enclosing
        # term has its category listed first
        for p in proofgen.corpus(30, seed=11):
            order = {c: i for i, c in enumerate(E.enumerate_categories(p))}
            for t in E.enumerate_eps_terms(p):
                for sub in E.walk(t.body):
                    if isinstance(sub, Eps) and t.bound in E.free_vars(sub):
                        assert order[E.category_of(sub)] < order[E.category_of(t)]


class TestCheck:
    def test_ax01(self):
        assert E.check_proof([ProofStep(Eq(ONE, ONE), AxiomII(1, (ONE,)))]) is True

    def test_critical_instance(self):
        j = Critical(1, "x", Eq(Var("x"), ONE), (ONE,))
        f = Imp(Eq(ONE, ONE), Eq(E_SIMPLE, ONE))
        assert E.critical(j) == f
        assert E.check_proof([ProofStep(f, j)]) is True

    def test_mp_forward_reference(self):
        p = proofgen.tiny_proof()
        bad = [p[0], ProofStep(p[2].formula, MP(2, 0)), p[1]]
        errs = E.check_proof(bad)
        assert errs is not True and errs[0].index == 1

    def test_open_formula(self):
        errs = E.check_proof([ProofStep(Eq(Var("x"), Var("x")), AxiomII(1, (Var("x"),)))])
        assert errs is not True and "free" in errs[0].reason

    def test_unknown_user_axiom(self):
        with pytest.raises(E.UnknownUserAxiom):
            E.check_proof([ProofStep(Eq(ONE, ONE), E.UserAxiom("nope", ()))], E.FunctionRegistry())

    def test_user_axiom(self):
        reg = E.FunctionRegistry().add_axiom("refl_plus", ["x"], "(= (add x 0) x)")
        f = Eq(Add(TWO, Zero()), TWO)
        assert E.check_proof([ProofStep(f, E.UserAxiom("refl_plus", (TWO,)))], reg) is True

    def test_accepts_generated(self):
        for p in proofgen.corpus(40, seed=5):
            assert E.check_proof(p) is True

    def test_rejects_single_formula_mutations(self):
        rng = random.Random(99)
        n = 0
        for p in proofgen.corpus(30, seed=17):
            for _ in range(4):
                i = rng.randrange(len(p))
                f = p[i].formula
                nodes = [x for x in E.walk(f) if isinstance(x, E.ETerm)]
                target = rng.choice(nodes)
                g = _replace_once(f, target, Succ(target))
                assert g != f
                mutant = list(p)
                mutant[i] = ProofStep(g, p[i].justification)
                assert E.check_proof(mutant) is not True
                n += 1
        assert n == 120


def _replace_once(f, old, new):
    done = [False]

    def go(t):
        if not done[0] and t is old:
            done[0] = True
            return new
        kids = E.children(t)
        if not kids:
            return t
        return E._rebuild(t, [go(k) for k in kids])

    return go(f)
