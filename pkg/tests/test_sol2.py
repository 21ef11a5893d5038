"""Second-order formulas, the typing rules and axiom realizers."""
import pytest
from hypothesis import given, strategies as st

from witnessbench import kam, sol2
from witnessbench.epsilon_core import Add, FnApp, Succ, Var, Zero
from witnessbench.sol2 import (DerivationError, ForallInd, ForallPred, Imp, PredApp,
                               alpha_eq, parse_formula, relativize)

from conftest import checked, read

# conclusion each corpus derivation must reach, under an empty context
CORPUS = {
    "identity": ("(imp A A)", "(lam x x)"),
    "peirce": ("(imp (imp (imp A B) A) A)", "(lam k (app cc k))"),
    "poly_identity": ("(forall2 X 0 (imp X X))", "(lam x x)"),
    "and_intro": ("(imp A B (and A B))", "(lam a b f (app f a b))"),
    "and_elim_left": ("(imp (and A B) A)", None),
    "and_elim_right": ("(imp (and A B) B)", None),
    "or_intro_left": ("(imp A (or A B))", None),
    "or_intro_right": ("(imp B (or A B))", None),
    "or_elim": ("(imp (or A B) (imp A C) (imp B C) C)", "(lam o f g (app o f g))"),
}


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_conclusions(name):
    formula, term = CORPUS[name]
    c = checked(f"{name}.drv")
    assert c.context == ()
    assert alpha_eq(c.formula, parse_formula(formula)), sol2.pretty(c.formula)
    assert not c.term.fv()
    if term is not None:
        assert kam.alpha_eq(c.term, kam.parse_lterm(term))


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_script_print_parse_roundtrip(name):
    d = sol2.parse_derivation(read(f"{name}.drv"))
    again = sol2.parse_derivation(sol2.derivation_to_text(d))
    assert [(s.rule, s.premises) for s in again.steps] == [(s.rule, s.premises) for s in d.steps]
    a, b = sol2.check_derivation(d), sol2.check_derivation(again)
    assert alpha_eq(a.formula, b.formula) and kam.alpha_eq(a.term, b.term)


def test_relativized_statements_check():
    c = checked("id_proof.drv", {"f": lambda x, y: int(x != y)})
    assert c.context == ()
    want = relativize(sol2.prenex_statement(1, "f", leading="forall"))
    assert alpha_eq(c.formula, want)
    c2 = checked("sigma2_zero.drv", {"phi": lambda x, y: x})
    assert alpha_eq(c2.formula, relativize(sol2.prenex_statement(1, "phi")))


# --------------------------------------------------------------------------
# mutations: each one breaks a single step and must be refused

def _replace(text: str, old: str, new: str) -> str:
    assert old in text, old
    return text.replace(old, new, 1)


MUTANTS = [
    # modus ponens with premises swapped
    ("and_intro", "(rule 2 (2 0))", "(rule 2 (0 2))"),
    # argument of the wrong type
    ("and_intro", "(rule 2 (3 1))", "(rule 2 (3 0))"),
    # discharging a hypothesis at a different type
    ("identity", "(rule 3 (0) x A)", "(rule 3 (0) x B)"),
    # generalizing over a predicate free in a live hypothesis
    ("and_intro", "(rule 6 (5) X 0)", "(rule 6 (4) X 0)"),
    # generalizing over an individual free in a live hypothesis
    ("id_proof", "(rule 5 (8) x)", "(rule 5 (7) x)"),
    # forward reference
    ("identity", "(rule 3 (0) x A)", "(rule 3 (1) x A)"),
    # wrong premise count
    ("peirce", "(rule 4 (0))", "(rule 4 (0 0))"),
    # Peirce applied to something of the wrong shape
    ("identity", "(rule 3 (0) x A)", "(rule 4 (0))"),
    # instantiating a first-order universal that is not there
    ("poly_identity", "(rule 6 (1) X 0)", "(rule 7 (1) 0)"),
    # comprehension with the wrong number of parameters
    ("and_elim_left", "(rule 8 (0) () A)", "(rule 8 (0) (z) A)"),
    # citing an axiom nobody registered
    ("id_proof", "(axiom diag)", "(axiom nonesuch)"),
    # eliminating an implication whose head is not an implication
    ("or_elim", "(rule 2 (1 2))", "(rule 2 (2 1))"),
    # second-order generalization at a wrong arity
    ("poly_identity", "(rule 6 (1) X 0)", "(rule 6 (1) X 1)"),
]


@pytest.mark.parametrize("name,old,new", MUTANTS)
def test_single_step_mutations_rejected(name, old, new):
    fns = {"f": lambda x, y: int(x != y)}
    text = _replace(read(f"{name}.drv"), old, new)
    with pytest.raises(DerivationError):
        sol2.check_script(text, sol2.RealizerRegistry(functions=fns))


def test_mutation_count():
    assert len(MUTANTS) >= 10


def test_derivation_error_carries_step():
    text = _replace(read("identity.drv"), "(rule 3 (0) x A)", "(rule 3 (0) x B)")
    with pytest.raises(DerivationError) as e:
        sol2.check_script(text)
    assert e.value.step == 1


@pytest.mark.parametrize("text", [
    "(rule 9 ())",
    "(rule 1 () x)",
    "(rule 1 () 3 A)",
    "(rule 2 0 1)",
    "(frobnicate)",
    "(rule 1 () x (imp A))",
])
def test_malformed_scripts(text):
    with pytest.raises(SyntaxError):
        sol2.parse_derivation(text)


def test_empty_derivation():
    with pytest.raises(DerivationError):
        sol2.check_script("")


# --------------------------------------------------------------------------
# formulas

def test_sugar_expansions():
    A, B = PredApp("A"), PredApp("B")
    assert alpha_eq(parse_formula("(not A)"), Imp(A, ForallPred("X", 0, PredApp("X"))))
    assert alpha_eq(parse_formula("(and A B)"),
                    ForallPred("Z", 0, Imp(Imp(A, Imp(B, PredApp("Z"))), PredApp("Z"))))
    assert alpha_eq(parse_formula("(or A B)"),
                    ForallPred("Z", 0, Imp(Imp(A, PredApp("Z")), Imp(Imp(B, PredApp("Z")), PredApp("Z")))))
    ex = parse_formula("(exists x (pred P x))")
    assert alpha_eq(ex, Imp(ForallInd("x", sol2.neg(PredApp("P", (Var("x"),)))), sol2.bot()))
    assert alpha_eq(parse_formula("(= 0 x)"),
                    ForallPred("Y", 1, Imp(PredApp("Y", (Zero(),)), PredApp("Y", (Var("x"),)))))


def test_sugar_avoids_capture():
    f = parse_formula("(and X Y)")
    assert isinstance(f, ForallPred) and f.var not in ("X", "Y")
    assert sol2.fv_pred(f) == {"X", "Y"}


def test_int_predicate_shape():
    f = sol2.int_pred(Var("y"))
    assert sol2.fv_ind(f) == {"y"}
    assert isinstance(f, ForallPred) and f.arity == 1


@pytest.mark.parametrize("src", [
    "(imp (pred X 0) (pred X 0 0))", "(forall2 X 1 (pred X))", "(imp A)",
    "(forall 0 A)",
])
def test_bad_formulas(src):
    with pytest.raises((SyntaxError, ValueError)):
        parse_formula(src)


def test_relativize_examples():
    assert alpha_eq(relativize(parse_formula("(forall x (= x x))")),
                    parse_formula("(forall x (imp (Int x) (= x x)))"))
    assert alpha_eq(relativize(parse_formula("(forall2 X 1 (forall y (pred X y)))")),
                    parse_formula("(forall2 X 1 (forall y (imp (Int y) (pred X y))))"))
    a = parse_formula("(imp A B)")
    assert relativize(a) == a


# generator of small formulas over a fixed vocabulary
_atoms = st.sampled_from([PredApp("A"), PredApp("B"), PredApp("P", (Var("x"),)),
                          PredApp("P", (Succ(Var("y")),)), PredApp("P", (Add(Var("x"), Zero()),))])
formulas = st.recursive(
    _atoms,
    lambda kids: st.one_of(
        st.builds(Imp, kids, kids),
        st.builds(ForallInd, st.sampled_from("xyz"), kids),
        st.builds(ForallPred, st.just("A"), st.just(0), kids),
        st.builds(lambda a, b: sol2.conj(a, b), kids, kids),
    ),
    max_leaves=8,
)


def _int_free(f):
    """Relativizing a formula that has no first-order quantifier changes nothing."""
    return not sol2.has_first_order_forall(f)


@given(formulas)
def test_relativize_properties(f):
    r = relativize(f)
    assert sol2.fv_ind(r) == sol2.fv_ind(f)
    assert sol2.fv_pred(r) == sol2.fv_pred(f)
    if _int_free(f):
        assert r == f
    # relativizing twice adds a second guard, never loses the first
    rr = relativize(r)
    assert len(sol2.to_sexp(rr)) >= len(sol2.to_sexp(r)) >= len(sol2.to_sexp(f))


@given(formulas)
def test_formula_roundtrip(f):
    assert alpha_eq(parse_formula(sol2.to_sexp(f)), f)
    assert sol2.alpha_key(f) == sol2.alpha_key(parse_formula(sol2.to_sexp(f)))


def test_alpha_eq_renaming():
    assert alpha_eq(parse_formula("(forall x (pred P x))"), parse_formula("(forall y (pred P y))"))
    assert not alpha_eq(parse_formula("(forall x (pred P x))"), parse_formula("(forall y (pred P x))"))
    assert alpha_eq(parse_formula("(forall2 X 0 X)"), parse_formula("(forall2 Y 0 Y)"))
    assert not alpha_eq(parse_formula("(forall2 X 0 X)"), parse_formula("(forall2 X 1 (pred X 0))"))


def test_subst_pred_comprehension():
    f = parse_formula("(forall y (pred X y))")
    out = sol2.subst_pred(f, "X", ("z",), parse_formula("(= z y)"))
    # the bound y must be renamed so the free y of the comprehension survives
    assert "y" in sol2.fv_ind(out)


def test_prenex_statement_shape():
    s = sol2.prenex_statement(2)
    assert sol2.is_closed(s)
    assert "(fn phi x1 x2 y1 y2)" in sol2.to_sexp(s)


# --------------------------------------------------------------------------
# realizers

@pytest.mark.parametrize("name", sorted(sol2.builtin_realizers()))
def test_builtin_realizers_wellformed(name):
    ax = sol2.builtin_realizers()[name]
    assert sol2.is_closed(ax.formula)
    assert not ax.term.fv()
    assert kam.is_continuation_free(ax.term)


@pytest.mark.parametrize("n,m", [(0, 0), (1, 4), (3, 2), (5, 5)])
def test_arithmetic_realizers_compute(n, m):
    r = sol2.builtin_realizers()
    rb = kam.readback
    assert rb(kam.app(r["int_succ"].term, kam.church(n))) == n + 1
    assert rb(kam.app(r["int_add"].term, kam.church(n), kam.church(m))) == n + m
    assert rb(kam.app(r["int_mul"].term, kam.church(n), kam.church(m))) == n * m


def test_stored_is_insensitive_to_representation():
    # (lambda x.x) 2 and 2 are both representations of two
    r = sol2.builtin_realizers()["int_succ"].term
    odd = kam.App(kam.identity(), kam.church(2))
    assert kam.readback(kam.App(r, odd)) == 3


def test_registry_duplicates_and_closure():
    reg = sol2.RealizerRegistry()
    reg.register("mine", "(forall x (= x x))", "(lam z z)")
    with pytest.raises(sol2.DuplicateAxiom):
        reg.register("mine", "(forall x (= x x))", "(lam z z)")
    with pytest.raises(sol2.DuplicateAxiom):
        reg.register("add_zero", "(forall x (= x x))", "(lam z z)")
    with pytest.raises(ValueError):
        reg.register("open", "(= x 0)", "(lam z z)")
    with pytest.raises(ValueError):
        reg.register("freeterm", "(forall x (= x x))", "(lam z w)")
    auto = sol2.register_axiom_realizer(reg, "(forall x (= (add x 0) x))", "(lam z z)")
    assert auto in reg.axioms


def test_registry_spot_check_refuses_false_equations():
    reg = sol2.RealizerRegistry(functions={"f": lambda x, y: int(x != y)})
    reg.register("ok", "(forall x (= (fn f x x) 0))", "(lam z z)")
    with pytest.raises(sol2.AxiomFalse):
        reg.register("bad", "(forall x (= (fn f x (succ x)) 0))", "(lam z z)")


def test_declared_false_axiom_fails_the_script():
    text = read("id_proof.drv").replace("(fn f x x) 0", "(fn f x x) 1", 1)
    with pytest.raises(DerivationError):
        sol2.check_script(text, sol2.RealizerRegistry(functions={"f": lambda x, y: int(x != y)}))


def test_registry_copy_is_independent():
    reg = sol2.RealizerRegistry()
    cp = reg.copy()
    cp.register("only_in_copy", "(forall x (= x x))", "(lam z z)")
    assert "only_in_copy" not in reg.axioms


def test_fn_terms_parse():
    t = sol2.parse_so_term("(fn f x (succ 0))")
    assert t == FnApp("f", (Var("x"), Succ(Zero())))
