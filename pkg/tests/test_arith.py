import pytest

from dialectic.arith import ArithCloser, ArithProver, conj_components
from dialectic.derived import transform_proof
from dialectic.kernel import replay
from dialectic.terms import parse_term, render


@pytest.fixture
def prover(store):
    return ArithProver(store)


@pytest.fixture
def closer(store):
    return ArithCloser(store)


def normalized(prover, s):
    t = parse_term(s)
    n, _ = prover.normalize(t)
    return render(n)


def test_normalize_shapes(prover):
    assert normalized(prover, "2 * (n + 1)") == "2 + 2 * n"
    assert normalized(prover, "(n + 1) * (n + 2)") == "2 + 3 * n + n * n"
    assert normalized(prover, "n + n") == "2 * n"
    assert normalized(prover, "SUC n") == "1 + n"
    assert normalized(prover, "0 * k + m * 0 + 3 * 4") == "12"
    assert normalized(prover, "sum (n + 0)") == "sum n"
    assert normalized(prover, "m * n + n * m") == "2 * m * n"


def test_normalize_steps_replay(prover, store):
    t = parse_term("(k + 1) * (k + 1)")
    n, steps = prover.normalize(t)
    chain = transform_proof(t, steps)
    assert chain.concl.args[0] == t and chain.concl.args[1] == n
    replay(chain, store)


def test_prove_term_eq(prover, store):
    th = prover.prove_term_eq(parse_term("(n+1)*(n+1)"),
                              parse_term("n*n + 2*n + 1"))
    assert th is not None
    replay(th, store)
    assert prover.prove_term_eq(parse_term("n + 1"), parse_term("n")) is None


def test_close_equalities(closer, store):
    got = closer.close([], parse_term("2 * (k + m) = 2 * m + k + k"))
    assert got is not None
    replay(got, store)
    assert closer.close([], parse_term("k + 1 = k")) is None


def test_close_with_assumption_equations(closer, store):
    ih = parse_term("2 * sum n = n * (n + 1)")
    goal = parse_term("2 * (sum n + SUC n) = SUC n * (SUC n + 1)")
    got = closer.close([ih], goal)
    assert got is not None and set(got.hyps) <= {ih}
    replay(got, store)


def test_close_inequalities(closer, store):
    for text in ("n <= n", "n <= n + 3", "n < n + 1", "k + 1 <= k + m + 2",
                 "3 < 5", "4 <= 4"):
        got = closer.close([], parse_term(text))
        assert got is not None, text
        replay(got, store)
    assert closer.close([], parse_term("n < n")) is None
    assert closer.close([], parse_term("n + 1 <= n")) is None


def test_close_by_contradiction(closer, store):
    got = closer.close([parse_term("~(x = x)")], parse_term("p"))
    assert got is not None
    replay(got, store)
    got2 = closer.close([parse_term("SUC k = 0")], parse_term("0 = 1"))
    assert got2 is not None
    got3 = closer.close([parse_term("p"), parse_term("~p")], parse_term("q"))
    assert got3 is not None


def test_conj_components(store):
    comps = conj_components(store["sum_def"])
    assert len(comps) == 2
    assert comps[0].concl == parse_term("sum 0 = 0")
