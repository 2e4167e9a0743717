import hypothesis.strategies as st
from hypothesis import given

from psiwb.nominal import (Name, Permutation, alpha_eq, apply_perm, canonical,
                           fresh_name, is_fresh, map_atoms, mint, support,
                           swap)
from psiwb.params import EtherInstance
from psiwb.process import NIL, Assert, Input, Output, Par, Res

a, b, c, x, y = (fresh_name((), h) for h in "abcxy")


def out(ch, msg, cont=NIL):
    return Output(ch, msg, cont)


def test_name_identity():
    assert Name(7, "p") == Name(7, "q")
    assert Name(7) != Name(8)
    assert hash(Name(7, "p")) == hash(Name(7))


def test_fresh_name_avoids():
    avoid = {a, b, c}
    n = fresh_name(avoid)
    assert n not in avoid
    m1, m2 = fresh_name(), fresh_name()
    assert m1 != m2


def test_mint_deterministic():
    avoid = frozenset({a, b})
    assert mint(avoid) == mint(avoid)
    m1 = mint(avoid)
    m2 = mint(avoid | {m1})
    assert m1 != m2


def test_single_swap_on_names():
    p = swap(a, b)
    assert apply_perm(p, a) == b
    assert apply_perm(p, b) == a
    assert apply_perm(p, c) == c


def test_swap_twice_is_identity():
    p = Permutation(((a, b), (a, b)))
    assert apply_perm(p, a) == a
    assert apply_perm(p, out(a, c)) == out(a, c)


def test_perm_on_process_matches_structural_recursion():
    # independent oracle: recurse by hand over the AST
    def oracle(p, proc):
        if isinstance(proc, Output):
            return Output(p.act(proc.channel), p.act(proc.message),
                          oracle(p, proc.cont))
        return proc

    p = swap(a, b)
    proc = out(a, c)
    assert apply_perm(p, proc) == oracle(p, proc) == out(b, c)


def test_support_of_nil_is_empty():
    assert support(NIL) == frozenset()


def test_support_excludes_binders():
    # support((nu x) a<x>.0) == {a}: oracle is the free names of the
    # alpha-canonical form
    proc = Res(x, out(a, x))
    assert support(proc) == frozenset({a})
    canon = canonical(proc)
    frees = {n for n in _all_atoms(canon) if n.id >= 0}
    assert frees == {a}


def _all_atoms(v):
    import dataclasses
    if isinstance(v, Name):
        return {v}
    if isinstance(v, (tuple, frozenset)):
        return set().union(*(_all_atoms(e) for e in v)) if v else set()
    if dataclasses.is_dataclass(v):
        fs = dataclasses.fields(v)
        return set().union(*(_all_atoms(getattr(v, f.name)) for f in fs)) if fs else set()
    return set()


def test_support_of_ether_assertion():
    # Example 2.10: the ether assertion {x, y} has support {x, y}
    assert support(frozenset({x, y})) == frozenset({x, y})


def test_is_fresh():
    assert is_fresh(a, NIL)
    assert is_fresh(x, Res(x, out(a, x)))
    assert not is_fresh(a, out(a, x))


def test_alpha_eq_restriction():
    assert alpha_eq(Res(x, out(a, x)), Res(y, out(a, y)))
    assert not alpha_eq(out(a, x), out(a, y))


def test_alpha_ineq_ordered_binder_sequences():
    from psiwb.semantics import Prov
    # (nu x; y)M vs (nu y; x)M differ when both occur in M: order matters
    m = (x, y)
    assert not alpha_eq(Prov((x,), (y,), m), Prov((y,), (x,), m))
    assert alpha_eq(Prov((x,), (y,), m), Prov((a,), (b,), (a, b)))


def test_input_binds_pattern_variables():
    p1 = Input(a, (x,), x, out(b, x))
    p2 = Input(a, (y,), y, out(b, y))
    assert alpha_eq(p1, p2)
    assert support(p1) == frozenset({a, b})


# -- property tests ----------------------------------------------------------

names = st.sampled_from([a, b, c, x, y])
perms = st.lists(st.tuples(names, names), max_size=3).map(
    lambda sw: Permutation(tuple(sw)))


@st.composite
def procs(draw, depth=3):
    kind = draw(st.integers(0, 5 if depth > 0 else 2))
    if kind == 0:
        return NIL
    if kind == 1:
        return out(draw(names), draw(names))
    if kind == 2:
        v = draw(names)
        return Input(draw(names), (v,), v, NIL)
    if kind == 3:
        return Par(draw(procs(depth - 1)), draw(procs(depth - 1)))
    if kind == 4:
        return Res(draw(names), draw(procs(depth - 1)))
    return Assert(frozenset(draw(st.lists(names, max_size=2))))


@given(perms, procs())
def test_equivariance_of_support(p, proc):
    assert support(apply_perm(p, proc)) == frozenset(
        p.act(n) for n in support(proc))


@given(perms, procs())
def test_equivariance_of_canonical(p, proc):
    # alpha_eq is equivariant: x =a= y implies p.x =a= p.y
    assert alpha_eq(apply_perm(p, proc), apply_perm(p, canonical(proc)))


@given(procs(), procs(), procs())
def test_alpha_eq_is_equivalence(p1, p2, p3):
    assert alpha_eq(p1, p1)
    if alpha_eq(p1, p2):
        assert alpha_eq(p2, p1)
    if alpha_eq(p1, p2) and alpha_eq(p2, p3):
        assert alpha_eq(p1, p3)


@given(st.sets(names, max_size=5))
def test_fresh_name_never_in_avoid(avoid):
    assert fresh_name(avoid) not in avoid
