"""Agent syntax, well-formedness, frames and normal forms.

Process constructors:

    Nil | Assert(psi) | Output(M, N, P) | Input(M, xs, N, P)
    Case(((phi, P), ...)) | Par(P, Q) | Res(x, P) | Bang(P)

Input binds its pattern variables into the pattern and the continuation;
Res binds its name into the body.  Everything is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .nominal import (Name, _canon, canon_binders, map_atoms as _map, mint,
                      mint_many, names_of, rename, support)
from .params import CalculusInstance, Subst


class Process:
    """Marker base for agent syntax nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Nil(Process):
    pass


NIL = Nil()


@dataclass(frozen=True)
class Assert(Process):
    assertion: object


@dataclass(frozen=True)
class Output(Process):
    channel: object
    message: object
    cont: Process


@dataclass(frozen=True)
class Input(Process):
    channel: object
    variables: tuple  # tuple[Name, ...], bind into pattern and cont
    pattern: object
    cont: Process

    def _support(self):
        inner = support(self.pattern) | support(self.cont)
        return support(self.channel) | (inner - frozenset(self.variables))

    def _map_atoms(self, f):
        return Input(_map(f, self.channel), tuple(f(v) for v in self.variables),
                     _map(f, self.pattern), _map(f, self.cont))

    def _canon(self, env, st):
        ch = _canon(self.channel, env, st)
        vs, env2 = canon_binders(self.variables, env, st)
        return Input(ch, vs, _canon(self.pattern, env2, st),
                     _canon(self.cont, env2, st))


@dataclass(frozen=True)
class Case(Process):
    branches: tuple  # tuple[(condition, Process), ...]


@dataclass(frozen=True)
class Par(Process):
    left: Process
    right: Process


@dataclass(frozen=True)
class Res(Process):
    name: Name
    body: Process

    def _support(self):
        return support(self.body) - frozenset((self.name,))

    def _map_atoms(self, f):
        return Res(f(self.name), _map(f, self.body))

    def _canon(self, env, st):
        (b,), env2 = canon_binders((self.name,), env, st)
        return Res(b, _canon(self.body, env2, st))


@dataclass(frozen=True)
class Bang(Process):
    body: Process


def par(*procs) -> Process:
    """Left-associated parallel composition, dropping Nil units."""
    parts = [p for p in procs if not isinstance(p, Nil)]
    if not parts:
        return NIL
    out = parts[0]
    for p in parts[1:]:
        out = Par(out, p)
    return out


def res(names, body: Process) -> Process:
    for n in reversed(tuple(names)):
        body = Res(n, body)
    return body


def par_components(p: Process):
    """Flatten nested Par into a component list (Nil dropped)."""
    if isinstance(p, Par):
        return par_components(p.left) + par_components(p.right)
    if isinstance(p, Nil):
        return []
    return [p]


# ---------------------------------------------------------------------------
# Well-formedness


def assertion_guarded(p: Process) -> bool:
    """True when every assertion occurs under an input or output prefix."""
    if isinstance(p, Assert):
        return False
    if isinstance(p, (Nil, Output, Input)):
        return True
    if isinstance(p, Case):
        return all(assertion_guarded(q) for _, q in p.branches)
    if isinstance(p, Par):
        return assertion_guarded(p.left) and assertion_guarded(p.right)
    if isinstance(p, Res):
        return assertion_guarded(p.body)
    if isinstance(p, Bang):
        return assertion_guarded(p.body)
    raise TypeError(f"not a process: {p!r}")


def prefix_guarded(p: Process) -> bool:
    return isinstance(p, (Output, Input))


class IllFormed(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(f"{'/'.join(path) or '.'}: {msg}"
                                   for path, msg in self.diagnostics))


def well_formed_violations(p: Process, path=()):
    """All violations of the syntactic invariants, with subterm paths."""
    out = []
    if isinstance(p, (Nil, Assert)):
        pass
    elif isinstance(p, Output):
        out += well_formed_violations(p.cont, path + ("cont",))
    elif isinstance(p, Input):
        if len(set(p.variables)) != len(p.variables):
            out.append((path, "input pattern variables must be pairwise distinct"))
        extra = frozenset(p.variables) - support(p.pattern)
        if extra:
            out.append((path, "pattern variables not in the pattern's support: "
                        + ", ".join(sorted(n.hint or str(n.id) for n in extra))))
        out += well_formed_violations(p.cont, path + ("cont",))
    elif isinstance(p, Case):
        for i, (_, q) in enumerate(p.branches):
            if not assertion_guarded(q):
                out.append((path + (f"branch{i}",), "case branch must be assertion-guarded"))
            out += well_formed_violations(q, path + (f"branch{i}",))
    elif isinstance(p, Par):
        out += well_formed_violations(p.left, path + ("left",))
        out += well_formed_violations(p.right, path + ("right",))
    elif isinstance(p, Res):
        out += well_formed_violations(p.body, path + ("body",))
    elif isinstance(p, Bang):
        if not assertion_guarded(p.body):
            out.append((path, "replicated process must be assertion-guarded"))
        out += well_formed_violations(p.body, path + ("body",))
    else:
        out.append((path, f"not a process: {p!r}"))
    return out


def check_well_formed(p: Process) -> None:
    bad = well_formed_violations(p)
    if bad:
        raise IllFormed(bad)


# ---------------------------------------------------------------------------
# Frames


@dataclass(frozen=True)
class Frame:
    """The assertion environment of a process: binders over an assertion."""

    binders: tuple  # tuple[Name, ...]
    assertion: object

    def _support(self):
        return support(self.assertion) - frozenset(self.binders)

    def _map_atoms(self, f):
        return Frame(tuple(f(b) for b in self.binders), _map(f, self.assertion))

    def _canon(self, env, st):
        bs, env2 = canon_binders(self.binders, env, st)
        return Frame(bs, _canon(self.assertion, env2, st))


def opened_frame(inst: CalculusInstance, p: Process, avoid):
    """The frame of ``p`` with every binder opened to a deterministic mint
    atom.  Returns (binders, assertion, extended avoid).  The binder order
    is the syntactic order, matching the provenance invariant."""
    avoid = frozenset(avoid)
    if isinstance(p, Assert):
        return (), p.assertion, avoid
    if isinstance(p, Par):
        bl, al, avoid = opened_frame(inst, p.left, avoid)
        br, ar, avoid = opened_frame(inst, p.right, avoid)
        return bl + br, inst.compose(al, ar), avoid
    if isinstance(p, Res):
        fresh = mint(avoid, p.name.hint or "b")
        body = rename({p.name: fresh}, p.body)
        bs, a, avoid = opened_frame(inst, body, avoid | {fresh})
        return (fresh,) + bs, a, avoid
    return (), inst.unit, avoid


def frame_of(inst: CalculusInstance, p: Process) -> Frame:
    """The frame per the four defining equations, freshening binders only
    when composition would capture."""
    if isinstance(p, Assert):
        return Frame((), p.assertion)
    if isinstance(p, Par):
        fl = frame_of(inst, p.left)
        fr = frame_of(inst, p.right)
        # binders of the left component must be fresh for the right frame
        # and vice versa before the assertions are composed
        clash_l = (frozenset(fl.binders) & (frozenset(fr.binders) | support(fr)))
        if clash_l:
            fl = _freshen_frame(fl, names_of(fl, fr))
        clash_r = frozenset(fr.binders) & support(fl)
        if clash_r:
            fr = _freshen_frame(fr, names_of(fl, fr))
        return Frame(fl.binders + fr.binders,
                     inst.compose(fl.assertion, fr.assertion))
    if isinstance(p, Res):
        fb = frame_of(inst, p.body)
        if p.name in fb.binders:
            fb = _freshen_frame(fb, support(fb) | frozenset(fb.binders) | {p.name})
        return Frame((p.name,) + fb.binders, fb.assertion)
    return Frame((), inst.unit)


def _freshen_frame(f: Frame, avoid):
    fresh, _ = mint_many(avoid | support(f), len(f.binders), "b")
    m = dict(zip(f.binders, fresh))
    return Frame(fresh, rename(m, f.assertion))


# ---------------------------------------------------------------------------
# Substitution on processes


def subst_process(inst: CalculusInstance, p: Process, sigma: Subst, avoid=None) -> Process:
    """Capture-avoiding simultaneous substitution; binders clashing with the
    substitution's names are freshened before descending."""
    if avoid is None:
        avoid = support(p) | names_of(*(t for _, t in sigma.pairs)) | sigma.domain
    if isinstance(p, Nil):
        return p
    if isinstance(p, Assert):
        return Assert(inst.subst_assertion(p.assertion, sigma))
    if isinstance(p, Output):
        return Output(inst.subst_term(p.channel, sigma),
                      inst.subst_term(p.message, sigma),
                      subst_process(inst, p.cont, sigma, avoid))
    if isinstance(p, Input):
        ch = inst.subst_term(p.channel, sigma)
        pat, cont, variables = p.pattern, p.cont, p.variables
        clash = [v for v in variables if v in names_of(sigma.pairs)]
        if clash:
            fresh, avoid = mint_many(avoid, len(clash), "v")
            m = dict(zip(clash, fresh))
            variables = tuple(m.get(v, v) for v in variables)
            pat, cont = rename(m, pat), rename(m, cont)
        return Input(ch, variables, inst.subst_term(pat, sigma),
                     subst_process(inst, cont, sigma, avoid))
    if isinstance(p, Case):
        return Case(tuple((inst.subst_condition(phi, sigma),
                           subst_process(inst, q, sigma, avoid))
                          for phi, q in p.branches))
    if isinstance(p, Par):
        return Par(subst_process(inst, p.left, sigma, avoid),
                   subst_process(inst, p.right, sigma, avoid))
    if isinstance(p, Res):
        name, body = p.name, p.body
        if name in names_of(sigma.pairs):
            fresh = mint(avoid, name.hint or "b")
            body = rename({name: fresh}, body)
            name, avoid = fresh, avoid | {fresh}
        return Res(name, subst_process(inst, body, sigma, avoid))
    if isinstance(p, Bang):
        return Bang(subst_process(inst, p.body, sigma, avoid))
    raise TypeError(f"not a process: {p!r}")


# ---------------------------------------------------------------------------
# Normal forms


@dataclass(frozen=True)
class NormalForm:
    """Top-level binders, unguarded assertions and the guarded rest."""

    binders: tuple     # tuple[Name, ...]
    assertions: tuple  # tuple[assertion, ...]
    rest: Process

    def _support(self):
        inner = names_of(self.assertions, self.rest)
        return inner - frozenset(self.binders)

    def _map_atoms(self, f):
        return NormalForm(tuple(f(b) for b in self.binders),
                          _map(f, self.assertions), _map(f, self.rest))

    def _canon(self, env, st):
        bs, env2 = canon_binders(self.binders, env, st)
        return NormalForm(bs, _canon(self.assertions, env2, st),
                          _canon(self.rest, env2, st))


def normal_form(inst: CalculusInstance, p: Process) -> NormalForm:
    """Hoist top-level restrictions outward and split unguarded assertions
    from the guarded rest.  Binders keep their names unless hoisting would
    capture, in which case they are freshened."""
    check_well_formed(p)

    def go(q, avoid):
        if isinstance(q, Nil):
            return (), (), [], avoid
        if isinstance(q, Assert):
            return (), (q.assertion,), [], avoid
        if isinstance(q, Par):
            b1, a1, r1, avoid = go(q.left, avoid)
            b2, a2, r2, avoid = go(q.right, avoid)
            return b1 + b2, a1 + a2, r1 + r2, avoid
        if isinstance(q, Res):
            name, body = q.name, q.body
            if name in avoid:
                fresh = mint(avoid, name.hint or "b")
                body = rename({name: fresh}, body)
                name = fresh
            bs, asserts, rest, avoid = go(body, avoid | {name})
            return (name,) + bs, asserts, rest, avoid
        return (), (), [q], avoid

    binders, asserts, rest, _ = go(p, support(p))
    return NormalForm(binders, asserts, par(*rest))


def reassemble(nf: NormalForm) -> Process:
    return res(nf.binders, par(*(Assert(a) for a in nf.assertions), nf.rest))


class SumUnavailable(ValueError):
    pass


def desugar_sum(inst: CalculusInstance, p: Process, q: Process, top=None) -> Process:
    """P + Q as a two-branch case over an always-entailed condition."""
    for arg in (p, q):
        if not assertion_guarded(arg):
            raise IllFormed([((), "sum arguments must be assertion-guarded")])
    if top is None:
        top = inst.top_condition(names_of(p, q))
    if top is None:
        raise SumUnavailable(
            f"instance {inst.name!r} has no always-entailed condition; "
            "sums cannot be expressed")
    return Case(((top, p), (top, q)))


def collect_assertions(p: Process):
    """Every assertion value occurring anywhere in ``p`` (under binders too)."""
    if isinstance(p, Assert):
        return [p.assertion]
    if isinstance(p, (Output, Input)):
        return collect_assertions(p.cont)
    if isinstance(p, Case):
        return [a for _, q in p.branches for a in collect_assertions(q)]
    if isinstance(p, Par):
        return collect_assertions(p.left) + collect_assertions(p.right)
    if isinstance(p, (Res, Bang)):
        return collect_assertions(p.body)
    return []
