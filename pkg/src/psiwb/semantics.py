"""The provenance-annotated labelled transition system, plus the legacy
three-judgement engine used for conservativity experiments.

Rule-by-rule summary of the main engine:

* In/Out fire at prefixes; the label subject is the *partner* prefix drawn
  from the instance's channel enumerators, the provenance is the own prefix.
* Par shifts the sibling frame into the environment and bookkeeps the
  sibling's binders into the provenance (appended on the left premise,
  prepended on the right one, so provenance binders track frame binders in
  order).
* Com fires when the label subject of each premise equals the other
  premise's provenance term, with frame binders opened consistently.
* Case and Rep demote frame binders to the provenance's inner sequence;
  Scope and Open wrap the provenance.

Freshness side conditions are discharged constructively: every binder is
opened to a deterministic scratch atom (minted against an avoid set that
includes everything in scope), never checked after the fact.  Standalone
input objects are enumerated over the instance's message basis; inside Com
the receiving premise is instantiated with the sender's actual message.

All results are alpha-canonicalised and deduplicated, which also makes the
enumeration reproducible: scratch atoms never leak identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .nominal import (Name, _canon, _CanonState, canon_binders, canonical,
                      map_atoms as _map, mint, mint_many, names_of, rename,
                      support)
from .params import CalculusInstance, Subst
from .process import (Assert, Bang, Case, Input, Nil, Output, Par, Process,
                      Res, check_well_formed, opened_frame, par, res,
                      subst_process)

# ---------------------------------------------------------------------------
# Labels and provenances


@dataclass(frozen=True)
class OutLabel:
    subject: object
    extruded: tuple  # tuple[Name, ...], bind into the object (and the target)
    obj: object

    def _support(self):
        return (support(self.subject)
                | (support(self.obj) - frozenset(self.extruded)))

    def _map_atoms(self, f):
        return OutLabel(_map(f, self.subject), tuple(f(x) for x in self.extruded),
                        _map(f, self.obj))

    def _canon(self, env, st):
        subj = _canon(self.subject, env, st)
        ext, env2 = canon_binders(self.extruded, env, st)
        return OutLabel(subj, ext, _canon(self.obj, env2, st))


@dataclass(frozen=True)
class InLabel:
    subject: object
    obj: object


@dataclass(frozen=True)
class TauLabel:
    pass


TAU = TauLabel()


def bn(label):
    return label.extruded if isinstance(label, OutLabel) else ()


def subj(label):
    return None if isinstance(label, TauLabel) else label.subject


def obj(label):
    return None if isinstance(label, TauLabel) else label.obj


@dataclass(frozen=True)
class Bot:
    """The absent provenance (tau transitions)."""


BOT = Bot()


@dataclass(frozen=True)
class Prov:
    """(nu outer; inner) term -- outer binders mirror the frame binders,
    inner binders come from case and replication."""

    outer: tuple
    inner: tuple
    term: object

    def _support(self):
        return support(self.term) - frozenset(self.outer) - frozenset(self.inner)

    def _map_atoms(self, f):
        return Prov(tuple(f(x) for x in self.outer),
                    tuple(f(y) for y in self.inner), _map(f, self.term))

    def _canon(self, env, st):
        outer, env2 = canon_binders(self.outer, env, st)
        inner, env3 = canon_binders(self.inner, env2, st)
        return Prov(outer, inner, _canon(self.term, env3, st))


def prov_pushdown(pi):
    """Move all outer binders to the inner sequence."""
    if isinstance(pi, Bot):
        return pi
    return Prov((), pi.outer + pi.inner, pi.term)


def prov_append(pi, zs):
    """Insert names at the end of the outer binder sequence."""
    if isinstance(pi, Bot) or not zs:
        return pi
    return Prov(pi.outer + tuple(zs), pi.inner, pi.term)


def prov_scope(b, pi):
    """Prepend one restriction binder."""
    if isinstance(pi, Bot):
        return pi
    return Prov((b,) + pi.outer, pi.inner, pi.term)


def prov_scope_names(bs, pi):
    if isinstance(pi, Bot) or not bs:
        return pi
    return Prov(tuple(bs) + pi.outer, pi.inner, pi.term)


# ---------------------------------------------------------------------------
# Transitions


@dataclass(frozen=True)
class Fuel:
    """Bounds the number of replication unfoldings per derivation path."""

    rep_depth: int = 2


DEFAULT_FUEL = Fuel(2)


def as_fuel(fuel) -> Fuel:
    if isinstance(fuel, Fuel):
        return fuel
    return Fuel(int(fuel))


@dataclass(frozen=True)
class Transition:
    env: object
    source: Process
    label: object
    prov: object
    target: Process

    def __post_init__(self):
        is_tau = isinstance(self.label, TauLabel)
        if is_tau != isinstance(self.prov, Bot):
            raise ValueError("provenance is Bot exactly on tau transitions")

    def _support(self):
        return (names_of(self.env, self.source, self.label, self.prov)
                | (support(self.target) - frozenset(bn(self.label))))

    def _map_atoms(self, f):
        return Transition(_map(f, self.env), _map(f, self.source),
                          _map(f, self.label), _map(f, self.prov),
                          _map(f, self.target))

    def _canon(self, env, st):
        env_c = _canon(self.env, env, st)
        src_c = _canon(self.source, env, st)
        if isinstance(self.label, OutLabel):
            subj_c = _canon(self.label.subject, env, st)
            ext, env2 = canon_binders(self.label.extruded, env, st)
            lab_c = OutLabel(subj_c, ext, _canon(self.label.obj, env2, st))
        else:
            lab_c = _canon(self.label, env, st)
            env2 = env
        prov_c = _canon(self.prov, env, st)
        return Transition(env_c, src_c, lab_c, prov_c, _canon(self.target, env2, st))


@dataclass(frozen=True)
class ErasedTransition:
    """A transition with the provenance projected away."""

    env: object
    source: Process
    label: object
    target: Process

    def _support(self):
        return (names_of(self.env, self.source, self.label)
                | (support(self.target) - frozenset(bn(self.label))))

    def _map_atoms(self, f):
        return ErasedTransition(_map(f, self.env), _map(f, self.source),
                                _map(f, self.label), _map(f, self.target))

    def _canon(self, env, st):
        env_c = _canon(self.env, env, st)
        src_c = _canon(self.source, env, st)
        if isinstance(self.label, OutLabel):
            subj_c = _canon(self.label.subject, env, st)
            ext, env2 = canon_binders(self.label.extruded, env, st)
            lab_c = OutLabel(subj_c, ext, _canon(self.label.obj, env2, st))
        else:
            lab_c = _canon(self.label, env, st)
            env2 = env
        return ErasedTransition(env_c, src_c, lab_c, _canon(self.target, env2, st))


@dataclass(frozen=True)
class Action:
    """A label/target pair, canonicalised jointly for simulation matching."""

    label: object
    target: Process

    def _support(self):
        return support(self.label) | (support(self.target) - frozenset(bn(self.label)))

    def _map_atoms(self, f):
        return Action(_map(f, self.label), _map(f, self.target))

    def _canon(self, env, st):
        if isinstance(self.label, OutLabel):
            subj_c = _canon(self.label.subject, env, st)
            ext, env2 = canon_binders(self.label.extruded, env, st)
            lab_c = OutLabel(subj_c, ext, _canon(self.label.obj, env2, st))
        else:
            lab_c = _canon(self.label, env, st)
            env2 = env
        return Action(lab_c, _canon(self.target, env2, st))


def erase_provenance(transitions) -> frozenset:
    """Project provenances away, deduplicating up to alpha."""
    return frozenset(
        canonical(ErasedTransition(t.env, t.source, t.label, t.target))
        for t in transitions)


# ---------------------------------------------------------------------------
# The engine


def transitions(inst: CalculusInstance, psi, proc: Process, fuel=DEFAULT_FUEL,
                avoid=()) -> frozenset:
    """Every transition derivable from the rules, with at most
    ``fuel.rep_depth`` replication unfoldings per derivation path.
    ``avoid`` adds extra names the freshening must steer clear of (e.g. a
    comparison partner)."""
    check_well_formed(proc)
    fuel = as_fuel(fuel)
    ctx0 = names_of(psi, proc) | frozenset(avoid)
    msgs = inst.message_basis(ctx0)
    raw = _step(inst, psi, proc, fuel.rep_depth, ctx0 | names_of(msgs), msgs)
    return frozenset(canonical(Transition(psi, proc, lab, pi, tgt))
                     for lab, pi, tgt in raw)


def _step(inst, env, p, budget, avoid, msgs):
    """Raw (label, provenance, target) triples for one process."""
    if isinstance(p, (Nil, Assert)):
        return []

    if isinstance(p, Output):
        out = []
        for k in sorted(inst.out_channels(env, p.channel, avoid), key=_skey):
            out.append((OutLabel(k, (), p.message), Prov((), (), p.channel), p.cont))
        return out

    if isinstance(p, Input):
        out = []
        subjects = sorted(inst.in_channels(env, p.channel, avoid), key=_skey)
        for k in subjects:
            for ls in itertools.product(msgs, repeat=len(p.variables)):
                sigma = Subst.of(p.variables, ls)
                msg = inst.subst_term(p.pattern, sigma)
                tgt = subst_process(inst, p.cont, sigma)
                out.append((InLabel(k, msg), Prov((), (), p.channel), tgt))
        return out

    if isinstance(p, Case):
        out = []
        for phi, q in p.branches:
            if inst.entails(env, phi):
                for lab, pi, tgt in _step(inst, env, q, budget, avoid, msgs):
                    out.append((lab, prov_pushdown(pi), tgt))
        return out

    if isinstance(p, Res):
        fresh = mint(avoid, p.name.hint or "b")
        body = rename({p.name: fresh}, p.body)
        out = []
        for lab, pi, tgt in _step(inst, env, body, budget, avoid | {fresh}, msgs):
            if fresh not in support(lab):
                out.append((lab, prov_scope(fresh, pi), Res(fresh, tgt)))
            elif (isinstance(lab, OutLabel)
                  and fresh not in support(lab.subject)
                  and fresh in support(lab.obj) - frozenset(lab.extruded)):
                opened = OutLabel(lab.subject, (fresh,) + lab.extruded, lab.obj)
                out.append((opened, prov_scope(fresh, pi), tgt))
            # otherwise the name escapes through the subject: no rule applies
        return out

    if isinstance(p, Bang):
        if budget <= 0:
            return []
        out = []
        for lab, pi, tgt in _step(inst, env, Par(p.body, p), budget - 1, avoid, msgs):
            out.append((lab, prov_pushdown(pi), tgt))
        return out

    if isinstance(p, Par):
        left, right = p.left, p.right
        b_r, psi_r, avoid = opened_frame(inst, right, avoid)
        b_l, psi_l, avoid = opened_frame(inst, left, avoid)
        env_l = inst.compose(psi_r, env)
        env_r = inst.compose(psi_l, env)
        left_trans = _step(inst, env_l, left, budget, avoid, msgs)
        right_trans = _step(inst, env_r, right, budget, avoid, msgs)

        # the opened sibling binders must be fresh for the conclusion label:
        # premise transitions mentioning them feed Com only
        out = []
        b_r_set, b_l_set = frozenset(b_r), frozenset(b_l)
        for lab, pi, tgt in left_trans:
            if support(lab) & b_r_set:
                continue
            out.append((lab, prov_append(pi, b_r), Par(tgt, right)))
        for lab, pi, tgt in right_trans:
            if support(lab) & b_l_set:
                continue
            out.append((lab, prov_scope_names(b_l, pi), Par(left, tgt)))

        out.extend(_coms(inst, env, left, right, left_trans, b_l, b_r,
                         env_r, budget, avoid, msgs, swapped=False))
        out.extend(_coms(inst, env, right, left, right_trans, b_r, b_l,
                         env_l, budget, avoid, msgs, swapped=True))
        return out

    raise TypeError(f"not a process: {p!r}")


def _coms(inst, env, sender, receiver, sender_trans, b_s, b_r, env_recv,
          budget, avoid, msgs, swapped):
    """Com instances with ``sender`` outputting and ``receiver`` inputting."""
    out = []
    for lab, pi, s_tgt in sender_trans:
        if not isinstance(lab, OutLabel):
            continue
        k_open, avoid2 = _open_prov(pi, b_s, avoid | names_of(lab, s_tgt))
        if k_open is None:
            continue
        for lab2, pi2, r_tgt in _inputs_for(inst, env_recv, receiver,
                                            k_open, lab.obj, budget, avoid2, msgs):
            m_open, _ = _open_prov(pi2, b_r, avoid2 | names_of(lab2, r_tgt))
            if m_open is None or m_open != lab.subject:
                continue
            pair = Par(r_tgt, s_tgt) if swapped else Par(s_tgt, r_tgt)
            out.append((TAU, BOT, res(lab.extruded, pair)))
    return out


def _open_prov(pi, frame_binders, avoid):
    """The provenance term with outer binders aligned to the opened frame
    binders (positionally) and inner binders opened fresh."""
    if isinstance(pi, Bot) or len(pi.outer) != len(frame_binders):
        return None, avoid
    m = dict(zip(pi.outer, frame_binders))
    fresh, avoid = mint_many(avoid, len(pi.inner), "y")
    m.update(zip(pi.inner, fresh))
    return rename(m, pi.term), avoid


def _inputs_for(inst, env, p, subject, message, budget, avoid, msgs):
    """Input transitions of ``p`` receiving exactly ``message`` from the
    sending prefix ``subject``."""
    if isinstance(p, (Nil, Assert, Output)):
        return []

    if isinstance(p, Input):
        if not inst.entails(env, inst.conn(subject, p.channel)):
            return []
        out = []
        for ts in inst.match_pattern(p.variables, p.pattern, message):
            sigma = Subst.of(p.variables, ts)
            tgt = subst_process(inst, p.cont, sigma)
            out.append((InLabel(subject, message), Prov((), (), p.channel), tgt))
        return out

    if isinstance(p, Case):
        out = []
        for phi, q in p.branches:
            if inst.entails(env, phi):
                for lab, pi, tgt in _inputs_for(inst, env, q, subject, message,
                                                budget, avoid, msgs):
                    out.append((lab, prov_pushdown(pi), tgt))
        return out

    if isinstance(p, Res):
        fresh = mint(avoid, p.name.hint or "b")
        body = rename({p.name: fresh}, p.body)
        out = []
        for lab, pi, tgt in _inputs_for(inst, env, body, subject, message,
                                        budget, avoid | {fresh}, msgs):
            out.append((lab, prov_scope(fresh, pi), Res(fresh, tgt)))
        return out

    if isinstance(p, Bang):
        if budget <= 0:
            return []
        return [(lab, prov_pushdown(pi), tgt)
                for lab, pi, tgt in _inputs_for(inst, env, Par(p.body, p),
                                                subject, message, budget - 1,
                                                avoid, msgs)]

    if isinstance(p, Par):
        left, right = p.left, p.right
        b_r, psi_r, avoid = opened_frame(inst, right, avoid)
        b_l, psi_l, avoid = opened_frame(inst, left, avoid)
        out = []
        for lab, pi, tgt in _inputs_for(inst, inst.compose(psi_r, env), left,
                                        subject, message, budget, avoid, msgs):
            out.append((lab, prov_append(pi, b_r), Par(tgt, right)))
        for lab, pi, tgt in _inputs_for(inst, inst.compose(psi_l, env), right,
                                        subject, message, budget, avoid, msgs):
            out.append((lab, prov_scope_names(b_l, pi), Par(left, tgt)))
        return out

    raise TypeError(f"not a process: {p!r}")


def _skey(t):
    from .nominal import sort_key
    return sort_key(t)


# ---------------------------------------------------------------------------
# The legacy engine (In-Old / Out-Old / Com-Old)


def legacy_transitions(inst: CalculusInstance, psi, proc: Process,
                       fuel=DEFAULT_FUEL, avoid=(), reorient_in=False) -> frozenset:
    """The original provenance-free semantics.  ``reorient_in`` flips the
    channel judgement in the input rule from the printed orientation
    (prefix on the left) to the consistent one (prefix on the right)."""
    check_well_formed(proc)
    fuel = as_fuel(fuel)
    ctx0 = names_of(psi, proc) | frozenset(avoid)
    msgs = inst.message_basis(ctx0)
    raw = _legacy_step(inst, psi, proc, fuel.rep_depth, ctx0 | names_of(msgs),
                       msgs, reorient_in)
    return frozenset(canonical(ErasedTransition(psi, proc, lab, tgt))
                     for lab, tgt in raw)


def _legacy_in_subjects(inst, env, channel, avoid, reorient_in):
    if reorient_in:
        return sorted(inst.in_channels(env, channel, avoid), key=_skey)
    return sorted(inst.out_channels(env, channel, avoid), key=_skey)


def _legacy_step(inst, env, p, budget, avoid, msgs, reorient_in):
    if isinstance(p, (Nil, Assert)):
        return []

    if isinstance(p, Output):
        return [(OutLabel(k, (), p.message), p.cont)
                for k in sorted(inst.out_channels(env, p.channel, avoid), key=_skey)]

    if isinstance(p, Input):
        out = []
        for k in _legacy_in_subjects(inst, env, p.channel, avoid, reorient_in):
            for ls in itertools.product(msgs, repeat=len(p.variables)):
                sigma = Subst.of(p.variables, ls)
                out.append((InLabel(k, inst.subst_term(p.pattern, sigma)),
                            subst_process(inst, p.cont, sigma)))
        return out

    if isinstance(p, Case):
        out = []
        for phi, q in p.branches:
            if inst.entails(env, phi):
                out.extend(_legacy_step(inst, env, q, budget, avoid, msgs, reorient_in))
        return out

    if isinstance(p, Res):
        fresh = mint(avoid, p.name.hint or "b")
        body = rename({p.name: fresh}, p.body)
        out = []
        for lab, tgt in _legacy_step(inst, env, body, budget, avoid | {fresh},
                                     msgs, reorient_in):
            if fresh not in support(lab):
                out.append((lab, Res(fresh, tgt)))
            elif (isinstance(lab, OutLabel)
                  and fresh not in support(lab.subject)
                  and fresh in support(lab.obj) - frozenset(lab.extruded)):
                out.append((OutLabel(lab.subject, (fresh,) + lab.extruded, lab.obj), tgt))
        return out

    if isinstance(p, Bang):
        if budget <= 0:
            return []
        return _legacy_step(inst, env, Par(p.body, p), budget - 1, avoid, msgs,
                            reorient_in)

    if isinstance(p, Par):
        left, right = p.left, p.right
        b_r, psi_r, avoid = opened_frame(inst, right, avoid)
        b_l, psi_l, avoid = opened_frame(inst, left, avoid)
        env_l = inst.compose(psi_r, env)
        env_r = inst.compose(psi_l, env)
        left_trans = _legacy_step(inst, env_l, left, budget, avoid, msgs, reorient_in)
        right_trans = _legacy_step(inst, env_r, right, budget, avoid, msgs, reorient_in)

        out = []
        b_r_set, b_l_set = frozenset(b_r), frozenset(b_l)
        out.extend((lab, Par(tgt, right)) for lab, tgt in left_trans
                   if not support(lab) & b_r_set)
        out.extend((lab, Par(left, tgt)) for lab, tgt in right_trans
                   if not support(lab) & b_l_set)

        three_way = inst.compose(env, inst.compose(psi_l, psi_r))
        out.extend(_legacy_coms(inst, three_way, right, left_trans, env_r,
                                budget, avoid, msgs, reorient_in, swapped=False))
        out.extend(_legacy_coms(inst, three_way, left, right_trans, env_l,
                                budget, avoid, msgs, reorient_in, swapped=True))
        return out

    raise TypeError(f"not a process: {p!r}")


def _legacy_coms(inst, three_way, receiver, sender_trans, env_recv, budget,
                 avoid, msgs, reorient_in, swapped):
    out = []
    for lab, s_tgt in sender_trans:
        if not isinstance(lab, OutLabel):
            continue
        av = avoid | names_of(lab, s_tgt)
        for lab2, r_tgt in _legacy_inputs_for(inst, env_recv, receiver, lab.obj,
                                              budget, av, msgs, reorient_in):
            if not inst.entails(three_way, inst.conn(lab.subject, lab2.subject)):
                continue
            pair = Par(r_tgt, s_tgt) if swapped else Par(s_tgt, r_tgt)
            out.append((TAU, res(lab.extruded, pair)))
    return out


def _legacy_inputs_for(inst, env, p, message, budget, avoid, msgs, reorient_in):
    if isinstance(p, (Nil, Assert, Output)):
        return []

    if isinstance(p, Input):
        out = []
        for k in _legacy_in_subjects(inst, env, p.channel, avoid, reorient_in):
            for ts in inst.match_pattern(p.variables, p.pattern, message):
                sigma = Subst.of(p.variables, ts)
                out.append((InLabel(k, message), subst_process(inst, p.cont, sigma)))
        return out

    if isinstance(p, Case):
        out = []
        for phi, q in p.branches:
            if inst.entails(env, phi):
                out.extend(_legacy_inputs_for(inst, env, q, message, budget,
                                              avoid, msgs, reorient_in))
        return out

    if isinstance(p, Res):
        fresh = mint(avoid, p.name.hint or "b")
        body = rename({p.name: fresh}, p.body)
        return [(lab, Res(fresh, tgt))
                for lab, tgt in _legacy_inputs_for(inst, env, body, message,
                                                   budget, avoid | {fresh},
                                                   msgs, reorient_in)]

    if isinstance(p, Bang):
        if budget <= 0:
            return []
        return _legacy_inputs_for(inst, env, Par(p.body, p), message,
                                  budget - 1, avoid, msgs, reorient_in)

    if isinstance(p, Par):
        left, right = p.left, p.right
        b_r, psi_r, avoid = opened_frame(inst, right, avoid)
        b_l, psi_l, avoid = opened_frame(inst, left, avoid)
        out = []
        for lab, tgt in _legacy_inputs_for(inst, inst.compose(psi_r, env), left,
                                           message, budget, avoid, msgs, reorient_in):
            out.append((lab, Par(tgt, right)))
        for lab, tgt in _legacy_inputs_for(inst, inst.compose(psi_l, env), right,
                                           message, budget, avoid, msgs, reorient_in):
            out.append((lab, Par(left, tgt)))
        return out

    raise TypeError(f"not a process: {p!r}")
