"""Group key generation and forward-secure key evolution."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bonsai import BonsaiPublicKey, bonsai_verify, concat_matrix, delegate_vector
from .params import Params
from .time_tree import Node, bin_bits, is_ancestor, nodes_set
from .trapdoor import ext_basis, is_kernel_basis, rand_basis, trap_gen
from .zq_linalg import gram_schmidt_norm


class KeyStateError(ValueError):
    """A user key is used outside its period or is structurally corrupt."""


@dataclass(frozen=True)
class GroupPublicKey:
    params: Params
    bonsai: BonsaiPublicKey
    B_enc: np.ndarray


@dataclass(frozen=True)
class ManagerSecretKey:
    S0: np.ndarray


@dataclass(frozen=True)
class TracerSecretKey:
    S: np.ndarray


@dataclass
class UserSecretKey:
    """Key material for user i at period t, one slot per entry of nodes_set(t).

    Leaf slots hold a short vector, internal slots a basis, BOT slots None.
    """

    i: int
    t: int
    slots: list = field(default_factory=list)  # [(node or None, array or None)]
    erased: bool = False

    def nodes(self) -> list[Optional[Node]]:
        return [z for z, _ in self.slots]

    def entry(self, z: Node) -> np.ndarray:
        for node, val in self.slots:
            if node == tuple(z):
                return val
        raise KeyStateError(f"no entry for node {z}")

    def leaf(self, d: int) -> np.ndarray:
        return self.entry(bin_bits(self.t, d))

    def erase(self) -> None:
        """Overwrite all key material with zeros (best effort, not hardened)."""
        for _, val in self.slots:
            if val is not None:
                val.fill(0)
        self.erased = True


def identity_bits(i: int, params: Params) -> Node:
    return bin_bits(i, params.ell)


def node_matrix(gpk: GroupPublicKey, i: int, z: Node) -> np.ndarray:
    """A_{id‖z} for user i."""
    return concat_matrix(gpk.bonsai, identity_bits(i, gpk.params) + tuple(z))


def _derive(gpk: GroupPublicKey, S_parent, A_parent, i: int, z: Node, rng) -> np.ndarray:
    p = gpk.params
    A_child = node_matrix(gpk, i, z)
    if len(z) == p.d:
        return delegate_vector(S_parent, A_parent, A_child, gpk.bonsai.u, p.s(p.k), p.beta, p.q, rng, p.slack)
    ext = ext_basis(S_parent, A_parent, A_child, p.q)
    return rand_basis(ext.S, A_child, p.s(p.ell + len(z)), p.q, rng, slack=p.slack).S


def key_gen(params: Params, rng: np.random.Generator, users=None):
    """(gpk, msk, mosk, [usk_0 per user]); users restricts which user keys are derived."""
    p = params
    manager = trap_gen(p.n, p.m, p.q, rng)
    bonsai = BonsaiPublicKey.random(manager.A, p.k, p.q, rng)
    tracer = trap_gen(p.n, p.m, p.q, rng)
    gpk = GroupPublicKey(params=p, bonsai=bonsai, B_enc=tracer.A)
    users = range(p.N) if users is None else list(users)
    streams = dict(zip(range(p.N), rng.spawn(p.N)))
    usks = []
    for i in users:
        slots = []
        for z in nodes_set(0, p.d):
            val = None if z is None else _derive(gpk, manager.S, manager.A, i, z, streams[i])
            slots.append((z, val))
        usks.append(UserSecretKey(i=i, t=0, slots=slots))
    return gpk, ManagerSecretKey(manager.S), TracerSecretKey(tracer.S), usks


def key_update(gpk: GroupPublicKey, usk: UserSecretKey, i: int, rng: np.random.Generator) -> UserSecretKey:
    """Key for period t+1; the input key is erased afterwards."""
    p = gpk.params
    if usk.erased:
        raise KeyStateError("key has been erased")
    if usk.i != i:
        raise KeyStateError(f"key belongs to user {usk.i}, not {i}")
    t_next = usk.t + 1
    if t_next > p.T - 1:
        raise KeyStateError(f"no period after t={usk.t} (T={p.T})")
    old = [(z, v) for z, v in usk.slots if z is not None]
    slots = []
    for z_new in nodes_set(t_next, p.d):
        if z_new is None:
            slots.append((None, None))
            continue
        parents = [(z, v) for z, v in old if is_ancestor(z, z_new)]
        if len(parents) != 1 or parents[0][1] is None:
            raise KeyStateError(f"missing ancestor entry for node {z_new}")
        z, val = parents[0]
        if z == z_new:
            slots.append((z_new, val.copy()))
        elif len(z) == p.d:
            raise KeyStateError(f"leaf entry {z} cannot be delegated")
        else:
            slots.append((z_new, _derive(gpk, val, node_matrix(gpk, i, z), i, z_new, rng)))
    usk.erase()
    return UserSecretKey(i=i, t=t_next, slots=slots)


def check_user_key(gpk: GroupPublicKey, usk: UserSecretKey) -> bool:
    """Exact check of every slot: domain, leaf syndromes and bounds, internal bases."""
    p = gpk.params
    if usk.erased or usk.nodes() != nodes_set(usk.t, p.d):
        return False
    for z, val in usk.slots:
        if z is None:
            if val is not None:
                return False
            continue
        bits = identity_bits(usk.i, p) + z
        if len(z) == p.d:
            if not bonsai_verify(gpk.bonsai, bits, val, p.beta):
                return False
        elif not is_kernel_basis(concat_matrix(gpk.bonsai, bits), val, p.q):
            return False
    return True


def measure_ladder(params: Params, rng: np.random.Generator, i: int = 0) -> list[dict]:
    """Measured Gram-Schmidt norm feeding each level versus s_level / slack.

    Walks one delegation chain: trap_gen, then rand_basis at each internal
    depth, recording whether s_level >= slack·gs(parent basis).
    """
    p = params
    tp = trap_gen(p.n, p.m, p.q, rng)
    bonsai = BonsaiPublicKey.random(tp.A, p.k, p.q, rng)
    gpk = GroupPublicKey(params=p, bonsai=bonsai, B_enc=tp.A)
    rows = []
    S, A = tp.S, tp.A
    gs = gram_schmidt_norm(S, exact_limit=0)
    rows.append(dict(level=p.ell, dim=p.m, parent_gs=gs, s=p.s(p.ell), ok=p.s(p.ell) >= p.slack * gs))
    z: Node = ()
    for depth in range(1, p.d + 1):
        z = z + (0,)
        level = p.ell + depth
        s = p.s(level)
        rows.append(dict(level=level, dim=(level + 1) * p.m, parent_gs=gs, s=s, ok=s >= p.slack * gs))
        if depth < p.d:
            A_child = node_matrix(gpk, i, z)
            S = rand_basis(ext_basis(S, A, A_child, p.q).S, A_child, s, p.q, rng, slack=p.slack).S
            A = A_child
            gs = gram_schmidt_norm(S, exact_limit=0)
    return rows
