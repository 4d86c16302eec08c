"""Binary-tree time periods: encodings, right siblings and covering node sets.

Nodes are tuples of bits (most significant first).  BOT marks an empty slot.
"""

from __future__ import annotations

from typing import Optional

Node = tuple[int, ...]
BOT: Optional[Node] = None


def bin_bits(b: int, length: int) -> Node:
    if b < 0 or b >= 1 << length:
        raise ValueError(f"{b} does not fit in {length} bits")
    return tuple((b >> (length - 1 - i)) & 1 for i in range(length))


def bits_to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def node_str(z: Optional[Node]) -> str:
    return "⊥" if z is None else "".join(map(str, z))


def sibling(j: int, t: int, d: int) -> Optional[Node]:
    """Node at depth j that is the right sibling of the path to leaf t (1-indexed j)."""
    if not 1 <= j <= d + 1:
        raise ValueError(f"j={j} outside 1..{d + 1}")
    bits = bin_bits(t, d)
    if j == d + 1:
        return bits
    if bits[j - 1] == 1:
        return BOT
    return bits[: j - 1] + (1,)


def nodes_set(t: int, d: int) -> list[Optional[Node]]:
    """[sibling(1,t), ..., sibling(d+1,t)]: covers exactly the leaves t..2^d-1."""
    return [sibling(j, t, d) for j in range(1, d + 2)]


def _check(z, z_prime):
    if z is None or z_prime is None:
        raise ValueError("ancestor test on BOT")


def is_ancestor(z: Node, z_prime: Node) -> bool:
    """Inclusive: z is a prefix of z' (equality counts)."""
    _check(z, z_prime)
    return len(z) <= len(z_prime) and tuple(z_prime[: len(z)]) == tuple(z)


def is_strict_ancestor(z: Node, z_prime: Node) -> bool:
    return is_ancestor(z, z_prime) and len(z) < len(z_prime)


def covering_node(t: int, t_prime: int, d: int) -> Node:
    """The unique node of nodes_set(t) that is an inclusive ancestor of leaf t'."""
    leaf = bin_bits(t_prime, d)
    hits = [z for z in nodes_set(t, d) if z is not None and is_ancestor(z, leaf)]
    if len(hits) != 1:
        raise ValueError(f"leaf {t_prime} covered {len(hits)} times by nodes_set({t})")
    return hits[0]
