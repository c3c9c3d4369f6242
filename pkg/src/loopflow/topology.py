"""Incidence structure of a network: node matrix and independent loop basis.

The node matrix encodes the flow-continuity equations (one row per node
except the reference node, whose row is linearly dependent on the others).
The loop basis encodes the energy-balance equations: pipes - nodes + 1
independent closed cycles with ±1 orientation signs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import Network, NodeId, Pipe, PipeId, spanning_tree


@dataclass(frozen=True)
class NodeMatrix:
    """(nodes-1) × pipes matrix over {-1, 0, +1}.

    Entry is +1 where the pipe's reference orientation enters the row's
    node, -1 where it leaves, 0 elsewhere.
    """
    entries: np.ndarray
    row_nodes: tuple[NodeId, ...]
    col_pipes: tuple[PipeId, ...]


@dataclass(frozen=True)
class LoopBasis:
    """Ordered signed pipe memberships of the independent loops.

    Each loop is a sequence of (pipe id, sign) pairs in traversal order;
    sign +1 means the loop runs along the pipe's reference orientation.
    """
    loops: tuple[tuple[tuple[PipeId, int], ...], ...]

    def __len__(self) -> int:
        return len(self.loops)

    def matrix(self, col_pipes: list[PipeId]) -> np.ndarray:
        """Dense loops × pipes sign matrix in the given pipe column order."""
        col = {pid: j for j, pid in enumerate(col_pipes)}
        out = np.zeros((len(self.loops), len(col_pipes)))
        for i, loop in enumerate(self.loops):
            for pid, sign in loop:
                out[i, col[pid]] = sign
        return out


def build_node_matrix(net: Network) -> NodeMatrix:
    """Continuity rows for every node except the reference node."""
    row_nodes = tuple(n.id for n in net.nodes if n.id != net.reference_node)
    row = {nid: i for i, nid in enumerate(row_nodes)}
    col_pipes = tuple(net.pipe_ids)
    entries = np.zeros((len(row_nodes), len(col_pipes)))
    for j, p in enumerate(net.pipes):
        if p.to_node in row:
            entries[row[p.to_node], j] = 1.0
        if p.from_node in row:
            entries[row[p.from_node], j] = -1.0
    return NodeMatrix(entries, row_nodes, col_pipes)


def derive_loop_basis(net: Network) -> LoopBasis:
    """Fundamental cycles of the deterministic spanning tree.

    One loop per link pipe (taken in ascending id order), oriented so the
    link itself carries sign +1; the rest of the cycle is the unique tree
    path closing it.
    """
    tree, _ = spanning_tree(net)
    tree_ids = {p.id for p in tree}
    links = sorted((p for p in net.pipes if p.id not in tree_ids), key=lambda p: p.id)

    adjacency: dict[NodeId, list[Pipe]] = {n.id: [] for n in net.nodes}
    for p in tree:
        adjacency[p.from_node].append(p)
        adjacency[p.to_node].append(p)

    loops = []
    for link in links:
        path = _tree_path(adjacency, link.to_node, link.from_node)
        signed = [(link.id, 1)]
        node = link.to_node
        for p in path:
            if p.from_node == node:
                signed.append((p.id, 1))
                node = p.to_node
            else:
                signed.append((p.id, -1))
                node = p.from_node
        loops.append(tuple(signed))
    return LoopBasis(tuple(loops))


def _tree_path(adjacency: dict[NodeId, list[Pipe]], start: NodeId,
               goal: NodeId) -> list[Pipe]:
    """Unique pipe path between two nodes of a spanning tree (BFS)."""
    parent: dict[NodeId, tuple[NodeId, Pipe]] = {}
    seen = {start}
    queue = [start]
    while queue:
        node = queue.pop(0)
        if node == goal:
            break
        for p in adjacency[node]:
            other = p.to_node if p.from_node == node else p.from_node
            if other not in seen:
                seen.add(other)
                parent[other] = (node, p)
                queue.append(other)
    if goal not in seen:
        raise ValueError(f"no tree path from {start!r} to {goal!r}")
    path = []
    node = goal
    while node != start:
        node, pipe = parent[node]
        path.append(pipe)
    path.reverse()
    return path


def adopt_explicit_loops(net: Network) -> LoopBasis:
    """Validate and adopt the loop set supplied with the network definition.

    Each loop is given as a signed pipe-id sequence in traversal order
    (negative id = traversed against the pipe's reference orientation).
    Raises ValueError on a non-cycle sequence, a wrong loop count, or a
    rank-deficient set.
    """
    if not net.explicit_loops:
        raise ValueError("network definition carries no explicit loops")
    expected = net.loop_count
    if len(net.explicit_loops) != expected:
        raise ValueError(
            f"wrong loop count: {len(net.explicit_loops)} supplied, "
            f"{expected} independent loops required (pipes - nodes + 1)")

    loops = []
    for k, sequence in enumerate(net.explicit_loops, start=1):
        loops.append(_as_cycle(net, k, sequence))
    basis = LoopBasis(tuple(loops))

    sign_rows = [[int(v) for v in row] for row in basis.matrix(net.pipe_ids)]
    if exact_rank(sign_rows) != expected:
        raise ValueError("rank-deficient loop set: loops are not independent")
    return basis


def _as_cycle(net: Network, k: int, sequence: tuple[int, ...]):
    if not sequence:
        raise ValueError(f"loop {k} is empty")
    signed = []
    seen_pipes = set()
    node = None
    start = None
    for raw in sequence:
        pid = abs(raw)
        sign = 1 if raw > 0 else -1
        if pid in seen_pipes:
            raise ValueError(f"loop {k} repeats pipe {pid}")
        seen_pipes.add(pid)
        pipe = net.pipe(pid)
        tail = pipe.from_node if sign > 0 else pipe.to_node
        head = pipe.to_node if sign > 0 else pipe.from_node
        if node is None:
            start = tail
        elif tail != node:
            raise ValueError(
                f"loop {k} is not a closed cycle: pipe {pid} starts at "
                f"{tail!r} but the walk is at {node!r}")
        node = head
        signed.append((pid, sign))
    if node != start:
        raise ValueError(
            f"loop {k} is not a closed cycle: walk ends at {node!r}, "
            f"started at {start!r}")
    return tuple(signed)


def exact_rank(rows: list[list[int]]) -> int:
    """Rank over the rationals by exact Gaussian elimination."""
    m = [[Fraction(v) for v in row] for row in rows]
    if not m:
        return 0
    n_cols = len(m[0])
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [v * inv for v in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank
