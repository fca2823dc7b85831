"""Independent exhaustive oracle over all small pointed models.

Enumerates every pointed model with at most three worlds for a fixed
signature (all agent partitions, all block-constant attention maps, all
valuations; the designated world is fixed to index 0, which loses nothing
up to isomorphism because the enumeration covers all labelings) and
evaluates formulas over the whole bank at once with numpy bitmask
arithmetic.  Worlds are bits: bit j of a uint8 mask says the formula holds
at world j.

This module deliberately reimplements the semantics from scratch — it
shares only the AST node classes with the package, never its evaluation
code — so agreement between the two is evidence, not tautology.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from attnplan.logic import And, AttEq, AttLess, Formula, Know, Not, PropAtom, Top


def set_partitions(items: list[int]) -> list[list[list[int]]]:
    """All set partitions, via restricted-growth assignment."""
    out: list[list[list[int]]] = []

    def walk(index: int, blocks: list[list[int]]) -> None:
        if index == len(items):
            out.append([list(b) for b in blocks])
            return
        for b in blocks:
            b.append(items[index])
            walk(index + 1, blocks)
            b.pop()
        blocks.append([items[index]])
        walk(index + 1, blocks)
        blocks.pop()

    walk(0, [])
    return out


class ModelBank:
    """Every pointed model with exactly ``world_count`` worlds."""

    def __init__(
        self,
        agents: tuple[str, ...],
        bound: int,
        atoms: tuple[str, ...],
        world_count: int,
    ) -> None:
        if world_count > 7:
            raise ValueError("bitmask representation holds at most 7 worlds")
        self.agents = agents
        self.bound = bound
        self.atoms = atoms
        self.k = world_count
        self.full = np.uint8((1 << world_count) - 1)

        # Per-agent structure axis: (partition, per-block attention).
        parts = set_partitions(list(range(world_count)))
        structs: list[tuple[list[list[int]], tuple[int, ...]]] = []
        for blocks in parts:
            for budgets in product(range(bound + 1), repeat=len(blocks)):
                structs.append((blocks, budgets))
        s_count = len(structs)

        blocks_by_struct = np.zeros((s_count, world_count), dtype=np.uint8)
        att_eq_by_struct = np.zeros((s_count, bound + 1), dtype=np.uint8)
        for si, (blocks, budgets) in enumerate(structs):
            for bi, block in enumerate(blocks):
                mask = 0
                for world in block:
                    mask |= 1 << world
                blocks_by_struct[si, bi] = mask
                att_eq_by_struct[si, budgets[bi]] |= mask

        # Valuation axis: one bit per (world, atom) pair.
        v_count = 1 << (world_count * len(atoms))
        v_index = np.arange(v_count, dtype=np.int64)
        atom_by_v = {}
        for ti, atom in enumerate(atoms):
            mask = np.zeros(v_count, dtype=np.uint8)
            for world in range(world_count):
                bit = ((v_index >> (world * len(atoms) + ti)) & 1).astype(np.uint8)
                mask |= bit << world
            atom_by_v[atom] = mask

        # Cross the axes: model index = ((i_agent0 * S + i_agent1 ...) * V + iv).
        m_count = (s_count ** len(agents)) * v_count
        m_index = np.arange(m_count, dtype=np.int64)
        iv = m_index % v_count
        rest = m_index // v_count
        struct_index = {}
        for agent in reversed(agents):
            struct_index[agent] = rest % s_count
            rest = rest // s_count

        self.size = m_count
        self.blocks = {a: blocks_by_struct[struct_index[a]] for a in agents}
        self.att_eq = {
            a: att_eq_by_struct[struct_index[a]] for a in agents
        }  # shape (M, bound+1)
        self.atom_mask = {t: mask[iv] for t, mask in atom_by_v.items()}

    def eval(self, f: Formula) -> np.ndarray:
        """Truth mask of ``f`` across the bank: bit j = holds at world j."""
        if isinstance(f, Top):
            return np.full(self.size, self.full, dtype=np.uint8)
        if isinstance(f, PropAtom):
            return self.atom_mask[f.name]
        if isinstance(f, AttEq):
            if f.bound > self.bound:
                return np.zeros(self.size, dtype=np.uint8)
            return self.att_eq[f.agent][:, f.bound]
        if isinstance(f, AttLess):
            out = np.zeros(self.size, dtype=np.uint8)
            for n in range(min(f.bound, self.bound + 1)):
                out |= self.att_eq[f.agent][:, n]
            return out
        if isinstance(f, Not):
            return self.full & ~self.eval(f.sub)
        if isinstance(f, And):
            return self.eval(f.left) & self.eval(f.right)
        if isinstance(f, Know):
            psi = self.eval(f.sub)
            out = np.zeros(self.size, dtype=np.uint8)
            cols = self.blocks[f.agent]
            for bi in range(cols.shape[1]):
                block = cols[:, bi]
                covered = (psi & block) == block
                out |= np.where(covered, block, np.uint8(0))
            return out
        raise TypeError(f"unknown node {type(f).__name__}")

    def holds_at_point(self, f: Formula) -> np.ndarray:
        """Boolean array: does ``f`` hold at the designated world 0?"""
        return (self.eval(f) & np.uint8(1)).astype(bool)


def banks_for(
    agents: tuple[str, ...],
    bound: int,
    atoms: tuple[str, ...],
    max_worlds: int = 3,
) -> list[ModelBank]:
    return [
        ModelBank(agents, bound, atoms, k) for k in range(1, max_worlds + 1)
    ]


def countermodel_exists(banks: list[ModelBank], f: Formula) -> bool:
    """Is there a small pointed model where ``f`` fails?"""
    return any(not bank.holds_at_point(f).all() for bank in banks)


def model_exists(banks: list[ModelBank], f: Formula) -> bool:
    """Is there a small pointed model where ``f`` holds?"""
    return any(bank.holds_at_point(f).any() for bank in banks)
