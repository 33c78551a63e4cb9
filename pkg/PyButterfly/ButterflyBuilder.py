import logging
logging.basicConfig(encoding='utf-8')
import time
import numpy as np

from PyButterfly.ButterflyError import ArgumentError
from PyButterfly.ButterflyEvents import ButterflyEvents
from PyButterfly.ButterflyPlan import ButterflyNode, ButterflyPlan, ButterflyStripe
from PyButterfly.ColumnSource import ColumnSource
from PyButterfly.InterpolativeDecomposition import IdAdaptive

class WordCounter:
    """
    Tracks the matrix-entry words held by the builder and their peak
    """
    def __init__(self):
        self.current = 0
        self.peak = 0

    def Add(self, words : int):
        self.current += int(words)
        self.peak = max(self.peak, self.current)

    def Release(self, words : int):
        self.current -= int(words)

class PendingBlock:
    """
    A block that has been compressed but not yet merged, with the skeleton columns of each stripe
    """
    def __init__(self, node : ButterflyNode, skeletons : list):
        self.node = node
        self.skeletons = skeletons

    @property
    def level(self) -> int:
        return self.node.level

    @property
    def skeleton_words(self) -> int:
        return sum(skeleton.size for skeleton in self.skeletons)

class ButterflyBuilder:
    """
    Builds a ButterflyPlan depth-first: each leaf is compressed as soon as its columns are
    generated, and pending blocks are merged as soon as they have a partner of the same level,
    so only skeleton columns of unmerged blocks are ever held in memory.
    """
    def __init__(self, epsilon : float, block_width : int, events : ButterflyEvents = None):
        if not epsilon > 0:
            raise ArgumentError(f"Precision must be positive (got {epsilon})")
        if block_width < 2:
            raise ArgumentError(f"Block width must be at least 2 (got {block_width})")

        self.epsilon = float(epsilon)
        self.block_width = int(block_width)
        self.events = events or ButterflyEvents()
        self.words = WordCounter()
        self.pending : list[PendingBlock] = []
        self.roots : list[ButterflyNode] = []

    def Build(self, source : ColumnSource) -> ButterflyPlan:
        self.words = WordCounter()
        self.pending = []
        self.roots = []

        start_time = time.perf_counter()

        while not source.exhausted:
            column_start = source.next_column
            block = source.Columns(self.block_width)

            self.pending.append(self._compress_leaf(column_start, block))
            self._collapse()

        self._flush()

        t_comp = time.perf_counter() - start_time

        plan = ButterflyPlan(source.n_rows, source.n_cols, self.epsilon, self.block_width, self.roots, m_max=self.words.peak, t_comp=t_comp)

        stats = plan.Stats()
        logging.info(f"Built {plan.n_rows}x{plan.n_cols} plan: {stats.levels} levels, {stats.root_count} roots, k_max={stats.k_max}, k_avg={stats.k_avg:.1f}, m_max={stats.m_max}")
        self.events.plan_built(plan)
        return plan

    def _compress_leaf(self, column_start : int, block) -> PendingBlock:
        self.words.Add(block.size)

        decomposition = IdAdaptive(block, self.epsilon)
        skeleton = decomposition.Skeleton(block)
        self.words.Add(decomposition.stored_words + skeleton.size)
        self.words.Release(block.size)

        node = ButterflyNode(1, column_start, column_start + block.shape[1], [ ButterflyStripe(0, block.shape[0], decomposition) ])

        logging.debug(f"Compressed leaf {node.column_start}:{node.column_stop} to rank {decomposition.rank}")
        self.events.leaf_compressed(node)

        return PendingBlock(node, [skeleton])

    def _collapse(self):
        """
        Merge the top two pending blocks while they are at the same level
        """
        while len(self.pending) >= 2 and self.pending[-1].level == self.pending[-2].level:
            right = self.pending.pop()
            left = self.pending.pop()

            if not self._can_merge([left, right]):
                self._finalise_all([left, right])
                return

            self.pending.append(self._merge([left, right]))

    def _flush(self):
        """
        Once the source is exhausted, promote or merge the leftovers until one block remains
        """
        while len(self.pending) >= 2:
            top = self.pending[-1]
            below = self.pending[-2]

            if top.level == below.level:
                children = [ self.pending.pop(-2), self.pending.pop() ]
            else:
                children = [ self.pending.pop() ]

            if not self._can_merge(children):
                self._finalise_all(children)
                return

            self.pending.append(self._merge(children))

        self._finalise_all([])

    def _can_merge(self, children : list[PendingBlock]) -> bool:
        """
        Merging continues while every new stripe keeps at least max(2k, C) rows, k being the
        largest rank among the children's stripes
        """
        stripes = children[0].node.stripes
        rank = max(stripe.rank for child in children for stripe in child.node.stripes)
        smallest = min(stripe.height // 2 for stripe in stripes)
        return smallest >= max(2 * rank, self.block_width)

    def _merge(self, children : list[PendingBlock]) -> PendingBlock:
        first = children[0].node
        stripes = []
        skeletons = []

        for s, stripe in enumerate(first.stripes):
            concatenated = np.hstack([ child.skeletons[s] for child in children ])
            split = stripe.row_start + (stripe.height + 1) // 2

            for row_start, row_stop in ((stripe.row_start, split), (split, stripe.row_stop)):
                half = concatenated[row_start - stripe.row_start:row_stop - stripe.row_start]
                decomposition = IdAdaptive(half, self.epsilon)
                skeleton = decomposition.Skeleton(half)

                self.words.Add(decomposition.stored_words + skeleton.size)
                stripes.append(ButterflyStripe(row_start, row_stop, decomposition))
                skeletons.append(skeleton)

        # Children's skeletons are not needed once the merged block exists
        for child in children:
            self.words.Release(child.skeleton_words)
            child.skeletons = None

        node = ButterflyNode(first.level + 1, first.column_start, children[-1].node.column_stop, stripes, [ child.node for child in children ])

        logging.debug(f"Merged {len(children)} block(s) into level {node.level} over columns {node.column_start}:{node.column_stop}, max rank {max(node.ranks)}")
        self.events.blocks_merged(node)

        return PendingBlock(node, skeletons)

    def _finalise_all(self, blocks : list[PendingBlock]):
        """
        Store skeletons for the given blocks and everything still pending, which become roots
        """
        for block in self.pending + blocks:
            for stripe, skeleton in zip(block.node.stripes, block.skeletons):
                stripe.skeleton = np.ascontiguousarray(skeleton)

            self.roots.append(block.node)
            logging.debug(f"Finalised level {block.level} block over columns {block.node.column_start}:{block.node.column_stop}")
            self.events.block_finalised(block.node)

        self.pending = []

def BuildPlan(source : ColumnSource, epsilon : float, block_width : int, events : ButterflyEvents = None) -> ButterflyPlan:
    return ButterflyBuilder(epsilon, block_width, events).Build(source)
