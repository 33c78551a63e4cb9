"""
Binary plan files. Little-endian u64 and f64 throughout:

    header    magic "BFLY1", n_rows, n_cols, epsilon, block_width, levels, m_max, t_comp, root_count, has_transform
    node      level, column_start, column_stop, child_count, stripe_count, stripes..., children... (pre-order)
    stripe    row_start, row_stop, rank, width, column_indices[rank], coefficients[rank*(width-rank)],
              has_skeleton, skeleton[height*rank]
    transform m, n, parity (0 even, 1 odd), t_quad, nodes[n], weights[n], has_center, center_weight

Only the interpolation entries outside the selected columns are written, in increasing column order,
since the selected columns are the identity.
"""
import logging
logging.basicConfig(encoding='utf-8')
import struct
import numpy as np

from PyButterfly.ButterflyError import ButterflyError, PlanFormatError
from PyButterfly.ButterflyPlan import ButterflyNode, ButterflyPlan, ButterflyStripe
from PyButterfly.InterpolativeDecomposition import InterpolativeDecomposition
from PyButterfly.Legendre import EVEN, ODD
from PyButterfly.LegendreTransform import TransformPlan
from PyButterfly.Quadrature import QuadratureRule

magic = b"BFLY1"

_header = struct.Struct('<QQdQQQdQQ')
_node = struct.Struct('<QQQQQ')
_stripe = struct.Struct('<QQQQ')
_transform = struct.Struct('<QQQd')
_u64 = struct.Struct('<Q')
_f64 = struct.Struct('<d')

parity_codes = { EVEN: 0, ODD: 1 }

class PlanWriter:
    def __init__(self):
        self.chunks = []

    def Pack(self, layout : struct.Struct, *values):
        self.chunks.append(layout.pack(*values))

    def Array(self, values, dtype : str):
        self.chunks.append(np.ascontiguousarray(values, dtype=dtype).tobytes())

    def Bytes(self) -> bytes:
        return b"".join(self.chunks)

    def WriteNode(self, node : ButterflyNode):
        self.Pack(_node, node.level, node.column_start, node.column_stop, len(node.children), len(node.stripes))
        for stripe in node.stripes:
            decomposition = stripe.decomposition
            self.Pack(_stripe, stripe.row_start, stripe.row_stop, decomposition.rank, decomposition.n_cols)
            self.Array(decomposition.column_indices, '<u8')
            self.Array(decomposition.interpolation[:, decomposition.free_columns], '<f8')

            has_skeleton = stripe.skeleton is not None
            self.Pack(_u64, int(has_skeleton))
            if has_skeleton:
                self.Array(stripe.skeleton, '<f8')

        for child in node.children:
            self.WriteNode(child)

class PlanReader:
    def __init__(self, data : bytes):
        self.data = data
        self.offset = 0

    def Unpack(self, layout : struct.Struct):
        if self.offset + layout.size > len(self.data):
            raise PlanFormatError("Plan file is truncated", offset=self.offset)

        values = layout.unpack_from(self.data, self.offset)
        self.offset += layout.size
        return values

    def Array(self, count : int, dtype : str):
        size = count * 8
        if count < 0 or self.offset + size > len(self.data):
            raise PlanFormatError(f"Plan file is truncated reading {count} values", offset=self.offset)

        values = np.frombuffer(self.data, dtype=dtype, count=count, offset=self.offset).copy()
        self.offset += size
        return values

    def ReadNode(self, n_rows : int) -> ButterflyNode:
        start = self.offset
        level, column_start, column_stop, child_count, stripe_count = self.Unpack(_node)
        if child_count > 2 or level < 1 or column_stop <= column_start:
            raise PlanFormatError(f"Inconsistent block record (level {level}, columns {column_start}:{column_stop}, {child_count} children)", offset=start)

        stripes = [ self.ReadStripe(n_rows) for _ in range(stripe_count) ]
        children = [ self.ReadNode(n_rows) for _ in range(child_count) ]

        _check_node(level, column_start, column_stop, stripes, children, start)

        try:
            return ButterflyNode(level, column_start, column_stop, stripes, children)
        except ButterflyError as e:
            raise PlanFormatError(f"Invalid block record: {e}", offset=start)

    def ReadStripe(self, n_rows : int) -> ButterflyStripe:
        start = self.offset
        row_start, row_stop, rank, width = self.Unpack(_stripe)
        if row_stop <= row_start or row_stop > n_rows or rank < 1 or rank > width:
            raise PlanFormatError(f"Inconsistent stripe record (rows {row_start}:{row_stop}, rank {rank}, width {width})", offset=start)

        column_indices = self.Array(rank, '<u8').astype(np.int64)
        if np.any(column_indices >= width):
            raise PlanFormatError("Stripe selects a column outside its block", offset=start)
        if len(np.unique(column_indices)) != rank:
            raise PlanFormatError("Stripe selects the same column twice", offset=start)

        coefficients = self.Array(rank * (width - rank), '<f8').reshape(rank, width - rank)

        (has_skeleton,) = self.Unpack(_u64)
        if has_skeleton > 1:
            raise PlanFormatError(f"Invalid skeleton flag {has_skeleton}", offset=self.offset - _u64.size)

        skeleton = None
        if has_skeleton:
            skeleton = self.Array((row_stop - row_start) * rank, '<f8').reshape(row_stop - row_start, rank)

        decomposition = InterpolativeDecomposition.FromCoefficients(column_indices, width, coefficients)
        return ButterflyStripe(row_start, row_stop, decomposition, skeleton)

def _check_node(level, column_start, column_stop, stripes, children, offset):
    if not children:
        if level != 1 or len(stripes) != 1 or stripes[0].decomposition.n_cols != column_stop - column_start:
            raise PlanFormatError("Leaf record does not match its column range", offset=offset)
        return

    child_stripes = len(children[0].stripes)
    if any(len(child.stripes) != child_stripes or child.level != level - 1 for child in children):
        raise PlanFormatError("Children of a block do not share a level", offset=offset)

    if len(stripes) != 2 * child_stripes:
        raise PlanFormatError(f"Block at level {level} has {len(stripes)} stripes, expected {2 * child_stripes}", offset=offset)

    if children[0].column_start != column_start or children[-1].column_stop != column_stop:
        raise PlanFormatError("Children do not cover the block's columns", offset=offset)

    for s in range(child_stripes):
        width = sum(child.stripes[s].rank for child in children)
        if stripes[2 * s].decomposition.n_cols != width or stripes[2 * s + 1].decomposition.n_cols != width:
            raise PlanFormatError(f"Stripe {s} width does not match the ranks of its children", offset=offset)

def SerialisePlan(plan) -> bytes:
    """
    Encode a ButterflyPlan or a TransformPlan
    """
    transform = plan if isinstance(plan, TransformPlan) else None
    butterfly = transform.plan if transform else plan

    writer = PlanWriter()
    writer.chunks.append(magic)
    writer.Pack(_header, butterfly.n_rows, butterfly.n_cols, butterfly.epsilon, butterfly.block_width, butterfly.levels,
                butterfly.m_max, butterfly.t_comp, len(butterfly.roots), int(transform is not None))

    for root in butterfly.roots:
        writer.WriteNode(root)

    if transform:
        rule = transform.rule
        writer.Pack(_transform, rule.m, rule.n, parity_codes[rule.parity], transform.t_quad)
        writer.Array(rule.nodes, '<f8')
        writer.Array(rule.weights, '<f8')
        writer.Pack(_u64, int(rule.center_weight is not None))
        if rule.center_weight is not None:
            writer.Pack(_f64, rule.center_weight)

    return writer.Bytes()

def DeserialisePlan(data : bytes):
    """
    Decode bytes written by SerialisePlan, returning a TransformPlan if the file has a transform section
    """
    if data[:len(magic)] != magic:
        raise PlanFormatError("Not a plan file (bad magic or version)", offset=0)

    reader = PlanReader(data)
    reader.offset = len(magic)

    n_rows, n_cols, epsilon, block_width, levels, m_max, t_comp, root_count, has_transform = reader.Unpack(_header)
    if n_rows < 1 or n_cols < 1 or has_transform > 1:
        raise PlanFormatError("Inconsistent plan header", offset=len(magic))

    roots = [ reader.ReadNode(n_rows) for _ in range(root_count) ]

    try:
        plan = ButterflyPlan(n_rows, n_cols, epsilon, block_width, roots, m_max=m_max, t_comp=t_comp)
    except ButterflyError as e:
        raise PlanFormatError(f"Invalid plan structure: {e}", offset=reader.offset)

    if plan.levels != levels:
        raise PlanFormatError(f"Header claims {levels} levels but the blocks have {plan.levels}", offset=len(magic))

    result = plan
    if has_transform:
        start = reader.offset
        m, n, parity_code, t_quad = reader.Unpack(_transform)
        if parity_code not in (0, 1) or n != n_rows or n != n_cols:
            raise PlanFormatError("Inconsistent transform record", offset=start)

        nodes = reader.Array(n, '<f8')
        weights = reader.Array(n, '<f8')
        (has_center,) = reader.Unpack(_u64)
        center_weight = reader.Unpack(_f64)[0] if has_center else None

        parity = ODD if parity_code else EVEN
        rule = QuadratureRule(m, n, parity, nodes, weights, center_weight)
        try:
            rule.Validate()
        except ButterflyError as e:
            raise PlanFormatError(f"Invalid quadrature rule: {e}", offset=start)

        result = TransformPlan(rule, plan, t_quad=t_quad)

    if reader.offset != len(data):
        raise PlanFormatError(f"Unexpected {len(data) - reader.offset} trailing bytes", offset=reader.offset)

    return result

def WritePlanFile(filepath : str, plan):
    data = SerialisePlan(plan)
    with open(filepath, 'wb') as f:
        f.write(data)

    logging.info(f"Wrote {len(data)} byte plan to {filepath}")

def ReadPlanFile(filepath : str):
    with open(filepath, 'rb') as f:
        data = f.read()

    return DeserialisePlan(data)
