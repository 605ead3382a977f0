"""Per-opcode stack-effect metadata and the static stack consistency checker.

Both the translator and the interpreter consume this: the translator to
know slot kinds at every point, the interpreter to cross-check its own
stack movements in debug mode.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import Jbc2cError
from .descriptors import parse_descriptor, parse_field_descriptor
from .opcodes import Instr, Label, UNSUPPORTED
from .classfile import Code, MethodModel, branch_targets

SLOT_WIDTH = {"I": 1, "J": 2, "F": 1, "D": 2, "A": 1}

CONST_KINDS = {"int": "I", "long": "J", "float": "F", "double": "D",
               "string": "A", "class": "A"}

_ARITH = {}
for _k, _pre in (("I", "i"), ("J", "l"), ("F", "f"), ("D", "d")):
    for _op in ("add", "sub", "mul", "div", "rem"):
        _ARITH[_pre + _op] = ([_k, _k], [_k])
    _ARITH[_pre + "neg"] = ([_k], [_k])
for _pre, _k in (("i", "I"), ("l", "J")):
    for _op in ("shl", "shr", "ushr"):
        _ARITH[_pre + _op] = ([_k, "I"], [_k])
    for _op in ("and", "or", "xor"):
        _ARITH[_pre + _op] = ([_k, _k], [_k])

_CONVERSIONS = {
    "i2l": ("I", "J"), "i2f": ("I", "F"), "i2d": ("I", "D"),
    "l2i": ("J", "I"), "l2f": ("J", "F"), "l2d": ("J", "D"),
    "f2i": ("F", "I"), "f2l": ("F", "J"), "f2d": ("F", "D"),
    "d2i": ("D", "I"), "d2l": ("D", "J"), "d2f": ("D", "F"),
    "i2b": ("I", "I"), "i2c": ("I", "I"), "i2s": ("I", "I"),
}

_ALOAD_KIND = {"iaload": "I", "laload": "J", "faload": "F", "daload": "D",
               "aaload": "A", "baload": "I", "caload": "I", "saload": "I"}
_ASTORE_KIND = {"iastore": "I", "lastore": "J", "fastore": "F", "dastore": "D",
                "aastore": "A", "bastore": "I", "castore": "I", "sastore": "I"}

_LOAD_KIND = {"iload": "I", "lload": "J", "fload": "F", "dload": "D", "aload": "A"}
_STORE_KIND = {"istore": "I", "lstore": "J", "fstore": "F", "dstore": "D",
               "astore": "A"}
_RETURN_KIND = {"ireturn": "I", "lreturn": "J", "freturn": "F", "dreturn": "D",
                "areturn": "A"}


class UnknownOpcode(Jbc2cError):
    pass


class InconsistentStackDepth(Jbc2cError):
    pass


class StackOverflowDecl(Jbc2cError):
    pass


class Unsupported(Jbc2cError):
    def __init__(self, opcodes):
        self.opcodes = list(opcodes)
        super().__init__(f"unsupported opcodes present: {', '.join(self.opcodes)}")


class StackEffect:
    """Pop/push slot kinds; pops are listed deepest first (value1 last)."""

    __slots__ = ("pops", "pushes")

    def __init__(self, pops, pushes):
        self.pops = tuple(pops)
        self.pushes = tuple(pushes)

    def __eq__(self, other):
        return (isinstance(other, StackEffect)
                and self.pops == other.pops and self.pushes == other.pushes)

    def __repr__(self):
        return f"StackEffect(pops={list(self.pops)}, pushes={list(self.pushes)})"


def _descriptor_slots(descriptor: str):
    sig = parse_descriptor(descriptor)
    args = [t.slot_kind for t in sig.param_types]
    ret = [sig.return_type.slot_kind] if sig.return_type else []
    return args, ret


def _width(kinds) -> int:
    return sum(SLOT_WIDTH[k] for k in kinds)


def _split_top(stack, slots):
    """Split `slots` 32-bit slots off the top; returns (below, top-values)."""
    taken = []
    width = 0
    i = len(stack)
    while width < slots:
        if i == 0:
            raise InconsistentStackDepth("operand stack underflow in stack op")
        i -= 1
        taken.insert(0, stack[i])
        width += SLOT_WIDTH[stack[i]]
    if width != slots:
        raise InconsistentStackDepth("category-2 value split by stack op")
    return list(stack[:i]), taken


def stack_effect(instr: Instr, ctx=None,
                 stack: Optional[Tuple[str, ...]] = None) -> StackEffect:
    """Exact pop/push slot kinds for one instruction.

    `stack` (kinds below the instruction, top last) is only needed for the
    polymorphic untyped stack ops (pop2, dup* and friends).
    """
    op = instr.op
    if op in UNSUPPORTED:
        raise UnknownOpcode(f"unsupported opcode {op}")

    if op == "nop" or op == "iinc" or op == "goto":
        return StackEffect([], [])
    if op == "aconst_null":
        return StackEffect([], ["A"])
    if op in ("iconst", "bipush", "sipush"):
        return StackEffect([], ["I"])
    if op == "lconst":
        return StackEffect([], ["J"])
    if op == "fconst":
        return StackEffect([], ["F"])
    if op == "dconst":
        return StackEffect([], ["D"])
    if op == "ldc":
        return StackEffect([], [CONST_KINDS[instr.args[0].kind]])
    if op in _LOAD_KIND:
        return StackEffect([], [_LOAD_KIND[op]])
    if op in _STORE_KIND:
        return StackEffect([_STORE_KIND[op]], [])
    if op in _ALOAD_KIND:
        return StackEffect(["A", "I"], [_ALOAD_KIND[op]])
    if op in _ASTORE_KIND:
        return StackEffect(["A", "I", _ASTORE_KIND[op]], [])
    if op in _ARITH:
        pops, pushes = _ARITH[op]
        return StackEffect(pops, pushes)
    if op in _CONVERSIONS:
        src, dst = _CONVERSIONS[op]
        return StackEffect([src], [dst])
    if op == "lcmp":
        return StackEffect(["J", "J"], ["I"])
    if op in ("fcmpl", "fcmpg"):
        return StackEffect(["F", "F"], ["I"])
    if op in ("dcmpl", "dcmpg"):
        return StackEffect(["D", "D"], ["I"])
    if op in ("ifeq", "ifne", "iflt", "ifge", "ifgt", "ifle"):
        return StackEffect(["I"], [])
    if op.startswith("if_icmp"):
        return StackEffect(["I", "I"], [])
    if op in ("if_acmpeq", "if_acmpne"):
        return StackEffect(["A", "A"], [])
    if op in ("ifnull", "ifnonnull"):
        return StackEffect(["A"], [])
    if op in ("tableswitch", "lookupswitch"):
        return StackEffect(["I"], [])
    if op in _RETURN_KIND:
        return StackEffect([_RETURN_KIND[op]], [])
    if op == "return":
        return StackEffect([], [])
    if op == "getstatic":
        return StackEffect([], [parse_field_descriptor(instr.args[0].descriptor).slot_kind])
    if op == "putstatic":
        return StackEffect([parse_field_descriptor(instr.args[0].descriptor).slot_kind], [])
    if op == "getfield":
        return StackEffect(["A"], [parse_field_descriptor(instr.args[0].descriptor).slot_kind])
    if op == "putfield":
        return StackEffect(["A", parse_field_descriptor(instr.args[0].descriptor).slot_kind], [])
    if op in ("invokevirtual", "invokespecial", "invokeinterface", "invokestatic"):
        args, ret = _descriptor_slots(instr.args[0].descriptor)
        receiver = [] if op == "invokestatic" else ["A"]
        return StackEffect(receiver + args, ret)
    if op == "new":
        return StackEffect([], ["A"])
    if op in ("newarray", "anewarray"):
        return StackEffect(["I"], ["A"])
    if op == "multianewarray":
        return StackEffect(["I"] * instr.args[1], ["A"])
    if op == "arraylength":
        return StackEffect(["A"], ["I"])
    if op == "athrow":
        return StackEffect(["A"], [])
    if op == "checkcast":
        return StackEffect(["A"], ["A"])
    if op == "instanceof":
        return StackEffect(["A"], ["I"])

    if op in ("pop", "pop2", "dup", "dup_x1", "dup_x2", "dup2", "dup2_x1",
              "dup2_x2", "swap"):
        if stack is None:
            raise UnknownOpcode(f"{op} needs stack context to type")
        if op == "pop":
            _below, top = _split_top(stack, 1)
            return StackEffect(top, [])
        if op == "pop2":
            _below, top = _split_top(stack, 2)
            return StackEffect(top, [])
        if op == "dup":
            _below, top = _split_top(stack, 1)
            return StackEffect(top, top + top)
        if op == "dup_x1":
            _below, rest = _split_top(stack, 2)
            v2, v1 = rest
            return StackEffect([v2, v1], [v1, v2, v1])
        if op == "dup_x2":
            _below, v1 = _split_top(stack, 1)
            _below2, under = _split_top(_below, 2)
            return StackEffect(under + v1, v1 + under + v1)
        if op == "dup2":
            _below, top = _split_top(stack, 2)
            return StackEffect(top, top + top)
        if op == "dup2_x1":
            _below, top = _split_top(stack, 2)
            _below2, under = _split_top(_below, 1)
            return StackEffect(under + top, top + under + top)
        if op == "dup2_x2":
            _below, top = _split_top(stack, 2)
            _below2, under = _split_top(_below, 2)
            return StackEffect(under + top, top + under + top)
        if op == "swap":
            _below, rest = _split_top(stack, 2)
            v2, v1 = rest
            if SLOT_WIDTH[v1] != 1 or SLOT_WIDTH[v2] != 1:
                raise InconsistentStackDepth("swap on category-2 value")
            return StackEffect([v2, v1], [v1, v2])

    raise UnknownOpcode(f"no stack effect for opcode {op}")


TERMINAL_OPS = {"goto", "athrow", "return", "tableswitch", "lookupswitch"} \
               | set(_RETURN_KIND)


@dataclass
class DepthMap:
    """Simulated slot-kind vectors: per code-item index and per label."""
    before: Dict[int, Tuple[str, ...]] = field(default_factory=dict)
    labels: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    max_depth: int = 0

    def depth_at(self, index: int) -> int:
        return _width(self.before[index])


def apply_effect(stack: Tuple[str, ...], eff: StackEffect) -> Tuple[str, ...]:
    n = len(eff.pops)
    if n:
        if len(stack) < n:
            raise InconsistentStackDepth(
                f"underflow: need {list(eff.pops)}, have {list(stack)}")
        got = stack[len(stack) - n:]
        for want, have in zip(eff.pops, got):
            if want != have:
                raise InconsistentStackDepth(
                    f"kind mismatch: want {list(eff.pops)}, have {list(got)}")
        stack = stack[:len(stack) - n]
    return stack + eff.pushes


def check_method(method: MethodModel, ctx=None) -> DepthMap:
    """Simulate operand-stack kinds over all paths of a method body.

    Raises Unsupported if any out-of-subset opcode is present (reachable
    or not), InconsistentStackDepth on merge-point mismatch, and
    StackOverflowDecl when simulated depth exceeds the declared max_stack.
    """
    code = method.code
    if code is None:
        raise Jbc2cError(f"method {method.name}{method.descriptor} has no code")
    items = code.items
    bad = sorted({it.op for it in items
                  if isinstance(it, Instr) and it.op in UNSUPPORTED})
    if bad:
        raise Unsupported(bad)

    label_index = {}
    for i, it in enumerate(items):
        if isinstance(it, Label):
            label_index[it.name] = i
    for reg in code.try_regions:
        for lbl in (reg.start_label, reg.end_label, reg.handler_label):
            if lbl not in label_index:
                raise InconsistentStackDepth(f"try region label {lbl} missing")

    dm = DepthMap()
    work: List[Tuple[int, Tuple[str, ...]]] = [(0, ())]
    for reg in code.try_regions:
        work.append((label_index[reg.handler_label], ("A",)))

    while work:
        idx, stack = work.pop()
        while idx < len(items):
            it = items[idx]
            if isinstance(it, Label):
                if it.name in dm.labels:
                    if dm.labels[it.name] != stack:
                        raise InconsistentStackDepth(
                            f"merge mismatch at {it.name}: "
                            f"{list(dm.labels[it.name])} vs {list(stack)}")
                    break
                dm.labels[it.name] = stack
                idx += 1
                continue
            if idx in dm.before:
                if dm.before[idx] != stack:
                    raise InconsistentStackDepth(
                        f"merge mismatch at item {idx}")
                break
            dm.before[idx] = stack
            eff = stack_effect(it, ctx, stack)
            stack = apply_effect(stack, eff)
            depth = _width(stack)
            dm.max_depth = max(dm.max_depth, depth)
            if depth > code.max_stack:
                raise StackOverflowDecl(
                    f"depth {depth} exceeds declared max_stack {code.max_stack} "
                    f"at {it.op} (offset {it.offset})")
            for lbl in branch_targets(it):
                tgt = label_index.get(lbl)
                if tgt is None:
                    raise InconsistentStackDepth(f"undefined label {lbl}")
                if lbl in dm.labels:
                    if dm.labels[lbl] != stack:
                        raise InconsistentStackDepth(
                            f"merge mismatch at {lbl}: "
                            f"{list(dm.labels[lbl])} vs {list(stack)}")
                else:
                    dm.labels[lbl] = stack
                    work.append((tgt + 1, stack))
            if it.op in TERMINAL_OPS:
                break
            idx += 1
    return dm
