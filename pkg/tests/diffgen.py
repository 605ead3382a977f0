"""Random well-formed method generator for differential testing.

Produces a single class full of static methods that exercise arithmetic,
conversions, branches, loops, both switch forms, arrays, static fields,
cross-method calls and all three exception styles.  Every generated body
holds the operand stack at depth zero between statements, so it always
passes the structural checker.
"""

import random
import struct
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from jbc2c.builder import (STATIC, add_field, add_method, make_class,
                           push_double_bits, push_float_bits, push_int,
                           push_long)
from jbc2c.classfile import ACC_PUBLIC, ACC_STATIC, CATCH_ALL, TryRegion
from jbc2c.descriptors import parse_descriptor
from jbc2c.opcodes import Instr, Label, MemberRef

I = Instr
L = Label

CLASS = "Gen"
STATICS = [("s0", "I"), ("s1", "J"), ("s2", "F"), ("s3", "D")]

INT_BIN = ["iadd", "iadd", "isub", "isub", "imul", "imul", "iand", "ior",
           "ixor", "ishl", "ishr", "iushr", "idiv", "irem"]
LONG_BIN = ["ladd", "ladd", "lsub", "lsub", "lmul", "lmul", "land", "lor",
            "lxor", "ldiv", "lrem"]
LONG_SHIFT = ["lshl", "lshr", "lushr"]
FLOAT_BIN = ["fadd", "fsub", "fmul", "fdiv", "frem"]
DOUBLE_BIN = ["dadd", "dsub", "dmul", "ddiv", "drem"]

CONVERSIONS = {
    "I": [("J", "l2i"), ("F", "f2i"), ("D", "d2i")],
    "J": [("I", "i2l"), ("F", "f2l"), ("D", "d2l")],
    "F": [("I", "i2f"), ("J", "l2f"), ("D", "d2f")],
    "D": [("I", "i2d"), ("J", "l2d"), ("F", "f2d")],
}
NARROWINGS = ["i2b", "i2c", "i2s"]

CATCH_TYPES = ["java/lang/ArithmeticException",
               "java/lang/NullPointerException",
               "java/lang/ArrayIndexOutOfBoundsException",
               "java/lang/IndexOutOfBoundsException",
               "java/lang/NegativeArraySizeException",
               "java/lang/RuntimeException",
               "java/lang/RuntimeException",
               "java/lang/Exception",
               "java/lang/Exception",
               CATCH_ALL, CATCH_ALL]
THROW_TYPES = ["java/lang/RuntimeException", "java/lang/Exception",
               "java/lang/ArithmeticException"]

INT_POOL = [0, 1, 2, 3, 5, 7, -1, -3, 100, 255, -256, 65535,
            (1 << 31) - 1, -(1 << 31)]
LONG_POOL = [0, 1, -1, 2, 9, 1 << 40, -(1 << 62), (1 << 63) - 1, -(1 << 63)]
FLOAT_POOL = [0.0, 1.0, -1.5, 0.5, 3.25, 1e10, -2.0, 1e-5]
DOUBLE_POOL = [0.0, 1.0, -1.25, 2.5, 1e100, -3.0, 1e-9]


def f_bits(v: float) -> int:
    return struct.unpack(">I", struct.pack(">f", v))[0]


def d_bits(v: float) -> int:
    return struct.unpack(">Q", struct.pack(">d", v))[0]


@dataclass
class HelperSig:
    name: str
    descriptor: str
    param_kinds: Tuple[str, ...]
    ret_kind: str


@dataclass
class _Region:
    start: str
    end: str
    handler: str
    catch_type: Optional[str]


class MethodGen:
    def __init__(self, rng: random.Random, name: str,
                 param_kinds: Tuple[str, ...], ret_kind: str,
                 helpers: List[HelperSig]):
        self.rng = rng
        self.name = name
        self.param_kinds = param_kinds
        self.ret_kind = ret_kind
        self.helpers = helpers
        self.items: List = []
        self.regions: List[_Region] = []
        self.nlabels = 0
        # slot layout: params first, then one scratch local per kind,
        # a loop counter and an int-array reference
        self.param_slots = []
        slot = 0
        for k in param_kinds:
            self.param_slots.append((k, slot))
            slot += 2 if k in "JD" else 1
        self.scratch = {}
        for k in "IJFD":
            self.scratch[k] = slot
            slot += 2 if k in "JD" else 1
        self.loop_slots = [slot, slot + 1]   # one counter per nesting level
        slot += 2
        self.arr_slot = slot
        slot += 1
        self.max_locals = slot
        self.loop_depth = 0

    # ---- small helpers ----

    def label(self) -> str:
        self.nlabels += 1
        return f"G{self.nlabels}"

    def emit(self, *items):
        self.items.extend(items)

    def locals_of(self, kind: str) -> List[int]:
        out = [s for k, s in self.param_slots if k == kind]
        out.append(self.scratch[kind])
        return out

    def const(self, kind: str):
        r = self.rng
        if kind == "I":
            self.emit(push_int(r.choice(INT_POOL)))
        elif kind == "J":
            self.emit(push_long(r.choice(LONG_POOL)))
        elif kind == "F":
            self.emit(push_float_bits(f_bits(r.choice(FLOAT_POOL))))
        else:
            self.emit(push_double_bits(d_bits(r.choice(DOUBLE_POOL))))

    # ---- expressions: emit code that pushes one value of `kind` ----

    def expr(self, kind: str, depth: int):
        r = self.rng
        if depth <= 0 or r.random() < 0.3:
            if r.random() < 0.5:
                self.const(kind)
            elif r.random() < 0.2:
                name, desc = STATICS["IJFD".index(kind)]
                self.emit(I("getstatic", (MemberRef(CLASS, name, desc),)))
            else:
                load = {"I": "iload", "J": "lload",
                        "F": "fload", "D": "dload"}[kind]
                self.emit(I(load, (r.choice(self.locals_of(kind)),)))
            return
        roll = r.random()
        if roll < 0.45:
            self.binop(kind, depth)
        elif roll < 0.55:
            self.emit_neg(kind, depth)
        elif roll < 0.70:
            self.conversion(kind, depth)
        elif roll < 0.80 and kind == "I":
            self.comparison(depth)
        elif roll < 0.90 and self.callable_helpers(kind):
            self.call_expr(kind, depth)
        else:
            self.binop(kind, depth)

    def binop(self, kind: str, depth: int):
        r = self.rng
        if kind == "I":
            op = r.choice(INT_BIN)
            self.expr("I", depth - 1)
            self.expr("I", depth - 1)
        elif kind == "J":
            if r.random() < 0.25:
                op = r.choice(LONG_SHIFT)
                self.expr("J", depth - 1)
                self.expr("I", depth - 1)   # shift count is an int
            else:
                op = r.choice(LONG_BIN)
                self.expr("J", depth - 1)
                self.expr("J", depth - 1)
        elif kind == "F":
            op = r.choice(FLOAT_BIN)
            self.expr("F", depth - 1)
            self.expr("F", depth - 1)
        else:
            op = r.choice(DOUBLE_BIN)
            self.expr("D", depth - 1)
            self.expr("D", depth - 1)
        self.emit(I(op, ()))

    def emit_neg(self, kind: str, depth: int):
        self.expr(kind, depth - 1)
        self.emit(I({"I": "ineg", "J": "lneg",
                     "F": "fneg", "D": "dneg"}[kind], ()))

    def conversion(self, kind: str, depth: int):
        r = self.rng
        if kind == "I" and r.random() < 0.3:
            self.expr("I", depth - 1)
            self.emit(I(r.choice(NARROWINGS), ()))
            return
        src, op = r.choice(CONVERSIONS[kind])
        self.expr(src, depth - 1)
        self.emit(I(op, ()))

    def comparison(self, depth: int):
        r = self.rng
        op = r.choice(["lcmp", "fcmpl", "fcmpg", "dcmpl", "dcmpg"])
        kind = {"l": "J", "f": "F", "d": "D"}[op[0]]
        self.expr(kind, depth - 1)
        self.expr(kind, depth - 1)
        self.emit(I(op, ()))

    def callable_helpers(self, kind: str) -> List[HelperSig]:
        return [h for h in self.helpers if h.ret_kind == kind]

    def call_expr(self, kind: str, depth: int):
        h = self.rng.choice(self.callable_helpers(kind))
        for pk in h.param_kinds:
            self.expr(pk, depth - 1)
        self.emit(I("invokestatic",
                    (MemberRef(CLASS, h.name, h.descriptor),)))

    # ---- statements: stack depth zero on entry and exit ----

    def block(self, depth: int):
        for _ in range(self.rng.randint(1, 3)):
            self.statement(depth)

    def statement(self, depth: int):
        r = self.rng
        roll = r.random()
        if depth <= 0 or roll < 0.30:
            self.stmt_store()
        elif roll < 0.38:
            self.stmt_putstatic()
        elif roll < 0.46:
            self.stmt_iinc()
        elif roll < 0.60:
            self.stmt_if(depth)
        elif roll < 0.68:
            self.stmt_switch(depth)
        elif roll < 0.74 and self.loop_depth < 2:
            self.stmt_loop(depth)
        elif roll < 0.81:
            self.stmt_array()
        elif roll < 0.96:
            self.stmt_try(depth)
        else:
            self.stmt_throw()

    def stmt_store(self):
        kind = self.rng.choice("IJFD")
        self.expr(kind, self.rng.randint(1, 3))
        store = {"I": "istore", "J": "lstore",
                 "F": "fstore", "D": "dstore"}[kind]
        self.emit(I(store, (self.scratch[kind],)))

    def stmt_putstatic(self):
        kind = self.rng.choice("IJFD")
        name, desc = STATICS["IJFD".index(kind)]
        self.expr(kind, 2)
        self.emit(I("putstatic", (MemberRef(CLASS, name, desc),)))

    def stmt_iinc(self):
        slot = self.rng.choice(self.locals_of("I"))
        self.emit(I("iinc", (slot, self.rng.choice([1, -1, 3, 100]))))

    def stmt_if(self, depth: int):
        r = self.rng
        lelse, lend = self.label(), self.label()
        if r.random() < 0.5:
            self.expr("I", 2)
            op = r.choice(["ifeq", "ifne", "iflt", "ifge", "ifgt", "ifle"])
            self.emit(I(op, (lelse,)))
        else:
            self.expr("I", 1)
            self.expr("I", 1)
            op = r.choice(["if_icmpeq", "if_icmpne", "if_icmplt",
                           "if_icmpge", "if_icmpgt", "if_icmple"])
            self.emit(I(op, (lelse,)))
        self.block(depth - 1)
        self.emit(I("goto", (lend,)), L(lelse))
        if r.random() < 0.7:
            self.block(depth - 1)
        self.emit(L(lend))

    def stmt_switch(self, depth: int):
        r = self.rng
        lend = self.label()
        ldef = self.label()
        self.expr("I", 2)
        if r.random() < 0.5:
            low = r.randint(-2, 2)
            n = r.randint(2, 4)
            targets = tuple(self.label() for _ in range(n))
            self.emit(I("tableswitch", (ldef, low, low + n - 1, targets)))
        else:
            keys = sorted(r.sample([-7, 0, 1, 3, 9, 100, 5000], r.randint(2, 3)))
            targets = tuple(self.label() for _ in keys)
            self.emit(I("lookupswitch",
                        (ldef, tuple(zip(keys, targets)))))
        for t in targets:
            self.emit(L(t))
            self.block(depth - 1)
            self.emit(I("goto", (lend,)))
        self.emit(L(ldef))
        if r.random() < 0.7:
            self.block(depth - 1)
        self.emit(L(lend))

    def stmt_loop(self, depth: int):
        r = self.rng
        ltop, lend = self.label(), self.label()
        slot = self.loop_slots[self.loop_depth]
        self.emit(push_int(0), I("istore", (slot,)))
        self.emit(L(ltop))
        self.emit(I("iload", (slot,)), push_int(r.randint(1, 6)),
                  I("if_icmpge", (lend,)))
        self.loop_depth += 1
        self.block(depth - 1)
        self.loop_depth -= 1
        self.emit(I("iinc", (slot, 1)), I("goto", (ltop,)), L(lend))

    def stmt_array(self):
        r = self.rng
        size = r.choice([5, 5, 5, 5, 5, 3, 2, 1, 0, -1])
        if r.random() < 0.08:
            self.emit(I("aconst_null", ()), I("astore", (self.arr_slot,)))
        else:
            self.emit(push_int(size), I("newarray", ("I",)),
                      I("astore", (self.arr_slot,)))
        for _ in range(r.randint(1, 2)):
            idx = r.choice([0, 0, 1, 1, 2, 3, 4, 4, 9])
            if r.random() < 0.5:
                self.emit(I("aload", (self.arr_slot,)), push_int(idx))
                self.expr("I", 1)
                self.emit(I("iastore", ()))
            else:
                self.emit(I("aload", (self.arr_slot,)), push_int(idx),
                          I("iaload", ()), I("istore", (self.scratch["I"],)))
        if r.random() < 0.3:
            self.emit(I("aload", (self.arr_slot,)), I("arraylength", ()),
                      I("istore", (self.scratch["I"],)))

    def stmt_try(self, depth: int):
        r = self.rng
        ls, le, lh, lout = (self.label() for _ in range(4))
        self.emit(L(ls))
        self.block(depth - 1)
        self.emit(L(le), I("goto", (lout,)), L(lh))
        if r.random() < 0.15:
            self.emit(I("athrow", ()))   # rethrow what was caught
        else:
            self.emit(I("pop", ()))
            self.block(depth - 1)
        self.emit(L(lout))
        self.regions.append(_Region(ls, le, lh, r.choice(CATCH_TYPES)))

    def stmt_throw(self):
        cls = self.rng.choice(THROW_TYPES)
        self.emit(I("new", (cls,)), I("dup", ()),
                  I("invokespecial", (MemberRef(cls, "<init>", "()V"),)),
                  I("athrow", ()))

    # ---- whole method ----

    def build(self, model, stmt_budget: int):
        for k in "IJFD":
            self.const(k)
            store = {"I": "istore", "J": "lstore",
                     "F": "fstore", "D": "dstore"}[k]
            self.emit(I(store, (self.scratch[k],)))
        self.emit(push_int(1), I("newarray", ("I",)),
                  I("astore", (self.arr_slot,)))
        for _ in range(stmt_budget):
            self.statement(2)
        self.expr(self.ret_kind, 3)
        ret = {"I": "ireturn", "J": "lreturn",
               "F": "freturn", "D": "dreturn"}[self.ret_kind]
        self.emit(I(ret, ()))
        regions = [TryRegion(g.start, g.end, g.handler, g.catch_type)
                   for g in self.regions]
        desc = "(" + "".join(self.param_kinds) + ")" + self.ret_kind
        return add_method(model, self.name, desc, self.items,
                          max_stack=40, max_locals=self.max_locals,
                          access=STATIC, try_regions=regions)


def generate_class(seed: int, n_methods: int):
    """Build `Gen` with helper methods first, then the public cases."""
    rng = random.Random(seed)
    model = make_class(CLASS)
    for fname, fdesc in STATICS:
        add_field(model, fname, fdesc, access=ACC_PUBLIC | ACC_STATIC)
    helpers: List[HelperSig] = []
    n_helpers = max(2, n_methods // 8)
    for i in range(n_helpers):
        pk = tuple(rng.choice("IJFD")
                   for _ in range(rng.randint(1, 2)))
        rk = rng.choice("IJFD")
        g = MethodGen(rng, f"h{i}", pk, rk, list(helpers))
        g.build(model, stmt_budget=rng.randint(1, 3))
        helpers.append(HelperSig(f"h{i}",
                                 "(" + "".join(pk) + ")" + rk, pk, rk))
    mains = []
    for i in range(n_methods):
        pk = tuple(rng.choice("IJFD")
                   for _ in range(rng.randint(0, 3)))
        rk = rng.choice("IJFD")
        g = MethodGen(rng, f"m{i}", pk, rk, helpers)
        meth = g.build(model, stmt_budget=rng.randint(2, 5))
        mains.append((meth, pk, rk))
    return model, mains


def random_args(rng: random.Random, param_kinds):
    out = []
    for k in param_kinds:
        if k == "I":
            out.append(rng.choice(INT_POOL + [rng.randint(-50, 50)]))
        elif k == "J":
            out.append(rng.choice(LONG_POOL + [rng.randint(-1000, 1000)]))
        elif k == "F":
            out.append(rng.choice(FLOAT_POOL))
        else:
            out.append(rng.choice(DOUBLE_POOL))
    return out
