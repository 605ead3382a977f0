"""Reference interpreter for the supported opcode subset.

Runs method bodies over a miniature object model (class table supplied
by the caller, no class loading) and reports the outcome the Java caller
would observe: a returned value or a raised exception class.  Serves as
the semantic oracle for differential testing of the C translation.
"""

import math
import struct
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, Union

from . import Jbc2cError
from .bytecode import apply_effect, stack_effect
from .classfile import MethodModel, TryRegion, CATCH_ALL
from .descriptors import parse_descriptor
from .opcodes import Instr, Label, MemberRef

DEFAULT_FUEL = 10_000_000

INT_MIN, INT_MAX = -(1 << 31), (1 << 31) - 1


class OracleUnsupported(Jbc2cError):
    pass


class StepLimitExceeded(Jbc2cError):
    pass


def i32(v: int) -> int:
    v &= 0xFFFFFFFF
    return v - (1 << 32) if v >= (1 << 31) else v


def i64(v: int) -> int:
    v &= 0xFFFFFFFFFFFFFFFF
    return v - (1 << 64) if v >= (1 << 63) else v


def f32(v: float) -> float:
    try:
        return struct.unpack(">f", struct.pack(">f", v))[0]
    except OverflowError:
        return math.copysign(math.inf, v)


def _java_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def _java_rem(a: int, b: int) -> int:
    return a - _java_div(a, b) * b


def float_from_bits(bits: int) -> float:
    return struct.unpack(">f", struct.pack(">I", bits & 0xFFFFFFFF))[0]


def double_from_bits(bits: int) -> float:
    return struct.unpack(">d", struct.pack(">Q", bits & 0xFFFFFFFFFFFFFFFF))[0]


@dataclass(frozen=True)
class Value:
    kind: str        # I, J, F, D, A
    v: object        # int, float, heap id or None (null)

    def __repr__(self):
        return f"{self.kind}:{self.v}"


NULL = Value("A", None)


@dataclass
class JObject:
    cls: str
    fields: Dict[Tuple[str, str], Value] = field(default_factory=dict)
    pyvalue: Optional[str] = None  # for java/lang/String


@dataclass
class JArray:
    elem: str          # element descriptor char: Z B C S I J F D or A
    values: List[object] = field(default_factory=list)


class Heap:
    def __init__(self):
        self.objects: Dict[int, Union[JObject, JArray]] = {}
        self._next = 1

    def alloc(self, obj) -> int:
        hid = self._next
        self._next += 1
        self.objects[hid] = obj
        return hid

    def get(self, hid: int):
        return self.objects[hid]


def default_value(desc_or_kind: str) -> Value:
    c = desc_or_kind[0]
    if c == "J":
        return Value("J", 0)
    if c == "F":
        return Value("F", 0.0)
    if c == "D":
        return Value("D", 0.0)
    if c in "LA[":
        return NULL
    return Value("I", 0)


@dataclass
class ClassDef:
    name: str
    super_name: Optional[str]
    fields: List[Tuple[str, str, bool]] = field(default_factory=list)  # name, desc, static
    methods: Dict[Tuple[str, str], Union[MethodModel, Callable]] = field(default_factory=dict)
    statics: Dict[Tuple[str, str], Value] = field(default_factory=dict)


SYSTEM_EXCEPTIONS = {
    "java/lang/Throwable": "java/lang/Object",
    "java/lang/Exception": "java/lang/Throwable",
    "java/lang/RuntimeException": "java/lang/Exception",
    "java/lang/ArithmeticException": "java/lang/RuntimeException",
    "java/lang/NullPointerException": "java/lang/RuntimeException",
    "java/lang/ClassCastException": "java/lang/RuntimeException",
    "java/lang/NegativeArraySizeException": "java/lang/RuntimeException",
    "java/lang/IllegalStateException": "java/lang/RuntimeException",
    "java/lang/IllegalArgumentException": "java/lang/RuntimeException",
    "java/lang/IndexOutOfBoundsException": "java/lang/RuntimeException",
    "java/lang/ArrayIndexOutOfBoundsException": "java/lang/IndexOutOfBoundsException",
}


class ClassTable:
    """Registered classes for dispatch; the harness supplies user classes."""

    def __init__(self):
        self.classes: Dict[str, ClassDef] = {}
        self.define("java/lang/Object", None)
        self.define("java/lang/String", "java/lang/Object")
        for name, sup in SYSTEM_EXCEPTIONS.items():
            self.define(name, sup)

    def define(self, name: str, super_name: Optional[str],
               fields=None) -> ClassDef:
        cd = ClassDef(name, super_name, list(fields or []))
        cd.methods[("<init>", "()V")] = _noop_init
        for fname, fdesc, is_static in cd.fields:
            if is_static:
                cd.statics[(fname, fdesc)] = default_value(fdesc)
        self.classes[name] = cd
        return cd

    def get(self, name: str) -> ClassDef:
        if name not in self.classes:
            raise OracleUnsupported(f"class {name} not registered")
        return self.classes[name]

    def is_subclass(self, name: str, of: str) -> bool:
        cur = name
        while cur is not None:
            if cur == of:
                return True
            cur = self.get(cur).super_name
        return False

    def resolve_method(self, start: str, name: str, desc: str):
        cur = start
        while cur is not None:
            cd = self.get(cur)
            if (name, desc) in cd.methods:
                return cd, cd.methods[(name, desc)]
            cur = cd.super_name
        raise OracleUnsupported(f"method {start}.{name}{desc} not found")

    def resolve_field_owner(self, start: str, name: str, desc: str,
                            want_static: bool) -> ClassDef:
        cur = start
        while cur is not None:
            cd = self.get(cur)
            for fname, fdesc, is_static in cd.fields:
                if fname == name and fdesc == desc and is_static == want_static:
                    return cd
            cur = cd.super_name
        raise OracleUnsupported(f"field {start}.{name}:{desc} not found")


def _noop_init(ctx, receiver, args):
    return None


@dataclass
class Outcome:
    returned: Optional[Value] = None   # None also covers void; see is_void
    is_void: bool = False
    exception: Optional[str] = None    # exception class name
    exception_id: Optional[int] = None
    heap: Optional[Heap] = None

    @property
    def threw(self):
        return self.exception is not None


class _Throw(Exception):
    def __init__(self, heap_id):
        self.heap_id = heap_id
        super().__init__("java exception in flight")


class ExecCtx:
    def __init__(self, table: ClassTable, heap: Heap, fuel: int, debug: bool):
        self.table = table
        self.heap = heap
        self.fuel = fuel
        self.debug = debug

    def throw_new(self, cls: str):
        raise _Throw(self.heap.alloc(JObject(cls)))

    def class_of(self, hid: int) -> str:
        obj = self.heap.get(hid)
        if isinstance(obj, JArray):
            return "[" + obj.elem
        return obj.cls

    def is_instance(self, hid: Optional[int], target: str) -> bool:
        if hid is None:
            return False
        obj = self.heap.get(hid)
        if isinstance(obj, JArray):
            return target in ("java/lang/Object", "[" + obj.elem)
        return self.table.is_subclass(obj.cls, target)

    def new_object(self, cls_name: str) -> int:
        obj = JObject(cls_name)
        cur = cls_name
        while cur is not None:
            cd = self.table.get(cur)
            for fname, fdesc, is_static in cd.fields:
                if not is_static:
                    obj.fields[(fname, fdesc)] = default_value(fdesc)
            cur = cd.super_name
        return self.heap.alloc(obj)

    def new_string(self, s: str) -> int:
        return self.heap.alloc(JObject("java/lang/String", pyvalue=s))


def _narrow_store(elem: str, val: Value):
    """Array element narrowing on store."""
    if elem == "B":
        return i32((val.v & 0xFF) - 0x100 if val.v & 0x80 else val.v & 0x7F)
    if elem == "Z":
        return val.v & 1
    if elem == "C":
        return val.v & 0xFFFF
    if elem == "S":
        v = val.v & 0xFFFF
        return v - 0x10000 if v >= 0x8000 else v
    if elem == "F":
        return f32(val.v)
    return val.v


def _call(ctx: ExecCtx, target, receiver: Optional[Value],
          args: List[Value]) -> Optional[Value]:
    if callable(target) and not isinstance(target, MethodModel):
        return target(ctx, receiver, args)
    all_args = ([receiver] if receiver is not None else []) + args
    return _run(ctx, target, all_args)


def _run(ctx: ExecCtx, method: MethodModel, args: List[Value]) -> Optional[Value]:
    code = method.code
    if code is None:
        raise OracleUnsupported(
            f"method {method.name}{method.descriptor} has no body to interpret")
    items = code.items
    label_index = {it.name: i for i, it in enumerate(items) if isinstance(it, Label)}

    locals_: List[Optional[Value]] = [None] * max(code.max_locals, 1)
    idx = 0
    for v in args:
        locals_[idx] = v
        idx += 1 + (1 if v.kind in ("J", "D") else 0)

    stack: List[Value] = []
    pc = 0

    def region_covers(reg: TryRegion, at: int) -> bool:
        return label_index[reg.start_label] <= at < label_index[reg.end_label]

    def dispatch(exc_id: int, at: int) -> Optional[int]:
        exc_cls = ctx.class_of(exc_id)
        for reg in code.try_regions:
            if not region_covers(reg, at):
                continue
            if reg.catch_type is CATCH_ALL or \
                    ctx.table.is_subclass(exc_cls, reg.catch_type):
                return label_index[reg.handler_label]
        return None

    while True:
        if pc >= len(items):
            raise OracleUnsupported("fell off end of bytecode")
        it = items[pc]
        if isinstance(it, Label):
            pc += 1
            continue
        ctx.fuel -= 1
        if ctx.fuel <= 0:
            raise StepLimitExceeded("interpreter fuel exhausted")
        if ctx.debug:
            declared = stack_effect(it, None, tuple(v.kind for v in stack))
            pre = tuple(v.kind for v in stack)
        try:
            result = _step(ctx, it, stack, locals_, label_index)
        except _Throw as t:
            handler = dispatch(t.heap_id, pc)
            if handler is None:
                raise
            stack.clear()
            stack.append(Value("A", t.heap_id))
            pc = handler
            continue
        if ctx.debug and result is _NEXT:
            post = tuple(v.kind for v in stack)
            expect = apply_effect(pre, declared)
            assert post == expect, \
                f"stack effect drift at {it.op}: declared {declared}, " \
                f"got {pre} -> {post}"
        if result is _NEXT:
            pc += 1
        elif isinstance(result, _Jump):
            pc = label_index[result.label]
        else:  # _Return
            return result.value


class _Jump:
    __slots__ = ("label",)

    def __init__(self, label):
        self.label = label


class _Return:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


_NEXT = object()

_CMP_OPS = {"ifeq": lambda a: a == 0, "ifne": lambda a: a != 0,
            "iflt": lambda a: a < 0, "ifge": lambda a: a >= 0,
            "ifgt": lambda a: a > 0, "ifle": lambda a: a <= 0}
_ICMP_OPS = {"if_icmpeq": lambda a, b: a == b, "if_icmpne": lambda a, b: a != b,
             "if_icmplt": lambda a, b: a < b, "if_icmpge": lambda a, b: a >= b,
             "if_icmpgt": lambda a, b: a > b, "if_icmple": lambda a, b: a <= b}

_ELEM_KIND = {"Z": "I", "B": "I", "C": "I", "S": "I", "I": "I",
              "J": "J", "F": "F", "D": "D", "A": "A"}


def _step(ctx: ExecCtx, it: Instr, stack, locals_, label_index):
    op = it.op
    push = stack.append
    pop = stack.pop

    def popk(kind):
        v = pop()
        assert v.kind == kind, f"{op}: popped {v.kind}, wanted {kind}"
        return v

    # constants and locals -------------------------------------------------
    if op == "nop":
        return _NEXT
    if op == "aconst_null":
        push(NULL)
        return _NEXT
    if op in ("iconst", "bipush", "sipush"):
        push(Value("I", it.args[0]))
        return _NEXT
    if op == "lconst":
        push(Value("J", it.args[0]))
        return _NEXT
    if op == "fconst":
        push(Value("F", float(it.args[0])))
        return _NEXT
    if op == "dconst":
        push(Value("D", float(it.args[0])))
        return _NEXT
    if op == "ldc":
        c = it.args[0]
        if c.kind == "int":
            push(Value("I", c.value))
        elif c.kind == "long":
            push(Value("J", c.value))
        elif c.kind == "float":
            push(Value("F", f32(float_from_bits(c.value))))
        elif c.kind == "double":
            push(Value("D", double_from_bits(c.value)))
        elif c.kind == "string":
            push(Value("A", ctx.new_string(c.value)))
        else:
            raise OracleUnsupported(f"ldc of {c.kind} not supported by oracle")
        return _NEXT
    if op in ("iload", "lload", "fload", "dload", "aload"):
        v = locals_[it.args[0]]
        assert v is not None, f"read of undefined local {it.args[0]}"
        push(v)
        return _NEXT
    if op in ("istore", "lstore", "fstore", "dstore", "astore"):
        locals_[it.args[0]] = pop()
        return _NEXT
    if op == "iinc":
        idx, const = it.args
        locals_[idx] = Value("I", i32(locals_[idx].v + const))
        return _NEXT

    # stack shuffles -------------------------------------------------------
    if op in ("pop", "pop2", "dup", "dup_x1", "dup_x2", "dup2", "dup2_x1",
              "dup2_x2", "swap"):
        eff = stack_effect(it, None, tuple(v.kind for v in stack))
        taken = stack[len(stack) - len(eff.pops):] if eff.pops else []
        if eff.pops:
            del stack[len(stack) - len(eff.pops):]
        stack.extend(_shuffle(op, taken))
        return _NEXT

    # arithmetic -----------------------------------------------------------
    if op in ("iadd", "isub", "imul", "ladd", "lsub", "lmul"):
        b = pop().v
        a = pop().v
        fn = {"add": lambda x, y: x + y, "sub": lambda x, y: x - y,
              "mul": lambda x, y: x * y}[op[1:]]
        if op[0] == "i":
            push(Value("I", i32(fn(a, b))))
        else:
            push(Value("J", i64(fn(a, b))))
        return _NEXT
    if op in ("idiv", "irem", "ldiv", "lrem"):
        b = pop().v
        a = pop().v
        if b == 0:
            ctx.throw_new("java/lang/ArithmeticException")
        r = _java_div(a, b) if op.endswith("div") else _java_rem(a, b)
        if op[0] == "i":
            push(Value("I", i32(r)))
        else:
            push(Value("J", i64(r)))
        return _NEXT
    if op in ("fadd", "fsub", "fmul", "fdiv", "dadd", "dsub", "dmul", "ddiv"):
        b = pop().v
        a = pop().v
        try:
            r = {"add": lambda x, y: x + y, "sub": lambda x, y: x - y,
                 "mul": lambda x, y: x * y,
                 "div": lambda x, y: x / y if y != 0 else _fdiv_zero(x, y)}[
                     op[1:]](a, b)
        except (OverflowError, ZeroDivisionError):
            r = _fdiv_zero(a, b)
        if op[0] == "f":
            push(Value("F", f32(r)))
        else:
            push(Value("D", r))
        return _NEXT
    if op in ("frem", "drem"):
        b = pop().v
        a = pop().v
        if math.isnan(a) or math.isnan(b) or math.isinf(a) or b == 0.0:
            r = math.nan
        elif math.isinf(b):
            r = a
        else:
            r = math.fmod(a, b)
        push(Value("F" if op[0] == "f" else "D", f32(r) if op[0] == "f" else r))
        return _NEXT
    if op in ("ineg", "lneg"):
        a = pop().v
        push(Value("I" if op[0] == "i" else "J",
                   (i32 if op[0] == "i" else i64)(-a)))
        return _NEXT
    if op in ("fneg", "dneg"):
        a = pop().v
        r = -a
        push(Value("F" if op[0] == "f" else "D", f32(r) if op[0] == "f" else r))
        return _NEXT
    if op in ("ishl", "ishr", "iushr"):
        s = pop().v & 0x1F
        a = pop().v
        if op == "ishl":
            r = i32(a << s)
        elif op == "ishr":
            r = a >> s
        else:
            r = i32((a & 0xFFFFFFFF) >> s)
        push(Value("I", r))
        return _NEXT
    if op in ("lshl", "lshr", "lushr"):
        s = pop().v & 0x3F
        a = pop().v
        if op == "lshl":
            r = i64(a << s)
        elif op == "lshr":
            r = a >> s
        else:
            r = i64((a & 0xFFFFFFFFFFFFFFFF) >> s)
        push(Value("J", r))
        return _NEXT
    if op in ("iand", "ior", "ixor", "land", "lor", "lxor"):
        b = pop().v
        a = pop().v
        r = {"and": a & b, "or": a | b, "xor": a ^ b}[op[1:]]
        push(Value("I" if op[0] == "i" else "J",
                   (i32 if op[0] == "i" else i64)(r)))
        return _NEXT

    # conversions ----------------------------------------------------------
    if op in ("i2l", "i2f", "i2d", "l2i", "l2f", "l2d", "f2i", "f2l", "f2d",
              "d2i", "d2l", "d2f", "i2b", "i2c", "i2s"):
        a = pop().v
        if op == "i2l":
            push(Value("J", a))
        elif op == "i2f":
            push(Value("F", f32(float(a))))
        elif op == "i2d":
            push(Value("D", float(a)))
        elif op == "l2i":
            push(Value("I", i32(a)))
        elif op == "l2f":
            push(Value("F", f32(float(a))))
        elif op == "l2d":
            push(Value("D", float(a)))
        elif op in ("f2i", "d2i"):
            push(Value("I", _to_int(a, INT_MIN, INT_MAX)))
        elif op in ("f2l", "d2l"):
            push(Value("J", _to_int(a, -(1 << 63), (1 << 63) - 1)))
        elif op == "f2d":
            push(Value("D", a))
        elif op == "d2f":
            push(Value("F", f32(a)))
        elif op == "i2b":
            push(Value("I", i32((a & 0xFF) - 0x100 if a & 0x80 else a & 0x7F)))
        elif op == "i2c":
            push(Value("I", a & 0xFFFF))
        elif op == "i2s":
            v = a & 0xFFFF
            push(Value("I", v - 0x10000 if v >= 0x8000 else v))
        return _NEXT

    # comparisons ----------------------------------------------------------
    if op == "lcmp":
        b = pop().v
        a = pop().v
        push(Value("I", (a > b) - (a < b)))
        return _NEXT
    if op in ("fcmpl", "fcmpg", "dcmpl", "dcmpg"):
        b = pop().v
        a = pop().v
        if math.isnan(a) or math.isnan(b):
            r = -1 if op.endswith("l") else 1
        else:
            r = (a > b) - (a < b)
        push(Value("I", r))
        return _NEXT

    # control flow ---------------------------------------------------------
    if op in _CMP_OPS:
        return _Jump(it.args[0]) if _CMP_OPS[op](pop().v) else _NEXT
    if op in _ICMP_OPS:
        b = pop().v
        a = pop().v
        return _Jump(it.args[0]) if _ICMP_OPS[op](a, b) else _NEXT
    if op in ("if_acmpeq", "if_acmpne"):
        b = pop().v
        a = pop().v
        eq = a == b
        return _Jump(it.args[0]) if (eq if op.endswith("eq") else not eq) else _NEXT
    if op == "ifnull":
        return _Jump(it.args[0]) if pop().v is None else _NEXT
    if op == "ifnonnull":
        return _Jump(it.args[0]) if pop().v is not None else _NEXT
    if op == "goto":
        return _Jump(it.args[0])
    if op == "tableswitch":
        default, low, high, targets = it.args
        v = pop().v
        if low <= v <= high:
            return _Jump(targets[v - low])
        return _Jump(default)
    if op == "lookupswitch":
        default, pairs = it.args
        v = pop().v
        for match, lbl in pairs:
            if v == match:
                return _Jump(lbl)
        return _Jump(default)
    if op in ("ireturn", "lreturn", "freturn", "dreturn", "areturn"):
        return _Return(pop())
    if op == "return":
        return _Return(None)

    # fields ---------------------------------------------------------------
    if op in ("getstatic", "putstatic"):
        ref: MemberRef = it.args[0]
        cd = ctx.table.resolve_field_owner(ref.owner, ref.name, ref.descriptor, True)
        key = (ref.name, ref.descriptor)
        if op == "getstatic":
            push(cd.statics[key])
        else:
            cd.statics[key] = pop()
        return _NEXT
    if op in ("getfield", "putfield"):
        ref = it.args[0]
        key = (ref.name, ref.descriptor)
        if op == "getfield":
            obj_v = pop()
            if obj_v.v is None:
                ctx.throw_new("java/lang/NullPointerException")
            push(ctx.heap.get(obj_v.v).fields[key])
        else:
            val = pop()
            obj_v = pop()
            if obj_v.v is None:
                ctx.throw_new("java/lang/NullPointerException")
            ctx.heap.get(obj_v.v).fields[key] = val
        return _NEXT

    # calls and allocation -------------------------------------------------
    if op in ("invokevirtual", "invokeinterface", "invokespecial", "invokestatic"):
        ref = it.args[0]
        sig = parse_descriptor(ref.descriptor)
        args = [pop() for _ in sig.param_types][::-1]
        receiver = None
        if op != "invokestatic":
            receiver = pop()
            if receiver.v is None:
                ctx.throw_new("java/lang/NullPointerException")
        if op in ("invokevirtual", "invokeinterface"):
            start = ctx.class_of(receiver.v)
            if start.startswith("["):
                start = "java/lang/Object"
        else:
            start = ref.owner
        _cd, target = ctx.table.resolve_method(start, ref.name, ref.descriptor)
        r = _call(ctx, target, receiver, args)
        if sig.return_type is not None:
            assert r is not None, f"void result from {ref}"
            push(r)
        return _NEXT
    if op == "new":
        push(Value("A", ctx.new_object(it.args[0])))
        return _NEXT
    if op == "newarray":
        n = pop().v
        if n < 0:
            ctx.throw_new("java/lang/NegativeArraySizeException")
        elem = it.args[0]
        fill = 0.0 if elem in "FD" else 0
        push(Value("A", ctx.heap.alloc(JArray(elem, [fill] * n))))
        return _NEXT
    if op == "anewarray":
        n = pop().v
        if n < 0:
            ctx.throw_new("java/lang/NegativeArraySizeException")
        push(Value("A", ctx.heap.alloc(JArray("A", [None] * n))))
        return _NEXT
    if op == "multianewarray":
        cls, dims = it.args
        counts = [pop().v for _ in range(dims)][::-1]
        for c in counts:
            if c < 0:
                ctx.throw_new("java/lang/NegativeArraySizeException")
        elem_desc = cls.lstrip("[")
        leaf = elem_desc[0] if elem_desc and elem_desc[0] in "ZBCSIJFD" else "A"

        def build(level):
            n = counts[level]
            if level == len(counts) - 1:
                depth_left = cls.count("[") - len(counts)
                if depth_left > 0 or leaf == "A":
                    return ctx.heap.alloc(JArray("A", [None] * n))
                fill = 0.0 if leaf in "FD" else 0
                return ctx.heap.alloc(JArray(leaf, [fill] * n))
            return ctx.heap.alloc(
                JArray("A", [build(level + 1) for _ in range(n)]))

        push(Value("A", build(0)))
        return _NEXT
    if op == "arraylength":
        a = pop()
        if a.v is None:
            ctx.throw_new("java/lang/NullPointerException")
        push(Value("I", len(ctx.heap.get(a.v).values)))
        return _NEXT
    if op in ("iaload", "laload", "faload", "daload", "aaload", "baload",
              "caload", "saload"):
        idx = pop().v
        a = pop()
        if a.v is None:
            ctx.throw_new("java/lang/NullPointerException")
        arr = ctx.heap.get(a.v)
        if not 0 <= idx < len(arr.values):
            ctx.throw_new("java/lang/ArrayIndexOutOfBoundsException")
        kind = _ELEM_KIND[arr.elem]
        push(Value(kind, arr.values[idx]))
        return _NEXT
    if op in ("iastore", "lastore", "fastore", "dastore", "aastore", "bastore",
              "castore", "sastore"):
        val = pop()
        idx = pop().v
        a = pop()
        if a.v is None:
            ctx.throw_new("java/lang/NullPointerException")
        arr = ctx.heap.get(a.v)
        if not 0 <= idx < len(arr.values):
            ctx.throw_new("java/lang/ArrayIndexOutOfBoundsException")
        arr.values[idx] = _narrow_store(arr.elem, val)
        return _NEXT

    # exceptions and type tests --------------------------------------------
    if op == "athrow":
        exc = pop()
        if exc.v is None:
            ctx.throw_new("java/lang/NullPointerException")
        raise _Throw(exc.v)
    if op == "checkcast":
        a = stack[-1]
        if a.v is not None and not ctx.is_instance(a.v, it.args[0]):
            ctx.throw_new("java/lang/ClassCastException")
        return _NEXT
    if op == "instanceof":
        a = pop()
        push(Value("I", 1 if ctx.is_instance(a.v, it.args[0]) else 0))
        return _NEXT

    raise OracleUnsupported(f"opcode {op} outside interpreted subset")


def _fdiv_zero(a, b):
    if b == 0.0 and a == 0.0:
        return math.nan
    if b == 0.0:
        sign = math.copysign(1.0, a) * math.copysign(1.0, b)
        return math.inf * sign
    return a / b


def _to_int(x: float, lo: int, hi: int) -> int:
    if math.isnan(x):
        return 0
    if x <= lo:
        return lo
    if x >= hi:
        return hi
    return math.trunc(x)


def _shuffle(op: str, taken: List[Value]) -> List[Value]:
    """Result order for the untyped stack ops given the popped values."""
    if op == "pop" or op == "pop2":
        return []
    if op == "dup" or op == "dup2":
        return taken + taken
    if op == "dup_x1":
        v2, v1 = taken
        return [v1, v2, v1]
    if op == "dup_x2":
        under, v1 = taken[:-1], taken[-1:]
        return v1 + under + v1
    if op in ("dup2_x1", "dup2_x2"):
        # taken = under + top, where top is one cat-2 or two cat-1 values
        ntop = 1 if taken[-1].kind in ("J", "D") else 2
        if len(taken) - ntop == 0:
            raise Jbc2cError("shuffle underflow")
        under, top = taken[:len(taken) - ntop], taken[len(taken) - ntop:]
        return top + under + top
    if op == "swap":
        v2, v1 = taken
        return [v1, v2]
    raise Jbc2cError(f"not a shuffle op: {op}")


def execute(method: MethodModel, args: List[Value],
            heap: Optional[Heap] = None, env: Optional[ClassTable] = None,
            fuel: int = DEFAULT_FUEL, debug: bool = False) -> Outcome:
    """Run one method to completion; never leaks _Throw to the caller."""
    heap = heap if heap is not None else Heap()
    env = env if env is not None else ClassTable()
    ctx = ExecCtx(env, heap, fuel, debug)
    sig = parse_descriptor(method.descriptor)
    try:
        r = _run(ctx, method, args)
    except _Throw as t:
        return Outcome(exception=ctx.class_of(t.heap_id),
                       exception_id=t.heap_id, heap=heap)
    if sig.return_type is None:
        return Outcome(is_void=True, heap=heap)
    return Outcome(returned=r, heap=heap)


def render_outcome(outcome: Outcome, heap: Heap) -> str:
    """Canonical one-line outcome format shared with the C harness."""
    if outcome.threw:
        return f"threw {outcome.exception}"
    if outcome.is_void:
        return "ret V"
    v = outcome.returned
    if v.kind == "I":
        return f"ret I {v.v}"
    if v.kind == "J":
        return f"ret J {v.v}"
    if v.kind == "F":
        return f"ret F {float(v.v).hex()}"
    if v.kind == "D":
        return f"ret D {float(v.v).hex()}"
    if v.v is None:
        return "ret A null"
    obj = heap.get(v.v)
    if isinstance(obj, JArray):
        return f"ret A [{obj.elem}"
    return f"ret A {obj.cls}"
