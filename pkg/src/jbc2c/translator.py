"""Opcode-by-opcode translation of a method body to a C function.

The emitted function re-creates the operand stack and locals array as
64-bit jvalue arrays, reaches back into the JVM through JNI reflection
for calls/fields/arrays, and simulates the Java exception model with
the three-way split: thrown (ATHROW), forwarded (after calls) and
system (after checked helpers) exceptions.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from . import Jbc2cError
from .bytecode import DepthMap, check_method, stack_effect, apply_effect
from .classfile import CATCH_ALL, ClassModel, MethodModel, TryRegion
from .descriptors import parse_descriptor, parse_field_descriptor
from .opcodes import Const, Instr, Label, MemberRef, INVOKES
from .rewriter import jni_mangle

# ---------------------------------------------------------------------------
# emitted-statement model


@dataclass
class Push:
    kind: str   # I J F D A V
    expr: str


@dataclass
class Pop:
    kind: str
    target: str                  # lvalue receiving the popped value
    declare: Optional[str] = None  # C type when this introduces the lvalue


@dataclass
class Expr:
    text: str


@dataclass
class Decl:
    text: str


@dataclass
class CLabel:
    name: str


@dataclass
class Goto:
    name: str


@dataclass
class If:
    cond: str
    then: List["CStmt"]
    els: Optional[List["CStmt"]] = None


@dataclass
class Switch:
    expr: str
    cases: List[Tuple[int, str]]  # (match value, goto label)
    default: str


@dataclass
class Ret:
    expr: Optional[str] = None


@dataclass
class Helper:
    name: str
    args: List[str]
    assign_to: Optional[str] = None


CStmt = Union[Push, Pop, Expr, Decl, CLabel, Goto, If, Switch, Ret, Helper]


@dataclass
class CFunction:
    name: str
    return_ctype: str
    params: List[Tuple[str, str]]   # (C type, name)
    body: List[CStmt] = field(default_factory=list)


@dataclass
class CSourceUnit:
    text: str
    function_names: List[str]


class UnsupportedOpcode(Jbc2cError):
    pass


class InconsistentDepth(Jbc2cError):
    pass


class DuplicateFunctionName(Jbc2cError):
    pass


class UnknownSystemException(Jbc2cError):
    pass


@dataclass
class TranslationConfig:
    mangled_name: Optional[str] = None
    class_name: Optional[str] = None


@dataclass
class HandlerTarget:
    kind: str                    # "jump" or "propagate"
    label: Optional[str] = None


# system exception classes known at transformation time
SYSTEM_EXC_SUPERS = {
    "java/lang/ArithmeticException": ("java/lang/RuntimeException",),
    "java/lang/NullPointerException": ("java/lang/RuntimeException",),
    "java/lang/ClassCastException": ("java/lang/RuntimeException",),
    "java/lang/NegativeArraySizeException": ("java/lang/RuntimeException",),
    "java/lang/ArrayIndexOutOfBoundsException": (
        "java/lang/IndexOutOfBoundsException",),
    "java/lang/IndexOutOfBoundsException": ("java/lang/RuntimeException",),
    "java/lang/RuntimeException": ("java/lang/Exception",),
    "java/lang/Exception": ("java/lang/Throwable",),
    "java/lang/Throwable": (),
}

EXC_CODE = {
    "java/lang/ArithmeticException": "JBC_EX_ARITHMETIC",
    "java/lang/NullPointerException": "JBC_EX_NULL",
    "java/lang/ArrayIndexOutOfBoundsException": "JBC_EX_INDEX",
    "java/lang/NegativeArraySizeException": "JBC_EX_NEGSIZE",
    "java/lang/ClassCastException": "JBC_EX_CAST",
}

_JNI_CTYPE = {"Z": "jboolean", "B": "jbyte", "C": "jchar", "S": "jshort",
              "I": "jint", "J": "jlong", "F": "jfloat", "D": "jdouble"}
_JNI_NAME = {"Z": "Boolean", "B": "Byte", "C": "Char", "S": "Short",
             "I": "Int", "J": "Long", "F": "Float", "D": "Double"}
_KIND_CTYPE = {"I": "jint", "J": "jlong", "F": "jfloat", "D": "jdouble",
               "A": "jobject", "V": "jvalue"}
_KIND_UNION = {"I": ".i", "J": ".j", "F": ".f", "D": ".d", "A": ".l"}

_SYS_CHECKED = {
    "idiv": ("IDiv", ["java/lang/ArithmeticException"]),
    "irem": ("IRem", ["java/lang/ArithmeticException"]),
    "ldiv": ("LDiv", ["java/lang/ArithmeticException"]),
    "lrem": ("LRem", ["java/lang/ArithmeticException"]),
}

_ARRLOAD = {"iaload": "I", "laload": "J", "faload": "F", "daload": "D",
            "aaload": "A", "baload": "B", "caload": "C", "saload": "S"}
_ARRSTORE = {"iastore": "I", "lastore": "J", "fastore": "F", "dastore": "D",
             "aastore": "A", "bastore": "B", "castore": "C", "sastore": "S"}


def desc_first_char(descriptor: str) -> str:
    c = descriptor[0]
    return "A" if c in "L[" else c


def jtype_char(descriptor: str) -> str:
    """Descriptor -> jvalue kind char for the emulated stack."""
    c = desc_first_char(descriptor)
    return {"Z": "I", "B": "I", "C": "I", "S": "I"}.get(c, c)


def c_string(s: str) -> str:
    out = ['"']
    for ch in s:
        o = ord(ch)
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif 32 <= o < 127:
            out.append(ch)
        else:
            from .classfile import encode_mutf8
            for b in encode_mutf8(ch):
                out.append(f"\\{b:03o}")
    out.append('"')
    return "".join(out)


def c_int_literal(v: int) -> str:
    if v == -(1 << 31):
        return "(-2147483647 - 1)"
    return str(v)


def c_long_literal(v: int) -> str:
    if v == -(1 << 63):
        return "(-9223372036854775807LL - 1)"
    return f"{v}LL"


def c_float_literal(x: float) -> str:
    import math
    if math.isnan(x):
        return "JBC_NANF"
    if math.isinf(x):
        return "JBC_INFF" if x > 0 else "(-JBC_INFF)"
    if x == 0.0:
        return "-0.0f" if math.copysign(1.0, x) < 0 else "0.0f"
    return x.hex() + "f"


def c_double_literal(x: float) -> str:
    import math
    if math.isnan(x):
        return "JBC_NAND"
    if math.isinf(x):
        return "JBC_INFD" if x > 0 else "(-JBC_INFD)"
    if x == 0.0:
        return "-0.0" if math.copysign(1.0, x) < 0 else "0.0"
    return x.hex()


def system_exception_supers(name: str) -> List[str]:
    if name not in SYSTEM_EXC_SUPERS and name not in EXC_CODE:
        raise UnknownSystemException(name)
    chain = [name]
    cur = name
    while SYSTEM_EXC_SUPERS.get(cur):
        cur = SYSTEM_EXC_SUPERS[cur][0]
        chain.append(cur)
    return chain


def resolve_system_exception_target(exception_type: str,
                                    enclosing_regions: List[TryRegion]
                                    ) -> HandlerTarget:
    """First enclosing region catching a supertype-or-equal wins."""
    supers = system_exception_supers(exception_type)
    for reg in enclosing_regions:
        if reg.catch_type is CATCH_ALL or reg.catch_type in supers:
            return HandlerTarget("jump", reg.handler_label)
    return HandlerTarget("propagate")


def plan_exception_checks(method: MethodModel) -> set:
    """Item indices of instructions needing an exception check."""
    sites = set()
    code = method.code
    for i, it in enumerate(code.items):
        if not isinstance(it, Instr):
            continue
        op = it.op
        if op in INVOKES or op in _SYS_CHECKED or op in _ARRLOAD \
                or op in _ARRSTORE \
                or op in ("newarray", "anewarray", "multianewarray",
                          "arraylength", "getfield", "putfield", "checkcast"):
            sites.add(i)
    return sites


# ---------------------------------------------------------------------------
# translation


class _Placeholder:
    """Marks a NEW'ed, not-yet-constructed object on the simulated stack."""

    __slots__ = ("cls", "uid")

    def __init__(self, cls, uid):
        self.cls = cls
        self.uid = uid


class _MethodTranslator:
    def __init__(self, method: MethodModel, model: Optional[ClassModel],
                 cfg: TranslationConfig):
        self.method = method
        self.model = model
        self.class_name = cfg.class_name or (model.class_name if model else "?")
        self.mangled = cfg.mangled_name or jni_mangle(
            self.class_name, method.name, method.descriptor)
        self.sig = parse_descriptor(method.descriptor)
        self.code = method.code
        self.dm: DepthMap = check_method(method)
        self.temp = 0
        self.site = 0
        self.body: List[CStmt] = []
        self.referenced: set = set()
        self.label_index = {it.name: i for i, it in enumerate(self.code.items)
                            if isinstance(it, Label)}
        # member-id cache, in first-use order
        self.cls_vars: Dict[str, str] = {}
        self.mid_vars: Dict[Tuple[str, str, str, bool], str] = {}
        self.fid_vars: Dict[Tuple[str, str, str, bool], str] = {}
        self.prologue_lookups: List[CStmt] = []
        self.uses_exception = False

    # -- helpers ----------------------------------------------------------

    def fresh(self, prefix="t") -> str:
        self.temp += 1
        return f"{prefix}{self.temp}"

    def emit(self, stmt: CStmt):
        self.body.append(stmt)

    def pop_to_temp(self, kind: str) -> str:
        name = self.fresh()
        self.emit(Pop(kind, name, declare=_KIND_CTYPE[kind]))
        return name

    def push(self, kind: str, expr: str):
        self.emit(Push(kind, expr))

    def cls_var(self, owner: str) -> str:
        if owner not in self.cls_vars:
            var = f"cls{len(self.cls_vars)}"
            self.cls_vars[owner] = var
            self.prologue_lookups.append(Decl(
                f"jclass {var} = (*env)->FindClass(env, {c_string(owner)});"))
        return self.cls_vars[owner]

    def mid_var(self, ref: MemberRef, is_static: bool) -> str:
        key = (ref.owner, ref.name, ref.descriptor, is_static)
        if key not in self.mid_vars:
            cvar = self.cls_var(ref.owner)
            var = f"mid{len(self.mid_vars)}"
            self.mid_vars[key] = var
            fn = "GetStaticMethodID" if is_static else "GetMethodID"
            self.prologue_lookups.append(Decl(
                f"jmethodID {var} = (*env)->{fn}(env, {cvar}, "
                f"{c_string(ref.name)}, {c_string(ref.descriptor)});"))
        return self.mid_vars[key]

    def fid_var(self, ref: MemberRef, is_static: bool) -> str:
        key = (ref.owner, ref.name, ref.descriptor, is_static)
        if key not in self.fid_vars:
            cvar = self.cls_var(ref.owner)
            var = f"fid{len(self.fid_vars)}"
            self.fid_vars[key] = var
            fn = "GetStaticFieldID" if is_static else "GetFieldID"
            self.prologue_lookups.append(Decl(
                f"jfieldID {var} = (*env)->{fn}(env, {cvar}, "
                f"{c_string(ref.name)}, {c_string(ref.descriptor)});"))
        return self.fid_vars[key]

    def goto(self, label: str) -> Goto:
        self.referenced.add(label)
        return Goto(label)

    def return_default(self) -> Ret:
        rt = self.sig.return_type
        if rt is None:
            return Ret(None)
        k = rt.slot_kind
        return Ret({"I": "0", "J": "0", "F": "0.0f", "D": "0.0",
                    "A": "NULL"}[k])

    def enclosing_regions(self, idx: int) -> List[TryRegion]:
        out = []
        for reg in self.code.try_regions:
            if self.label_index[reg.start_label] <= idx \
                    < self.label_index[reg.end_label]:
                out.append(reg)
        return out

    # -- exception dispatch ------------------------------------------------

    def system_dispatch(self, idx: int, classes: List[str]) -> List[CStmt]:
        """Statements consuming a nonzero `exception` code set by a helper."""
        self.uses_exception = True
        regions = self.enclosing_regions(idx)
        targets = [(cls, resolve_system_exception_target(cls, regions))
                   for cls in classes]
        if all(t.kind == "propagate" for _c, t in targets):
            return [If("exception", [self.return_default()])]
        if len(targets) == 1:
            cls, tgt = targets[0]
            return [If("exception",
                       [Helper("JBC_AlignClear", ["env", "&stack"]),
                        self.goto(tgt.label)])]
        out = []
        for cls, tgt in targets:
            cond = f"exception == {EXC_CODE[cls]}"
            if tgt.kind == "jump":
                out.append(If(cond, [Helper("JBC_AlignClear", ["env", "&stack"]),
                                     self.goto(tgt.label)]))
            else:
                out.append(If(cond, [self.return_default()]))
        return out

    def forwarded_check(self, idx: int) -> List[CStmt]:
        """Dynamic dispatch after a call: user hierarchies are unknown
        until run time, so handlers are tried with IsInstanceOf."""
        regions = self.enclosing_regions(idx)
        self.uses_exception = True
        inner: List[CStmt] = [Helper("JBC_AlignWithJVM", ["env", "&stack"])]
        terminated = False
        for reg in regions:
            if reg.catch_type is CATCH_ALL:
                inner.append(Expr("(*env)->ExceptionClear(env);"))
                inner.append(self.goto(reg.handler_label))
                terminated = True
                break
            inner.append(If(
                f"JBC_TopInstanceOf(env, &stack, {c_string(reg.catch_type)})",
                [Expr("(*env)->ExceptionClear(env);"),
                 self.goto(reg.handler_label)]))
        if not terminated:
            # the exception is not cleared here: the Java caller handles it
            inner.append(self.return_default())
        return [Expr("exception = ((*env)->ExceptionOccurred(env) != NULL);"),
                If("exception", inner)]

    def athrow_stmts(self, idx: int, obj: str) -> List[CStmt]:
        out: List[CStmt] = []
        npe = [If(f"{obj} == NULL",
                  [Helper("JBC_ThrowNull", ["env"], assign_to="exception")]
                  + self.system_dispatch(idx, ["java/lang/NullPointerException"]))]
        self.uses_exception = True
        out.extend(npe)
        for reg in self.enclosing_regions(idx):
            restore = [Expr("stack.top = 0;"), Push("A", obj),
                       self.goto(reg.handler_label)]
            if reg.catch_type is CATCH_ALL:
                out.extend(restore)
                return out
            out.append(If(
                f"JBC_RefInstanceOf(env, {obj}, {c_string(reg.catch_type)})",
                restore))
        out.append(Expr(f"(*env)->Throw(env, (jthrowable){obj});"))
        out.append(self.return_default())
        return out

    # -- per-opcode translation -------------------------------------------

    def translate(self) -> CFunction:
        items = self.code.items
        sim: List[object] = []
        alive = True
        for idx, it in enumerate(items):
            if isinstance(it, Label):
                if it.name in self.dm.labels:
                    if alive and any(isinstance(x, _Placeholder) for x in sim):
                        raise UnsupportedOpcode(
                            "uninitialized object live across a label")
                    sim = list(self.dm.labels[it.name])
                    alive = True
                    self.emit(CLabel(it.name))
                continue
            if not alive:
                continue
            alive = self.translate_instruction(it, idx, sim)
        return self.finish()

    def finish(self) -> CFunction:
        rt = self.sig.return_type
        ret_ctype = "void"
        if rt is not None:
            c = desc_first_char(rt.render())
            ret_ctype = _JNI_CTYPE.get(c, "jobject")
        params: List[Tuple[str, str]] = [("JNIEnv *", "env")]
        if self.method.is_static:
            params.append(("jclass", "thisCls"))
        else:
            params.append(("jobject", "thisObj"))
        prologue: List[CStmt] = []
        cap = max(self.code.max_stack, 1)
        prologue.append(Decl(f"jvalue jbc_slots[{cap}];"))
        prologue.append(Decl(f"char jbc_tags[{cap}];"))
        prologue.append(Decl(
            f"jbc_stack stack = {{ jbc_slots, jbc_tags, 0, {cap} }};"))
        nlocals = max(self.code.max_locals, 1)
        prologue.append(Decl(f"jvalue vars[{nlocals}];"))
        slot = 0
        if not self.method.is_static:
            prologue.append(Expr("vars[0].l = thisObj;"))
            slot = 1
        for i, t in enumerate(self.sig.param_types):
            c = desc_first_char(t.render())
            ctype = _JNI_CTYPE.get(c, "jobject")
            pname = f"a{i}"
            params.append((ctype, pname))
            u = _KIND_UNION[t.slot_kind]
            cast = f"({_KIND_CTYPE[t.slot_kind]})" if t.slot_kind != "A" else ""
            prologue.append(Expr(f"vars[{slot}]{u} = {cast}{pname};"))
            slot += t.width
        if self.uses_exception:
            prologue.append(Decl("int exception = 0;"))
        body = prologue + self.prologue_lookups + self._filter_labels(self.body)
        return CFunction(self.mangled, ret_ctype, params, body)

    def _filter_labels(self, stmts: List[CStmt]) -> List[CStmt]:
        out = []
        for s in stmts:
            if isinstance(s, CLabel) and s.name not in self.referenced:
                continue
            if isinstance(s, If):
                s = If(s.cond, self._filter_labels(s.then),
                       self._filter_labels(s.els) if s.els else None)
            out.append(s)
        return out

    def _sim_apply(self, it: Instr, sim: List[object]):
        kinds = tuple("A" if isinstance(x, _Placeholder) else x for x in sim)
        eff = stack_effect(it, None, kinds)
        n = len(eff.pops)
        if n:
            if any(isinstance(x, _Placeholder) for x in sim[len(sim) - n:]):
                raise UnsupportedOpcode(
                    f"{it.op} consumes an uninitialized object")
            del sim[len(sim) - n:]
        sim.extend(eff.pushes)
        return eff

    def translate_instruction(self, it: Instr, idx: int,
                              sim: List[object]) -> bool:
        """Emit statements for one instruction; returns False when control
        cannot fall through."""
        op = it.op
        E = self.emit
        P = self.push

        if (op == "goto" or op == "athrow" or op.startswith("if")
                or op.endswith("switch") or op.endswith("return")):
            if any(isinstance(x, _Placeholder) for x in sim):
                raise UnsupportedOpcode(
                    "uninitialized object live across a branch")

        # NEW / DUP fusion bookkeeping (JNI NewObject covers both)
        if op == "new":
            sim.append(_Placeholder(it.args[0], idx))
            return True
        if op == "dup" and sim and isinstance(sim[-1], _Placeholder):
            sim.append(sim[-1])
            return True
        if op == "invokespecial" and it.args[0].name == "<init>":
            ref: MemberRef = it.args[0]
            sig = parse_descriptor(ref.descriptor)
            nargs = len(sig.param_types)
            recv_pos = len(sim) - nargs - 1
            if recv_pos >= 0 and isinstance(sim[recv_pos], _Placeholder):
                return self._emit_new_fusion(it, idx, sim, nargs)
            # explicit super()/this() constructor call on an existing object
            return self._emit_invoke(it, idx, sim)

        if op in ("nop",):
            self._sim_apply(it, sim)
            return True
        if op == "aconst_null":
            self._sim_apply(it, sim)
            P("A", "NULL")
            return True
        if op in ("iconst", "bipush", "sipush"):
            self._sim_apply(it, sim)
            P("I", c_int_literal(it.args[0]))
            return True
        if op == "lconst":
            self._sim_apply(it, sim)
            P("J", c_long_literal(it.args[0]))
            return True
        if op == "fconst":
            self._sim_apply(it, sim)
            P("F", c_float_literal(float(it.args[0])))
            return True
        if op == "dconst":
            self._sim_apply(it, sim)
            P("D", c_double_literal(float(it.args[0])))
            return True
        if op == "ldc":
            self._sim_apply(it, sim)
            c: Const = it.args[0]
            if c.kind == "int":
                P("I", c_int_literal(c.value))
            elif c.kind == "long":
                P("J", c_long_literal(c.value))
            elif c.kind == "float":
                from .interp import float_from_bits
                P("F", c_float_literal(float_from_bits(c.value)))
            elif c.kind == "double":
                from .interp import double_from_bits
                P("D", c_double_literal(double_from_bits(c.value)))
            elif c.kind == "string":
                P("A", f"(*env)->NewStringUTF(env, {c_string(c.value)})")
            elif c.kind == "class":
                P("A", f"(jobject)(*env)->FindClass(env, {c_string(c.value)})")
            return True
        if op in ("iload", "lload", "fload", "dload", "aload"):
            self._sim_apply(it, sim)
            k = {"i": "I", "l": "J", "f": "F", "d": "D", "a": "A"}[op[0]]
            P(k, f"vars[{it.args[0]}]{_KIND_UNION[k]}")
            return True
        if op in ("istore", "lstore", "fstore", "dstore", "astore"):
            self._sim_apply(it, sim)
            k = {"i": "I", "l": "J", "f": "F", "d": "D", "a": "A"}[op[0]]
            E(Pop(k, f"vars[{it.args[0]}]{_KIND_UNION[k]}"))
            return True
        if op == "iinc":
            self._sim_apply(it, sim)
            i, c = it.args
            E(Expr(f"vars[{i}].i = (jint)((juint)vars[{i}].i + "
                   f"(juint){c_int_literal(c)});"))
            return True

        if op in ("pop", "pop2", "dup", "dup_x1", "dup_x2", "dup2",
                  "dup2_x1", "dup2_x2", "swap"):
            return self._emit_shuffle(it, sim)

        if op in ("iadd", "isub", "imul", "ladd", "lsub", "lmul"):
            self._sim_apply(it, sim)
            k = "I" if op[0] == "i" else "J"
            u = "juint" if k == "I" else "julong"
            sign = {"add": "+", "sub": "-", "mul": "*"}[op[1:]]
            t2 = self.pop_to_temp(k)
            t1 = self.pop_to_temp(k)
            P(k, f"({_KIND_CTYPE[k]})(({u}){t1} {sign} ({u}){t2})")
            return True
        if op in _SYS_CHECKED:
            helper, classes = _SYS_CHECKED[op]
            self._sim_apply(it, sim)
            self.uses_exception = True
            E(Helper(helper, ["env", "&stack"], assign_to="exception"))
            for s in self.system_dispatch(idx, classes):
                E(s)
            return True
        if op in ("fadd", "fsub", "fmul", "fdiv", "dadd", "dsub", "dmul",
                  "ddiv"):
            self._sim_apply(it, sim)
            k = "F" if op[0] == "f" else "D"
            sign = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[op[1:]]
            t2 = self.pop_to_temp(k)
            t1 = self.pop_to_temp(k)
            P(k, f"{t1} {sign} {t2}")
            return True
        if op in ("frem", "drem"):
            self._sim_apply(it, sim)
            k = "F" if op[0] == "f" else "D"
            t2 = self.pop_to_temp(k)
            t1 = self.pop_to_temp(k)
            fn = "fmodf" if k == "F" else "fmod"
            P(k, f"{fn}({t1}, {t2})")
            return True
        if op in ("ineg", "lneg"):
            self._sim_apply(it, sim)
            k = "I" if op[0] == "i" else "J"
            u = "juint" if k == "I" else "julong"
            zero = "0u" if k == "I" else "0ull"
            t1 = self.pop_to_temp(k)
            P(k, f"({_KIND_CTYPE[k]})({zero} - ({u}){t1})")
            return True
        if op in ("fneg", "dneg"):
            self._sim_apply(it, sim)
            k = "F" if op[0] == "f" else "D"
            t1 = self.pop_to_temp(k)
            P(k, f"-{t1}")
            return True
        if op in ("ishl", "ishr", "iushr", "lshl", "lshr", "lushr"):
            self._sim_apply(it, sim)
            k = "I" if op[0] == "i" else "J"
            mask = "0x1f" if k == "I" else "0x3f"
            t2 = self.pop_to_temp("I")
            t1 = self.pop_to_temp(k)
            if op.endswith("shl"):
                u = "juint" if k == "I" else "julong"
                expr = f"({_KIND_CTYPE[k]})(({u}){t1} << ({t2} & {mask}))"
            elif op.endswith("ushr"):
                u = "juint" if k == "I" else "julong"
                expr = f"({_KIND_CTYPE[k]})((({u}){t1}) >> ({t2} & {mask}))"
            else:
                expr = f"{t1} >> ({t2} & {mask})"
            P(k, expr)
            return True
        if op in ("iand", "ior", "ixor", "land", "lor", "lxor"):
            self._sim_apply(it, sim)
            k = "I" if op[0] == "i" else "J"
            sign = {"and": "&", "or": "|", "xor": "^"}[op[1:]]
            t2 = self.pop_to_temp(k)
            t1 = self.pop_to_temp(k)
            P(k, f"{t1} {sign} {t2}")
            return True
        if op in ("i2l", "i2f", "i2d", "l2i", "l2f", "l2d", "f2i", "f2l",
                  "f2d", "d2i", "d2l", "d2f", "i2b", "i2c", "i2s"):
            self._sim_apply(it, sim)
            src = {"i": "I", "l": "J", "f": "F", "d": "D"}[op[0]]
            t1 = self.pop_to_temp(src)
            exprs = {
                "i2l": ("J", f"(jlong){t1}"),
                "i2f": ("F", f"(jfloat){t1}"),
                "i2d": ("D", f"(jdouble){t1}"),
                "l2i": ("I", f"(jint)(juint){t1}"),
                "l2f": ("F", f"(jfloat){t1}"),
                "l2d": ("D", f"(jdouble){t1}"),
                "f2i": ("I", f"JBC_F2I({t1})"),
                "f2l": ("J", f"JBC_F2L({t1})"),
                "f2d": ("D", f"(jdouble){t1}"),
                "d2i": ("I", f"JBC_D2I({t1})"),
                "d2l": ("J", f"JBC_D2L({t1})"),
                "d2f": ("F", f"(jfloat){t1}"),
                "i2b": ("I", f"(jint)(jbyte){t1}"),
                "i2c": ("I", f"(jint)(jchar){t1}"),
                "i2s": ("I", f"(jint)(jshort){t1}"),
            }
            k, e = exprs[op]
            P(k, e)
            return True
        if op in ("lcmp", "fcmpl", "fcmpg", "dcmpl", "dcmpg"):
            self._sim_apply(it, sim)
            k = {"l": "J", "f": "F", "d": "D"}[op[0]]
            t2 = self.pop_to_temp(k)
            t1 = self.pop_to_temp(k)
            if op == "lcmp":
                P("I", f"({t1} > {t2}) - ({t1} < {t2})")
            else:
                nan = "-1" if op.endswith("l") else "1"
                P("I", f"(({t1} != {t1}) || ({t2} != {t2})) ? {nan} : "
                       f"(({t1} > {t2}) - ({t1} < {t2}))")
            return True

        if op in ("ifeq", "ifne", "iflt", "ifge", "ifgt", "ifle"):
            self._sim_apply(it, sim)
            t1 = self.pop_to_temp("I")
            rel = {"eq": "==", "ne": "!=", "lt": "<", "ge": ">=",
                   "gt": ">", "le": "<="}[op[2:]]
            E(If(f"{t1} {rel} 0", [self.goto(it.args[0])]))
            return True
        if op.startswith("if_icmp"):
            self._sim_apply(it, sim)
            t2 = self.pop_to_temp("I")
            t1 = self.pop_to_temp("I")
            rel = {"eq": "==", "ne": "!=", "lt": "<", "ge": ">=",
                   "gt": ">", "le": "<="}[op[7:]]
            E(If(f"{t1} {rel} {t2}", [self.goto(it.args[0])]))
            return True
        if op in ("if_acmpeq", "if_acmpne"):
            self._sim_apply(it, sim)
            t2 = self.pop_to_temp("A")
            t1 = self.pop_to_temp("A")
            rel = "==" if op.endswith("eq") else "!="
            E(If(f"{t1} {rel} {t2}", [self.goto(it.args[0])]))
            return True
        if op in ("ifnull", "ifnonnull"):
            self._sim_apply(it, sim)
            t1 = self.pop_to_temp("A")
            rel = "==" if op == "ifnull" else "!="
            E(If(f"{t1} {rel} NULL", [self.goto(it.args[0])]))
            return True
        if op == "goto":
            self._sim_apply(it, sim)
            E(self.goto(it.args[0]))
            return False
        if op == "tableswitch":
            self._sim_apply(it, sim)
            default, low, high, targets = it.args
            t1 = self.pop_to_temp("I")
            cases = [(low + i, lbl) for i, lbl in enumerate(targets)]
            for _v, lbl in cases:
                self.referenced.add(lbl)
            self.referenced.add(default)
            E(Switch(t1, cases, default))
            return False
        if op == "lookupswitch":
            self._sim_apply(it, sim)
            default, pairs = it.args
            t1 = self.pop_to_temp("I")
            for _v, lbl in pairs:
                self.referenced.add(lbl)
            self.referenced.add(default)
            E(Switch(t1, list(pairs), default))
            return False
        if op in ("ireturn", "lreturn", "freturn", "dreturn", "areturn"):
            self._sim_apply(it, sim)
            k = {"i": "I", "l": "J", "f": "F", "d": "D", "a": "A"}[op[0]]
            t1 = self.pop_to_temp(k)
            cast = f"({self._ret_ctype()})" if k != "A" else ""
            E(Ret(f"{cast}{t1}"))
            return False
        if op == "return":
            self._sim_apply(it, sim)
            E(Ret(None))
            return False

        if op in ("getstatic", "putstatic"):
            self._sim_apply(it, sim)
            ref = it.args[0]
            fid = self.fid_var(ref, True)
            cvar = self.cls_var(ref.owner)
            c = desc_first_char(ref.descriptor)
            jni = _JNI_NAME.get(c, "Object")
            k = jtype_char(ref.descriptor)
            if op == "getstatic":
                expr = f"(*env)->GetStatic{jni}Field(env, {cvar}, {fid})"
                if c in ("Z", "B", "C", "S"):
                    expr = f"(jint){expr}"
                elif c == "A":
                    expr = f"(jobject){expr}"
                P(k, expr)
            else:
                t1 = self.pop_to_temp(k)
                cast = f"({_JNI_CTYPE[c]})" if c in _JNI_CTYPE else ""
                E(Expr(f"(*env)->SetStatic{jni}Field(env, {cvar}, {fid}, "
                       f"{cast}{t1});"))
            return True
        if op in ("getfield", "putfield"):
            self._sim_apply(it, sim)
            ref = it.args[0]
            fid = self.fid_var(ref, False)
            c = desc_first_char(ref.descriptor)
            helper = "JBC_GetField" if op == "getfield" else "JBC_PutField"
            self.uses_exception = True
            E(Helper(helper, ["env", "&stack", fid, f"'{c}'"],
                     assign_to="exception"))
            for s in self.system_dispatch(idx, ["java/lang/NullPointerException"]):
                E(s)
            return True

        if op in INVOKES:
            return self._emit_invoke(it, idx, sim)

        if op == "newarray":
            self._sim_apply(it, sim)
            self.uses_exception = True
            E(Helper("JBC_NewPrimArray", ["env", "&stack", f"'{it.args[0]}'"],
                     assign_to="exception"))
            for s in self.system_dispatch(
                    idx, ["java/lang/NegativeArraySizeException"]):
                E(s)
            return True
        if op == "anewarray":
            self._sim_apply(it, sim)
            self.uses_exception = True
            E(Helper("JBC_NewObjArray", ["env", "&stack", c_string(it.args[0])],
                     assign_to="exception"))
            for s in self.system_dispatch(
                    idx, ["java/lang/NegativeArraySizeException"]):
                E(s)
            return True
        if op == "multianewarray":
            self._sim_apply(it, sim)
            cls, dims = it.args
            self.uses_exception = True
            E(Helper("JBC_MultiANewArray",
                     ["env", "&stack", c_string(cls), str(dims)],
                     assign_to="exception"))
            for s in self.system_dispatch(
                    idx, ["java/lang/NegativeArraySizeException"]):
                E(s)
            return True
        if op == "arraylength":
            self._sim_apply(it, sim)
            self.uses_exception = True
            E(Helper("JBC_ArrayLength", ["env", "&stack"],
                     assign_to="exception"))
            for s in self.system_dispatch(idx, ["java/lang/NullPointerException"]):
                E(s)
            return True
        if op in _ARRLOAD:
            self._sim_apply(it, sim)
            self.uses_exception = True
            E(Helper("JBC_ArrLoad", ["env", "&stack", f"'{_ARRLOAD[op]}'"],
                     assign_to="exception"))
            for s in self.system_dispatch(
                    idx, ["java/lang/NullPointerException",
                          "java/lang/ArrayIndexOutOfBoundsException"]):
                E(s)
            return True
        if op in _ARRSTORE:
            self._sim_apply(it, sim)
            self.uses_exception = True
            E(Helper("JBC_ArrStore", ["env", "&stack", f"'{_ARRSTORE[op]}'"],
                     assign_to="exception"))
            for s in self.system_dispatch(
                    idx, ["java/lang/NullPointerException",
                          "java/lang/ArrayIndexOutOfBoundsException"]):
                E(s)
            return True

        if op == "athrow":
            self._sim_apply(it, sim)
            t1 = self.pop_to_temp("A")
            for s in self.athrow_stmts(idx, t1):
                E(s)
            return False
        if op == "checkcast":
            self._sim_apply(it, sim)
            self.uses_exception = True
            E(Helper("JBC_CheckCast", ["env", "&stack", c_string(it.args[0])],
                     assign_to="exception"))
            for s in self.system_dispatch(idx, ["java/lang/ClassCastException"]):
                E(s)
            return True
        if op == "instanceof":
            self._sim_apply(it, sim)
            t1 = self.pop_to_temp("A")
            P("I", f"JBC_RefInstanceOf(env, {t1}, {c_string(it.args[0])})")
            return True

        raise UnsupportedOpcode(f"cannot translate opcode {op}")

    def _ret_ctype(self) -> str:
        rt = self.sig.return_type
        if rt is None:
            return "void"
        return _JNI_CTYPE.get(desc_first_char(rt.render()), "jobject")

    def _emit_shuffle(self, it: Instr, sim: List[object]) -> bool:
        kinds = tuple("A" if isinstance(x, _Placeholder) else x for x in sim)
        eff = stack_effect(it, None, kinds)
        n = len(eff.pops)
        if any(isinstance(x, _Placeholder) for x in sim[len(sim) - n:]):
            raise UnsupportedOpcode(f"{it.op} touches an uninitialized object")
        del sim[len(sim) - n:]
        sim.extend(eff.pushes)
        # pop the taken values into temps (top first), then re-push per the
        # result order computed from the op
        from .interp import _shuffle

        class _V:
            def __init__(self, kind, name):
                self.kind = kind
                self.name = name
        temps = []
        for k in reversed(eff.pops):
            temps.insert(0, _V(k, self.pop_to_temp(k)))
        for v in _shuffle(it.op, temps):
            self.push(v.kind, v.name)
        return True

    def _emit_new_fusion(self, it: Instr, idx: int, sim: List[object],
                         nargs: int) -> bool:
        ref: MemberRef = it.args[0]
        self.site += 1
        s = self.site
        copies = 0
        pos = len(sim) - nargs - 1
        uid = sim[pos].uid
        cls = sim[pos].cls
        while pos >= 0 and isinstance(sim[pos], _Placeholder) \
                and sim[pos].uid == uid:
            copies += 1
            pos -= 1
        if copies > 2:
            raise UnsupportedOpcode("more than two copies of a NEW result")
        par = self._pop_args(nargs, s)
        cvar = self.cls_var(cls)
        mid = self.mid_var(MemberRef(cls, "<init>", ref.descriptor), False)
        obj = f"obj{s}"
        self.emit(Decl(
            f"jobject {obj} = (*env)->NewObjectA(env, {cvar}, {mid}, {par});"))
        for st in self.forwarded_check(idx):
            self.emit(st)
        # drop args + placeholders from the simulated stack
        del sim[len(sim) - nargs - copies:]
        if copies == 2:
            self.push("A", obj)
            sim.append("A")
        return True

    def _pop_args(self, nargs: int, s: int) -> str:
        if nargs == 0:
            return "NULL"
        par = f"par{s}"
        self.emit(Decl(f"jvalue {par}[{nargs}];"))
        for i in range(nargs - 1, -1, -1):
            self.emit(Pop("V", f"{par}[{i}]"))
        return par

    def _emit_invoke(self, it: Instr, idx: int, sim: List[object]) -> bool:
        ref: MemberRef = it.args[0]
        op = it.op
        self._sim_apply(it, sim)
        sig = parse_descriptor(ref.descriptor)
        self.site += 1
        s = self.site
        par = self._pop_args(len(sig.param_types), s)
        is_static = op == "invokestatic"
        mid = self.mid_var(ref, is_static)
        if is_static:
            target = None
        else:
            target = f"target{s}"
            self.emit(Pop("A", target, declare="jobject"))
        rc = desc_first_char(sig.return_type.render()) if sig.return_type else "V"
        jni = _JNI_NAME.get(rc, "Object" if rc == "A" else "Void")
        if op == "invokestatic":
            cvar = self.cls_var(ref.owner)
            call = f"(*env)->CallStatic{jni}MethodA(env, {cvar}, {mid}, {par})"
        elif op == "invokespecial":
            cvar = self.cls_var(ref.owner)
            call = (f"(*env)->CallNonvirtual{jni}MethodA(env, {target}, "
                    f"{cvar}, {mid}, {par})")
        else:
            call = f"(*env)->Call{jni}MethodA(env, {target}, {mid}, {par})"
        rvar = None
        if rc == "V":
            self.emit(Expr(call + ";"))
        else:
            k = jtype_char(sig.return_type.render())
            rvar = f"r{s}"
            cast = f"({_KIND_CTYPE[k]})" if rc in ("Z", "B", "C", "S") else ""
            self.emit(Decl(f"{_KIND_CTYPE[k]} {rvar} = {cast}{call};"))
        for st in self.forwarded_check(idx):
            self.emit(st)
        if rvar is not None:
            self.push(jtype_char(sig.return_type.render()), rvar)
        return True


def translate_method(method: MethodModel, model: Optional[ClassModel] = None,
                     cfg: Optional[TranslationConfig] = None) -> CFunction:
    return _MethodTranslator(method, model, cfg or TranslationConfig()).translate()


def translate_forwarded_exception_check(ctx: "_MethodTranslator",
                                        call_site: int) -> List[CStmt]:
    return ctx.forwarded_check(call_site)


def translate_athrow(ctx: "_MethodTranslator", site: int,
                     obj_expr: str) -> List[CStmt]:
    return ctx.athrow_stmts(site, obj_expr)


def translate_instruction(instr: Instr, ctx: "_MethodTranslator") -> List[CStmt]:
    """Statements for a single instruction given a live translator context."""
    mark = len(ctx.body)
    ctx.translate_instruction(instr, 0, list())
    out = ctx.body[mark:]
    del ctx.body[mark:]
    return out


# ---------------------------------------------------------------------------
# rendering


_PUSH_FN = {"I": "PushI", "J": "PushJ", "F": "PushF", "D": "PushD",
            "A": "PushA", "V": "PushV"}
_POP_FN = {"I": "PopI", "J": "PopJ", "F": "PopF", "D": "PopD",
           "A": "PopA", "V": "PopV"}


def render_stmt(s: CStmt, indent: int = 1) -> List[str]:
    pad = "    " * indent
    if isinstance(s, Push):
        return [f"{pad}{_PUSH_FN[s.kind]}(&stack, {s.expr});"]
    if isinstance(s, Pop):
        lhs = f"{s.declare} {s.target}" if s.declare else s.target
        return [f"{pad}{lhs} = {_POP_FN[s.kind]}(&stack);"]
    if isinstance(s, (Expr, Decl)):
        return [f"{pad}{s.text}"]
    if isinstance(s, CLabel):
        # trailing ; keeps the label legal before a declaration (pre-C23)
        return [f"{s.name}:;"]
    if isinstance(s, Goto):
        return [f"{pad}goto {s.name};"]
    if isinstance(s, If):
        lines = [f"{pad}if ({s.cond}) {{"]
        for sub in s.then:
            lines.extend(render_stmt(sub, indent + 1))
        if s.els:
            lines.append(f"{pad}}} else {{")
            for sub in s.els:
                lines.extend(render_stmt(sub, indent + 1))
        lines.append(f"{pad}}}")
        return lines
    if isinstance(s, Switch):
        lines = [f"{pad}switch ({s.expr}) {{"]
        for val, lbl in s.cases:
            lines.append(f"{pad}case {c_int_literal(val)}: goto {lbl};")
        lines.append(f"{pad}default: goto {s.default};")
        lines.append(f"{pad}}}")
        return lines
    if isinstance(s, Ret):
        return [f"{pad}return{' ' + s.expr if s.expr else ''};"]
    if isinstance(s, Helper):
        call = f"{s.name}({', '.join(s.args)});"
        if s.assign_to:
            call = f"{s.assign_to} = {call}"
        return [f"{pad}{call}"]
    raise Jbc2cError(f"cannot render {s!r}")


def render_function(fn: CFunction) -> str:
    params = ", ".join(f"{t}{'' if t.endswith('*') else ' '}{n}"
                       for t, n in fn.params)
    lines = [f"JNIEXPORT {fn.return_ctype} JNICALL",
             f"{fn.name}({params}) {{"]
    for s in fn.body:
        lines.extend(render_stmt(s))
    lines.append("}")
    return "\n".join(lines)


def render_c_unit(functions: List[CFunction], cfg=None) -> CSourceUnit:
    names = []
    for fn in functions:
        if fn.name in names:
            raise DuplicateFunctionName(fn.name)
        names.append(fn.name)
    parts = ['#include "jbcrt.h"', ""]
    for fn in functions:
        parts.append(render_function(fn))
        parts.append("")
    return CSourceUnit("\n".join(parts), names)
