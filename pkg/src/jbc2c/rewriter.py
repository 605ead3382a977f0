"""Class surgery: select methods, strip bodies, flag native, inject the
shared-library loader, and compute JNI-mangled C function names."""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from . import Jbc2cError
from .classfile import (ACC_NATIVE, ACC_STATIC, AnnotationsAttr, ClassModel,
                        Code, MethodModel, TryRegion)
from .opcodes import Const, Instr, MemberRef

LOADLIBRARY = MemberRef("java/lang/System", "loadLibrary",
                        "(Ljava/lang/String;)V")


class AlreadyNative(Jbc2cError):
    pass


class AbstractMethod(Jbc2cError):
    pass


@dataclass
class SelectionConfig:
    annotation_name: str = "Obfuscate"
    explicit_methods: List[Tuple[str, str, str]] = field(default_factory=list)
    library_name: str = "jbc"

    def normalized_annotation(self) -> str:
        return self.annotation_name.replace(".", "/")


@dataclass
class PlanEntry:
    class_name: str
    method_name: str
    descriptor: str
    mangled_name: str
    overloaded: bool


@dataclass
class RewritePlan:
    entries: List[PlanEntry] = field(default_factory=list)


def find_annotated_methods(model: ClassModel,
                           cfg: SelectionConfig) -> List[Tuple[str, str]]:
    """(name, descriptor) of methods selected by annotation or explicit list,
    in class-file order."""
    anno = cfg.normalized_annotation()
    explicit = {(n, d) for (c, n, d) in cfg.explicit_methods
                if c == model.class_name}
    out = []
    for m in model.methods:
        if anno in m.annotations or (m.name, m.descriptor) in explicit:
            out.append((m.name, m.descriptor))
    return out


def _strip_annotation(method: MethodModel, anno_name: str):
    desc = f"L{anno_name};"
    kept_attrs = []
    for a in method.attributes:
        if isinstance(a, AnnotationsAttr):
            remaining = [(d, raw) for d, raw in a.annotations if d != desc]
            if remaining:
                kept_attrs.append(AnnotationsAttr(remaining))
        else:
            kept_attrs.append(a)
    method.attributes = kept_attrs


def nativize_method(model: ClassModel, method_id: Tuple[str, str],
                    annotation_name: Optional[str] = "Obfuscate") -> ClassModel:
    """Strip the body of one method and flag it native (in place)."""
    name, desc = method_id
    m = model.method(name, desc)
    if m is None:
        raise Jbc2cError(f"no such method {name}{desc} in {model.class_name}")
    if m.is_native:
        raise AlreadyNative(f"{model.class_name}.{name}{desc} is already native")
    if m.is_abstract or m.code is None:
        raise AbstractMethod(f"{model.class_name}.{name}{desc} has no body")
    m.attributes = [a for a in m.attributes if not isinstance(a, Code)]
    m.access_flags |= ACC_NATIVE
    if annotation_name:
        _strip_annotation(m, annotation_name.replace(".", "/"))
    return model


def _loader_prologue(library_name: str) -> List[Instr]:
    return [Instr("ldc", (Const("string", library_name),)),
            Instr("invokestatic", (LOADLIBRARY,))]


def _has_prologue(code: Code, library_name: str) -> bool:
    ins = code.instructions()
    return (len(ins) >= 2
            and ins[0].op == "ldc"
            and ins[0].args[0].kind == "string"
            and ins[0].args[0].value == library_name
            and ins[1].op == "invokestatic"
            and ins[1].args[0] == LOADLIBRARY)


def inject_library_loader(model: ClassModel, library_name: str) -> ClassModel:
    """Ensure <clinit> starts with LDC <lib>; INVOKESTATIC loadLibrary.

    The name passed to loadLibrary is the platform-neutral base name, not
    a file name; idempotent.
    """
    clinit = model.method("<clinit>", "()V")
    if clinit is None:
        items = _loader_prologue(library_name) + [Instr("return", ())]
        code = Code(max_stack=1, max_locals=0, items=items)
        model.methods.append(
            MethodModel(ACC_STATIC, "<clinit>", "()V", [code]))
        return model
    code = clinit.code
    if code is None:
        raise Jbc2cError("<clinit> without Code attribute")
    if _has_prologue(code, library_name):
        return model
    code.items = _loader_prologue(library_name) + list(code.items)
    code.max_stack = max(code.max_stack, 1)
    code.raw = None  # body changed; must be reassembled
    return model


def jni_escape(text: str) -> str:
    out = []
    for ch in text:
        if ch == "/":
            out.append("_")
        elif ch == "_":
            out.append("_1")
        elif ch == ";":
            out.append("_2")
        elif ch == "[":
            out.append("_3")
        elif ch.isascii() and (ch.isalnum()):
            out.append(ch)
        else:
            out.append(f"_0{ord(ch):04x}")
    return "".join(out)


def jni_mangle(class_name: str, method_name: str, descriptor: str,
               overloaded: bool = False) -> str:
    """JNI-standard C function name for a native method."""
    name = f"Java_{jni_escape(class_name)}_{jni_escape(method_name)}"
    if overloaded:
        args = descriptor[descriptor.index("(") + 1:descriptor.index(")")]
        name += "__" + jni_escape(args)
    return name


def build_rewrite_plan(selections: List[Tuple[ClassModel, List[Tuple[str, str]]]]
                       ) -> RewritePlan:
    """Assign mangled names; colliding (class, name) pairs all get the
    overloaded long form."""
    counts = {}
    for model, ids in selections:
        for name, _desc in ids:
            counts[(model.class_name, name)] = counts.get(
                (model.class_name, name), 0) + 1
    plan = RewritePlan()
    for model, ids in selections:
        for name, desc in ids:
            overloaded = counts[(model.class_name, name)] > 1
            plan.entries.append(PlanEntry(
                model.class_name, name, desc,
                jni_mangle(model.class_name, name, desc, overloaded),
                overloaded))
    seen = {}
    for e in plan.entries:
        if e.mangled_name in seen:
            raise Jbc2cError(f"mangled name collision: {e.mangled_name}")
        seen[e.mangled_name] = e
    return plan
