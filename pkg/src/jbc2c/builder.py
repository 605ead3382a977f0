"""Programmatic construction of class models.

The test corpus and the differential generator build classes through
this instead of invoking a Java toolchain.
"""

from typing import List, Optional, Tuple

from .classfile import (ACC_PUBLIC, ACC_STATIC, ACC_SUPER, AnnotationsAttr,
                        ClassModel, Code, ConstantPool, FieldModel, MethodModel,
                        TryRegion, Writer, encode_mutf8)
from .opcodes import CodeItem, Const, Instr


def make_class(name: str, super_name: str = "java/lang/Object",
               version: Tuple[int, int] = (52, 0),
               access: int = ACC_PUBLIC | ACC_SUPER) -> ClassModel:
    pool = ConstantPool()
    model = ClassModel(version, pool, access, name, super_name, [], [], [], [])
    pool.add_class(name)
    if super_name:
        pool.add_class(super_name)
    return model


def annotations_attr(pool: ConstantPool, type_names: List[str]) -> AnnotationsAttr:
    annos = []
    for tn in type_names:
        desc = f"L{tn};"
        idx = pool.add_utf8(desc)
        w = Writer()
        w.u2(idx)
        w.u2(0)  # no element/value pairs
        annos.append((desc, w.bytes()))
    return AnnotationsAttr(annos)


def add_method(model: ClassModel, name: str, descriptor: str,
               items: List[CodeItem], max_stack: int, max_locals: int,
               access: int = ACC_PUBLIC,
               try_regions: Optional[List[TryRegion]] = None,
               annotations: Optional[List[str]] = None) -> MethodModel:
    attrs = []
    if annotations:
        attrs.append(annotations_attr(model.constant_pool, annotations))
    attrs.append(Code(max_stack, max_locals, list(items),
                      list(try_regions or []), [], raw=None))
    m = MethodModel(access, name, descriptor, attrs)
    model.methods.append(m)
    return m


def add_field(model: ClassModel, name: str, descriptor: str,
              access: int = ACC_PUBLIC) -> FieldModel:
    f = FieldModel(access, name, descriptor, [])
    model.fields.append(f)
    return f


def push_int(value: int) -> Instr:
    """Smallest canonical instruction pushing an int constant."""
    if -1 <= value <= 5:
        return Instr("iconst", (value,))
    if -128 <= value <= 127:
        return Instr("bipush", (value,))
    if -32768 <= value <= 32767:
        return Instr("sipush", (value,))
    return Instr("ldc", (Const("int", value),))


def push_long(value: int) -> Instr:
    if value in (0, 1):
        return Instr("lconst", (value,))
    return Instr("ldc", (Const("long", value),))


def push_float_bits(bits: int) -> Instr:
    return Instr("ldc", (Const("float", bits),))


def push_double_bits(bits: int) -> Instr:
    return Instr("ldc", (Const("double", bits),))


STATIC = ACC_PUBLIC | ACC_STATIC
