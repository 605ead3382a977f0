import struct

import pytest
from hypothesis import given, strategies as st

from corpus import build_corpus
from jbc2c.builder import STATIC, add_method, make_class, push_int
from jbc2c.classfile import (BadMagic, Code, ConstantPool, Reader, TryRegion,
                             TruncatedInput, UnresolvablePoolIndex, Writer,
                             assemble, decode_mutf8, disassemble, emit_class,
                             encode_mutf8, parse_class)
from jbc2c.opcodes import Const, Instr, Label


# ---- modified UTF-8 ----

def test_mutf8_ascii():
    assert encode_mutf8("abc") == b"abc"
    assert decode_mutf8(b"abc") == "abc"


def test_mutf8_embedded_nul_two_bytes():
    # the JVM encodes U+0000 as C0 80, never as a raw zero byte
    assert encode_mutf8("\x00") == b"\xc0\x80"
    assert decode_mutf8(b"\xc0\x80") == "\x00"


def test_mutf8_supplementary_surrogate_pair():
    enc = encode_mutf8("\U0001F600")
    assert len(enc) == 6
    assert decode_mutf8(enc) == "\U0001F600"


@given(st.text(max_size=60))
def test_mutf8_round_trip(s):
    assert decode_mutf8(encode_mutf8(s)) == s


# ---- constant pool ----

def test_pool_interning_dedupes():
    pool = ConstantPool()
    a = pool.add_utf8("hello")
    b = pool.add_utf8("hello")
    assert a == b


def test_pool_long_takes_two_slots():
    pool = ConstantPool()
    i = pool.add_const(Const("long", 1))
    j = pool.add_utf8("after")
    assert j == i + 2


def test_pool_bad_index_rejected():
    pool = ConstantPool()
    with pytest.raises(UnresolvablePoolIndex):
        pool.get(42)


# ---- parse/emit ----

def test_bad_magic():
    with pytest.raises(BadMagic):
        parse_class(b"\x00\x00\x00\x00" + b"\x00" * 60)


def test_truncated():
    m = make_class("T")
    raw = emit_class(m)
    with pytest.raises(TruncatedInput):
        parse_class(raw[:len(raw) // 2])


def test_round_trip_whole_corpus():
    for name, model in build_corpus().items():
        raw = emit_class(model)
        assert emit_class(parse_class(raw)) == raw, name


def test_parse_recovers_structure():
    model = build_corpus()["Calculator"]
    back = parse_class(emit_class(model))
    assert back.class_name == "Calculator"
    assert back.super_name == "java/lang/Object"
    m = back.method("sum", "(II)I")
    assert m is not None
    assert m.code.max_stack == 2
    assert "Obfuscate" in m.annotations


def test_try_regions_survive():
    model = build_corpus()["Divider"]
    back = parse_class(emit_class(model))
    code = back.method("div", "(II)I").code
    assert len(code.try_regions) == 1
    assert code.try_regions[0].catch_type == "java/lang/ArithmeticException"


def test_unmodified_method_reemitted_verbatim():
    raw = emit_class(build_corpus()["Plain"])
    model = parse_class(raw)
    # touching nothing keeps the original bytes
    assert emit_class(model) == raw


# ---- assemble/disassemble ----

def _asm_roundtrip(items, pool=None):
    pool = pool or ConstantPool()
    code, label_at = assemble(items, pool)
    return disassemble(code, pool), code


def test_assemble_uses_short_const_forms():
    pool = ConstantPool()
    code, _ = assemble([Instr("iconst", (-1,)), Instr("iconst", (5,)),
                        Instr("return", ())], pool)
    assert code == bytes([0x02, 0x08, 0xB1])


def test_assemble_uses_short_local_forms():
    pool = ConstantPool()
    code, _ = assemble([Instr("iload", (0,)), Instr("iload", (3,)),
                        Instr("iload", (4,)), Instr("return", ())], pool)
    assert code == bytes([0x1A, 0x1D, 0x15, 0x04, 0xB1])


def test_wide_local_index():
    pool = ConstantPool()
    code, _ = assemble([Instr("iload", (300,)), Instr("return", ())], pool)
    assert code[0] == 0xC4  # wide prefix
    assert struct.unpack(">H", code[2:4])[0] == 300


def test_disassemble_labels_are_offsets():
    items = [Instr("iload", (0,)), Instr("ifeq", ("Lz",)),
             Instr("iconst", (1,)), Instr("ireturn", ()),
             Label("Lz"), Instr("iconst", (0,)), Instr("ireturn", ())]
    back, _ = _asm_roundtrip(items)
    labels = [x.name for x in back if isinstance(x, Label)]
    assert labels == ["L6"]
    branch = next(x for x in back if isinstance(x, Instr) and x.op == "ifeq")
    assert branch.args == ("L6",)


def test_tableswitch_round_trips():
    items = [Instr("iload", (0,)),
             Instr("tableswitch", ("Ld", 1, 2, ("La", "Lb"))),
             Label("La"), Instr("iconst", (1,)), Instr("ireturn", ()),
             Label("Lb"), Instr("iconst", (2,)), Instr("ireturn", ()),
             Label("Ld"), Instr("iconst", (0,)), Instr("ireturn", ())]
    back, code = _asm_roundtrip(items)
    sw = next(x for x in back if isinstance(x, Instr) and x.op == "tableswitch")
    default, low, high, targets = sw.args
    assert (low, high) == (1, 2)
    assert len(targets) == 2
    # reassembling the disassembly reproduces identical bytes
    pool = ConstantPool()
    code2, _ = assemble(back, pool)
    assert code2 == code


@given(st.lists(st.integers(-(1 << 31), (1 << 31) - 1), min_size=1,
                max_size=8))
def test_int_constants_round_trip(values):
    items = []
    for v in values:
        items.append(push_int(v))
        items.append(Instr("pop", ()))
    items.append(Instr("return", ()))
    pool = ConstantPool()
    code, _ = assemble(items, pool)
    back = disassemble(code, pool)
    got = []
    for it in back:
        if not isinstance(it, Instr):
            continue
        if it.op == "iconst" or it.op == "bipush" or it.op == "sipush":
            got.append(it.args[0])
        elif it.op == "ldc":
            got.append(it.args[0].value)
    assert got == values


def test_ldc_wide_index_when_pool_grows():
    pool = ConstantPool()
    for i in range(300):
        pool.add_utf8(f"pad{i}")
    items = [Instr("ldc", (Const("int", 987654),)), Instr("pop", ()),
             Instr("return", ())]
    code, _ = assemble(items, pool)
    assert code[0] == 0x13  # ldc_w
    back = disassemble(code, pool)
    assert back[0].args[0].value == 987654
