"""Class file parsing and re-serialization.

Covers the subset the toolchain needs: constant pool, access flags,
fields, methods with Code attributes (exception tables included) and
runtime-visible annotations.  Everything else is carried as an opaque
byte blob and re-emitted verbatim, so emit_class(parse_class(f)) == f
for files whose code uses canonical instruction encodings.
"""

import struct
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from . import Jbc2cError
from .opcodes import (BY_OPCODE, CodeItem, Const, F_BR2, F_BR4, F_CP1, F_CP2,
                      F_IFACE, F_IINC, F_LOCAL, F_MEMBER, F_MULTI, F_NEWARRAY,
                      F_NONE, F_S1, F_S2, F_TABLESW, F_LOOKUPSW, F_TYPE, Instr,
                      Label, MemberRef, NEWARRAY_CODES, NEWARRAY_TYPES, OPCODES,
                      SHORT_CONSTS, SHORT_LOCALS)

MAGIC = 0xCAFEBABE

# access flags
ACC_PUBLIC = 0x0001
ACC_PRIVATE = 0x0002
ACC_PROTECTED = 0x0004
ACC_STATIC = 0x0008
ACC_FINAL = 0x0010
ACC_SUPER = 0x0020
ACC_NATIVE = 0x0100
ACC_ABSTRACT = 0x0400

# constant pool tags
TAG_UTF8 = 1
TAG_INTEGER = 3
TAG_FLOAT = 4
TAG_LONG = 5
TAG_DOUBLE = 6
TAG_CLASS = 7
TAG_STRING = 8
TAG_FIELDREF = 9
TAG_METHODREF = 10
TAG_IFACEMETHODREF = 11
TAG_NAMEANDTYPE = 12
TAG_METHODHANDLE = 15
TAG_METHODTYPE = 16
TAG_INVOKEDYNAMIC = 18

CATCH_ALL = None  # TryRegion.catch_type value for type-less (finally) handlers


class ClassFileError(Jbc2cError):
    pass


class BadMagic(ClassFileError):
    pass


class TruncatedInput(ClassFileError):
    pass


class UnresolvablePoolIndex(ClassFileError):
    pass


class PoolOverflow(ClassFileError):
    pass


def encode_mutf8(s: str) -> bytes:
    out = bytearray()
    for ch in s:
        cp = ord(ch)
        if cp == 0:
            out += b"\xc0\x80"
        elif cp < 0x80:
            out.append(cp)
        elif cp < 0x800:
            out.append(0xC0 | (cp >> 6))
            out.append(0x80 | (cp & 0x3F))
        elif cp < 0x10000:
            out.append(0xE0 | (cp >> 12))
            out.append(0x80 | ((cp >> 6) & 0x3F))
            out.append(0x80 | (cp & 0x3F))
        else:
            # encode as a surrogate pair, three bytes each
            cp -= 0x10000
            for sur in (0xD800 | (cp >> 10), 0xDC00 | (cp & 0x3FF)):
                out.append(0xE0 | (sur >> 12))
                out.append(0x80 | ((sur >> 6) & 0x3F))
                out.append(0x80 | (sur & 0x3F))
    return bytes(out)


def decode_mutf8(b: bytes) -> str:
    chars = []
    i = 0
    n = len(b)
    while i < n:
        c = b[i]
        if c < 0x80:
            chars.append(chr(c))
            i += 1
        elif (c & 0xE0) == 0xC0:
            chars.append(chr(((c & 0x1F) << 6) | (b[i + 1] & 0x3F)))
            i += 2
        else:
            chars.append(chr(((c & 0x0F) << 12) | ((b[i + 1] & 0x3F) << 6)
                             | (b[i + 2] & 0x3F)))
            i += 3
    # fold surrogate pairs back together
    out = []
    j = 0
    while j < len(chars):
        cp = ord(chars[j])
        if 0xD800 <= cp <= 0xDBFF and j + 1 < len(chars) \
                and 0xDC00 <= ord(chars[j + 1]) <= 0xDFFF:
            out.append(chr(0x10000 + ((cp - 0xD800) << 10)
                           + (ord(chars[j + 1]) - 0xDC00)))
            j += 2
        else:
            out.append(chars[j])
            j += 1
    return "".join(out)


class Reader:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def _take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedInput(f"need {n} bytes at offset {self.pos}, "
                                 f"have {len(self.data) - self.pos}")
        b = self.data[self.pos:self.pos + n]
        self.pos += n
        return b

    def u1(self):
        return self._take(1)[0]

    def u2(self):
        return struct.unpack(">H", self._take(2))[0]

    def u4(self):
        return struct.unpack(">I", self._take(4))[0]

    def s1(self):
        return struct.unpack(">b", self._take(1))[0]

    def s2(self):
        return struct.unpack(">h", self._take(2))[0]

    def s4(self):
        return struct.unpack(">i", self._take(4))[0]

    def raw(self, n):
        return self._take(n)

    def eof(self):
        return self.pos >= len(self.data)


class Writer:
    def __init__(self):
        self.buf = bytearray()

    def u1(self, v):
        self.buf.append(v & 0xFF)

    def u2(self, v):
        self.buf += struct.pack(">H", v)

    def u4(self, v):
        self.buf += struct.pack(">I", v)

    def s1(self, v):
        self.buf += struct.pack(">b", v)

    def s2(self, v):
        self.buf += struct.pack(">h", v)

    def s4(self, v):
        self.buf += struct.pack(">i", v)

    def raw(self, b):
        self.buf += b

    def bytes(self):
        return bytes(self.buf)


@dataclass
class CpEntry:
    tag: int
    value: object  # tag-dependent payload, see parse/serialize


class ConstantPool:
    """Indexed pool; slot 0 and the slot after each Long/Double are None."""

    def __init__(self):
        self.entries: List[Optional[CpEntry]] = [None]

    def __len__(self):
        return len(self.entries)

    def get(self, index: int, expect_tag: Optional[int] = None) -> CpEntry:
        if index <= 0 or index >= len(self.entries) or self.entries[index] is None:
            raise UnresolvablePoolIndex(f"constant pool index {index}")
        e = self.entries[index]
        if expect_tag is not None and e.tag != expect_tag:
            raise UnresolvablePoolIndex(
                f"pool index {index} has tag {e.tag}, expected {expect_tag}")
        return e

    def utf8(self, index: int) -> str:
        return decode_mutf8(self.get(index, TAG_UTF8).value)

    def class_name(self, index: int) -> str:
        return self.utf8(self.get(index, TAG_CLASS).value)

    def member(self, index: int) -> MemberRef:
        e = self.get(index)
        if e.tag not in (TAG_FIELDREF, TAG_METHODREF, TAG_IFACEMETHODREF):
            raise UnresolvablePoolIndex(f"pool index {index} is not a member ref")
        cls_idx, nat_idx = e.value
        owner = self.class_name(cls_idx)
        name_idx, desc_idx = self.get(nat_idx, TAG_NAMEANDTYPE).value
        return MemberRef(owner, self.utf8(name_idx), self.utf8(desc_idx))

    def loadable(self, index: int) -> Const:
        e = self.get(index)
        if e.tag == TAG_INTEGER:
            return Const("int", e.value)
        if e.tag == TAG_FLOAT:
            return Const("float", e.value)
        if e.tag == TAG_LONG:
            return Const("long", e.value)
        if e.tag == TAG_DOUBLE:
            return Const("double", e.value)
        if e.tag == TAG_STRING:
            return Const("string", self.utf8(e.value))
        if e.tag == TAG_CLASS:
            return Const("class", self.utf8(e.value))
        raise UnresolvablePoolIndex(f"pool index {index} is not loadable")

    # -- interning (appends only; lookup hits preserve original indices) --

    def _find(self, tag, value):
        for i, e in enumerate(self.entries):
            if e is not None and e.tag == tag and e.value == value:
                return i
        return None

    def _add(self, tag, value) -> int:
        idx = self._find(tag, value)
        if idx is not None:
            return idx
        idx = len(self.entries)
        width = 2 if tag in (TAG_LONG, TAG_DOUBLE) else 1
        if idx + width > 0xFFFF:
            raise PoolOverflow(f"constant pool exceeds 65534 slots")
        self.entries.append(CpEntry(tag, value))
        if width == 2:
            self.entries.append(None)
        return idx

    def add_utf8(self, s: str) -> int:
        return self._add(TAG_UTF8, encode_mutf8(s))

    def add_class(self, name: str) -> int:
        return self._add(TAG_CLASS, self.add_utf8(name))

    def add_string(self, s: str) -> int:
        return self._add(TAG_STRING, self.add_utf8(s))

    def add_nat(self, name: str, desc: str) -> int:
        return self._add(TAG_NAMEANDTYPE, (self.add_utf8(name), self.add_utf8(desc)))

    def add_member(self, tag: int, ref: MemberRef) -> int:
        return self._add(tag, (self.add_class(ref.owner),
                               self.add_nat(ref.name, ref.descriptor)))

    def add_const(self, c: Const) -> int:
        if c.kind == "int":
            return self._add(TAG_INTEGER, c.value)
        if c.kind == "float":
            return self._add(TAG_FLOAT, c.value)
        if c.kind == "long":
            return self._add(TAG_LONG, c.value)
        if c.kind == "double":
            return self._add(TAG_DOUBLE, c.value)
        if c.kind == "string":
            return self.add_string(c.value)
        if c.kind == "class":
            return self.add_class(c.value)
        raise Jbc2cError(f"unknown constant kind {c.kind}")

    # -- binary io --

    @classmethod
    def parse(cls, r: Reader) -> "ConstantPool":
        pool = cls()
        count = r.u2()
        while len(pool.entries) < count:
            tag = r.u1()
            if tag == TAG_UTF8:
                n = r.u2()
                pool.entries.append(CpEntry(tag, r.raw(n)))
            elif tag == TAG_INTEGER:
                pool.entries.append(CpEntry(tag, r.s4()))
            elif tag == TAG_FLOAT:
                pool.entries.append(CpEntry(tag, r.u4()))  # raw bit pattern
            elif tag == TAG_LONG:
                pool.entries.append(CpEntry(tag, struct.unpack(">q", r.raw(8))[0]))
                pool.entries.append(None)
            elif tag == TAG_DOUBLE:
                pool.entries.append(CpEntry(tag, struct.unpack(">Q", r.raw(8))[0]))
                pool.entries.append(None)
            elif tag in (TAG_CLASS, TAG_STRING, TAG_METHODTYPE):
                pool.entries.append(CpEntry(tag, r.u2()))
            elif tag in (TAG_FIELDREF, TAG_METHODREF, TAG_IFACEMETHODREF,
                         TAG_NAMEANDTYPE, TAG_INVOKEDYNAMIC):
                pool.entries.append(CpEntry(tag, (r.u2(), r.u2())))
            elif tag == TAG_METHODHANDLE:
                pool.entries.append(CpEntry(tag, (r.u1(), r.u2())))
            else:
                raise ClassFileError(f"unknown constant pool tag {tag}")
        return pool

    def serialize(self, w: Writer):
        if len(self.entries) > 0xFFFF:
            raise PoolOverflow("constant pool exceeds 65534 slots")
        w.u2(len(self.entries))
        for e in self.entries:
            if e is None:
                continue
            w.u1(e.tag)
            if e.tag == TAG_UTF8:
                w.u2(len(e.value))
                w.raw(e.value)
            elif e.tag == TAG_INTEGER:
                w.s4(e.value)
            elif e.tag == TAG_FLOAT:
                w.u4(e.value)
            elif e.tag == TAG_LONG:
                w.raw(struct.pack(">q", e.value))
            elif e.tag == TAG_DOUBLE:
                w.raw(struct.pack(">Q", e.value))
            elif e.tag in (TAG_CLASS, TAG_STRING, TAG_METHODTYPE):
                w.u2(e.value)
            elif e.tag == TAG_METHODHANDLE:
                w.u1(e.value[0])
                w.u2(e.value[1])
            else:
                w.u2(e.value[0])
                w.u2(e.value[1])


@dataclass
class Attribute:
    name: str
    payload: bytes


@dataclass
class TryRegion:
    start_label: str
    end_label: str
    handler_label: str
    catch_type: Optional[str]  # internal class name, or CATCH_ALL (None)


@dataclass
class Code:
    max_stack: int
    max_locals: int
    items: List[CodeItem]
    try_regions: List[TryRegion] = field(default_factory=list)
    attrs: List[Attribute] = field(default_factory=list)
    raw: Optional[bytes] = None  # original attribute payload, for verbatim re-emit

    def instructions(self) -> List[Instr]:
        return [it for it in self.items if isinstance(it, Instr)]


@dataclass
class AnnotationsAttr:
    """RuntimeVisibleAnnotations: (type descriptor, raw annotation bytes) pairs."""
    annotations: List[Tuple[str, bytes]]


@dataclass
class FieldModel:
    access_flags: int
    name: str
    descriptor: str
    attributes: List[Attribute] = field(default_factory=list)


MethodAttr = Union[Attribute, Code, AnnotationsAttr]


@dataclass
class MethodModel:
    access_flags: int
    name: str
    descriptor: str
    attributes: List[MethodAttr] = field(default_factory=list)

    @property
    def code(self) -> Optional[Code]:
        for a in self.attributes:
            if isinstance(a, Code):
                return a
        return None

    @property
    def annotations(self) -> List[str]:
        """Annotation type names (internal form, e.g. "Obfuscate")."""
        out = []
        for a in self.attributes:
            if isinstance(a, AnnotationsAttr):
                for desc, _raw in a.annotations:
                    if desc.startswith("L") and desc.endswith(";"):
                        out.append(desc[1:-1])
                    else:
                        out.append(desc)
        return out

    @property
    def is_native(self):
        return bool(self.access_flags & ACC_NATIVE)

    @property
    def is_static(self):
        return bool(self.access_flags & ACC_STATIC)

    @property
    def is_abstract(self):
        return bool(self.access_flags & ACC_ABSTRACT)

    def key(self):
        return (self.name, self.descriptor)


@dataclass
class ClassModel:
    version: Tuple[int, int]  # (major, minor)
    constant_pool: ConstantPool
    access_flags: int
    class_name: str
    super_name: Optional[str]
    interfaces: List[str]
    fields: List[FieldModel]
    methods: List[MethodModel]
    attributes: List[Attribute]

    def method(self, name: str, descriptor: str) -> Optional[MethodModel]:
        for m in self.methods:
            if m.name == name and m.descriptor == descriptor:
                return m
        return None


# ---------------------------------------------------------------------------
# code disassembly

def _read_instruction(r: Reader, pool: ConstantPool, start: int):
    """Decode one instruction; returns an Instr with label names for targets."""
    op = r.u1()
    if op in SHORT_CONSTS:
        mn, v = SHORT_CONSTS[op]
        return Instr(mn, (v,), start)
    if op in SHORT_LOCALS:
        mn, v = SHORT_LOCALS[op]
        return Instr(mn, (v,), start)
    if op == 0xC4:  # wide
        sub = r.u1()
        name, fmt = BY_OPCODE[sub]
        if fmt == F_IINC:
            return Instr("iinc", (r.u2(), r.s2()), start)
        if fmt == F_LOCAL:
            return Instr(name, (r.u2(),), start)
        raise ClassFileError(f"wide prefix on {name}")
    if op not in BY_OPCODE:
        raise ClassFileError(f"unknown opcode 0x{op:02x} at offset {start}")
    name, fmt = BY_OPCODE[op]
    if fmt == F_NONE:
        return Instr(name, (), start)
    if fmt == F_LOCAL:
        return Instr(name, (r.u1(),), start)
    if fmt == F_S1:
        return Instr(name, (r.s1(),), start)
    if fmt == F_S2:
        return Instr(name, (r.s2(),), start)
    if fmt == F_CP1:
        return Instr("ldc", (pool.loadable(r.u1()),), start)
    if fmt == F_CP2:
        return Instr("ldc", (pool.loadable(r.u2()),), start)
    if fmt == F_BR2:
        return Instr(name, (f"L{start + r.s2()}",), start)
    if fmt == F_BR4:
        base = "goto" if name == "goto_w" else "jsr"
        return Instr(base, (f"L{start + r.s4()}",), start)
    if fmt == F_IINC:
        return Instr(name, (r.u1(), r.s1()), start)
    if fmt == F_MEMBER:
        return Instr(name, (pool.member(r.u2()),), start)
    if fmt == F_TYPE:
        return Instr(name, (pool.class_name(r.u2()),), start)
    if fmt == F_NEWARRAY:
        code = r.u1()
        if code not in NEWARRAY_TYPES:
            raise ClassFileError(f"bad newarray type {code}")
        return Instr(name, (NEWARRAY_TYPES[code],), start)
    if fmt == F_MULTI:
        if name == "invokedynamic":
            idx = r.u2()
            r.u2()  # two zero bytes
            return Instr(name, (idx,), start)
        cls = pool.class_name(r.u2())
        dims = r.u1()
        return Instr(name, (cls, dims), start)
    if fmt == F_IFACE:
        ref = pool.member(r.u2())
        r.u1()  # count
        r.u1()  # zero
        return Instr(name, (ref,), start)
    if fmt == F_TABLESW:
        while r.pos % 4:
            r.u1()
        default = f"L{start + r.s4()}"
        low = r.s4()
        high = r.s4()
        targets = tuple(f"L{start + r.s4()}" for _ in range(high - low + 1))
        return Instr(name, (default, low, high, targets), start)
    if fmt == F_LOOKUPSW:
        while r.pos % 4:
            r.u1()
        default = f"L{start + r.s4()}"
        npairs = r.s4()
        pairs = tuple((r.s4(), f"L{start + r.s4()}") for _ in range(npairs))
        return Instr(name, (default, pairs), start)
    raise ClassFileError(f"unhandled format {fmt}")


def branch_targets(instr: Instr) -> List[str]:
    name, fmt = OPCODES.get(instr.op, (None, None))
    if instr.op == "ldc":
        return []
    if fmt in (F_BR2, F_BR4):
        return [instr.args[0]]
    if instr.op == "tableswitch":
        return [instr.args[0]] + list(instr.args[3])
    if instr.op == "lookupswitch":
        return [instr.args[0]] + [lbl for _m, lbl in instr.args[1]]
    return []


def disassemble(code: bytes, pool: ConstantPool,
                extra_offsets: Tuple[int, ...] = ()) -> List[CodeItem]:
    r = Reader(code)
    decoded = []
    while not r.eof():
        start = r.pos
        decoded.append(_read_instruction(r, pool, start))
    label_offsets = set(extra_offsets)
    for ins in decoded:
        for lbl in branch_targets(ins):
            label_offsets.add(int(lbl[1:]))
    items: List[CodeItem] = []
    remaining = set(label_offsets)
    for ins in decoded:
        if ins.offset in remaining:
            items.append(Label(f"L{ins.offset}"))
            remaining.discard(ins.offset)
        items.append(ins)
    if len(code) in remaining:
        items.append(Label(f"L{len(code)}"))
        remaining.discard(len(code))
    if remaining:
        raise ClassFileError(f"branch targets into middle of instructions: {sorted(remaining)}")
    return items


# ---------------------------------------------------------------------------
# code assembly

def _local_size(op: str, idx: int) -> int:
    if idx <= 3 and op != "ret":
        return 1
    return 2 if idx <= 255 else 4  # wide form


def _instr_size(ins: Instr, offset: int, pool: ConstantPool) -> int:
    op = ins.op
    if op in ("iconst", "lconst", "fconst", "dconst"):
        return 1
    if op == "ldc":
        idx = pool.add_const(ins.args[0])
        if ins.args[0].kind in ("long", "double"):
            return 3
        return 2 if idx <= 255 else 3
    _num, fmt = OPCODES[op]
    if fmt == F_NONE:
        return 1
    if fmt == F_LOCAL:
        return _local_size(op, ins.args[0])
    if fmt == F_S1:
        return 2
    if fmt in (F_S2, F_BR2, F_MEMBER, F_TYPE):
        return 3
    if fmt == F_BR4:
        return 5
    if fmt == F_IINC:
        idx, const = ins.args
        return 3 if idx <= 255 and -128 <= const <= 127 else 6
    if fmt == F_NEWARRAY:
        return 2
    if fmt == F_MULTI:
        return 4
    if fmt == F_IFACE:
        return 5
    pad = (4 - ((offset + 1) % 4)) % 4
    if fmt == F_TABLESW:
        return 1 + pad + 12 + 4 * len(ins.args[3])
    if fmt == F_LOOKUPSW:
        return 1 + pad + 8 + 8 * len(ins.args[1])
    raise Jbc2cError(f"cannot size {op}")


_SHORT_CONST_BASE = {"iconst": 0x03, "lconst": 0x09, "fconst": 0x0B, "dconst": 0x0E}
_SHORT_LOCAL_BASE = {"iload": 0x1A, "lload": 0x1E, "fload": 0x22, "dload": 0x26,
                     "aload": 0x2A, "istore": 0x3B, "lstore": 0x3F, "fstore": 0x43,
                     "dstore": 0x47, "astore": 0x4B}


def assemble(items: List[CodeItem], pool: ConstantPool):
    """Encode a code item list; returns (bytes, {label name: offset}).

    Encodings are canonical: short const/load/store forms whenever the
    operand fits, ldc vs ldc_w by pool index, wide only when required.
    """
    offsets = {}
    label_at = {}
    pos = 0
    for it in items:
        if isinstance(it, Label):
            label_at[it.name] = pos
        else:
            offsets[id(it)] = pos
            pos += _instr_size(it, pos, pool)
    code_len = pos

    w = Writer()
    for it in items:
        if isinstance(it, Label):
            continue
        start = offsets[id(it)]
        op = it.op

        def target(lbl):
            if lbl not in label_at:
                raise ClassFileError(f"undefined label {lbl}")
            return label_at[lbl] - start

        if op in _SHORT_CONST_BASE:
            w.u1(_SHORT_CONST_BASE[op] + it.args[0])
            continue
        if op == "ldc":
            const = it.args[0]
            idx = pool.add_const(const)
            if const.kind in ("long", "double"):
                w.u1(0x14)
                w.u2(idx)
            elif idx <= 255:
                w.u1(0x12)
                w.u1(idx)
            else:
                w.u1(0x13)
                w.u2(idx)
            continue
        num, fmt = OPCODES[op]
        if fmt == F_NONE:
            w.u1(num)
        elif fmt == F_LOCAL:
            idx = it.args[0]
            if idx <= 3 and op in _SHORT_LOCAL_BASE:
                w.u1(_SHORT_LOCAL_BASE[op] + idx)
            elif idx <= 255:
                w.u1(num)
                w.u1(idx)
            else:
                w.u1(0xC4)
                w.u1(num)
                w.u2(idx)
        elif fmt == F_S1:
            w.u1(num)
            w.s1(it.args[0])
        elif fmt == F_S2:
            w.u1(num)
            w.s2(it.args[0])
        elif fmt == F_BR2:
            delta = target(it.args[0])
            if not -32768 <= delta <= 32767:
                raise ClassFileError(f"branch offset {delta} out of 16-bit range")
            w.u1(num)
            w.s2(delta)
        elif fmt == F_BR4:
            w.u1(num)
            w.s4(target(it.args[0]))
        elif fmt == F_IINC:
            idx, const = it.args
            if idx <= 255 and -128 <= const <= 127:
                w.u1(num)
                w.u1(idx)
                w.s1(const)
            else:
                w.u1(0xC4)
                w.u1(num)
                w.u2(idx)
                w.s2(const)
        elif fmt == F_MEMBER:
            tag = {"getstatic": TAG_FIELDREF, "putstatic": TAG_FIELDREF,
                   "getfield": TAG_FIELDREF, "putfield": TAG_FIELDREF}.get(
                       op, TAG_METHODREF)
            w.u1(num)
            w.u2(pool.add_member(tag, it.args[0]))
        elif fmt == F_IFACE:
            from .descriptors import parse_descriptor
            ref = it.args[0]
            w.u1(num)
            w.u2(pool.add_member(TAG_IFACEMETHODREF, ref))
            sig = parse_descriptor(ref.descriptor)
            count = 1 + sum(t.width for t in sig.param_types)
            w.u1(count)
            w.u1(0)
        elif fmt == F_TYPE:
            w.u1(num)
            w.u2(pool.add_class(it.args[0]))
        elif fmt == F_NEWARRAY:
            w.u1(num)
            w.u1(NEWARRAY_CODES[it.args[0]])
        elif fmt == F_MULTI:
            w.u1(num)
            w.u2(pool.add_class(it.args[0]))
            w.u1(it.args[1])
        elif fmt == F_TABLESW:
            default, low, high, targets = it.args
            w.u1(num)
            while len(w.buf) % 4:
                w.u1(0)
            w.s4(target(default))
            w.s4(low)
            w.s4(high)
            for lbl in targets:
                w.s4(target(lbl))
        elif fmt == F_LOOKUPSW:
            default, pairs = it.args
            w.u1(num)
            while len(w.buf) % 4:
                w.u1(0)
            w.s4(target(default))
            w.s4(len(pairs))
            for match, lbl in pairs:
                w.s4(match)
                w.s4(target(lbl))
        else:
            raise Jbc2cError(f"cannot assemble {op}")
    assert len(w.buf) == code_len, (len(w.buf), code_len)
    return w.bytes(), label_at


# ---------------------------------------------------------------------------
# attribute parsing

def _skip_element_value(r: Reader):
    tag = chr(r.u1())
    if tag in "BCDFIJSZsc":
        r.u2()
    elif tag == "e":
        r.u2()
        r.u2()
    elif tag == "@":
        _skip_annotation(r)
    elif tag == "[":
        for _ in range(r.u2()):
            _skip_element_value(r)
    else:
        raise ClassFileError(f"bad annotation element tag {tag!r}")


def _skip_annotation(r: Reader):
    r.u2()  # type index
    for _ in range(r.u2()):
        r.u2()  # element name
        _skip_element_value(r)


def _parse_annotations_attr(payload: bytes, pool: ConstantPool) -> AnnotationsAttr:
    r = Reader(payload)
    count = r.u2()
    annos = []
    for _ in range(count):
        start = r.pos
        type_idx = r.u2()
        r.pos = start
        _skip_annotation(r)
        annos.append((pool.utf8(type_idx), payload[start:r.pos]))
    return AnnotationsAttr(annos)


def _parse_code_attr(payload: bytes, pool: ConstantPool) -> Code:
    r = Reader(payload)
    max_stack = r.u2()
    max_locals = r.u2()
    code_len = r.u4()
    code_bytes = r.raw(code_len)
    exc_count = r.u2()
    raw_regions = []
    for _ in range(exc_count):
        raw_regions.append((r.u2(), r.u2(), r.u2(), r.u2()))
    attrs = []
    for _ in range(r.u2()):
        name = pool.utf8(r.u2())
        attrs.append(Attribute(name, r.raw(r.u4())))
    boundary_offsets = tuple(off for reg in raw_regions for off in reg[:3])
    items = disassemble(code_bytes, pool, boundary_offsets)
    regions = []
    for start, end, handler, catch_idx in raw_regions:
        catch = pool.class_name(catch_idx) if catch_idx else CATCH_ALL
        regions.append(TryRegion(f"L{start}", f"L{end}", f"L{handler}", catch))
    return Code(max_stack, max_locals, items, regions, attrs, raw=payload)


def emit_code_attr(code: Code, pool: ConstantPool) -> bytes:
    if code.raw is not None:
        return code.raw
    body, label_at = assemble(code.items, pool)
    w = Writer()
    w.u2(code.max_stack)
    w.u2(code.max_locals)
    w.u4(len(body))
    w.raw(body)
    w.u2(len(code.try_regions))
    for reg in code.try_regions:
        for lbl in (reg.start_label, reg.end_label, reg.handler_label):
            if lbl not in label_at:
                raise ClassFileError(f"try region label {lbl} not in code")
        w.u2(label_at[reg.start_label])
        w.u2(label_at[reg.end_label])
        w.u2(label_at[reg.handler_label])
        w.u2(pool.add_class(reg.catch_type) if reg.catch_type is not CATCH_ALL else 0)
    w.u2(len(code.attrs))
    for a in code.attrs:
        w.u2(pool.add_utf8(a.name))
        w.u4(len(a.payload))
        w.raw(a.payload)
    return w.bytes()


def _emit_annotations_attr(attr: AnnotationsAttr) -> bytes:
    w = Writer()
    w.u2(len(attr.annotations))
    for _desc, raw in attr.annotations:
        w.raw(raw)
    return w.bytes()


# ---------------------------------------------------------------------------
# top-level parse / emit

def parse_class(data: bytes) -> ClassModel:
    r = Reader(data)
    if len(data) < 4 or r.u4() != MAGIC:
        raise BadMagic("not a class file (bad magic)")
    minor = r.u2()
    major = r.u2()
    pool = ConstantPool.parse(r)
    access = r.u2()
    class_name = pool.class_name(r.u2())
    super_idx = r.u2()
    super_name = pool.class_name(super_idx) if super_idx else None
    interfaces = [pool.class_name(r.u2()) for _ in range(r.u2())]

    def read_attrs(parse_special: bool):
        attrs = []
        for _ in range(r.u2()):
            name = pool.utf8(r.u2())
            payload = r.raw(r.u4())
            if parse_special and name == "Code":
                attrs.append(_parse_code_attr(payload, pool))
            elif parse_special and name == "RuntimeVisibleAnnotations":
                attrs.append(_parse_annotations_attr(payload, pool))
            else:
                attrs.append(Attribute(name, payload))
        return attrs

    fields = []
    for _ in range(r.u2()):
        acc = r.u2()
        name = pool.utf8(r.u2())
        desc = pool.utf8(r.u2())
        fields.append(FieldModel(acc, name, desc, read_attrs(False)))
    methods = []
    for _ in range(r.u2()):
        acc = r.u2()
        name = pool.utf8(r.u2())
        desc = pool.utf8(r.u2())
        methods.append(MethodModel(acc, name, desc, read_attrs(True)))
    class_attrs = read_attrs(False)
    if r.pos != len(data):
        raise ClassFileError(f"{len(data) - r.pos} trailing bytes after class file")
    return ClassModel((major, minor), pool, access, class_name, super_name,
                      interfaces, fields, methods, class_attrs)


def emit_class(model: ClassModel) -> bytes:
    pool = model.constant_pool
    body = Writer()
    body.u2(model.access_flags)
    body.u2(pool.add_class(model.class_name))
    body.u2(pool.add_class(model.super_name) if model.super_name else 0)
    body.u2(len(model.interfaces))
    for name in model.interfaces:
        body.u2(pool.add_class(name))

    def write_attrs(attrs):
        body.u2(len(attrs))
        for a in attrs:
            if isinstance(a, Code):
                payload = emit_code_attr(a, pool)
                body.u2(pool.add_utf8("Code"))
            elif isinstance(a, AnnotationsAttr):
                payload = _emit_annotations_attr(a)
                body.u2(pool.add_utf8("RuntimeVisibleAnnotations"))
            else:
                payload = a.payload
                body.u2(pool.add_utf8(a.name))
            body.u4(len(payload))
            body.raw(payload)

    body.u2(len(model.fields))
    for f in model.fields:
        body.u2(f.access_flags)
        body.u2(pool.add_utf8(f.name))
        body.u2(pool.add_utf8(f.descriptor))
        write_attrs(f.attributes)
    body.u2(len(model.methods))
    for m in model.methods:
        body.u2(m.access_flags)
        body.u2(pool.add_utf8(m.name))
        body.u2(pool.add_utf8(m.descriptor))
        write_attrs(m.attributes)
    write_attrs(model.attributes)

    # the pool may have grown while writing the body, so serialize it last
    out = Writer()
    out.u4(MAGIC)
    out.u2(model.version[1])
    out.u2(model.version[0])
    pool.serialize(out)
    out.raw(body.bytes())
    return out.bytes()
