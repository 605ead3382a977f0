"""JVM opcode metadata and the symbolic instruction model.

Instructions are held mnemonically with operands resolved to symbolic
form (labels, member references, constants) so the rest of the toolchain
never deals with raw constant-pool indices or byte offsets.
"""

from dataclasses import dataclass
from typing import Optional, Union

# Operand encoding formats (how the operand bytes are laid out in Code[]).
F_NONE = "none"            # no operands
F_LOCAL = "local"          # u1 local index (u2 under wide)
F_S1 = "s1"                # bipush
F_S2 = "s2"                # sipush
F_CP1 = "cp1"              # ldc
F_CP2 = "cp2"              # ldc_w / ldc2_w
F_BR2 = "br2"              # s2 branch offset
F_BR4 = "br4"              # s4 branch offset (goto_w)
F_IINC = "iinc"            # u1 index + s1 const (u2/s2 under wide)
F_MEMBER = "member"        # u2 cp index of a Fieldref/Methodref
F_TYPE = "type"            # u2 cp index of a Class
F_NEWARRAY = "newarray"    # u1 primitive array type code
F_MULTI = "multi"          # u2 cp Class + u1 dims
F_IFACE = "iface"          # u2 cp InterfaceMethodref + u1 count + u1 zero
F_TABLESW = "tablesw"
F_LOOKUPSW = "lookupsw"

# mnemonic -> (opcode byte, operand format)
OPCODES = {
    "nop": (0x00, F_NONE),
    "aconst_null": (0x01, F_NONE),
    "bipush": (0x10, F_S1),
    "sipush": (0x11, F_S2),
    "ldc": (0x12, F_CP1),
    "ldc_w": (0x13, F_CP2),
    "ldc2_w": (0x14, F_CP2),
    "iload": (0x15, F_LOCAL),
    "lload": (0x16, F_LOCAL),
    "fload": (0x17, F_LOCAL),
    "dload": (0x18, F_LOCAL),
    "aload": (0x19, F_LOCAL),
    "iaload": (0x2E, F_NONE),
    "laload": (0x2F, F_NONE),
    "faload": (0x30, F_NONE),
    "daload": (0x31, F_NONE),
    "aaload": (0x32, F_NONE),
    "baload": (0x33, F_NONE),
    "caload": (0x34, F_NONE),
    "saload": (0x35, F_NONE),
    "istore": (0x36, F_LOCAL),
    "lstore": (0x37, F_LOCAL),
    "fstore": (0x38, F_LOCAL),
    "dstore": (0x39, F_LOCAL),
    "astore": (0x3A, F_LOCAL),
    "iastore": (0x4F, F_NONE),
    "lastore": (0x50, F_NONE),
    "fastore": (0x51, F_NONE),
    "dastore": (0x52, F_NONE),
    "aastore": (0x53, F_NONE),
    "bastore": (0x54, F_NONE),
    "castore": (0x55, F_NONE),
    "sastore": (0x56, F_NONE),
    "pop": (0x57, F_NONE),
    "pop2": (0x58, F_NONE),
    "dup": (0x59, F_NONE),
    "dup_x1": (0x5A, F_NONE),
    "dup_x2": (0x5B, F_NONE),
    "dup2": (0x5C, F_NONE),
    "dup2_x1": (0x5D, F_NONE),
    "dup2_x2": (0x5E, F_NONE),
    "swap": (0x5F, F_NONE),
    "iadd": (0x60, F_NONE),
    "ladd": (0x61, F_NONE),
    "fadd": (0x62, F_NONE),
    "dadd": (0x63, F_NONE),
    "isub": (0x64, F_NONE),
    "lsub": (0x65, F_NONE),
    "fsub": (0x66, F_NONE),
    "dsub": (0x67, F_NONE),
    "imul": (0x68, F_NONE),
    "lmul": (0x69, F_NONE),
    "fmul": (0x6A, F_NONE),
    "dmul": (0x6B, F_NONE),
    "idiv": (0x6C, F_NONE),
    "ldiv": (0x6D, F_NONE),
    "fdiv": (0x6E, F_NONE),
    "ddiv": (0x6F, F_NONE),
    "irem": (0x70, F_NONE),
    "lrem": (0x71, F_NONE),
    "frem": (0x72, F_NONE),
    "drem": (0x73, F_NONE),
    "ineg": (0x74, F_NONE),
    "lneg": (0x75, F_NONE),
    "fneg": (0x76, F_NONE),
    "dneg": (0x77, F_NONE),
    "ishl": (0x78, F_NONE),
    "lshl": (0x79, F_NONE),
    "ishr": (0x7A, F_NONE),
    "lshr": (0x7B, F_NONE),
    "iushr": (0x7C, F_NONE),
    "lushr": (0x7D, F_NONE),
    "iand": (0x7E, F_NONE),
    "land": (0x7F, F_NONE),
    "ior": (0x80, F_NONE),
    "lor": (0x81, F_NONE),
    "ixor": (0x82, F_NONE),
    "lxor": (0x83, F_NONE),
    "iinc": (0x84, F_IINC),
    "i2l": (0x85, F_NONE),
    "i2f": (0x86, F_NONE),
    "i2d": (0x87, F_NONE),
    "l2i": (0x88, F_NONE),
    "l2f": (0x89, F_NONE),
    "l2d": (0x8A, F_NONE),
    "f2i": (0x8B, F_NONE),
    "f2l": (0x8C, F_NONE),
    "f2d": (0x8D, F_NONE),
    "d2i": (0x8E, F_NONE),
    "d2l": (0x8F, F_NONE),
    "d2f": (0x90, F_NONE),
    "i2b": (0x91, F_NONE),
    "i2c": (0x92, F_NONE),
    "i2s": (0x93, F_NONE),
    "lcmp": (0x94, F_NONE),
    "fcmpl": (0x95, F_NONE),
    "fcmpg": (0x96, F_NONE),
    "dcmpl": (0x97, F_NONE),
    "dcmpg": (0x98, F_NONE),
    "ifeq": (0x99, F_BR2),
    "ifne": (0x9A, F_BR2),
    "iflt": (0x9B, F_BR2),
    "ifge": (0x9C, F_BR2),
    "ifgt": (0x9D, F_BR2),
    "ifle": (0x9E, F_BR2),
    "if_icmpeq": (0x9F, F_BR2),
    "if_icmpne": (0xA0, F_BR2),
    "if_icmplt": (0xA1, F_BR2),
    "if_icmpge": (0xA2, F_BR2),
    "if_icmpgt": (0xA3, F_BR2),
    "if_icmple": (0xA4, F_BR2),
    "if_acmpeq": (0xA5, F_BR2),
    "if_acmpne": (0xA6, F_BR2),
    "goto": (0xA7, F_BR2),
    "jsr": (0xA8, F_BR2),
    "ret": (0xA9, F_LOCAL),
    "tableswitch": (0xAA, F_TABLESW),
    "lookupswitch": (0xAB, F_LOOKUPSW),
    "ireturn": (0xAC, F_NONE),
    "lreturn": (0xAD, F_NONE),
    "freturn": (0xAE, F_NONE),
    "dreturn": (0xAF, F_NONE),
    "areturn": (0xB0, F_NONE),
    "return": (0xB1, F_NONE),
    "getstatic": (0xB2, F_MEMBER),
    "putstatic": (0xB3, F_MEMBER),
    "getfield": (0xB4, F_MEMBER),
    "putfield": (0xB5, F_MEMBER),
    "invokevirtual": (0xB6, F_MEMBER),
    "invokespecial": (0xB7, F_MEMBER),
    "invokestatic": (0xB8, F_MEMBER),
    "invokeinterface": (0xB9, F_IFACE),
    "invokedynamic": (0xBA, F_MULTI),  # u2 cp + two zero bytes; parsed opaquely
    "new": (0xBB, F_TYPE),
    "newarray": (0xBC, F_NEWARRAY),
    "anewarray": (0xBD, F_TYPE),
    "arraylength": (0xBE, F_NONE),
    "athrow": (0xBF, F_NONE),
    "checkcast": (0xC0, F_TYPE),
    "instanceof": (0xC1, F_TYPE),
    "monitorenter": (0xC2, F_NONE),
    "monitorexit": (0xC3, F_NONE),
    "multianewarray": (0xC5, F_MULTI),
    "ifnull": (0xC6, F_BR2),
    "ifnonnull": (0xC7, F_BR2),
    "goto_w": (0xC8, F_BR4),
    "jsr_w": (0xC9, F_BR4),
}

BY_OPCODE = {num: (name, fmt) for name, (num, fmt) in OPCODES.items()}

# iconst_m1 .. dconst_1 and the _0.._3 load/store short forms are
# normalized at parse time; canonical emission re-picks the short form.
SHORT_CONSTS = {}
for _i in range(-1, 6):
    SHORT_CONSTS[0x03 + _i] = ("iconst", _i)
for _i in range(2):
    SHORT_CONSTS[0x09 + _i] = ("lconst", _i)
for _i in range(3):
    SHORT_CONSTS[0x0B + _i] = ("fconst", _i)
for _i in range(2):
    SHORT_CONSTS[0x0E + _i] = ("dconst", _i)

SHORT_LOCALS = {}
for _base, _mn in ((0x1A, "iload"), (0x1E, "lload"), (0x22, "fload"),
                   (0x26, "dload"), (0x2A, "aload"), (0x3B, "istore"),
                   (0x3F, "lstore"), (0x43, "fstore"), (0x47, "dstore"),
                   (0x4B, "astore")):
    for _i in range(4):
        SHORT_LOCALS[_base + _i] = (_mn, _i)

# Synthetic mnemonics without their own table entry.
PSEUDO_CONSTS = {"iconst": "I", "lconst": "J", "fconst": "F", "dconst": "D"}

# newarray atype codes <-> element descriptor chars
NEWARRAY_TYPES = {4: "Z", 5: "C", 6: "F", 7: "D", 8: "B", 9: "S", 10: "I", 11: "J"}
NEWARRAY_CODES = {v: k for k, v in NEWARRAY_TYPES.items()}

UNSUPPORTED = {"jsr", "jsr_w", "ret", "invokedynamic", "monitorenter", "monitorexit"}

INVOKES = {"invokevirtual", "invokespecial", "invokestatic", "invokeinterface"}


@dataclass(frozen=True)
class MemberRef:
    """Symbolic (owner, name, descriptor) reference to a field or method."""
    owner: str
    name: str
    descriptor: str

    def __str__(self):
        return f"{self.owner}.{self.name}{self.descriptor}"


@dataclass(frozen=True)
class Const:
    """Loadable constant-pool value: kind in {int,long,float,double,string,class}.

    float/double values carry the raw IEEE bit pattern so NaN payloads
    survive the round trip.
    """
    kind: str
    value: Union[int, str]


@dataclass(frozen=True)
class Label:
    """Position marker in a code list; names derive from byte offsets (L<off>)."""
    name: str


@dataclass(frozen=True)
class Instr:
    op: str
    args: tuple = ()
    offset: Optional[int] = None

    def __repr__(self):
        parts = " ".join(str(a) for a in self.args)
        return f"<{self.op}{' ' + parts if parts else ''}>"


CodeItem = Union[Instr, Label]
