"""JVM type descriptor parsing and rendering."""

from dataclasses import dataclass
from typing import List, Optional

from . import Jbc2cError

PRIMITIVES = {
    "Z": "BOOLEAN", "B": "BYTE", "C": "CHAR", "S": "SHORT",
    "I": "INT", "J": "LONG", "F": "FLOAT", "D": "DOUBLE",
}
PRIMITIVE_CHARS = {v: k for k, v in PRIMITIVES.items()}


class MalformedDescriptor(Jbc2cError):
    pass


@dataclass(frozen=True)
class JType:
    kind: str                      # one of PRIMITIVES values, OBJECT, ARRAY
    name: Optional[str] = None     # internal class name for OBJECT
    element: Optional["JType"] = None  # for ARRAY

    def render(self) -> str:
        if self.kind == "OBJECT":
            return f"L{self.name};"
        if self.kind == "ARRAY":
            return "[" + self.element.render()
        return PRIMITIVE_CHARS[self.kind]

    @property
    def slot_kind(self) -> str:
        """Operand-stack slot kind: I, J, F, D or A."""
        if self.kind in ("OBJECT", "ARRAY"):
            return "A"
        return {"LONG": "J", "FLOAT": "F", "DOUBLE": "D"}.get(self.kind, "I")

    @property
    def width(self) -> int:
        """Number of 32-bit local/stack slots the JVM assigns this type."""
        return 2 if self.kind in ("LONG", "DOUBLE") else 1


@dataclass(frozen=True)
class MethodSignature:
    param_types: List[JType]
    return_type: Optional[JType]   # None means void

    def render(self) -> str:
        params = "".join(t.render() for t in self.param_types)
        ret = self.return_type.render() if self.return_type else "V"
        return f"({params}){ret}"


def _parse_type(text: str, pos: int):
    if pos >= len(text):
        raise MalformedDescriptor(f"truncated descriptor: {text!r}")
    c = text[pos]
    if c in PRIMITIVES:
        return JType(PRIMITIVES[c]), pos + 1
    if c == "L":
        end = text.find(";", pos)
        if end < 0 or end == pos + 1:
            raise MalformedDescriptor(f"unterminated object type in {text!r}")
        return JType("OBJECT", name=text[pos + 1:end]), end + 1
    if c == "[":
        elem, npos = _parse_type(text, pos + 1)
        return JType("ARRAY", element=elem), npos
    raise MalformedDescriptor(f"bad type char {c!r} in {text!r}")


def parse_field_descriptor(text: str) -> JType:
    jt, pos = _parse_type(text, 0)
    if pos != len(text):
        raise MalformedDescriptor(f"trailing junk in {text!r}")
    return jt


def parse_descriptor(text: str) -> MethodSignature:
    """Parse a method descriptor like "(II)I"; rendering round-trips."""
    if not text.startswith("("):
        raise MalformedDescriptor(f"method descriptor must start with '(': {text!r}")
    pos = 1
    params = []
    while pos < len(text) and text[pos] != ")":
        jt, pos = _parse_type(text, pos)
        params.append(jt)
    if pos >= len(text):
        raise MalformedDescriptor(f"missing ')' in {text!r}")
    pos += 1
    if pos >= len(text):
        raise MalformedDescriptor(f"missing return type in {text!r}")
    if text[pos] == "V":
        ret = None
        pos += 1
    else:
        ret, pos = _parse_type(text, pos)
    if pos != len(text):
        raise MalformedDescriptor(f"trailing junk in {text!r}")
    return MethodSignature(params, ret)
