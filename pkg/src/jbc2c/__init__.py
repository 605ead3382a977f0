"""jbc2c: rewrite selected JVM methods as portable C functions behind JNI.

The toolchain parses class files, strips the bodies of selected methods,
marks them native, and emits C functions that emulate the operand stack
of the removed bytecode.  A reference interpreter and a mock-JNI C
harness allow the emitted code to be verified without a JVM.
"""

__version__ = "0.1.0"


class Jbc2cError(Exception):
    """Base class for all toolchain errors."""
