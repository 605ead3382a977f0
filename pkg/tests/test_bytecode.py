import pytest
from hypothesis import given, strategies as st

from corpus import build_corpus
from jbc2c.builder import STATIC, add_method, make_class
from jbc2c.bytecode import (InconsistentStackDepth, StackOverflowDecl,
                            Unsupported, apply_effect, check_method,
                            stack_effect)
from jbc2c.opcodes import Instr, Label, MemberRef

I = Instr


def effect(op, *args, stack=None):
    return stack_effect(I(op, tuple(args)), None, stack)


def test_iadd_effect():
    e = effect("iadd")
    assert list(e.pops) == ["I", "I"]
    assert list(e.pushes) == ["I"]


def test_wide_kinds_occupy_one_emulated_slot():
    e = effect("ladd")
    assert list(e.pops) == ["J", "J"]
    assert list(e.pushes) == ["J"]


def test_invoke_pops_receiver_and_args():
    ref = MemberRef("A", "f", "(IJ)D")
    e = effect("invokevirtual", ref)
    assert list(e.pops) == ["A", "I", "J"]
    assert list(e.pushes) == ["D"]


def test_invokestatic_has_no_receiver():
    ref = MemberRef("A", "f", "(I)V")
    e = effect("invokestatic", ref)
    assert list(e.pops) == ["I"]
    assert list(e.pushes) == []


def test_pop2_consumes_one_wide_or_two_narrow():
    assert list(effect("pop2", stack=("J",)).pops) == ["J"]
    assert list(effect("pop2", stack=("I", "I")).pops) == ["I", "I"]


def test_dup_x1():
    e = effect("dup_x1", stack=("I", "A"))
    assert list(e.pops) == ["I", "A"]
    assert list(e.pushes) == ["A", "I", "A"]


def test_dup2_on_wide_value():
    e = effect("dup2", stack=("J",))
    assert list(e.pushes) == ["J", "J"]


def test_swap():
    e = effect("swap", stack=("I", "A"))
    assert list(e.pushes) == ["A", "I"]


def _method(items, max_stack, max_locals=4, desc="(II)I", regions=None):
    m = make_class("T")
    return add_method(m, "f", desc, items, max_stack, max_locals,
                      access=STATIC, try_regions=regions)


def test_depth_map_linear_body():
    # depths before each instruction of a two-operand add with a store
    meth = _method([
        I("iload", (0,)), I("iload", (1,)), I("iadd", ()),
        I("istore", (2,)), I("iload", (2,)), I("ireturn", ()),
    ], max_stack=2)
    dm = check_method(meth)
    depths = [len(dm.before[i]) for i in sorted(dm.before)]
    assert depths == [0, 1, 2, 1, 0, 1]
    assert dm.max_depth == 2


def test_branch_merge_consistent():
    meth = _method([
        I("iload", (0,)), I("ifeq", ("Lz",)),
        I("iload", (0,)), I("goto", ("Lr",)),
        Label("Lz"), I("iload", (1,)),
        Label("Lr"), I("ireturn", ()),
    ], max_stack=1)
    dm = check_method(meth)
    assert dm.labels["Lr"] == ("I",)


def test_merge_mismatch_detected():
    meth = _method([
        I("iload", (0,)), I("ifeq", ("Lm",)),
        I("lconst", (0,)), I("goto", ("Lm",)),   # long on one path
        Label("Lm"),
        I("pop", ()), I("iconst", (0,)), I("ireturn", ()),
    ], max_stack=2)
    with pytest.raises(InconsistentStackDepth):
        check_method(meth)


def test_underflow_detected():
    meth = _method([I("iadd", ()), I("ireturn", ())], max_stack=2, desc="()I")
    with pytest.raises(InconsistentStackDepth):
        check_method(meth)


def test_declared_max_stack_enforced():
    meth = _method([
        I("iload", (0,)), I("iload", (1,)), I("iadd", ()), I("ireturn", ()),
    ], max_stack=1)
    with pytest.raises(StackOverflowDecl):
        check_method(meth)


def test_handler_entry_is_single_reference():
    from jbc2c.classfile import TryRegion
    meth = _method([
        Label("L0"),
        I("iload", (0,)), I("iload", (1,)), I("idiv", ()), I("ireturn", ()),
        Label("L1"), Label("L2"),
        I("pop", ()), I("iconst", (0,)), I("ireturn", ()),
    ], max_stack=2, regions=[TryRegion("L0", "L1", "L2",
                                       "java/lang/ArithmeticException")])
    dm = check_method(meth)
    assert dm.labels["L2"] == ("A",)


def test_unsupported_opcodes_reported():
    meth = _method([
        I("aload", (0,)), I("monitorenter", ()),
        I("return", ()),
    ], max_stack=1, desc="(Ljava/lang/Object;)V")
    with pytest.raises(Unsupported) as exc:
        check_method(meth)
    assert "monitorenter" in str(exc.value)


def test_whole_corpus_checks_clean():
    for name, model in build_corpus().items():
        for meth in model.methods:
            if meth.code is not None:
                check_method(meth)


@given(st.lists(st.sampled_from(["iadd", "isub", "imul", "ineg", "iand",
                                 "ior", "ixor"]), max_size=6))
def test_apply_effect_matches_declared_arity(ops):
    # feed a deep enough stack and check declared pops/pushes balance
    stack = ("I",) * 12
    for op in ops:
        e = stack_effect(I(op, ()), None, stack)
        stack = apply_effect(stack, e)
    assert all(k == "I" for k in stack)
