import pytest

from corpus import build_corpus
from jbc2c.builder import STATIC, add_method, make_class, push_int
from jbc2c.classfile import CATCH_ALL, TryRegion
from jbc2c.opcodes import Const, Instr, Label, MemberRef
from jbc2c.translator import (CLabel, Decl, DuplicateFunctionName, Expr, Goto,
                              HandlerTarget, Helper, If, Pop, Push, Ret,
                              Switch, TranslationConfig, UnknownSystemException,
                              UnsupportedOpcode, plan_exception_checks,
                              render_c_unit, render_function,
                              resolve_system_exception_target,
                              translate_method)

I = Instr
L = Label


def translate(meth, model):
    return translate_method(meth, model, TranslationConfig())


def flat(stmts):
    out = []
    for s in stmts:
        out.append(s)
        if isinstance(s, If):
            out.extend(flat(s.then))
            if s.els:
                out.extend(flat(s.els))
    return out


def effective_body(fn):
    """Statements after the prologue (first stack op onward)."""
    for i, s in enumerate(fn.body):
        if isinstance(s, (Push, Pop, Helper, CLabel, Switch, Goto, Ret)):
            return fn.body[i:]
    return []


# ---- golden shape: straight-line add through the emulated stack ----

def test_golden_add_body_shape():
    model = build_corpus()["Calculator"]
    fn = translate(model.method("sum", "(II)I"), model)
    body = effective_body(fn)
    kinds = [type(s).__name__ for s in body]
    assert kinds == ["Push", "Push", "Pop", "Pop", "Push", "Pop", "Push",
                     "Pop", "Ret"]
    assert body[0].expr == "vars[1].i"
    assert body[1].expr == "vars[2].i"
    assert "+" in body[4].expr
    assert body[5].target == "vars[3].i"
    assert body[6].expr == "vars[3].i"
    assert body[8].expr is not None


def test_golden_add_renders_with_jni_signature():
    model = build_corpus()["Calculator"]
    fn = translate(model.method("sum", "(II)I"), model)
    text = render_c_unit([fn]).text
    assert "JNIEXPORT jint JNICALL" in text
    assert "Java_Calculator_sum(JNIEnv *env, jobject thisObj, jint a0, "\
           "jint a1)" in text
    assert "jvalue vars[4];" in text


def test_empty_static_void_body():
    model = make_class("E")
    meth = add_method(model, "f", "()V", [I("return", ())],
                      max_stack=0, max_locals=0, access=STATIC)
    fn = translate(meth, model)
    body = effective_body(fn)
    assert [type(s).__name__ for s in body] == ["Ret"]
    assert body[0].expr is None


# ---- golden shape: virtual call fills the par array in reverse ----

def _call_method():
    model = make_class("B")
    meth = add_method(model, "caller", "()I", [
        I("aload", (0,)),
        I("iconst", (1,)),
        I("iconst", (2,)),
        I("invokevirtual", (MemberRef("B", "sum", "(II)I"),)),
        I("istore", (1,)),
        I("iload", (1,)),
        I("ireturn", ()),
    ], max_stack=3, max_locals=2)
    return model, meth


def test_golden_call_par_fill_reverse_then_target_then_call():
    model, meth = _call_method()
    fn = translate(meth, model)
    body = fn.body
    decl = next(i for i, s in enumerate(body)
                if isinstance(s, Decl) and "par1[2]" in s.text)
    p1 = next(i for i, s in enumerate(body)
              if isinstance(s, Pop) and s.target == "par1[1]")
    p0 = next(i for i, s in enumerate(body)
              if isinstance(s, Pop) and s.target == "par1[0]")
    tgt = next(i for i, s in enumerate(body)
               if isinstance(s, Pop) and s.target == "target1")
    call = next(i for i, s in enumerate(body)
                if isinstance(s, Decl) and "CallIntMethodA" in s.text)
    push = next(i for i, s in enumerate(body)
                if isinstance(s, Push) and s.expr == "r1")
    assert decl < p1 < p0 < tgt < call < push
    call_text = body[call].text
    assert "CallIntMethodA(env, target1, " in call_text
    assert call_text.endswith("par1);")


def test_call_member_ids_cached_in_prologue():
    model, meth = _call_method()
    fn = translate(meth, model)
    text = render_function(fn)
    assert text.count('FindClass(env, "B")') == 1
    assert text.count('GetMethodID') == 1
    assert text.index("GetMethodID") < text.index("PushA")


# ---- golden shape: forwarded exception cascade (user types, dynamic) ----

def _forwarded_method(catch="MyException"):
    model = make_class("C")
    meth = add_method(model, "risky", "()I", [
        L("L0"),
        I("invokestatic", (MemberRef("MyClass", "methodThrowingException",
                                     "()V"),)),
        L("L1"),
        I("iconst", (0,)), I("ireturn", ()),
        L("L2"),
        I("pop", ()), I("iconst", (1,)), I("ireturn", ()),
    ], max_stack=1, max_locals=1, access=STATIC,
        try_regions=[TryRegion("L0", "L1", "L2", catch)])
    return model, meth


def test_golden_forwarded_exception_cascade():
    model, meth = _forwarded_method()
    fn = translate(meth, model)
    guard = next(s for s in fn.body if isinstance(s, If)
                 and s.cond == "exception")
    assert isinstance(guard.then[0], Helper)
    assert guard.then[0].name == "JBC_AlignWithJVM"
    probe = guard.then[1]
    assert isinstance(probe, If)
    assert 'JBC_TopInstanceOf(env, &stack, "MyException")' == probe.cond
    assert isinstance(probe.then[0], Expr)
    assert "ExceptionClear" in probe.then[0].text
    assert isinstance(probe.then[1], Goto) and probe.then[1].name == "L2"
    # no match: return while the exception stays registered with the JVM
    fallthrough = guard.then[2]
    assert isinstance(fallthrough, Ret)
    assert not any(isinstance(s, Expr) and "ExceptionClear" in s.text
                   for s in guard.then[2:])


def test_forwarded_check_outside_any_try_returns_immediately():
    model = make_class("C")
    meth = add_method(model, "go", "()V", [
        I("invokestatic", (MemberRef("X", "f", "()V"),)),
        I("return", ()),
    ], max_stack=0, max_locals=0, access=STATIC)
    fn = translate(meth, model)
    guard = next(s for s in fn.body if isinstance(s, If)
                 and s.cond == "exception")
    assert [type(s).__name__ for s in guard.then] == ["Helper", "Ret"]


def test_forwarded_nested_handlers_probe_inner_first():
    model = make_class("C")
    meth = add_method(model, "risky", "()I", [
        L("L0"), L("Li"),
        I("invokestatic", (MemberRef("X", "f", "()V"),)),
        L("Le"), L("L1"),
        I("iconst", (0,)), I("ireturn", ()),
        L("Hin"), I("pop", ()), I("iconst", (1,)), I("ireturn", ()),
        L("Hout"), I("pop", ()), I("iconst", (2,)), I("ireturn", ()),
    ], max_stack=1, max_locals=0, access=STATIC,
        try_regions=[TryRegion("Li", "Le", "Hin", "MyException"),
                     TryRegion("L0", "L1", "Hout", "java/lang/Exception")])
    fn = translate(meth, model)
    guard = next(s for s in fn.body if isinstance(s, If)
                 and s.cond == "exception")
    probes = [s for s in guard.then if isinstance(s, If)]
    assert '"MyException"' in probes[0].cond
    assert '"java/lang/Exception"' in probes[1].cond


# ---- golden shape: system exception resolved statically ----

def test_golden_idiv_static_dispatch():
    model = build_corpus()["Divider"]
    fn = translate(model.method("div", "(II)I"), model)
    body = fn.body
    helper = next(i for i, s in enumerate(body)
                  if isinstance(s, Helper) and s.name == "IDiv")
    assert body[helper].assign_to == "exception"
    guard = body[helper + 1]
    assert isinstance(guard, If) and guard.cond == "exception"
    assert isinstance(guard.then[0], Helper)
    assert guard.then[0].name == "JBC_AlignClear"
    assert isinstance(guard.then[1], Goto) and guard.then[1].name == "L2"


def test_idiv_without_handler_propagates():
    model = make_class("D")
    meth = add_method(model, "d", "(II)I", [
        I("iload", (0,)), I("iload", (1,)), I("idiv", ()), I("ireturn", ()),
    ], max_stack=2, max_locals=2, access=STATIC)
    fn = translate(meth, model)
    guard = next(s for s in fn.body if isinstance(s, If)
                 and s.cond == "exception")
    assert [type(s).__name__ for s in guard.then] == ["Ret"]
    assert guard.then[0].expr == "0"


def test_array_site_dispatches_on_exception_code():
    model = make_class("D")
    meth = add_method(model, "pick", "([II)I", [
        L("L0"),
        I("aload", (0,)), I("iload", (1,)), I("iaload", ()),
        I("ireturn", ()),
        L("L1"), L("Hn"),
        I("pop", ()), push_int(-1), I("ireturn", ()),
    ], max_stack=2, max_locals=2, access=STATIC,
        try_regions=[TryRegion("L0", "L1", "Hn",
                               "java/lang/NullPointerException")])
    fn = translate(meth, model)
    guards = [s for s in fn.body if isinstance(s, If)
              and s.cond.startswith("exception ==")]
    conds = [g.cond for g in guards]
    assert "exception == JBC_EX_NULL" in conds
    assert "exception == JBC_EX_INDEX" in conds
    null_guard = guards[conds.index("exception == JBC_EX_NULL")]
    assert isinstance(null_guard.then[-1], Goto)
    idx_guard = guards[conds.index("exception == JBC_EX_INDEX")]
    assert isinstance(idx_guard.then[-1], Ret)


# ---- exception target resolution ----

def _regions(*specs):
    return [TryRegion("L0", "L1", lbl, ct) for lbl, ct in specs]


def test_resolve_direct_match():
    t = resolve_system_exception_target(
        "java/lang/ArithmeticException",
        _regions(("L2", "java/lang/ArithmeticException")))
    assert t == HandlerTarget("jump", "L2")


def test_resolve_no_supertype_match_propagates():
    t = resolve_system_exception_target(
        "java/lang/ArithmeticException",
        _regions(("L2", "java/lang/NullPointerException")))
    assert t == HandlerTarget("propagate")


def test_resolve_first_supertype_wins():
    t = resolve_system_exception_target(
        "java/lang/ArithmeticException",
        _regions(("L2", "java/lang/IllegalStateException"),
                 ("L3", "java/lang/RuntimeException")))
    assert t == HandlerTarget("jump", "L3")


def test_resolve_catch_all_matches():
    t = resolve_system_exception_target(
        "java/lang/NegativeArraySizeException", _regions(("L9", CATCH_ALL)))
    assert t == HandlerTarget("jump", "L9")


def test_resolve_unknown_type_rejected():
    with pytest.raises(UnknownSystemException):
        resolve_system_exception_target("java/lang/NoSuchThing", [])


# ---- check-site planning ----

def test_plan_sites_cover_checked_opcodes():
    model = build_corpus()["Divider"]
    meth = model.method("div", "(II)I")
    sites = plan_exception_checks(meth)
    items = meth.code.items
    assert {items[i].op for i in sites} == {"idiv"}


def test_plan_sites_empty_for_pure_arithmetic():
    model = build_corpus()["Calculator"]
    assert plan_exception_checks(model.method("sum", "(II)I")) == set()


def test_plan_sites_include_calls_and_arrays():
    model = build_corpus()["Arrays"]
    meth = model.method("fill", "(I)I")
    ops = {meth.code.items[i].op for i in plan_exception_checks(meth)}
    assert ops == {"newarray", "iastore", "iaload", "arraylength"}


# ---- athrow ----

def test_athrow_cascade_and_jvm_registration():
    model = build_corpus()["Thrower"]
    fn = translate(model.method("boom", "(I)I"), model)
    body = flat(fn.body)
    probe = next(s for s in body if isinstance(s, If)
                 and "JBC_RefInstanceOf" in s.cond and "MyError" in s.cond)
    assert any(isinstance(s, Push) and s.kind == "A" for s in probe.then)
    assert isinstance(probe.then[-1], Goto) and probe.then[-1].name == "L2"
    throw = next(s for s in body if isinstance(s, Expr)
                 and "->Throw(env" in s.text)
    assert throw is not None


def test_athrow_catch_all_goes_unconditionally():
    model = make_class("T")
    meth = add_method(model, "t", "(Ljava/lang/Exception;)I", [
        L("L0"),
        I("aload", (0,)), I("athrow", ()),
        L("L1"), L("H"),
        I("pop", ()), push_int(3), I("ireturn", ()),
    ], max_stack=1, max_locals=1, access=STATIC,
        try_regions=[TryRegion("L0", "L1", "H", CATCH_ALL)])
    fn = translate(meth, model)
    # after the null check there is no InstanceOf probe, just the jump
    assert not any(isinstance(s, If) and "JBC_RefInstanceOf" in s.cond
                   for s in flat(fn.body))
    assert any(isinstance(s, Goto) and s.name == "H" for s in fn.body)


def test_athrow_without_region_registers_and_returns():
    model = make_class("T")
    meth = add_method(model, "t", "(Ljava/lang/Exception;)V", [
        I("aload", (0,)), I("athrow", ()),
    ], max_stack=1, max_locals=1, access=STATIC)
    fn = translate(meth, model)
    text = render_function(fn)
    assert "->Throw(env, (jthrowable)" in text


# ---- misc structure ----

def test_switch_lowered_to_case_gotos():
    model = build_corpus()["Switches"]
    fn = translate(model.method("lookup", "(I)I"), model)
    sw = next(s for s in fn.body if isinstance(s, Switch))
    assert sw.cases == [(5, "L1"), (1000, "L2")]
    assert sw.default == "Ld"


def test_unreferenced_labels_not_rendered():
    model = make_class("DL")
    meth = add_method(model, "f", "(I)I", [
        L("Lstart"),              # nothing jumps here
        I("iload", (0,)), I("ireturn", ()),
    ], max_stack=1, max_locals=1, access=STATIC)
    text = render_function(translate(meth, model))
    assert "Lstart" not in text


def test_dead_code_after_goto_skipped():
    model = make_class("DC")
    meth = add_method(model, "f", "(I)I", [
        I("goto", ("Lend",)),
        L("Ldead"),               # unreachable island
        I("iconst", (5,)), I("pop", ()), I("goto", ("Ldead",)),
        L("Lend"),
        I("iload", (0,)), I("ireturn", ()),
    ], max_stack=1, max_locals=1, access=STATIC)
    text = render_function(translate(meth, model))
    assert "Ldead" not in text
    assert "Lend" in text


def test_shift_masks_and_unsigned_casts():
    model = make_class("SH")
    meth = add_method(model, "u", "(II)I", [
        I("iload", (0,)), I("iload", (1,)), I("iushr", ()), I("ireturn", ()),
    ], max_stack=2, max_locals=2, access=STATIC)
    text = render_function(translate(meth, model))
    assert "& 0x1f" in text
    assert "juint" in text


def test_nan_branch_in_fcmpg():
    model = build_corpus()["Compare"]
    fn = translate(model.method("sign", "(F)I"), model)
    push = next(s for s in flat(fn.body) if isinstance(s, Push)
                and "?" in s.expr)
    assert "!=" in push.expr       # self-inequality as the NaN probe
    assert "? 1 :" in push.expr


def test_new_fusion_uses_newobject():
    model = build_corpus()["Thrower"]
    text = render_function(translate(model.method("boom", "(I)I"), model))
    assert "NewObjectA" in text
    assert '"<init>"' in text


def test_bare_new_across_branch_rejected():
    model = make_class("BN")
    meth = add_method(model, "f", "()V", [
        I("new", ("A",)),
        I("goto", ("Lx",)),
        L("Lx"),
        I("pop", ()), I("return", ()),
    ], max_stack=1, max_locals=0, access=STATIC)
    with pytest.raises(UnsupportedOpcode):
        translate(meth, model)


def test_render_unit_deterministic():
    model = build_corpus()["Calculator"]
    mk = lambda: render_c_unit(
        [translate(model.method("sum", "(II)I"), model)]).text
    assert mk() == mk()


def test_render_unit_rejects_duplicate_names():
    model = build_corpus()["Calculator"]
    fn = translate(model.method("sum", "(II)I"), model)
    with pytest.raises(DuplicateFunctionName):
        render_c_unit([fn, fn])


def test_render_empty_unit_is_header_only():
    unit = render_c_unit([])
    assert unit.text.strip() == '#include "jbcrt.h"'
    assert unit.function_names == []


def test_overloaded_pair_renders_long_forms():
    model = build_corpus()["Overloaded"]
    fns = [translate_method(model.method("id", d), model,
                            TranslationConfig(mangled_name=n))
           for d, n in (("(I)I", "Java_Overloaded_id__I"),
                        ("(J)J", "Java_Overloaded_id__J"))]
    unit = render_c_unit(fns)
    assert "Java_Overloaded_id__I" in unit.text
    assert "Java_Overloaded_id__J" in unit.text
