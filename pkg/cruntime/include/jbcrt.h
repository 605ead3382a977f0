/* Support header for machine-translated method bodies.
 *
 * Each translated function re-creates the operand stack as an array of
 * 64-bit jvalue slots with a parallel tag array.  Pushes and pops are
 * kind-checked unless JBC_UNCHECKED is defined.  Helpers that can raise
 * a runtime exception return 0 on success or a JBC_EX_* code; the caller
 * dispatches on that code with statically resolved gotos.
 *
 * Define JBC_MOCK_JNI to run against the in-process JNI substitute
 * instead of a live JVM.
 */
#ifndef JBCRT_H
#define JBCRT_H

#include <math.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#ifdef JBC_MOCK_JNI
#include "jbc_mockjni.h"
#else
#include <jni.h>
#endif

typedef uint32_t juint;
typedef uint64_t julong;

#define JBC_EX_ARITHMETIC 1
#define JBC_EX_NULL       2
#define JBC_EX_INDEX      3
#define JBC_EX_NEGSIZE    4
#define JBC_EX_CAST       5

#define JBC_NANF ((jfloat)NAN)
#define JBC_INFF ((jfloat)INFINITY)
#define JBC_NAND ((jdouble)NAN)
#define JBC_INFD ((jdouble)INFINITY)

typedef struct jbc_stack {
    jvalue *slots;
    char *tags;
    jint top;
    jint cap;
} jbc_stack;

static void jbc_fail(const char *msg) {
    fprintf(stderr, "jbc runtime: %s\n", msg);
    abort();
}

#ifdef JBC_UNCHECKED
#define JBC_CHECK_PUSH(st)
#define JBC_CHECK_POP(st, want)
#else
#define JBC_CHECK_PUSH(st) \
    do { if ((st)->top >= (st)->cap) jbc_fail("stack overflow"); } while (0)
#define JBC_CHECK_POP(st, want) \
    do { \
        if ((st)->top <= 0) jbc_fail("stack underflow"); \
        if ((want) != '?' && (st)->tags[(st)->top - 1] != (want)) \
            jbc_fail("stack kind mismatch"); \
    } while (0)
#endif

#define JBC_DEF_PUSH(Suffix, ctype, member, tag) \
    static void Push##Suffix(jbc_stack *st, ctype v) { \
        JBC_CHECK_PUSH(st); \
        st->slots[st->top].member = v; \
        st->tags[st->top] = tag; \
        st->top++; \
    }
#define JBC_DEF_POP(Suffix, ctype, member, tag) \
    static ctype Pop##Suffix(jbc_stack *st) { \
        JBC_CHECK_POP(st, tag); \
        st->top--; \
        return st->slots[st->top].member; \
    }

JBC_DEF_PUSH(I, jint, i, 'I')
JBC_DEF_PUSH(J, jlong, j, 'J')
JBC_DEF_PUSH(F, jfloat, f, 'F')
JBC_DEF_PUSH(D, jdouble, d, 'D')
JBC_DEF_PUSH(A, jobject, l, 'A')
JBC_DEF_POP(I, jint, i, 'I')
JBC_DEF_POP(J, jlong, j, 'J')
JBC_DEF_POP(F, jfloat, f, 'F')
JBC_DEF_POP(D, jdouble, d, 'D')
JBC_DEF_POP(A, jobject, l, 'A')

static void PushV(jbc_stack *st, jvalue v) {
    JBC_CHECK_PUSH(st);
    st->slots[st->top] = v;
    st->tags[st->top] = '?';
    st->top++;
}

static jvalue PopV(jbc_stack *st) {
    JBC_CHECK_POP(st, '?');
    st->top--;
    return st->slots[st->top];
}

/* ---- exception plumbing ---- */

static jint jbc_throw_new(JNIEnv *env, const char *cls, const char *msg,
                          jint code) {
    (*env)->ThrowNew(env, (*env)->FindClass(env, cls), msg);
    return code;
}

static jint JBC_ThrowNull(JNIEnv *env) {
    return jbc_throw_new(env, "java/lang/NullPointerException", "null", JBC_EX_NULL);
}

/* clear the emulated stack and leave only the pending throwable on it */
static void JBC_AlignWithJVM(JNIEnv *env, jbc_stack *st) {
    st->top = 0;
    PushA(st, (jobject)(*env)->ExceptionOccurred(env));
}

static void JBC_AlignClear(JNIEnv *env, jbc_stack *st) {
    JBC_AlignWithJVM(env, st);
    (*env)->ExceptionClear(env);
}

static jint JBC_RefInstanceOf(JNIEnv *env, jobject obj, const char *cls) {
    return obj != NULL
        && (*env)->IsInstanceOf(env, obj, (*env)->FindClass(env, cls));
}

static jint JBC_TopInstanceOf(JNIEnv *env, jbc_stack *st, const char *cls) {
    jthrowable ex = (*env)->ExceptionOccurred(env);
    (void)st;
    return JBC_RefInstanceOf(env, (jobject)ex, cls);
}

/* ---- checked arithmetic ---- */

static jint IDiv(JNIEnv *env, jbc_stack *st) {
    jint b = PopI(st);
    jint a = PopI(st);
    if (b == 0)
        return jbc_throw_new(env, "java/lang/ArithmeticException",
                             "/ by zero", JBC_EX_ARITHMETIC);
    if (a == (jint)0x80000000 && b == -1) {
        PushI(st, a);   /* overflow wraps in Java */
        return 0;
    }
    PushI(st, a / b);
    return 0;
}

static jint IRem(JNIEnv *env, jbc_stack *st) {
    jint b = PopI(st);
    jint a = PopI(st);
    if (b == 0)
        return jbc_throw_new(env, "java/lang/ArithmeticException",
                             "/ by zero", JBC_EX_ARITHMETIC);
    if (a == (jint)0x80000000 && b == -1) {
        PushI(st, 0);
        return 0;
    }
    PushI(st, a % b);
    return 0;
}

static jint LDiv(JNIEnv *env, jbc_stack *st) {
    jlong b = PopJ(st);
    jlong a = PopJ(st);
    if (b == 0)
        return jbc_throw_new(env, "java/lang/ArithmeticException",
                             "/ by zero", JBC_EX_ARITHMETIC);
    if (a == (jlong)0x8000000000000000ULL && b == -1) {
        PushJ(st, a);
        return 0;
    }
    PushJ(st, a / b);
    return 0;
}

static jint LRem(JNIEnv *env, jbc_stack *st) {
    jlong b = PopJ(st);
    jlong a = PopJ(st);
    if (b == 0)
        return jbc_throw_new(env, "java/lang/ArithmeticException",
                             "/ by zero", JBC_EX_ARITHMETIC);
    if (a == (jlong)0x8000000000000000ULL && b == -1) {
        PushJ(st, 0);
        return 0;
    }
    PushJ(st, a % b);
    return 0;
}

/* float/double to integral with Java saturation: NaN maps to 0 */

static jint JBC_F2I(jfloat v) {
    if (v != v) return 0;
    if (v >= 2147483648.0f) return (jint)0x7FFFFFFF;
    if (v <= -2147483648.0f) return (jint)0x80000000;
    return (jint)v;
}

static jlong JBC_F2L(jfloat v) {
    if (v != v) return 0;
    if (v >= 9223372036854775808.0f) return (jlong)0x7FFFFFFFFFFFFFFFLL;
    if (v <= -9223372036854775808.0f) return (jlong)0x8000000000000000ULL;
    return (jlong)v;
}

static jint JBC_D2I(jdouble v) {
    if (v != v) return 0;
    if (v >= 2147483648.0) return (jint)0x7FFFFFFF;
    if (v <= -2147483649.0) return (jint)0x80000000;
    return (jint)v;
}

static jlong JBC_D2L(jdouble v) {
    if (v != v) return 0;
    if (v >= 9223372036854775808.0) return (jlong)0x7FFFFFFFFFFFFFFFLL;
    if (v <= -9223372036854775808.0) return (jlong)0x8000000000000000ULL;
    return (jlong)v;
}

/* ---- fields ---- */

static jint JBC_GetField(JNIEnv *env, jbc_stack *st, jfieldID fid, char kind) {
    jobject obj = PopA(st);
    if (obj == NULL) return JBC_ThrowNull(env);
    switch (kind) {
    case 'Z': PushI(st, (jint)(*env)->GetBooleanField(env, obj, fid)); break;
    case 'B': PushI(st, (jint)(*env)->GetByteField(env, obj, fid)); break;
    case 'C': PushI(st, (jint)(*env)->GetCharField(env, obj, fid)); break;
    case 'S': PushI(st, (jint)(*env)->GetShortField(env, obj, fid)); break;
    case 'I': PushI(st, (*env)->GetIntField(env, obj, fid)); break;
    case 'J': PushJ(st, (*env)->GetLongField(env, obj, fid)); break;
    case 'F': PushF(st, (*env)->GetFloatField(env, obj, fid)); break;
    case 'D': PushD(st, (*env)->GetDoubleField(env, obj, fid)); break;
    default:  PushA(st, (*env)->GetObjectField(env, obj, fid)); break;
    }
    return 0;
}

static jint JBC_PutField(JNIEnv *env, jbc_stack *st, jfieldID fid, char kind) {
    jvalue v;
    jobject obj;
    switch (kind) {
    case 'J': v.j = PopJ(st); break;
    case 'F': v.f = PopF(st); break;
    case 'D': v.d = PopD(st); break;
    case 'Z': case 'B': case 'C': case 'S': case 'I': v.i = PopI(st); break;
    default:  v.l = PopA(st); break;
    }
    obj = PopA(st);
    if (obj == NULL) return JBC_ThrowNull(env);
    switch (kind) {
    case 'Z': (*env)->SetBooleanField(env, obj, fid, (jboolean)v.i); break;
    case 'B': (*env)->SetByteField(env, obj, fid, (jbyte)v.i); break;
    case 'C': (*env)->SetCharField(env, obj, fid, (jchar)v.i); break;
    case 'S': (*env)->SetShortField(env, obj, fid, (jshort)v.i); break;
    case 'I': (*env)->SetIntField(env, obj, fid, v.i); break;
    case 'J': (*env)->SetLongField(env, obj, fid, v.j); break;
    case 'F': (*env)->SetFloatField(env, obj, fid, v.f); break;
    case 'D': (*env)->SetDoubleField(env, obj, fid, v.d); break;
    default:  (*env)->SetObjectField(env, obj, fid, v.l); break;
    }
    return 0;
}

/* ---- arrays ---- */

static jint jbc_negsize(JNIEnv *env) {
    return jbc_throw_new(env, "java/lang/NegativeArraySizeException", "",
                         JBC_EX_NEGSIZE);
}

static jint jbc_bad_index(JNIEnv *env) {
    return jbc_throw_new(env, "java/lang/ArrayIndexOutOfBoundsException", "",
                         JBC_EX_INDEX);
}

static jint JBC_NewPrimArray(JNIEnv *env, jbc_stack *st, char kind) {
    jint n = PopI(st);
    jarray arr;
    if (n < 0) return jbc_negsize(env);
    switch (kind) {
    case 'Z': arr = (*env)->NewBooleanArray(env, n); break;
    case 'B': arr = (*env)->NewByteArray(env, n); break;
    case 'C': arr = (*env)->NewCharArray(env, n); break;
    case 'S': arr = (*env)->NewShortArray(env, n); break;
    case 'I': arr = (*env)->NewIntArray(env, n); break;
    case 'J': arr = (*env)->NewLongArray(env, n); break;
    case 'F': arr = (*env)->NewFloatArray(env, n); break;
    default:  arr = (*env)->NewDoubleArray(env, n); break;
    }
    PushA(st, (jobject)arr);
    return 0;
}

static jint JBC_NewObjArray(JNIEnv *env, jbc_stack *st, const char *cls) {
    jint n = PopI(st);
    if (n < 0) return jbc_negsize(env);
    PushA(st, (jobject)(*env)->NewObjectArray(
        env, n, (*env)->FindClass(env, cls), NULL));
    return 0;
}

/* descriptor names the full array type, e.g. "[[I" with dims = 2 */
static jobject jbc_multi_build(JNIEnv *env, const char *desc,
                               const jint *counts, jint dims, jint *err) {
    jint n = counts[0];
    if (n < 0) {
        *err = jbc_negsize(env);
        return NULL;
    }
    if (desc[1] == '[') {
        jobjectArray arr = (*env)->NewObjectArray(
            env, n, (*env)->FindClass(env, desc + 1), NULL);
        if (dims > 1) {
            jint i;
            for (i = 0; i < n; i++) {
                jobject inner = jbc_multi_build(env, desc + 1, counts + 1,
                                                dims - 1, err);
                if (*err) return NULL;
                (*env)->SetObjectArrayElement(env, arr, i, inner);
            }
        }
        return (jobject)arr;
    }
    if (desc[1] == 'L') {
        char cls[256];
        size_t len = strlen(desc + 2);
        if (len == 0 || len >= sizeof cls) jbc_fail("bad array descriptor");
        memcpy(cls, desc + 2, len - 1);   /* strip trailing ; */
        cls[len - 1] = 0;
        return (jobject)(*env)->NewObjectArray(
            env, n, (*env)->FindClass(env, cls), NULL);
    }
    switch (desc[1]) {
    case 'Z': return (jobject)(*env)->NewBooleanArray(env, n);
    case 'B': return (jobject)(*env)->NewByteArray(env, n);
    case 'C': return (jobject)(*env)->NewCharArray(env, n);
    case 'S': return (jobject)(*env)->NewShortArray(env, n);
    case 'I': return (jobject)(*env)->NewIntArray(env, n);
    case 'J': return (jobject)(*env)->NewLongArray(env, n);
    case 'F': return (jobject)(*env)->NewFloatArray(env, n);
    default:  return (jobject)(*env)->NewDoubleArray(env, n);
    }
}

static jint JBC_MultiANewArray(JNIEnv *env, jbc_stack *st, const char *desc,
                               jint dims) {
    jint counts[16];
    jint i, err = 0;
    jobject arr;
    if (dims < 1 || dims > 16) jbc_fail("unsupported array rank");
    for (i = dims - 1; i >= 0; i--)
        counts[i] = PopI(st);
    arr = jbc_multi_build(env, desc, counts, dims, &err);
    if (err) return err;
    PushA(st, arr);
    return 0;
}

static jint JBC_ArrayLength(JNIEnv *env, jbc_stack *st) {
    jobject arr = PopA(st);
    if (arr == NULL) return JBC_ThrowNull(env);
    PushI(st, (*env)->GetArrayLength(env, (jarray)arr));
    return 0;
}

static jint JBC_ArrLoad(JNIEnv *env, jbc_stack *st, char kind) {
    jint idx = PopI(st);
    jobject arr = PopA(st);
    jvalue v;
    if (arr == NULL) return JBC_ThrowNull(env);
    if (idx < 0 || idx >= (*env)->GetArrayLength(env, (jarray)arr))
        return jbc_bad_index(env);
    switch (kind) {
    case 'Z': {
        jboolean t; (*env)->GetBooleanArrayRegion(env, (jarray)arr, idx, 1, &t);
        PushI(st, (jint)t); break; }
    case 'B': {
        jbyte t; (*env)->GetByteArrayRegion(env, (jarray)arr, idx, 1, &t);
        PushI(st, (jint)t); break; }
    case 'C': {
        jchar t; (*env)->GetCharArrayRegion(env, (jarray)arr, idx, 1, &t);
        PushI(st, (jint)t); break; }
    case 'S': {
        jshort t; (*env)->GetShortArrayRegion(env, (jarray)arr, idx, 1, &t);
        PushI(st, (jint)t); break; }
    case 'I':
        (*env)->GetIntArrayRegion(env, (jarray)arr, idx, 1, &v.i);
        PushI(st, v.i); break;
    case 'J':
        (*env)->GetLongArrayRegion(env, (jarray)arr, idx, 1, &v.j);
        PushJ(st, v.j); break;
    case 'F':
        (*env)->GetFloatArrayRegion(env, (jarray)arr, idx, 1, &v.f);
        PushF(st, v.f); break;
    case 'D':
        (*env)->GetDoubleArrayRegion(env, (jarray)arr, idx, 1, &v.d);
        PushD(st, v.d); break;
    default:
        PushA(st, (*env)->GetObjectArrayElement(env, (jobjectArray)arr, idx));
        break;
    }
    return 0;
}

static jint JBC_ArrStore(JNIEnv *env, jbc_stack *st, char kind) {
    jvalue v;
    jint idx;
    jobject arr;
    switch (kind) {
    case 'J': v.j = PopJ(st); break;
    case 'F': v.f = PopF(st); break;
    case 'D': v.d = PopD(st); break;
    case 'A': v.l = PopA(st); break;
    default:  v.i = PopI(st); break;
    }
    idx = PopI(st);
    arr = PopA(st);
    if (arr == NULL) return JBC_ThrowNull(env);
    if (idx < 0 || idx >= (*env)->GetArrayLength(env, (jarray)arr))
        return jbc_bad_index(env);
    switch (kind) {
    case 'Z': {
        jboolean t = (jboolean)(v.i & 1);
        (*env)->SetBooleanArrayRegion(env, (jarray)arr, idx, 1, &t); break; }
    case 'B': {
        jbyte t = (jbyte)v.i;
        (*env)->SetByteArrayRegion(env, (jarray)arr, idx, 1, &t); break; }
    case 'C': {
        jchar t = (jchar)v.i;
        (*env)->SetCharArrayRegion(env, (jarray)arr, idx, 1, &t); break; }
    case 'S': {
        jshort t = (jshort)v.i;
        (*env)->SetShortArrayRegion(env, (jarray)arr, idx, 1, &t); break; }
    case 'I': (*env)->SetIntArrayRegion(env, (jarray)arr, idx, 1, &v.i); break;
    case 'J': (*env)->SetLongArrayRegion(env, (jarray)arr, idx, 1, &v.j); break;
    case 'F': (*env)->SetFloatArrayRegion(env, (jarray)arr, idx, 1, &v.f); break;
    case 'D': (*env)->SetDoubleArrayRegion(env, (jarray)arr, idx, 1, &v.d); break;
    default:
        (*env)->SetObjectArrayElement(env, (jobjectArray)arr, idx, v.l);
        break;
    }
    return 0;
}

/* ---- casts ---- */

static jint JBC_CheckCast(JNIEnv *env, jbc_stack *st, const char *cls) {
    jobject obj;
#ifdef JBC_UNCHECKED
    obj = st->slots[st->top - 1].l;
#else
    JBC_CHECK_POP(st, 'A');
    obj = st->slots[st->top - 1].l;
#endif
    if (obj == NULL) return 0;
    if ((*env)->IsInstanceOf(env, obj, (*env)->FindClass(env, cls)))
        return 0;
    return jbc_throw_new(env, "java/lang/ClassCastException", cls, JBC_EX_CAST);
}

#endif /* JBCRT_H */
