/* In-process JNI substitute.
 *
 * Classes, fields and methods are registered by the harness before any
 * translated function runs.  Objects live in a bump arena that is reset
 * between test cases; static fields are zeroed on reset.  Lookups of
 * unregistered names abort loudly rather than limp along.
 *
 * Deliberate deviation from a live JVM: calling an instance method on a
 * NULL receiver raises NullPointerException instead of crashing, which
 * matches what the original bytecode would have done.
 */
#include "jbc_mockjni.h"

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#define MAX_CLASSES 128
#define MAX_FIELDS  32
#define MAX_METHODS 48

struct jbc_field {
    char name[64];
    char desc[64];
    int is_static;
    int slot;              /* instance slot, absolute incl. inherited */
    jvalue sval;           /* static storage */
    struct jbc_class *owner;
};

struct jbc_method {
    char name[64];
    char desc[160];
    int is_static;
    jbc_wrapper fn;
    struct jbc_class *owner;
};

enum { JBC_T_OBJ = 1, JBC_T_ARR, JBC_T_STR, JBC_T_CLS };

struct jbc_obj {
    int tag;
    struct jbc_class *cls;     /* runtime class; NULL only for arrays/strings */
    jvalue *fields;            /* JBC_T_OBJ */
    char elem;                 /* JBC_T_ARR element kind char */
    jint length;
    jvalue *data;
    char *utf;                 /* JBC_T_STR, also exception message */
};

struct jbc_class {
    struct jbc_obj header;     /* lets a jbc_class* pass as jobject */
    char name[160];
    struct jbc_class *super;
    struct jbc_field fields[MAX_FIELDS];
    int nfields;
    struct jbc_method methods[MAX_METHODS];
    int nmethods;
    int islots;                /* instance slots incl. inherited */
};

static struct jbc_class jbc_classes[MAX_CLASSES];
static int jbc_nclasses;
static jthrowable jbc_pending;

static unsigned char jbc_arena[16 << 20];
static size_t jbc_arena_top;

static void die(const char *what, const char *name) {
    fprintf(stderr, "mock jni: %s: %s\n", what, name);
    abort();
}

static void *arena_alloc(size_t n) {
    void *p;
    n = (n + 15) & ~(size_t)15;
    if (jbc_arena_top + n > sizeof jbc_arena)
        die("arena exhausted", "");
    p = jbc_arena + jbc_arena_top;
    jbc_arena_top += n;
    memset(p, 0, n);
    return p;
}

static jvalue jbc_default_init(JNIEnv *env, jvalue self, const jvalue *args) {
    jvalue r;
    (void)env; (void)self; (void)args;
    memset(&r, 0, sizeof r);
    return r;
}

static struct jbc_class *find_class_raw(const char *name) {
    int i;
    for (i = 0; i < jbc_nclasses; i++)
        if (strcmp(jbc_classes[i].name, name) == 0)
            return &jbc_classes[i];
    return NULL;
}

static struct jbc_class *register_raw(const char *name,
                                      struct jbc_class *super) {
    struct jbc_class *c;
    if (jbc_nclasses >= MAX_CLASSES)
        die("too many classes", name);
    c = &jbc_classes[jbc_nclasses++];
    memset(c, 0, sizeof *c);
    snprintf(c->name, sizeof c->name, "%s", name);
    c->super = super;
    c->islots = super ? super->islots : 0;
    c->header.tag = JBC_T_CLS;
    c->header.cls = c;
    return c;
}

static void bootstrap(void) {
    struct jbc_class *object, *throwable, *exc, *rte, *ioobe;
    if (jbc_nclasses)
        return;
    object = register_raw("java/lang/Object", NULL);
    jbc_add_method(object, "<init>", "()V", 0, jbc_default_init);
    register_raw("java/lang/String", object);
    throwable = register_raw("java/lang/Throwable", object);
    jbc_add_method(throwable, "<init>", "()V", 0, jbc_default_init);
    exc = register_raw("java/lang/Exception", throwable);
    rte = register_raw("java/lang/RuntimeException", exc);
    register_raw("java/lang/ArithmeticException", rte);
    register_raw("java/lang/NullPointerException", rte);
    register_raw("java/lang/ClassCastException", rte);
    register_raw("java/lang/NegativeArraySizeException", rte);
    ioobe = register_raw("java/lang/IndexOutOfBoundsException", rte);
    register_raw("java/lang/ArrayIndexOutOfBoundsException", ioobe);
}

jbc_class *jbc_register_class(const char *name, const char *super_name) {
    struct jbc_class *super, *c;
    bootstrap();
    if (find_class_raw(name))
        die("class registered twice", name);
    super = find_class_raw(super_name ? super_name : "java/lang/Object");
    if (!super)
        die("superclass not registered", super_name);
    c = register_raw(name, super);
    jbc_add_method(c, "<init>", "()V", 0, jbc_default_init);
    return c;
}

void jbc_add_field(jbc_class *cls, const char *name, const char *desc,
                   int is_static) {
    struct jbc_field *f;
    if (cls->nfields >= MAX_FIELDS)
        die("too many fields", name);
    f = &cls->fields[cls->nfields++];
    snprintf(f->name, sizeof f->name, "%s", name);
    snprintf(f->desc, sizeof f->desc, "%s", desc);
    f->is_static = is_static;
    f->owner = cls;
    if (!is_static)
        f->slot = cls->islots++;
}

void jbc_add_method(jbc_class *cls, const char *name, const char *desc,
                    int is_static, jbc_wrapper fn) {
    struct jbc_method *m;
    int i;
    for (i = 0; i < cls->nmethods; i++) {
        m = &cls->methods[i];
        if (strcmp(m->name, name) == 0 && strcmp(m->desc, desc) == 0) {
            m->is_static = is_static;   /* redefinition wins */
            m->fn = fn;
            return;
        }
    }
    if (cls->nmethods >= MAX_METHODS)
        die("too many methods", name);
    m = &cls->methods[cls->nmethods++];
    snprintf(m->name, sizeof m->name, "%s", name);
    snprintf(m->desc, sizeof m->desc, "%s", desc);
    m->is_static = is_static;
    m->fn = fn;
    m->owner = cls;
}

void jbc_load_fixture(const char *path, jbc_resolver resolve) {
    char line[512], kind[16], cls[160], name[64], desc[160], mode[16];
    FILE *fh = fopen(path, "r");
    if (!fh)
        die("fixture not found", path);
    bootstrap();
    while (fgets(line, sizeof line, fh)) {
        if (line[0] == '\n' || line[0] == '#')
            continue;
        if (sscanf(line, "%15s", kind) != 1)
            continue;
        if (strcmp(kind, "class") == 0) {
            if (sscanf(line, "%*s %159s %159s", cls, desc) != 2)
                die("bad fixture line", line);
            if (!find_class_raw(cls))
                jbc_register_class(cls, desc);
        } else if (strcmp(kind, "field") == 0) {
            if (sscanf(line, "%*s %159s %63s %159s %15s",
                       cls, name, desc, mode) != 4)
                die("bad fixture line", line);
            jbc_add_field(find_class_raw(cls), name, desc,
                          strcmp(mode, "static") == 0);
        } else if (strcmp(kind, "method") == 0) {
            jbc_wrapper fn;
            if (sscanf(line, "%*s %159s %63s %159s %15s",
                       cls, name, desc, mode) != 4)
                die("bad fixture line", line);
            fn = resolve ? resolve(cls, name, desc) : NULL;
            if (!fn)
                die("fixture method has no body", name);
            jbc_add_method(find_class_raw(cls), name, desc,
                           strcmp(mode, "static") == 0, fn);
        } else {
            die("bad fixture line", line);
        }
    }
    fclose(fh);
}

void jbc_reset(void) {
    int i, j;
    bootstrap();
    jbc_pending = NULL;
    jbc_arena_top = 0;
    for (i = 0; i < jbc_nclasses; i++)
        for (j = 0; j < jbc_classes[i].nfields; j++)
            memset(&jbc_classes[i].fields[j].sval, 0, sizeof(jvalue));
}

/* ---- env functions ---- */

static jclass m_FindClass(JNIEnv *env, const char *name) {
    struct jbc_class *c;
    (void)env;
    bootstrap();
    c = find_class_raw(name);
    if (!c) {
        if (name[0] == '[')     /* array classes materialize on demand */
            c = register_raw(name, find_class_raw("java/lang/Object"));
        else
            die("FindClass: unregistered class", name);
    }
    return (jclass)c;
}

static struct jbc_method *lookup_method(struct jbc_class *c, const char *name,
                                        const char *desc) {
    int i;
    for (; c; c = c->super)
        for (i = 0; i < c->nmethods; i++)
            if (strcmp(c->methods[i].name, name) == 0
                    && strcmp(c->methods[i].desc, desc) == 0)
                return &c->methods[i];
    return NULL;
}

static jmethodID m_GetMethodID(JNIEnv *env, jclass cls, const char *name,
                               const char *desc) {
    struct jbc_method *m;
    (void)env;
    m = lookup_method((struct jbc_class *)cls, name, desc);
    if (!m)
        die("GetMethodID: no such method", name);
    return m;
}

static jfieldID lookup_field(struct jbc_class *c, const char *name,
                             const char *desc) {
    int i;
    for (; c; c = c->super)
        for (i = 0; i < c->nfields; i++)
            if (strcmp(c->fields[i].name, name) == 0
                    && strcmp(c->fields[i].desc, desc) == 0)
                return &c->fields[i];
    return NULL;
}

static jfieldID m_GetFieldID(JNIEnv *env, jclass cls, const char *name,
                             const char *desc) {
    jfieldID f = lookup_field((struct jbc_class *)cls, name, desc);
    (void)env;
    if (!f)
        die("GetFieldID: no such field", name);
    return f;
}

static struct jbc_obj *alloc_instance(struct jbc_class *c) {
    struct jbc_obj *o = arena_alloc(sizeof *o);
    o->tag = JBC_T_OBJ;
    o->cls = c;
    if (c->islots)
        o->fields = arena_alloc(c->islots * sizeof(jvalue));
    return o;
}

jobject jbc_new_instance(JNIEnv *env, const char *class_name) {
    return (jobject)alloc_instance((struct jbc_class *)m_FindClass(env, class_name));
}

const char *jbc_class_name(jobject obj) {
    if (!obj)
        return "null";
    switch (obj->tag) {
    case JBC_T_STR: return "java/lang/String";
    case JBC_T_ARR: return "array";
    case JBC_T_CLS: return "java/lang/Class";
    default: return obj->cls->name;
    }
}

static jint throw_npe(JNIEnv *env) {
    struct jbc_obj *o = alloc_instance(
        (struct jbc_class *)m_FindClass(env, "java/lang/NullPointerException"));
    jbc_pending = (jthrowable)o;
    return 0;
}

static jvalue dispatch_virtual(JNIEnv *env, jobject target, jmethodID mid,
                               const jvalue *args) {
    jvalue self, zero;
    struct jbc_method *m;
    memset(&zero, 0, sizeof zero);
    if (target == NULL) {
        throw_npe(env);
        return zero;
    }
    if (target->tag == JBC_T_OBJ || target->tag == JBC_T_CLS) {
        m = lookup_method(target->cls, mid->name, mid->desc);
        if (m)
            mid = m;
    }
    if (!mid->fn)
        die("call to method without a body", mid->name);
    self.l = target;
    return mid->fn(env, self, args);
}

static jvalue dispatch_exact(JNIEnv *env, jobject target, jclass cls,
                             jmethodID mid, const jvalue *args) {
    jvalue self, zero;
    struct jbc_method *m;
    memset(&zero, 0, sizeof zero);
    if (target == NULL) {
        throw_npe(env);
        return zero;
    }
    m = lookup_method((struct jbc_class *)cls, mid->name, mid->desc);
    if (!m || !m->fn)
        die("nonvirtual call to missing method", mid->name);
    self.l = target;
    return m->fn(env, self, args);
}

static jvalue dispatch_static(JNIEnv *env, jclass cls, jmethodID mid,
                              const jvalue *args) {
    jvalue self;
    (void)cls;
    if (!mid->fn)
        die("static call to method without a body", mid->name);
    self.l = NULL;
    return mid->fn(env, self, args);
}

static jobject m_NewObjectA(JNIEnv *env, jclass cls, jmethodID mid,
                            const jvalue *args) {
    struct jbc_obj *o = alloc_instance((struct jbc_class *)cls);
    jvalue self;
    self.l = (jobject)o;
    mid->fn(env, self, args);
    if (jbc_pending)
        return NULL;
    return (jobject)o;
}

#define DEF_CALL(Name, rtype, member) \
    static rtype m_Call##Name##MethodA(JNIEnv *env, jobject t, jmethodID m, \
                                       const jvalue *a) { \
        return dispatch_virtual(env, t, m, a).member; \
    } \
    static rtype m_CallNonvirtual##Name##MethodA( \
            JNIEnv *env, jobject t, jclass c, jmethodID m, const jvalue *a) { \
        return dispatch_exact(env, t, c, m, a).member; \
    } \
    static rtype m_CallStatic##Name##MethodA(JNIEnv *env, jclass c, \
                                             jmethodID m, const jvalue *a) { \
        return dispatch_static(env, c, m, a).member; \
    }

DEF_CALL(Object, jobject, l)
DEF_CALL(Boolean, jboolean, z)
DEF_CALL(Byte, jbyte, b)
DEF_CALL(Char, jchar, c)
DEF_CALL(Short, jshort, s)
DEF_CALL(Int, jint, i)
DEF_CALL(Long, jlong, j)
DEF_CALL(Float, jfloat, f)
DEF_CALL(Double, jdouble, d)

static void m_CallVoidMethodA(JNIEnv *env, jobject t, jmethodID m,
                              const jvalue *a) {
    dispatch_virtual(env, t, m, a);
}

static void m_CallNonvirtualVoidMethodA(JNIEnv *env, jobject t, jclass c,
                                        jmethodID m, const jvalue *a) {
    dispatch_exact(env, t, c, m, a);
}

static void m_CallStaticVoidMethodA(JNIEnv *env, jclass c, jmethodID m,
                                    const jvalue *a) {
    dispatch_static(env, c, m, a);
}

static jvalue *instance_slot(JNIEnv *env, jobject obj, jfieldID fid) {
    (void)env;
    if (!obj || obj->tag != JBC_T_OBJ || !obj->fields)
        die("field access on non-object", fid->name);
    return &obj->fields[fid->slot];
}

#define DEF_FIELD(Name, rtype, member) \
    static rtype m_Get##Name##Field(JNIEnv *env, jobject o, jfieldID f) { \
        return instance_slot(env, o, f)->member; \
    } \
    static void m_Set##Name##Field(JNIEnv *env, jobject o, jfieldID f, \
                                   rtype v) { \
        instance_slot(env, o, f)->member = v; \
    } \
    static rtype m_GetStatic##Name##Field(JNIEnv *env, jclass c, jfieldID f) { \
        (void)env; (void)c; \
        return f->sval.member; \
    } \
    static void m_SetStatic##Name##Field(JNIEnv *env, jclass c, jfieldID f, \
                                         rtype v) { \
        (void)env; (void)c; \
        f->sval.member = v; \
    }

DEF_FIELD(Object, jobject, l)
DEF_FIELD(Boolean, jboolean, z)
DEF_FIELD(Byte, jbyte, b)
DEF_FIELD(Char, jchar, c)
DEF_FIELD(Short, jshort, s)
DEF_FIELD(Int, jint, i)
DEF_FIELD(Long, jlong, j)
DEF_FIELD(Float, jfloat, f)
DEF_FIELD(Double, jdouble, d)

static jstring m_NewStringUTF(JNIEnv *env, const char *utf) {
    struct jbc_obj *o = arena_alloc(sizeof *o);
    (void)env;
    o->tag = JBC_T_STR;
    o->cls = find_class_raw("java/lang/String");
    o->utf = arena_alloc(strlen(utf) + 1);
    strcpy(o->utf, utf);
    return (jstring)o;
}

static jarray new_array(char elem, jsize n) {
    struct jbc_obj *o = arena_alloc(sizeof *o);
    o->tag = JBC_T_ARR;
    o->elem = elem;
    o->length = n;
    if (n)
        o->data = arena_alloc((size_t)n * sizeof(jvalue));
    return (jarray)o;
}

#define DEF_NEWARR(Name, ch) \
    static jarray m_New##Name##Array(JNIEnv *env, jsize n) { \
        (void)env; \
        return new_array(ch, n); \
    }

DEF_NEWARR(Boolean, 'Z')
DEF_NEWARR(Byte, 'B')
DEF_NEWARR(Char, 'C')
DEF_NEWARR(Short, 'S')
DEF_NEWARR(Int, 'I')
DEF_NEWARR(Long, 'J')
DEF_NEWARR(Float, 'F')
DEF_NEWARR(Double, 'D')

static jobjectArray m_NewObjectArray(JNIEnv *env, jsize n, jclass cls,
                                     jobject init) {
    jarray arr = new_array('L', n);
    jsize i;
    (void)env; (void)cls;
    if (init)
        for (i = 0; i < n; i++)
            arr->data[i].l = init;
    return (jobjectArray)arr;
}

static jsize m_GetArrayLength(JNIEnv *env, jarray arr) {
    (void)env;
    if (!arr || arr->tag != JBC_T_ARR)
        die("GetArrayLength on non-array", "");
    return arr->length;
}

static jvalue *array_slot(jarray arr, jsize i) {
    if (!arr || arr->tag != JBC_T_ARR || i < 0 || i >= arr->length)
        die("array access out of range", "");
    return &arr->data[i];
}

static jobject m_GetObjectArrayElement(JNIEnv *env, jobjectArray arr, jsize i) {
    (void)env;
    return array_slot(arr, i)->l;
}

static void m_SetObjectArrayElement(JNIEnv *env, jobjectArray arr, jsize i,
                                    jobject v) {
    (void)env;
    array_slot(arr, i)->l = v;
}

#define DEF_REGION(Name, rtype, member) \
    static void m_Get##Name##ArrayRegion(JNIEnv *env, jarray arr, jsize start, \
                                         jsize len, rtype *buf) { \
        jsize i; \
        (void)env; \
        for (i = 0; i < len; i++) \
            buf[i] = array_slot(arr, start + i)->member; \
    } \
    static void m_Set##Name##ArrayRegion(JNIEnv *env, jarray arr, jsize start, \
                                         jsize len, const rtype *buf) { \
        jsize i; \
        (void)env; \
        for (i = 0; i < len; i++) \
            array_slot(arr, start + i)->member = buf[i]; \
    }

DEF_REGION(Boolean, jboolean, z)
DEF_REGION(Byte, jbyte, b)
DEF_REGION(Char, jchar, c)
DEF_REGION(Short, jshort, s)
DEF_REGION(Int, jint, i)
DEF_REGION(Long, jlong, j)
DEF_REGION(Float, jfloat, f)
DEF_REGION(Double, jdouble, d)

static jboolean m_IsInstanceOf(JNIEnv *env, jobject obj, jclass cls) {
    struct jbc_class *want = (struct jbc_class *)cls;
    struct jbc_class *c;
    (void)env;
    if (!obj)
        return JNI_TRUE;       /* JNI treats null as assignable anywhere */
    if (obj->tag == JBC_T_ARR)
        return strcmp(want->name, "java/lang/Object") == 0
            || want->name[0] == '[';
    for (c = obj->cls; c; c = c->super)
        if (c == want)
            return JNI_TRUE;
    return JNI_FALSE;
}

static jint m_Throw(JNIEnv *env, jthrowable t) {
    (void)env;
    jbc_pending = t;
    return 0;
}

static jint m_ThrowNew(JNIEnv *env, jclass cls, const char *msg) {
    struct jbc_obj *o = alloc_instance((struct jbc_class *)cls);
    (void)env;
    if (msg) {
        o->utf = arena_alloc(strlen(msg) + 1);
        strcpy(o->utf, msg);
    }
    jbc_pending = (jthrowable)o;
    return 0;
}

static jthrowable m_ExceptionOccurred(JNIEnv *env) {
    (void)env;
    return jbc_pending;
}

static void m_ExceptionClear(JNIEnv *env) {
    (void)env;
    jbc_pending = NULL;
}

static const struct JBC_NativeInterface jbc_iface = {
    m_FindClass,
    m_GetMethodID,
    m_GetMethodID,       /* static lookup shares the table walk */
    m_GetFieldID,
    m_GetFieldID,
    m_NewObjectA,
    m_CallVoidMethodA,
    m_CallObjectMethodA,
    m_CallBooleanMethodA,
    m_CallByteMethodA,
    m_CallCharMethodA,
    m_CallShortMethodA,
    m_CallIntMethodA,
    m_CallLongMethodA,
    m_CallFloatMethodA,
    m_CallDoubleMethodA,
    m_CallNonvirtualVoidMethodA,
    m_CallNonvirtualObjectMethodA,
    m_CallNonvirtualBooleanMethodA,
    m_CallNonvirtualByteMethodA,
    m_CallNonvirtualCharMethodA,
    m_CallNonvirtualShortMethodA,
    m_CallNonvirtualIntMethodA,
    m_CallNonvirtualLongMethodA,
    m_CallNonvirtualFloatMethodA,
    m_CallNonvirtualDoubleMethodA,
    m_CallStaticVoidMethodA,
    m_CallStaticObjectMethodA,
    m_CallStaticBooleanMethodA,
    m_CallStaticByteMethodA,
    m_CallStaticCharMethodA,
    m_CallStaticShortMethodA,
    m_CallStaticIntMethodA,
    m_CallStaticLongMethodA,
    m_CallStaticFloatMethodA,
    m_CallStaticDoubleMethodA,
    m_GetObjectField,
    m_GetBooleanField,
    m_GetByteField,
    m_GetCharField,
    m_GetShortField,
    m_GetIntField,
    m_GetLongField,
    m_GetFloatField,
    m_GetDoubleField,
    m_SetObjectField,
    m_SetBooleanField,
    m_SetByteField,
    m_SetCharField,
    m_SetShortField,
    m_SetIntField,
    m_SetLongField,
    m_SetFloatField,
    m_SetDoubleField,
    m_GetStaticObjectField,
    m_GetStaticBooleanField,
    m_GetStaticByteField,
    m_GetStaticCharField,
    m_GetStaticShortField,
    m_GetStaticIntField,
    m_GetStaticLongField,
    m_GetStaticFloatField,
    m_GetStaticDoubleField,
    m_SetStaticObjectField,
    m_SetStaticBooleanField,
    m_SetStaticByteField,
    m_SetStaticCharField,
    m_SetStaticShortField,
    m_SetStaticIntField,
    m_SetStaticLongField,
    m_SetStaticFloatField,
    m_SetStaticDoubleField,
    m_NewStringUTF,
    m_NewBooleanArray,
    m_NewByteArray,
    m_NewCharArray,
    m_NewShortArray,
    m_NewIntArray,
    m_NewLongArray,
    m_NewFloatArray,
    m_NewDoubleArray,
    m_NewObjectArray,
    m_GetArrayLength,
    m_GetObjectArrayElement,
    m_SetObjectArrayElement,
    m_GetBooleanArrayRegion,
    m_GetByteArrayRegion,
    m_GetCharArrayRegion,
    m_GetShortArrayRegion,
    m_GetIntArrayRegion,
    m_GetLongArrayRegion,
    m_GetFloatArrayRegion,
    m_GetDoubleArrayRegion,
    m_SetBooleanArrayRegion,
    m_SetByteArrayRegion,
    m_SetCharArrayRegion,
    m_SetShortArrayRegion,
    m_SetIntArrayRegion,
    m_SetLongArrayRegion,
    m_SetFloatArrayRegion,
    m_SetDoubleArrayRegion,
    m_IsInstanceOf,
    m_Throw,
    m_ThrowNew,
    m_ExceptionOccurred,
    m_ExceptionClear,
};

static JNIEnv jbc_env_ptr = &jbc_iface;

JNIEnv *jbc_env(void) {
    bootstrap();
    return &jbc_env_ptr;
}

/* ---- outcome reporting ---- */

static int report_thrown(JNIEnv *env, const char *id) {
    jthrowable ex = (*env)->ExceptionOccurred(env);
    if (!ex)
        return 0;
    printf("%s threw %s\n", id, jbc_class_name((jobject)ex));
    (*env)->ExceptionClear(env);
    return 1;
}

int jbc_finish_v(JNIEnv *env, const char *id) {
    if (report_thrown(env, id))
        return 1;
    printf("%s ret V\n", id);
    return 0;
}

int jbc_finish_i(JNIEnv *env, const char *id, jint v) {
    if (report_thrown(env, id))
        return 1;
    printf("%s ret I %d\n", id, (int)v);
    return 0;
}

int jbc_finish_j(JNIEnv *env, const char *id, jlong v) {
    if (report_thrown(env, id))
        return 1;
    printf("%s ret J %lld\n", id, (long long)v);
    return 0;
}

int jbc_finish_f(JNIEnv *env, const char *id, jfloat v) {
    if (report_thrown(env, id))
        return 1;
    printf("%s ret F %a\n", id, (double)v);
    return 0;
}

int jbc_finish_d(JNIEnv *env, const char *id, jdouble v) {
    if (report_thrown(env, id))
        return 1;
    printf("%s ret D %a\n", id, v);
    return 0;
}

int jbc_finish_a(JNIEnv *env, const char *id, jobject v) {
    if (report_thrown(env, id))
        return 1;
    if (v == NULL)
        printf("%s ret A null\n", id);
    else
        printf("%s ret A %s\n", id, jbc_class_name(v));
    return 0;
}

void jbc_dump_static_i(JNIEnv *env, const char *id, const char *cls,
                       const char *name, const char *desc) {
    jclass c = (*env)->FindClass(env, cls);
    jfieldID f = (*env)->GetStaticFieldID(env, c, name, desc);
    printf("%s static %s %d\n", id, name, (int)f->sval.i);
}

void jbc_dump_static_j(JNIEnv *env, const char *id, const char *cls,
                       const char *name, const char *desc) {
    jclass c = (*env)->FindClass(env, cls);
    jfieldID f = (*env)->GetStaticFieldID(env, c, name, desc);
    printf("%s static %s %lld\n", id, name, (long long)f->sval.j);
}
