/* Self-contained stand-in for jni.h: enough of the JNIEnv function table
 * to run translated code against an in-process object model instead of a
 * real JVM.  Types and calling conventions mirror the JNI spec so the
 * same generated C compiles against either header. */
#ifndef JBC_MOCKJNI_H
#define JBC_MOCKJNI_H

#include <stdint.h>

typedef uint8_t  jboolean;
typedef int8_t   jbyte;
typedef uint16_t jchar;
typedef int16_t  jshort;
typedef int32_t  jint;
typedef int64_t  jlong;
typedef float    jfloat;
typedef double   jdouble;
typedef jint     jsize;

struct jbc_obj;
typedef struct jbc_obj *jobject;
typedef jobject jclass;
typedef jobject jstring;
typedef jobject jarray;
typedef jobject jthrowable;
typedef jobject jobjectArray;

typedef union jvalue {
    jboolean z;
    jbyte    b;
    jchar    c;
    jshort   s;
    jint     i;
    jlong    j;
    jfloat   f;
    jdouble  d;
    jobject  l;
} jvalue;

typedef struct jbc_field  *jfieldID;
typedef struct jbc_method *jmethodID;

#define JNI_FALSE 0
#define JNI_TRUE  1
#define JNIEXPORT
#define JNICALL

struct JBC_NativeInterface;
typedef const struct JBC_NativeInterface *JNIEnv;

struct JBC_NativeInterface {
    jclass (*FindClass)(JNIEnv *, const char *);
    jmethodID (*GetMethodID)(JNIEnv *, jclass, const char *, const char *);
    jmethodID (*GetStaticMethodID)(JNIEnv *, jclass, const char *, const char *);
    jfieldID (*GetFieldID)(JNIEnv *, jclass, const char *, const char *);
    jfieldID (*GetStaticFieldID)(JNIEnv *, jclass, const char *, const char *);

    jobject (*NewObjectA)(JNIEnv *, jclass, jmethodID, const jvalue *);

    void (*CallVoidMethodA)(JNIEnv *, jobject, jmethodID, const jvalue *);
    jobject (*CallObjectMethodA)(JNIEnv *, jobject, jmethodID, const jvalue *);
    jboolean (*CallBooleanMethodA)(JNIEnv *, jobject, jmethodID, const jvalue *);
    jbyte (*CallByteMethodA)(JNIEnv *, jobject, jmethodID, const jvalue *);
    jchar (*CallCharMethodA)(JNIEnv *, jobject, jmethodID, const jvalue *);
    jshort (*CallShortMethodA)(JNIEnv *, jobject, jmethodID, const jvalue *);
    jint (*CallIntMethodA)(JNIEnv *, jobject, jmethodID, const jvalue *);
    jlong (*CallLongMethodA)(JNIEnv *, jobject, jmethodID, const jvalue *);
    jfloat (*CallFloatMethodA)(JNIEnv *, jobject, jmethodID, const jvalue *);
    jdouble (*CallDoubleMethodA)(JNIEnv *, jobject, jmethodID, const jvalue *);

    void (*CallNonvirtualVoidMethodA)(JNIEnv *, jobject, jclass, jmethodID, const jvalue *);
    jobject (*CallNonvirtualObjectMethodA)(JNIEnv *, jobject, jclass, jmethodID, const jvalue *);
    jboolean (*CallNonvirtualBooleanMethodA)(JNIEnv *, jobject, jclass, jmethodID, const jvalue *);
    jbyte (*CallNonvirtualByteMethodA)(JNIEnv *, jobject, jclass, jmethodID, const jvalue *);
    jchar (*CallNonvirtualCharMethodA)(JNIEnv *, jobject, jclass, jmethodID, const jvalue *);
    jshort (*CallNonvirtualShortMethodA)(JNIEnv *, jobject, jclass, jmethodID, const jvalue *);
    jint (*CallNonvirtualIntMethodA)(JNIEnv *, jobject, jclass, jmethodID, const jvalue *);
    jlong (*CallNonvirtualLongMethodA)(JNIEnv *, jobject, jclass, jmethodID, const jvalue *);
    jfloat (*CallNonvirtualFloatMethodA)(JNIEnv *, jobject, jclass, jmethodID, const jvalue *);
    jdouble (*CallNonvirtualDoubleMethodA)(JNIEnv *, jobject, jclass, jmethodID, const jvalue *);

    void (*CallStaticVoidMethodA)(JNIEnv *, jclass, jmethodID, const jvalue *);
    jobject (*CallStaticObjectMethodA)(JNIEnv *, jclass, jmethodID, const jvalue *);
    jboolean (*CallStaticBooleanMethodA)(JNIEnv *, jclass, jmethodID, const jvalue *);
    jbyte (*CallStaticByteMethodA)(JNIEnv *, jclass, jmethodID, const jvalue *);
    jchar (*CallStaticCharMethodA)(JNIEnv *, jclass, jmethodID, const jvalue *);
    jshort (*CallStaticShortMethodA)(JNIEnv *, jclass, jmethodID, const jvalue *);
    jint (*CallStaticIntMethodA)(JNIEnv *, jclass, jmethodID, const jvalue *);
    jlong (*CallStaticLongMethodA)(JNIEnv *, jclass, jmethodID, const jvalue *);
    jfloat (*CallStaticFloatMethodA)(JNIEnv *, jclass, jmethodID, const jvalue *);
    jdouble (*CallStaticDoubleMethodA)(JNIEnv *, jclass, jmethodID, const jvalue *);

    jobject (*GetObjectField)(JNIEnv *, jobject, jfieldID);
    jboolean (*GetBooleanField)(JNIEnv *, jobject, jfieldID);
    jbyte (*GetByteField)(JNIEnv *, jobject, jfieldID);
    jchar (*GetCharField)(JNIEnv *, jobject, jfieldID);
    jshort (*GetShortField)(JNIEnv *, jobject, jfieldID);
    jint (*GetIntField)(JNIEnv *, jobject, jfieldID);
    jlong (*GetLongField)(JNIEnv *, jobject, jfieldID);
    jfloat (*GetFloatField)(JNIEnv *, jobject, jfieldID);
    jdouble (*GetDoubleField)(JNIEnv *, jobject, jfieldID);

    void (*SetObjectField)(JNIEnv *, jobject, jfieldID, jobject);
    void (*SetBooleanField)(JNIEnv *, jobject, jfieldID, jboolean);
    void (*SetByteField)(JNIEnv *, jobject, jfieldID, jbyte);
    void (*SetCharField)(JNIEnv *, jobject, jfieldID, jchar);
    void (*SetShortField)(JNIEnv *, jobject, jfieldID, jshort);
    void (*SetIntField)(JNIEnv *, jobject, jfieldID, jint);
    void (*SetLongField)(JNIEnv *, jobject, jfieldID, jlong);
    void (*SetFloatField)(JNIEnv *, jobject, jfieldID, jfloat);
    void (*SetDoubleField)(JNIEnv *, jobject, jfieldID, jdouble);

    jobject (*GetStaticObjectField)(JNIEnv *, jclass, jfieldID);
    jboolean (*GetStaticBooleanField)(JNIEnv *, jclass, jfieldID);
    jbyte (*GetStaticByteField)(JNIEnv *, jclass, jfieldID);
    jchar (*GetStaticCharField)(JNIEnv *, jclass, jfieldID);
    jshort (*GetStaticShortField)(JNIEnv *, jclass, jfieldID);
    jint (*GetStaticIntField)(JNIEnv *, jclass, jfieldID);
    jlong (*GetStaticLongField)(JNIEnv *, jclass, jfieldID);
    jfloat (*GetStaticFloatField)(JNIEnv *, jclass, jfieldID);
    jdouble (*GetStaticDoubleField)(JNIEnv *, jclass, jfieldID);

    void (*SetStaticObjectField)(JNIEnv *, jclass, jfieldID, jobject);
    void (*SetStaticBooleanField)(JNIEnv *, jclass, jfieldID, jboolean);
    void (*SetStaticByteField)(JNIEnv *, jclass, jfieldID, jbyte);
    void (*SetStaticCharField)(JNIEnv *, jclass, jfieldID, jchar);
    void (*SetStaticShortField)(JNIEnv *, jclass, jfieldID, jshort);
    void (*SetStaticIntField)(JNIEnv *, jclass, jfieldID, jint);
    void (*SetStaticLongField)(JNIEnv *, jclass, jfieldID, jlong);
    void (*SetStaticFloatField)(JNIEnv *, jclass, jfieldID, jfloat);
    void (*SetStaticDoubleField)(JNIEnv *, jclass, jfieldID, jdouble);

    jstring (*NewStringUTF)(JNIEnv *, const char *);

    jarray (*NewBooleanArray)(JNIEnv *, jsize);
    jarray (*NewByteArray)(JNIEnv *, jsize);
    jarray (*NewCharArray)(JNIEnv *, jsize);
    jarray (*NewShortArray)(JNIEnv *, jsize);
    jarray (*NewIntArray)(JNIEnv *, jsize);
    jarray (*NewLongArray)(JNIEnv *, jsize);
    jarray (*NewFloatArray)(JNIEnv *, jsize);
    jarray (*NewDoubleArray)(JNIEnv *, jsize);
    jobjectArray (*NewObjectArray)(JNIEnv *, jsize, jclass, jobject);

    jsize (*GetArrayLength)(JNIEnv *, jarray);
    jobject (*GetObjectArrayElement)(JNIEnv *, jobjectArray, jsize);
    void (*SetObjectArrayElement)(JNIEnv *, jobjectArray, jsize, jobject);

    void (*GetBooleanArrayRegion)(JNIEnv *, jarray, jsize, jsize, jboolean *);
    void (*GetByteArrayRegion)(JNIEnv *, jarray, jsize, jsize, jbyte *);
    void (*GetCharArrayRegion)(JNIEnv *, jarray, jsize, jsize, jchar *);
    void (*GetShortArrayRegion)(JNIEnv *, jarray, jsize, jsize, jshort *);
    void (*GetIntArrayRegion)(JNIEnv *, jarray, jsize, jsize, jint *);
    void (*GetLongArrayRegion)(JNIEnv *, jarray, jsize, jsize, jlong *);
    void (*GetFloatArrayRegion)(JNIEnv *, jarray, jsize, jsize, jfloat *);
    void (*GetDoubleArrayRegion)(JNIEnv *, jarray, jsize, jsize, jdouble *);

    void (*SetBooleanArrayRegion)(JNIEnv *, jarray, jsize, jsize, const jboolean *);
    void (*SetByteArrayRegion)(JNIEnv *, jarray, jsize, jsize, const jbyte *);
    void (*SetCharArrayRegion)(JNIEnv *, jarray, jsize, jsize, const jchar *);
    void (*SetShortArrayRegion)(JNIEnv *, jarray, jsize, jsize, const jshort *);
    void (*SetIntArrayRegion)(JNIEnv *, jarray, jsize, jsize, const jint *);
    void (*SetLongArrayRegion)(JNIEnv *, jarray, jsize, jsize, const jlong *);
    void (*SetFloatArrayRegion)(JNIEnv *, jarray, jsize, jsize, const jfloat *);
    void (*SetDoubleArrayRegion)(JNIEnv *, jarray, jsize, jsize, const jdouble *);

    jboolean (*IsInstanceOf)(JNIEnv *, jobject, jclass);
    jint (*Throw)(JNIEnv *, jthrowable);
    jint (*ThrowNew)(JNIEnv *, jclass, const char *);
    jthrowable (*ExceptionOccurred)(JNIEnv *);
    void (*ExceptionClear)(JNIEnv *);
};

/* ---- fixture side: the harness registers classes, fields and wrapper
 * functions before invoking translated code. ---- */

typedef struct jbc_class jbc_class;

/* every callee the translated code can reach uses this uniform shape */
typedef jvalue (*jbc_wrapper)(JNIEnv *env, jvalue self, const jvalue *args);

JNIEnv *jbc_env(void);
void jbc_reset(void);

jbc_class *jbc_register_class(const char *name, const char *super_name);
void jbc_add_field(jbc_class *cls, const char *name, const char *desc,
                   int is_static);
void jbc_add_method(jbc_class *cls, const char *name, const char *desc,
                    int is_static, jbc_wrapper fn);

/* Registers classes, fields and methods from a line-oriented fixture file:
 *   class <name> <super>
 *   field <class> <name> <desc> static|instance
 *   method <class> <name> <desc> static|instance
 * Method bodies come from the resolver; returning NULL aborts. */
typedef jbc_wrapper (*jbc_resolver)(const char *cls, const char *name,
                                    const char *desc);
void jbc_load_fixture(const char *path, jbc_resolver resolve);

jobject jbc_new_instance(JNIEnv *env, const char *class_name);
const char *jbc_class_name(jobject obj);

/* outcome reporting, one line per invocation:
 *   <id> ret I 3 | <id> ret F 0x1.8p+1 | <id> ret A null | <id> threw <cls> */
int jbc_finish_v(JNIEnv *env, const char *id);
int jbc_finish_i(JNIEnv *env, const char *id, jint v);
int jbc_finish_j(JNIEnv *env, const char *id, jlong v);
int jbc_finish_f(JNIEnv *env, const char *id, jfloat v);
int jbc_finish_d(JNIEnv *env, const char *id, jdouble v);
int jbc_finish_a(JNIEnv *env, const char *id, jobject v);
void jbc_dump_static_i(JNIEnv *env, const char *id, const char *cls,
                       const char *name, const char *desc);
void jbc_dump_static_j(JNIEnv *env, const char *id, const char *cls,
                       const char *name, const char *desc);

#endif /* JBC_MOCKJNI_H */
