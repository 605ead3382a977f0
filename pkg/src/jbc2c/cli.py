"""Pipeline driver: read class files, select methods, rewrite them to
native stubs, translate the original bodies to C, and emit everything
plus a build script for the shared library."""

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import Jbc2cError
from .bytecode import Unsupported, check_method
from .classfile import ClassModel, emit_class, parse_class
from .rewriter import (AlreadyNative, SelectionConfig, build_rewrite_plan,
                       find_annotated_methods, inject_library_loader,
                       nativize_method)
from .translator import (CFunction, TranslationConfig, UnsupportedOpcode,
                         render_c_unit, translate_method)


class InputNotFound(Jbc2cError):
    pass


class WriteFailure(Jbc2cError):
    pass


class StrictModeViolation(Jbc2cError):
    pass


class ConfigError(Jbc2cError):
    pass


@dataclass
class PipelineConfig:
    inputs: List[str]
    out_classes: str
    out_c: str
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    check: bool = False
    strict: bool = False

    def validate(self):
        if not self.inputs:
            raise ConfigError("no inputs")
        if os.path.abspath(self.out_classes) == os.path.abspath(self.out_c):
            raise ConfigError("output directories must be distinct")


@dataclass
class MethodOutcome:
    class_name: str
    method_name: str
    descriptor: str
    status: str              # "translated" or "skipped"
    detail: str = ""


@dataclass
class Report:
    methods: List[MethodOutcome] = field(default_factory=list)
    emitted: List[str] = field(default_factory=list)

    @property
    def translated(self) -> int:
        return sum(1 for m in self.methods if m.status == "translated")

    @property
    def skipped(self) -> int:
        return sum(1 for m in self.methods if m.status == "skipped")

    def lines(self) -> List[str]:
        out = []
        for m in self.methods:
            tag = f"{m.class_name}.{m.method_name}{m.descriptor}"
            if m.status == "translated":
                out.append(f"translated {tag} -> {m.detail}")
            else:
                out.append(f"skipped {tag} ({m.detail})")
        out.append(f"{self.translated} translated, {self.skipped} skipped, "
                   f"{len(self.emitted)} files written")
        return out


def load_selection_config(path: str) -> SelectionConfig:
    """Line-oriented config: annotation=, library=, method=<cls>#<name><desc>."""
    cfg = SelectionConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as e:
        raise InputNotFound(f"config {path}: {e}")
    for ln, line in enumerate(raw.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value")
        key, _sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "annotation":
            cfg.annotation_name = value
        elif key == "library":
            cfg.library_name = value
        elif key == "method":
            if "#" not in value or "(" not in value:
                raise ConfigError(f"{path}:{ln}: method=<class>#<name><desc>")
            cls, _sep, rest = value.partition("#")
            name = rest[:rest.index("(")]
            desc = rest[rest.index("("):]
            cfg.explicit_methods.append((cls, name, desc))
        else:
            raise ConfigError(f"{path}:{ln}: unknown key {key!r}")
    return cfg


def _gather_inputs(paths: List[str]) -> List[str]:
    out = []
    for p in paths:
        if os.path.isdir(p):
            for root, _dirs, files in os.walk(p):
                for f in sorted(files):
                    if f.endswith(".class"):
                        out.append(os.path.join(root, f))
        elif os.path.isfile(p):
            out.append(p)
        else:
            raise InputNotFound(p)
    return out


def _atomic_write(path: str, data: bytes):
    tmp = path + ".tmp"
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as e:
        raise WriteFailure(f"{path}: {e}")


def _build_script(library_name: str, units: List[str]) -> str:
    srcs = " ".join(units)
    return f"""#!/bin/sh
# Compiles the translated sources into one shared library loadable
# through System.loadLibrary("{library_name}").
set -e
cd "$(dirname "$0")"
CC="${{CC:-cc}}"
JNI_CFLAGS="${{JNI_CFLAGS:--I$JAVA_HOME/include -I$JAVA_HOME/include/linux}}"
$CC -shared -fPIC -O2 $JNI_CFLAGS $CFLAGS {srcs} -o lib{library_name}.so
"""


@dataclass
class _ClassJob:
    path: str
    raw: bytes
    model: ClassModel
    selected: List[Tuple[str, str]]
    functions: List[CFunction] = field(default_factory=list)
    touched: bool = False


def run_pipeline(cfg: PipelineConfig) -> Report:
    cfg.validate()
    report = Report()
    files = _gather_inputs(cfg.inputs)
    jobs: List[_ClassJob] = []
    for path in files:
        with open(path, "rb") as fh:
            raw = fh.read()
        model = parse_class(raw)
        jobs.append(_ClassJob(path, raw, model,
                              find_annotated_methods(model, cfg.selection)))

    plan = build_rewrite_plan([(j.model, j.selected) for j in jobs])
    mangled = {(e.class_name, e.method_name, e.descriptor): e.mangled_name
               for e in plan.entries}

    for job in jobs:
        for name, desc in job.selected:
            m = job.model.method(name, desc)
            tag = mangled[(job.model.class_name, name, desc)]
            if m.is_native:
                report.methods.append(MethodOutcome(
                    job.model.class_name, name, desc, "skipped",
                    "already native"))
                continue
            try:
                check_method(m)
                fn = translate_method(m, job.model, TranslationConfig(
                    mangled_name=tag))
            except (Unsupported, UnsupportedOpcode, Jbc2cError) as e:
                report.methods.append(MethodOutcome(
                    job.model.class_name, name, desc, "skipped", str(e)))
                continue
            nativize_method(job.model, (name, desc),
                            cfg.selection.annotation_name)
            job.functions.append(fn)
            job.touched = True
            report.methods.append(MethodOutcome(
                job.model.class_name, name, desc, "translated", tag))

    if not any(j.touched for j in jobs):
        _finish(cfg, report)
        return report

    unit_files = []
    for job in jobs:
        out_cls = os.path.join(cfg.out_classes,
                               job.model.class_name.replace("/", os.sep)
                               + ".class")
        if job.touched:
            inject_library_loader(job.model, cfg.selection.library_name)
            _atomic_write(out_cls, emit_class(job.model))
            report.emitted.append(out_cls)
            base = job.model.class_name.replace("/", "_") + ".c"
            out_c = os.path.join(cfg.out_c, base)
            _atomic_write(out_c, render_c_unit(job.functions).text.encode())
            report.emitted.append(out_c)
            unit_files.append(base)
        else:
            _atomic_write(out_cls, job.raw)
            report.emitted.append(out_cls)

    script = os.path.join(cfg.out_c, "build.sh")
    _atomic_write(script, _build_script(cfg.selection.library_name,
                                        sorted(unit_files)).encode())
    os.chmod(script, 0o755)
    report.emitted.append(script)

    if cfg.check:
        _self_check(cfg, report)
    _finish(cfg, report)
    return report


def _finish(cfg: PipelineConfig, report: Report):
    if cfg.strict:
        hard = [m for m in report.methods
                if m.status == "skipped" and m.detail != "already native"]
        if hard:
            raise StrictModeViolation(
                "; ".join(f"{m.class_name}.{m.method_name}{m.descriptor}: "
                          f"{m.detail}" for m in hard))


def _runtime_include_dir() -> Optional[str]:
    here = os.path.dirname(os.path.abspath(__file__))
    for cand in (os.path.join(here, "..", "..", "cruntime", "include"),
                 os.path.join(here, "cruntime", "include")):
        if os.path.isfile(os.path.join(cand, "jbcrt.h")):
            return os.path.abspath(cand)
    return None


def _self_check(cfg: PipelineConfig, report: Report):
    """Syntax-check every emitted unit against the mock runtime headers."""
    import shutil
    import subprocess
    cc = shutil.which(os.environ.get("CC", "cc"))
    inc = _runtime_include_dir()
    if cc is None or inc is None:
        print("check: no C toolchain or runtime headers; skipped",
              file=sys.stderr)
        return
    for path in report.emitted:
        if not path.endswith(".c"):
            continue
        r = subprocess.run(
            [cc, "-std=gnu11", "-fsyntax-only", "-DJBC_MOCK_JNI",
             f"-I{inc}", path],
            capture_output=True, text=True)
        if r.returncode != 0:
            raise Jbc2cError(f"check failed for {path}:\n{r.stderr}")


def main(argv: Optional[List[str]] = None) -> int:
    ap = argparse.ArgumentParser(
        prog="nativize",
        description="Rewrite selected Java methods as native stubs and "
                    "translate their bodies to C.")
    ap.add_argument("--config", required=True, help="selection config file")
    ap.add_argument("--in", dest="inputs", nargs="+", required=True,
                    metavar="PATH", help="class files or directories")
    ap.add_argument("--out-classes", required=True)
    ap.add_argument("--out-c", required=True)
    ap.add_argument("--check", action="store_true",
                    help="syntax-check emitted C when a compiler is available")
    ap.add_argument("--strict", action="store_true",
                    help="fail if any selected method cannot be translated")
    args = ap.parse_args(argv)
    try:
        selection = load_selection_config(args.config)
        cfg = PipelineConfig(args.inputs, args.out_classes, args.out_c,
                             selection, check=args.check, strict=args.strict)
        report = run_pipeline(cfg)
    except StrictModeViolation as e:
        print(f"strict: {e}", file=sys.stderr)
        return 1
    except Jbc2cError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    for line in report.lines():
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
