"""ctypes wrapper over libnlpl_bridge.

Set NLPL_BRIDGE_LIB to the shared library path, or build it with
`cargo build -p nlpl-bridge` and let the loader find it under target/.
"""

import ctypes
import json
import os
from pathlib import Path

_ROOT = Path(__file__).resolve().parents[3]


class BridgeError(RuntimeError):
    pass


def _find_library():
    env = os.environ.get("NLPL_BRIDGE_LIB")
    if env:
        return env
    names = ["libnlpl_bridge.so", "libnlpl_bridge.dylib", "nlpl_bridge.dll"]
    for profile in ("release", "debug"):
        for name in names:
            p = _ROOT / "target" / profile / name
            if p.exists():
                return str(p)
    raise BridgeError("libnlpl_bridge not found; build it or set NLPL_BRIDGE_LIB")


def _load():
    lib = ctypes.CDLL(_find_library())
    P, S, U32P, SZ = ctypes.c_void_p, ctypes.c_char_p, ctypes.POINTER(ctypes.c_uint32), ctypes.c_size_t
    sigs = {
        "nlpl_version": ([], ctypes.c_char_p),
        "nlpl_last_error": ([], ctypes.c_char_p),
        "nlpl_session_open": ([S], P),
        "nlpl_session_free": ([P], None),
        "nlpl_encode": ([P, S, ctypes.POINTER(U32P), ctypes.POINTER(SZ)], ctypes.c_int),
        "nlpl_ids_free": ([U32P, SZ], None),
        "nlpl_decode": ([P, U32P, SZ], P),
        "nlpl_string_free": ([P], None),
        "nlpl_plan_open": ([P, S, S, S], P),
        "nlpl_plan_digest": ([P], P),
        "nlpl_plan_free": ([P], None),
        "nlpl_next_batch": ([P, SZ], P),
        "nlpl_batch_len": ([P], SZ),
        "nlpl_batch_ids": ([P, ctypes.POINTER(SZ)], U32P),
        "nlpl_batch_lengths": ([P, ctypes.POINTER(SZ)], U32P),
        "nlpl_batch_tasks": ([P], ctypes.POINTER(ctypes.c_uint8)),
        "nlpl_batch_indices": ([P], ctypes.POINTER(ctypes.c_uint64)),
        "nlpl_batch_free": ([P], None),
        "nlpl_codebleu": ([P, S, S], P),
    }
    for name, (args, res) in sigs.items():
        f = getattr(lib, name)
        f.argtypes = args
        f.restype = res
    return lib


_lib = None


def version():
    return lib().nlpl_version().decode()



def lib():
    global _lib
    if _lib is None:
        _lib = _load()
    return _lib


def _fail():
    msg = lib().nlpl_last_error()
    raise BridgeError(msg.decode() if msg else "unknown error")


def _take_string(ptr):
    if not ptr:
        _fail()
    try:
        return ctypes.string_at(ptr).decode()
    finally:
        lib().nlpl_string_free(ptr)


def _enc(s):
    return None if s is None else os.fsencode(s) if isinstance(s, Path) else s.encode()


TASKS = {0: "SCLM", 1: "PTLM"}


class Session:
    """One vocabulary. Without one, only `codebleu` works."""

    def __init__(self, vocab_path=None):
        self._ptr = lib().nlpl_session_open(_enc(vocab_path))
        if not self._ptr:
            _fail()

    def close(self):
        if getattr(self, "_ptr", None):
            lib().nlpl_session_free(self._ptr)
            self._ptr = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    __del__ = close

    def encode(self, text):
        ids, n = ctypes.POINTER(ctypes.c_uint32)(), ctypes.c_size_t()
        if lib().nlpl_encode(self._ptr, text.encode(), ctypes.byref(ids), ctypes.byref(n)):
            _fail()
        try:
            return ids[: n.value]
        finally:
            lib().nlpl_ids_free(ids, n)

    def decode(self, ids):
        buf = (ctypes.c_uint32 * len(ids))(*ids)
        return _take_string(lib().nlpl_decode(self._ptr, buf, len(ids)))

    def codebleu(self, hyp, ref):
        """Component dict; None for a component that was not computed."""
        return json.loads(_take_string(lib().nlpl_codebleu(self._ptr, hyp.encode(), ref.encode())))

    def open_plan(self, config_path, plan_path=None, expected_digest=None):
        return Plan(self, config_path, plan_path, expected_digest)


class Plan:
    """Example stream of a pipeline config, in `nlpl build` order."""

    def __init__(self, session, config_path, plan_path=None, expected_digest=None):
        self._session = session
        self._ptr = lib().nlpl_plan_open(
            session._ptr, _enc(config_path), _enc(plan_path), _enc(expected_digest)
        )
        if not self._ptr:
            _fail()

    def close(self):
        if getattr(self, "_ptr", None):
            lib().nlpl_plan_free(self._ptr)
            self._ptr = None

    __del__ = close

    @property
    def digest(self):
        return _take_string(lib().nlpl_plan_digest(self._ptr))

    def next_batch(self, batch_size):
        """Dict with flat `ids`, `lengths` (input, target per example),
        `tasks` and `indices`. Raises BridgeError once exhausted."""
        b = lib().nlpl_next_batch(self._ptr, batch_size)
        if not b:
            _fail()
        try:
            n = lib().nlpl_batch_len(b)
            k = ctypes.c_size_t()
            ids = lib().nlpl_batch_ids(b, ctypes.byref(k))[: k.value]
            lengths = lib().nlpl_batch_lengths(b, ctypes.byref(k))[: k.value]
            tasks = [TASKS[t] for t in lib().nlpl_batch_tasks(b)[:n]]
            indices = lib().nlpl_batch_indices(b)[:n]
        finally:
            lib().nlpl_batch_free(b)
        return {"ids": ids, "lengths": lengths, "tasks": tasks, "indices": indices}

    def __iter__(self):
        while True:
            try:
                batch = self.next_batch(64)
            except BridgeError as e:
                if "exhausted" in str(e):
                    return
                raise
            pos = 0
            for i, task in enumerate(batch["tasks"]):
                a, t = batch["lengths"][2 * i], batch["lengths"][2 * i + 1]
                yield task, batch["ids"][pos : pos + a], batch["ids"][pos + a : pos + a + t]
                pos += a + t
