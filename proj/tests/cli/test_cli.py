"""End-to-end checks of the newt command-line tool.

    python3 test_cli.py <path-to-newt> <tests/data>
"""

import json
import os
import struct
import subprocess
import sys
import tempfile

NEWT, DATA = sys.argv[1], sys.argv[2]
MODEL = os.path.join(DATA, "fixture_model.newt")
CSV = os.path.join(DATA, "fixture_control.csv")
failures = []


def run(*args):
    return subprocess.run([NEWT, *args], capture_output=True, text=True)


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + (f" ({detail})" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def read_wav_samples(path):
    raw = open(path, "rb").read()
    at = 12
    fmt = None
    while at + 8 <= len(raw):
        tag, size = raw[at : at + 4], struct.unpack("<I", raw[at + 4 : at + 8])[0]
        body = raw[at + 8 : at + 8 + size]
        if tag == b"fmt ":
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif tag == b"data":
            if fmt[0] == 3:
                return fmt, list(struct.unpack(f"<{size // 4}f", body))
            return fmt, [v / 32767.0 for v in struct.unpack(f"<{size // 2}h", body)]
        at += 8 + size + (size & 1)
    raise ValueError("no data chunk")


with tempfile.TemporaryDirectory() as tmp:
    out_a, out_b = os.path.join(tmp, "a.wav"), os.path.join(tmp, "b.wav")

    r = run("render", MODEL, CSV, out_a, "--seed", "7")
    check("render exits 0", r.returncode == 0, r.stderr)
    check("render prints RTF", "RTF" in r.stdout, r.stdout)
    fmt, pcm = read_wav_samples(out_a)
    check("render writes 16-bit mono PCM at 16 kHz", fmt[:3] == (1, 1, 16000) and fmt[5] == 16, str(fmt))
    check("render length is frames * hop", len(pcm) == 64000, str(len(pcm)))

    run("render", MODEL, CSV, out_b, "--seed", "7")
    check("fixed seed gives byte-identical WAV", open(out_a, "rb").read() == open(out_b, "rb").read())

    _, golden = read_wav_samples(os.path.join(DATA, "golden_nws.wav"))
    lsb = 1.0 / 32767.0
    worst = max(abs(a - max(-32768 / 32767.0, min(1.0, g))) for a, g in zip(pcm, golden))
    check("PCM render within 1 LSB of the golden render", worst <= lsb + 1e-9, f"worst {worst / lsb:.3f} LSB")

    out_f = os.path.join(tmp, "f.wav")
    r = run("render", MODEL, CSV, out_f, "--seed", "7", "--float32")
    fmt, flt = read_wav_samples(out_f)
    check("--float32 writes IEEE float", r.returncode == 0 and fmt[0] == 3 and fmt[5] == 32, str(fmt))
    check("float render matches golden within 1e-4", max(abs(a - g) for a, g in zip(flt, golden)) < 1e-4)

    out_s = os.path.join(tmp, "s.wav")
    run("render", MODEL, CSV, out_s, "--seed", "7", "--float32", "--block-size", "512")
    check("streaming render equals one-shot render", open(out_s, "rb").read() == open(out_f, "rb").read())

    out_d = os.path.join(tmp, "d.wav")
    run("render", MODEL, CSV, out_d, "--seed", "7", "--float32", "--no-reverb")
    _, dry = read_wav_samples(out_d)
    _, golden_dry = read_wav_samples(os.path.join(DATA, "golden_nws_dry.wav"))
    check("--no-reverb matches the dry golden render", max(abs(a - g) for a, g in zip(dry, golden_dry)) < 1e-4)

    missing = os.path.join(tmp, "nope.csv")
    r = run("render", MODEL, missing, out_b)
    check("missing control file exits 3", r.returncode == 3, str(r.returncode))
    check("missing control message names the path", missing in r.stderr, r.stderr)

    bad_csv = os.path.join(tmp, "bad.csv")
    open(bad_csv, "w").write("frame,f0_hz,loudness_db\n0,440,-20\n1,oops,-20\n")
    r = run("render", MODEL, bad_csv, out_b)
    check("malformed CSV exits 3 with row number", r.returncode == 3 and "line 3" in r.stderr, r.stderr)

    bad_model = os.path.join(tmp, "bad.newt")
    open(bad_model, "wb").write(b"NOPE" + bytes(64))
    r = run("render", bad_model, CSV, out_b)
    check("unreadable model exits 2 with a format diagnostic", r.returncode == 2 and "magic" in r.stderr, r.stderr)

    # verify
    r = run("verify", MODEL)
    check("verify passes the fixture model", r.returncode == 0, r.stdout)
    raw = bytearray(open(MODEL, "rb").read())
    meta_len = struct.unpack("<I", raw[8:12])[0]
    meta = json.loads(raw[12 : 12 + meta_len])
    offsets, at = {}, 12 + meta_len
    for t in meta["tensors"]:
        n = 1
        for d in t["shape"]:
            n *= d
        offsets[t["name"]] = at
        at += 4 * n

    ir_bad = os.path.join(tmp, "ir.newt")
    patched = bytearray(raw)
    patched[offsets["reverb.ir"] : offsets["reverb.ir"] + 4] = struct.pack("<f", 0.5)
    open(ir_bad, "wb").write(patched)
    r = run("verify", ir_bad)
    check("verify flags c[0] != 0", r.returncode != 0 and "reverb/causal-ir" in r.stdout, r.stdout)

    nan_bad = os.path.join(tmp, "nan.newt")
    patched = bytearray(raw)
    o = offsets["control_dense.weight"] + 40
    patched[o : o + 4] = struct.pack("<f", float("nan"))
    open(nan_bad, "wb").write(patched)
    r = run("verify", nan_bad, "--json")
    report = json.loads(r.stdout)
    failed = [c for c in report["checks"] if not c["passed"]]
    check("verify names the NaN tensor", r.returncode != 0 and any("control_dense.weight" in c["detail"] for c in failed),
          r.stdout)

    # bake
    plain = os.path.join(tmp, "plain.newt")
    r = run("init", plain, "--seed", "3")
    check("init writes a 266,817-parameter model", r.returncode == 0 and "266817" in r.stdout, r.stdout)
    baked = os.path.join(tmp, "baked.newt")
    r = run("bake", plain, baked)
    check("bake with defaults", r.returncode == 0 and "64 tables of 4096" in r.stdout, r.stdout)
    r = run("info", baked)
    check("baked model reports 64 tables", json.loads(r.stdout)["fastnewt_tables"] == 64, r.stdout)
    r = run("bake", plain, os.path.join(tmp, "two.newt"), "--table-size", "2")
    check("degenerate 2-sample bake is valid", r.returncode == 0, r.stderr)
    r = run("verify", os.path.join(tmp, "two.newt"))
    check("2-sample bake verifies structurally", "newt/bake-fidelity" in r.stdout, r.stdout)

    nws_wav, fn_wav = os.path.join(tmp, "nws.wav"), os.path.join(tmp, "fn.wav")
    run("render", baked, CSV, nws_wav, "--float32")
    run("render", baked, CSV, fn_wav, "--float32", "--fastnewt")
    r = run("compare", nws_wav, fn_wav)
    cmp = json.loads(r.stdout)
    check("compare reports three scales", [s["window"] for s in cmp["scales"]] == [512, 1024, 2048], r.stdout)
    check("bake then render: mr-STFT < 0.1", cmp["mr_stft_loss"] < 0.1, str(cmp["mr_stft_loss"]))
    r = run("compare", nws_wav, nws_wav)
    check("compare of identical files is 0", json.loads(r.stdout)["mr_stft_loss"] == 0.0, r.stdout)

    # bench structure (short runs; timing values are not asserted)
    r = run("bench", baked, "--runs", "2", "--duration", "0.5", "--fastnewt", "--buffer-sweep")
    check("bench exits 0", r.returncode == 0, r.stderr)
    rep = json.loads(r.stdout)
    check("bench report is versioned", rep.get("schema_version") == 1)
    check("bench reports both variants", [v["variant"] for v in rep["variants"]] == ["nws", "nws-fn"], r.stdout)
    sizes = sorted({e["block_size"] for e in rep["buffer_sweep"]})
    check("buffer sweep covers 256..32768", sizes == [2**n for n in range(8, 16)], str(sizes))
    check("bench reports mean and p90", all("mean_rtf" in v and "p90_rtf" in v for v in rep["variants"]))

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
