"""Writes the frozen fixtures under tests/data.

    python3 tests/oracles/gen_fixtures.py [--out tests/data]

Fixtures: a default-configuration model with random weights and baked tables,
a 4 s control track, golden renders from reference.py, and small
per-component oracle values in oracles.json.
"""

import argparse
import json
import os

import numpy as np
import scipy.io.wavfile
import scipy.signal
import torch

import reference as ref

CONFIG = {
    "sample_rate": 16000,
    "hop_size": 128,
    "n_harmonics": 101,
    "n_newt_channels": 64,
    "shaper_depth": 4,
    "shaper_hidden": 8,
    "control_dim": 128,
    "mlp_depth": 4,
    "mlp_hidden": 128,
    "noise_fir_taps": 256,
    "reverb_length": 32000,
}
MEAN = [330.0, -40.0]
STD = [110.0, 15.0]
MODEL_SEED = 20211
NOISE_SEED = 7
FRAMES = 500


def control_track(frames):
    u = np.arange(frames) / (frames - 1)
    time = np.arange(frames) / 125.0
    f0 = 196.0 * 2.0 ** (1.5 * u) * (1.0 + 0.012 * np.sin(2 * np.pi * 5.5 * time))
    loud = -55.0 + 35.0 * np.sin(np.pi * u) + 3.0 * np.sin(2 * np.pi * 0.7 * time)
    return f0.astype(np.float32), loud.astype(np.float32)


def write_csv(path, f0, loud):
    with open(path, "w") as f:
        f.write("frame,f0_hz,loudness_db\n")
        for k, (a, b) in enumerate(zip(f0, loud)):
            f.write(f"{k},{float(a):.9g},{float(b):.9g}\n")


def write_wav(path, x):
    scipy.io.wavfile.write(path, CONFIG["sample_rate"], np.asarray(x, dtype=np.float32))


def component_oracles():
    rng = np.random.default_rng(99)
    out = {}

    # GRU, torch.nn.GRU in float64.
    H, T = 5, 7
    w_ih = rng.normal(0, 0.5, (3 * H, 2)).astype(np.float32)
    w_hh = rng.normal(0, 0.5, (3 * H, H)).astype(np.float32)
    b_ih = rng.normal(0, 0.5, 3 * H).astype(np.float32)
    b_hh = rng.normal(0, 0.5, 3 * H).astype(np.float32)
    x = rng.normal(0, 1, (T, 2)).astype(np.float32)
    t = {"control_gru.w_ih": w_ih, "control_gru.w_hh": w_hh, "control_gru.b_ih": b_ih, "control_gru.b_hh": b_hh}
    h = ref.gru_forward(x.astype(np.float64), t)
    out["gru"] = {"hidden": H, "w_ih": w_ih.ravel().tolist(), "w_hh": w_hh.ravel().tolist(),
                  "b_ih": b_ih.tolist(), "b_hh": b_hh.tolist(), "x": x.ravel().tolist(), "h": h.ravel().tolist()}

    # Linear -> LayerNorm -> ReLU MLP, torch functional ops.
    widths = [6, 9, 9, 4]
    t = {}
    for j in range(3):
        t[f"m.layer{j}.weight"] = rng.normal(0, 0.6, (widths[j + 1], widths[j])).astype(np.float32)
        t[f"m.layer{j}.bias"] = rng.normal(0, 0.3, widths[j + 1]).astype(np.float32)
        if j < 2:
            t[f"m.norm{j}.weight"] = rng.normal(1, 0.2, widths[j + 1]).astype(np.float32)
            t[f"m.norm{j}.bias"] = rng.normal(0, 0.2, widths[j + 1]).astype(np.float32)
    x = rng.normal(0, 1, (3, 6)).astype(np.float32)
    y = ref.mlp_forward(x.astype(np.float64), t, "m", 3)
    out["mlp"] = {"depth": 3, "tensors": {k: {"shape": list(v.shape), "data": v.ravel().tolist()} for k, v in t.items()},
                  "x": x.ravel().tolist(), "y": y.ravel().tolist()}

    # Shaper MLP (sin activations).
    t = {}
    widths = [1, 8, 8, 8, 1]
    for j in range(4):
        t[f"newt.shaper.0.layer{j}.weight"] = rng.uniform(-1, 1, (widths[j + 1], widths[j])).astype(np.float32)
        t[f"newt.shaper.0.layer{j}.bias"] = rng.uniform(-1, 1, widths[j + 1]).astype(np.float32)
    xs = np.linspace(-4, 4, 33).astype(np.float32)
    out["shaper"] = {"tensors": {k: {"shape": list(v.shape), "data": v.ravel().tolist()} for k, v in t.items()},
                     "x": xs.tolist(), "y": ref.shaper_forward(xs.astype(np.float64), t, 0, 4).tolist()}

    # Window-design FIR (numpy irfft + scipy Hann).
    mag = rng.uniform(0, 2, 17).astype(np.float32)
    out["design_fir"] = {"magnitude": mag.tolist(), "ir": ref.design_fir(mag).tolist()}

    # Counter-based noise.
    out["white_noise"] = {"seed": 42, "values": ref.splitmix_noise(42, 16).tolist()}

    # Scaled sigmoid.
    xs = np.array([-10, -2, -0.5, 0, 0.5, 2, 10], dtype=np.float32)
    out["scaled_sigmoid"] = {"x": xs.tolist(), "y": ref.scaled_sigmoid(xs.astype(np.float64)).tolist()}

    # Exciter, masked cosine bank.
    C, K, sr = 3, 12, 16000
    w = rng.normal(0, 0.3, (C, K)).astype(np.float32)
    b = rng.normal(0, 0.1, C).astype(np.float32)
    f0 = np.linspace(500, 1500, 400).astype(np.float32)
    y = ref.exciter_forward(f0, {"exciter.mixer.weight": w, "exciter.mixer.bias": b}, sr)
    out["exciter"] = {"channels": C, "harmonics": K, "weight": w.ravel().tolist(), "bias": b.tolist(),
                      "f0": f0.tolist(), "y": y.T.ravel().tolist()}

    # Magnitude STFT and the multi-resolution loss.
    n = 6000
    x = (np.sin(2 * np.pi * 440 * np.arange(n) / 16000) + 0.1 * rng.normal(0, 1, n)).astype(np.float32)
    y = (0.8 * x + 0.05 * rng.normal(0, 1, n)).astype(np.float32)
    scales, total = ref.mr_stft(x.astype(np.float64), y.astype(np.float64))
    small = x[:100].astype(np.float64)
    out["stft"] = {"x": x[:100].tolist(), "window": 32, "hop": 8,
                   "magnitudes": np.abs(np.fft.rfft(
                       small[np.arange(32)[None, :] + 8 * np.arange((100 - 32) // 8 + 1)[:, None]]
                       * scipy.signal.windows.hann(32, sym=True), axis=1)).ravel().tolist()}
    out["mr_stft"] = {"x": x.tolist(), "y": y.tolist(),
                      "scales": [{"window": m, "sc": sc, "lm": lm} for m, sc, lm in scales], "total": total}

    # Direct convolution oracle for the reverb.
    x = rng.normal(0, 1, 512).astype(np.float32)
    ir = rng.normal(0, 0.1, 256).astype(np.float32)
    ir[0] = 0.0
    wet = np.convolve(x.astype(np.float64), ir.astype(np.float64))[:512]
    out["reverb"] = {"x": x.tolist(), "ir": ir.tolist(), "y": (x + wet).tolist()}
    return out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    torch.set_num_threads(1)

    tensors = ref.random_tensors(CONFIG, MODEL_SEED)
    lo, hi, size = -3.0, 3.0, 4096
    grid = np.linspace(lo, hi, size)
    tables = [ref.shaper_forward(grid, tensors, c, CONFIG["shaper_depth"]).astype(np.float32)
              for c in range(CONFIG["n_newt_channels"])]
    model_path = os.path.join(args.out, "fixture_model.newt")
    ref.write_newt(model_path, CONFIG, MEAN, STD, tensors, {"table_size": size, "domain": [lo, hi]}, tables)

    meta, t, tabs = ref.read_newt(model_path)
    f0, loud = control_track(FRAMES)
    write_csv(os.path.join(args.out, "fixture_control.csv"), f0, loud)

    nws = ref.render(meta, t, tabs, f0, loud, seed=NOISE_SEED)
    fn = ref.render(meta, t, tabs, f0, loud, seed=NOISE_SEED, fastnewt=True)
    dry = ref.render(meta, t, tabs, f0, loud, seed=NOISE_SEED, reverb=False)
    write_wav(os.path.join(args.out, "golden_nws.wav"), nws)
    write_wav(os.path.join(args.out, "golden_nws_fn.wav"), fn)
    write_wav(os.path.join(args.out, "golden_nws_dry.wav"), dry)
    _, loss = ref.mr_stft(nws, fn)

    oracles = component_oracles()
    oracles["golden"] = {"noise_seed": NOISE_SEED, "frames": FRAMES, "mr_stft_nws_vs_fn": loss,
                         "peak_abs": float(np.max(np.abs(nws)))}
    with open(os.path.join(args.out, "oracles.json"), "w") as f:
        json.dump(oracles, f)
    print(f"golden render: {len(nws)} samples, peak {np.max(np.abs(nws)):.4f}, mr-STFT(NWS, FN) {loss:.3e}")


if __name__ == "__main__":
    main()
