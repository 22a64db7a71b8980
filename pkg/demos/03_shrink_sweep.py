"""
Statistical-average SNR as the estimation window shrinks.

For each fraction 1 - n/N the expected objective is maximized on W(n) and
the resulting restorer is scored by its closed-form risk over the full
lattice. Run on the camera picture and on each color channel of the
astronaut picture, at N = 128 and sigma = 40.
"""
# %%
import warnings

import matplotlib.pyplot as plt
from skimage import data, transform

from spectral_ggm import sweep

fractions = [round(0.05 * i, 2) for i in range(20)]


def small(img):
    return transform.resize(img.astype(float), (128, 128), anti_aliasing=True,
                            preserve_range=True)


images = {"camera": small(data.camera())}
astro = small(data.astronaut())
for i, name in enumerate("RGB"):
    images[f"astronaut {name}"] = astro[:, :, i]

# %%
curves = {}
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    for name, img in images.items():
        curves[name] = sweep.run_sweep(img, 40.0, fractions, channel=name)

for name, recs in curves.items():
    base = recs[0].snr_db
    worst = max(recs[: fractions.index(0.75) + 1], key=lambda r: abs(r.snr_db - base))
    print(f"{name:12s} snr(0) = {base:6.2f} dB, largest drop up to 0.75: "
          f"{worst.snr_db - base:+.2f} dB at {worst.shrink}")

# %% One estimate in detail: beta runs off once the window loses the noise floor.
for r in curves["camera"][::3]:
    print(f"shrink {r.shrink:.2f} n={r.n:3d} alpha={r.alpha:.3g} beta={r.beta:.3g} "
          f"gamma={r.gamma:.3g} snr={r.snr_db:.2f} dB  {r.wall_time_ms:.1f} ms")

# %%
fig, ax = plt.subplots(figsize=(6, 4))
for name, recs in curves.items():
    ax.plot([r.shrink for r in recs], [r.snr_db for r in recs], marker="o", ms=3, label=name)
ax.set_xlabel("1 - n/N")
ax.set_ylabel("SNR [dB]")
ax.legend()
fig.tight_layout()
fig.savefig("shrink_sweep.png", dpi=120)
print("saved shrink_sweep.png")
