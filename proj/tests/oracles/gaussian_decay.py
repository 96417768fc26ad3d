"""Independent numpy computation of ||K e_n||_2 for the Gaussian kernel
operator on 4096 equal atoms and 64 normalised disjoint block indicators
(8 groups of 8 blocks, lengths 256, 128, ..., 2, laid out left to right).

Writes tests/data/gaussian_decay_oracle.csv. Run once; the acceptance check
compares against the committed file.
"""
import pathlib
import numpy as np

N, WIDTH, TERMS, GROUP = 4096, 0.02, 64, 8

t = (np.arange(N) + 0.5) / N
w = np.full(N, 1.0 / N)
K = np.exp(-((t[:, None] - t[None, :]) ** 2) / WIDTH) * w[None, :]

rows = []
start = 0
for n in range(TERMS):
    length = 256 >> (n // GROUP)
    e = np.zeros(N)
    e[start:start + length] = 1.0
    e /= np.sqrt(np.sum(w * e ** 2))
    image = K @ e
    rows.append((n + 1, start, length, np.sqrt(np.sum(w * image ** 2))))
    start += length

norms = np.array([r[3] for r in rows])
q = TERMS // 4
head, tail = norms[:q].max(), norms[-q:].max()
out = pathlib.Path(__file__).resolve().parent.parent / "data" / "gaussian_decay_oracle.csv"
with open(out, "w") as f:
    f.write("n,first_atom,atoms,norm_image\n")
    for n, s, l, v in rows:
        f.write(f"{n},{s},{l},{v:.17g}\n")
print(f"head_max={head:.17g} tail_max={tail:.17g} ratio={tail / head:.6f}")
