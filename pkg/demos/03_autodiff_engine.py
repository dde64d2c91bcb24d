"""Tour of the reverse-mode gradient engine the models are built on.

Tensors record their parents and a backward closure as operations run;
calling backward() on a scalar walks the graph in reverse topological order
and accumulates gradients into every parameter. Finite-difference checking
is built in and reports the worst relative error over all coordinates.
"""

import numpy as np

import ppgmorph.tensor as T

# a toy regression: y = sigmoid(x @ w + b), squared error against targets
rng = np.random.default_rng(0)
x = T.Tensor(rng.normal(size=(4, 3)))
w = T.parameter(rng.normal(size=(3, 2)) * 0.5, name="w")
b = T.parameter(np.zeros(2), name="b")
target = T.Tensor(rng.uniform(0, 1, (4, 2)))

y = T.sigmoid(T.dense(x, w, b))
diff = y - target
loss = (diff * diff).mean()
loss.backward()
print(f"loss = {loss.item():.6f}")
print(f"dL/dw:\n{w.grad.round(6)}")
print(f"dL/db: {b.grad.round(6)}")

# the same loss rebuilt per call, checked against central differences
def f(_):
    z = T.sigmoid(T.dense(x, w, b)) - target
    return (z * z).mean()

for tensor in (w, b):
    res = T.grad_check(f, tensor)
    print(f"grad check {tensor.name}: max rel err {res.max_rel_err:.2e} "
          f"over {res.n_checked} coordinates ({res.n_skipped} kinks skipped)")

# convolution + pooling + recurrence compose the same way
sig = T.Tensor(rng.normal(size=(1, 1, 16)))
k = T.parameter(rng.normal(size=(4, 1, 3)) * 0.3, name="kernel")
feat = T.avg_pool2(T.relu(T.conv1d(sig, k, padding=1)))
print(f"\nconv -> relu -> pool output shape: {feat.data.shape}")
pooled = T.global_avg_pool(feat)
pooled.sum().backward()
print(f"kernel gradient norm: {np.abs(k.grad).sum():.4f}")
