"""Neural-net kernel transport maps.

The kernel value for a sample pair is a small feed-forward network applied to
the componentwise absolute differences of the two samples: tanh hidden layers,
a single output unit, and the affine squash (1 + tanh)/2 that keeps every
kernel entry in [0, 1].  Predictions follow the support-vector form
M1 = k(M, anchors) @ alpha, and training solves the residual equations
k(M, anchors) @ alpha - targets = 0 over all weights, biases, and alpha,
either by damped Gauss-Newton steps or by plain gradient descent.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .inversion import TikhonovSchedule, tikhonov_for

__all__ = [
    "KernelNetwork",
    "TrainingOptions",
    "TrainingResult",
    "init_network",
    "kernel_forward",
    "predict",
    "residual_and_jacobian",
    "loss_gradient",
    "train",
    "augment_prior",
    "get_params",
    "set_params",
    "save_checkpoint",
    "load_checkpoint",
]


@dataclass
class KernelNetwork:
    layer_sizes: list          # [d_in, n1, ..., 1]
    weights: list              # W[l] has shape (layer_sizes[l+1], layer_sizes[l])
    biases: list               # b[l] has shape (layer_sizes[l+1],)
    alpha: np.ndarray          # (n_anchor, d_out)
    anchors: np.ndarray        # (n_anchor, d_in), fixed at initialization

    def __post_init__(self):
        sizes = list(self.layer_sizes)
        if sizes[-1] != 1:
            raise ValueError("output layer must have exactly one unit")
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise ValueError("weight/bias count does not match layer sizes")
        for l, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.shape != (sizes[l + 1], sizes[l]) or b.shape != (sizes[l + 1],):
                raise ValueError(f"layer {l} parameter shapes do not match sizes")
        if self.anchors.ndim != 2 or self.anchors.shape[1] != sizes[0]:
            raise ValueError("anchor dimension does not match the input layer")
        if self.alpha.shape[0] != self.anchors.shape[0]:
            raise ValueError("alpha rows must match the anchor count")

    @property
    def d_in(self):
        return self.layer_sizes[0]

    @property
    def d_out(self):
        return self.alpha.shape[1]

    @property
    def n_anchor(self):
        return self.anchors.shape[0]

    @property
    def n_net_params(self):
        return sum(W.size + b.size for W, b in zip(self.weights, self.biases))

    @property
    def n_params(self):
        return self.n_net_params + self.alpha.size


def get_params(net):
    """Flatten parameters as [W1, b1, ..., WL, bL, alpha], C order."""
    parts = []
    for W, b in zip(net.weights, net.biases):
        parts.append(W.ravel())
        parts.append(b.ravel())
    parts.append(net.alpha.ravel())
    return np.concatenate(parts)


def set_params(net, vec):
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (net.n_params,):
        raise ValueError("parameter vector has wrong length")
    pos = 0
    for W, b in zip(net.weights, net.biases):
        W[...] = vec[pos : pos + W.size].reshape(W.shape)
        pos += W.size
        b[...] = vec[pos : pos + b.size]
        pos += b.size
    net.alpha[...] = vec[pos:].reshape(net.alpha.shape)
    return net


def init_network(layer_sizes, n_anchor, d_out, rng, anchor_box=None):
    """Random network: U[-1/sqrt(fan_in), +] weights and biases, small alpha,
    anchors uniform over anchor_box (unit box by default)."""
    sizes = list(layer_sizes)
    weights = []
    biases = []
    for l in range(len(sizes) - 1):
        s = 1.0 / np.sqrt(sizes[l])
        weights.append(rng.uniform(-s, s, (sizes[l + 1], sizes[l])))
        biases.append(rng.uniform(-s, s, sizes[l + 1]))
    alpha = rng.uniform(-0.1, 0.1, (n_anchor, d_out))
    if anchor_box is None:
        lo = np.zeros(sizes[0])
        hi = np.ones(sizes[0])
    else:
        lo = np.asarray(anchor_box[0], dtype=float)
        hi = np.asarray(anchor_box[1], dtype=float)
    anchors = lo + (hi - lo) * rng.uniform(0.0, 1.0, (n_anchor, sizes[0]))
    return KernelNetwork(sizes, weights, biases, alpha, anchors)


def _forward_states(net, A, B):
    """Kernel matrix plus the per-layer states needed for backprop."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[1] != net.d_in or B.shape[1] != net.d_in:
        raise ValueError("sample dimension does not match the input layer")
    feats = np.abs(A[:, None, :] - B[None, :, :])
    acts = [feats]
    pre = []
    h = feats
    for W, b in zip(net.weights[:-1], net.biases[:-1]):
        z = h @ W.T + b
        pre.append(z)
        h = np.tanh(z)
        acts.append(h)
    z_out = h @ net.weights[-1].T + net.biases[-1]
    pre.append(z_out)
    K = 0.5 * (1.0 + np.tanh(z_out[..., 0]))
    return K, pre, acts


def kernel_forward(net, A, B):
    return _forward_states(net, A, B)[0]


def predict(net, A):
    return kernel_forward(net, A, net.anchors) @ net.alpha


def _backprop_deltas(net, pre):
    """Per-pair sensitivities of the kernel value wrt each layer's
    pre-activation, output layer last."""
    t_out = np.tanh(pre[-1])
    deltas = [0.5 * (1.0 - t_out**2)]
    for l in range(len(net.weights) - 1, 0, -1):
        d_next = deltas[0] @ net.weights[l]
        deltas.insert(0, d_next * (1.0 - np.tanh(pre[l - 1]) ** 2))
    return deltas


def residual_and_jacobian(net, A, targets):
    """Residual vec(K @ alpha - targets) and its Jacobian over all parameters.

    Rows are ordered sample-major (row s*d_out + j is sample s, output j);
    columns follow the get_params flattening.
    """
    targets = np.asarray(targets, dtype=float)
    K, pre, acts = _forward_states(net, A, net.anchors)
    n, n_anchor = K.shape
    d_out = net.d_out
    if targets.shape != (n, d_out):
        raise ValueError("target shape does not match prediction shape")
    R_mat = K @ net.alpha - targets
    deltas = _backprop_deltas(net, pre)
    # per-pair gradient of the kernel entry wrt every network parameter
    blocks = []
    for l, delta in enumerate(deltas):
        gW = np.einsum("abi,abj->abij", delta, acts[l])
        blocks.append(gW.reshape(n, n_anchor, -1))
        blocks.append(delta)
    G = np.concatenate(blocks, axis=2)
    J_net = np.einsum("qj,sqp->sjp", net.alpha, G).reshape(n * d_out, -1)
    J_alpha = np.einsum("sq,jk->sjqk", K, np.eye(d_out)).reshape(
        n * d_out, n_anchor * d_out
    )
    return R_mat.ravel(), np.hstack([J_net, J_alpha])


def loss_gradient(net, A, targets):
    """Gradient of ||R||^2, assembled without materializing the Jacobian."""
    targets = np.asarray(targets, dtype=float)
    K, pre, acts = _forward_states(net, A, net.anchors)
    R_mat = K @ net.alpha - targets
    deltas = _backprop_deltas(net, pre)
    weight = R_mat @ net.alpha.T
    parts = []
    for l, delta in enumerate(deltas):
        gW = np.einsum("ab,abi,abj->ij", weight, delta, acts[l])
        gb = np.einsum("ab,abi->i", weight, delta)
        parts.append(gW.ravel())
        parts.append(gb)
    parts.append((K.T @ R_mat).ravel())
    return 2.0 * np.concatenate(parts)


_TRAINERS = {
    "newton_raphson": "newton_raphson",
    "nr": "newton_raphson",
    "gradient_descent": "gradient_descent",
    "gd": "gradient_descent",
}


@dataclass
class TrainingOptions:
    trainer: str = "newton_raphson"
    beta: float = None         # default 5e-3 for NR, 5e-4 for GD
    residual_tol: float = 1e-3
    max_iter: int = None       # default 2000 for NR, 10000 for GD
    tikhonov: TikhonovSchedule = field(default_factory=TikhonovSchedule)

    def resolved(self):
        try:
            trainer = _TRAINERS[self.trainer.lower()]
        except KeyError:
            raise ValueError(f"unknown trainer {self.trainer!r}") from None
        beta = self.beta if self.beta is not None else (
            5e-3 if trainer == "newton_raphson" else 5e-4
        )
        max_iter = self.max_iter if self.max_iter is not None else (
            2000 if trainer == "newton_raphson" else 10000
        )
        return trainer, beta, max_iter


@dataclass
class TrainingResult:
    net: KernelNetwork
    converged: bool
    iterations: int
    history: list


def train(net, inputs, targets, opts=None):
    """Fit the network to (inputs, targets) in place; history holds ||R|| per
    visit, final value last."""
    opts = opts or TrainingOptions()
    trainer, beta, max_iter = opts.resolved()
    inputs = np.asarray(inputs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if inputs.shape[0] != targets.shape[0]:
        raise ValueError("input and target row counts differ")
    history = []
    iterations = 0
    converged = False
    while True:
        if trainer == "newton_raphson":
            R, J = residual_and_jacobian(net, inputs, targets)
            norm = float(np.linalg.norm(R))
        else:
            norm = float(np.linalg.norm(predict(net, inputs) - targets))
        history.append(norm)
        if norm <= opts.residual_tol:
            converged = True
            break
        if iterations >= max_iter:
            break
        theta = get_params(net)
        if trainer == "newton_raphson":
            delta = tikhonov_for(norm, opts.tikhonov)
            H = J.T @ J + delta * np.eye(J.shape[1])
            step = np.linalg.solve(H, J.T @ R)
            set_params(net, theta - beta * step)
        else:
            set_params(net, theta - beta * loss_gradient(net, inputs, targets))
        iterations += 1
    return TrainingResult(net=net, converged=converged, iterations=iterations, history=history)


def augment_prior(m0, n_per, sigma, rng):
    """Replicate each row n_per times with independent Gaussian jitter."""
    m0 = np.atleast_2d(np.asarray(m0, dtype=float))
    out = np.repeat(m0, n_per, axis=0)
    return out + sigma * rng.standard_normal(out.shape)


def save_checkpoint(path, net, history=None):
    payload = {
        "layer_sizes": [int(s) for s in net.layer_sizes],
        "d_out": int(net.d_out),
        "params": get_params(net).tolist(),
        "anchors": net.anchors.tolist(),
        "history": list(history) if history is not None else [],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
    return payload


def load_checkpoint(path):
    with open(path) as fh:
        payload = json.load(fh)
    sizes = payload["layer_sizes"]
    anchors = np.asarray(payload["anchors"], dtype=float)
    d_out = int(payload["d_out"])
    weights = [np.zeros((sizes[l + 1], sizes[l])) for l in range(len(sizes) - 1)]
    biases = [np.zeros(sizes[l + 1]) for l in range(len(sizes) - 1)]
    net = KernelNetwork(
        layer_sizes=list(sizes),
        weights=weights,
        biases=biases,
        alpha=np.zeros((anchors.shape[0], d_out)),
        anchors=anchors,
    )
    set_params(net, np.asarray(payload["params"], dtype=float))
    return net, list(payload["history"])
