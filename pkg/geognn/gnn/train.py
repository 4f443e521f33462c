"""Training loop, losses, optimizers and readout refitting."""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize
from scipy.special import log_softmax, softmax

from geognn.errors import TrainingDivergedError
from geognn.geograph.graph import GeoGraph
from geognn.gnn.arch import GnnArch, Readout
from geognn.gnn.network import filter_penalty, gnn_backward, gnn_forward
from geognn.spectral.eig import Spectrum
from geognn.spectral.heat import default_spectrum


class Loss(Enum):
    MSE = "mse"
    CROSS_ENTROPY = "cross_entropy"


class Optimizer(Enum):
    SGD = "sgd"
    ADAM = "adam"


@dataclass
class TrainConfig:
    """
    Training hyperparameters.

    A learning rate of 0 is accepted and leaves the parameters unchanged.
    `penalty_weight` is the Lipschitz penalty constant C_L and
    `penalty_grid` the number of grid points on [0, lambda_max].
    """

    loss: Loss = Loss.MSE
    optimizer: Optimizer = Optimizer.ADAM
    learning_rate: float = 0.005
    epochs: int = 40
    batch_size: int = 8
    penalty_weight: float = 0.0
    penalty_grid: int = 64
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        self.loss = Loss(self.loss) if isinstance(self.loss, str) else self.loss
        if isinstance(self.optimizer, str):
            self.optimizer = Optimizer(self.optimizer)
        if self.learning_rate < 0:
            raise ValueError(f"learning rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch size must be >= 1, got {self.batch_size}")
        if self.penalty_weight < 0:
            raise ValueError(f"penalty weight must be >= 0, got {self.penalty_weight}")
        if self.penalty_grid < 2:
            raise ValueError(f"penalty grid needs >= 2 points, got {self.penalty_grid}")


@dataclass(eq=False)
class GraphSample:
    """
    One training example: a graph, its input signals and a target.

    MSE targets have the shape of the network output; cross-entropy targets
    are class indices (one per output row).
    """

    graph: GeoGraph
    inputs: np.ndarray
    target: np.ndarray
    spectrum: Spectrum | None = None

    def ensure_spectrum(self) -> Spectrum:
        if self.spectrum is None:
            self.spectrum = default_spectrum(self.graph)
        return self.spectrum


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    penalty: float


@dataclass
class TrainResult:
    arch: GnnArch
    history: list = field(default_factory=list)

    @property
    def losses(self) -> list[float]:
        return [record.loss for record in self.history]


def loss_and_grad(loss: Loss, output: np.ndarray, target) -> tuple[float, np.ndarray]:
    """Loss value and its gradient with respect to the output."""
    if loss == Loss.MSE:
        diff = output - np.asarray(target, dtype=float).reshape(output.shape)
        return float(np.mean(diff**2)), 2.0 * diff / diff.size
    labels = np.atleast_1d(np.asarray(target, dtype=int))
    logits = np.atleast_2d(output)
    if labels.size != logits.shape[0]:
        raise ValueError(f"{labels.size} labels for {logits.shape[0]} output rows")
    rows = np.arange(labels.size)
    value = -float(np.mean(log_softmax(logits, axis=1)[rows, labels]))
    grad = softmax(logits, axis=1)
    grad[rows, labels] -= 1.0
    return value, (grad / labels.size).reshape(output.shape)


def predict(arch: GnnArch, sample: GraphSample) -> np.ndarray:
    return gnn_forward(arch, sample.graph, sample.inputs, spectrum=sample.ensure_spectrum())


def accuracy(arch: GnnArch, dataset: list[GraphSample]) -> float:
    """Fraction of samples whose arg-max output matches the class target."""
    hits = [
        np.argmax(predict(arch, s), axis=-1).ravel().tolist()
        == np.atleast_1d(np.asarray(s.target, dtype=int)).tolist()
        for s in dataset
    ]
    return float(np.mean(hits))


def dataset_loss(arch: GnnArch, dataset: list[GraphSample], loss: Loss) -> float:
    return float(np.mean([loss_and_grad(loss, predict(arch, s), s.target)[0] for s in dataset]))


class _Stepper:
    """SGD or Adam updates over a parameter dictionary."""

    def __init__(self, cfg: TrainConfig, params: dict[str, np.ndarray]):
        self.cfg = cfg
        self.t = 0
        self.m = {name: np.zeros_like(v) for name, v in params.items()}
        self.v = {name: np.zeros_like(v) for name, v in params.items()}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]):
        cfg = self.cfg
        self.t += 1
        updated = {}
        for name, value in params.items():
            grad = grads[name]
            if cfg.optimizer == Optimizer.SGD:
                updated[name] = value - cfg.learning_rate * grad
                continue
            self.m[name] = cfg.beta1 * self.m[name] + (1 - cfg.beta1) * grad
            self.v[name] = cfg.beta2 * self.v[name] + (1 - cfg.beta2) * grad**2
            m_hat = self.m[name] / (1 - cfg.beta1**self.t)
            v_hat = self.v[name] / (1 - cfg.beta2**self.t)
            updated[name] = value - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)
        return updated


def train(
    arch: GnnArch,
    dataset: list[GraphSample],
    cfg: TrainConfig,
    verbose: bool = False,
) -> TrainResult:
    """
    Minibatch training on a list of graph samples.

    The penalty grid spans [0, largest computed eigenvalue over the dataset].
    Each sample carries its own graph, so one dataset may mix graph sizes.

    Args:
        arch: Initial architecture; it is copied, never modified.
        dataset: Nonempty list of samples.
        cfg: Hyperparameters and seed.
        verbose: Print one line per epoch.

    Returns:
        TrainResult with the trained copy and per-epoch loss and penalty.

    Raises:
        TrainingDivergedError: A non-finite loss was produced.
    """
    if not dataset:
        raise ValueError("training needs a nonempty dataset")
    if cfg.loss == Loss.CROSS_ENTROPY and arch.readout is None:
        raise ValueError("cross-entropy training needs a readout")
    arch = arch.copy()
    rng = np.random.default_rng(cfg.seed)
    lam_max = max(s.ensure_spectrum().lambda_max for s in dataset)
    grid = np.linspace(0.0, max(lam_max, 0.0), cfg.penalty_grid)
    stepper = _Stepper(cfg, arch.parameters())
    history = []

    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(dataset))
        epoch_losses = []
        for start in range(0, len(order), cfg.batch_size):
            batch = [dataset[i] for i in order[start:start + cfg.batch_size]]
            params = arch.parameters()
            total = {name: np.zeros_like(v) for name, v in params.items()}
            for sample in batch:
                output, cache = gnn_forward(
                    arch, sample.graph, sample.inputs, sample.spectrum, return_cache=True
                )
                value, grad = loss_and_grad(cfg.loss, output, sample.target)
                if not math.isfinite(value):
                    raise TrainingDivergedError(epoch, value)
                epoch_losses.append(value)
                grads = gnn_backward(arch, sample.graph, sample.inputs, grad, cache)
                for name in total:
                    total[name] += grads[name] / len(batch)
            if cfg.penalty_weight > 0:
                _, penalty_grads = filter_penalty(arch, grid, cfg.penalty_weight)
                for name, value in penalty_grads.items():
                    total[name] += value
            arch.set_parameters(stepper.step(params, total))

        penalty = filter_penalty(arch, grid, cfg.penalty_weight)[0] if cfg.penalty_weight > 0 else 0.0
        epoch_loss = float(np.mean(epoch_losses))
        if not math.isfinite(epoch_loss + penalty):
            raise TrainingDivergedError(epoch, epoch_loss + penalty)
        history.append(EpochRecord(epoch, epoch_loss, penalty))
        if verbose:
            print(f"  epoch {epoch:4d}  loss {epoch_loss:.6f}  penalty {penalty:.6f}")
    return TrainResult(arch, history)


def _readout_features(arch: GnnArch, dataset: list[GraphSample]) -> list[np.ndarray]:
    return [
        arch.readout.features(
            gnn_forward(arch, s.graph, s.inputs, s.ensure_spectrum(), readout=False)
        )
        for s in dataset
    ]


def readout_retrain(arch: GnnArch, dataset: list[GraphSample], loss: Loss = Loss.MSE) -> GnnArch:
    """
    Refit only the readout on the features the frozen filters produce.

    MSE readouts are solved in closed form by least squares; cross-entropy
    readouts by L-BFGS started from the current readout. The samples may live
    on new graphs.

    Returns:
        A copy of arch with identical banks and a refit readout.
    """
    if arch.readout is None:
        raise ValueError("architecture has no readout to retrain")
    if not dataset:
        raise ValueError("readout refit needs a nonempty dataset")
    loss = Loss(loss) if isinstance(loss, str) else loss
    new = arch.copy()
    feats = _readout_features(new, dataset)
    Phi = np.vstack(feats)
    ones = np.ones((Phi.shape[0], 1))
    out_dim = new.readout.out_dim

    if loss == Loss.MSE:
        targets = np.vstack(
            [np.asarray(s.target, dtype=float).reshape(f.shape[0], out_dim) for s, f in zip(dataset, feats)]
        )
        solution, *_ = np.linalg.lstsq(np.hstack([Phi, ones]), targets, rcond=None)
        W, b = solution[:-1], solution[-1]
    else:
        labels = np.concatenate([np.atleast_1d(np.asarray(s.target, dtype=int)) for s in dataset])
        rows = np.arange(labels.size)
        F = Phi.shape[1]

        def objective(theta):
            W = theta[: F * out_dim].reshape(F, out_dim)
            b = theta[F * out_dim:]
            logits = Phi @ W + b
            value = -np.mean(log_softmax(logits, axis=1)[rows, labels])
            grad = softmax(logits, axis=1)
            grad[rows, labels] -= 1.0
            grad /= labels.size
            return value, np.concatenate([(Phi.T @ grad).ravel(), grad.sum(axis=0)])

        theta0 = np.concatenate([new.readout.W.ravel(), new.readout.b])
        result = minimize(objective, theta0, jac=True, method="L-BFGS-B",
                          options={"maxiter": 1000, "gtol": 1e-10, "ftol": 1e-14})
        W = result.x[: F * out_dim].reshape(F, out_dim)
        b = result.x[F * out_dim:]
    new.readout = Readout(W, b, new.readout.pool)
    new.version += 1
    return new


__all__ = [
    "Loss",
    "Optimizer",
    "TrainConfig",
    "GraphSample",
    "EpochRecord",
    "TrainResult",
    "loss_and_grad",
    "predict",
    "accuracy",
    "dataset_loss",
    "train",
    "readout_retrain",
]
