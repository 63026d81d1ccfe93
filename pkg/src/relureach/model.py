"""Model bundles: JSON loading and validation.

A model file looks like::

    {
      "name": "...",
      "system": {"modes": [{"A": [[...]], "B": [[...]]}, ...]},
      "switching": {"kind": "periodic", "order": [1, 2], "sigma0": 1},
      "network": {"layers": [{"W": [[...]], "theta": [...], "kind": "relu"}, ...]},
      "initial_set": {"parts": [{"H": [[...]], "b": [...]}]},
      "unsafe": {"label": "...", "parts": [{"box": {"center": [4, 4], "radius": 1}}]}
    }

Any set (or any single part) may use the ``box`` shorthand for an
infinity-norm ball. Errors name the offending field.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .exceptions import ModelError
from .geometry import PolyUnion, Polytope
from .network import ACTIVATIONS, Layer, ReluNetwork
from .system import PwlSystem, SwitchingSignal
from .verify import SafetySpec

BUNDLED = ("paper_sec4",)


def bundled_model_path(name: str = "paper_sec4") -> Path:
    """Path of a model file shipped with the package."""
    if name not in BUNDLED:
        raise ModelError(f"no bundled model named {name!r}")
    return Path(str(resources.files("relureach") / "data" / f"{name}.json"))


@dataclass
class ModelBundle:
    system: PwlSystem
    switching: SwitchingSignal
    network: ReluNetwork
    initial_set: PolyUnion
    unsafe: SafetySpec | None = None
    name: str = ""
    description: str = ""
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def n_x(self) -> int:
        return self.system.n_x

    @property
    def n_u(self) -> int:
        return self.system.n_u

    def with_sigma0(self, sigma0: int | None) -> "ModelBundle":
        if sigma0 is None:
            return self
        sw = self.switching
        if sw.kind != "periodic":
            raise ModelError("--sigma0 only applies to periodic switching")
        try:
            new = SwitchingSignal.periodic(sw.modes, sigma0)
        except ValueError as exc:
            raise ModelError(f"switching.sigma0: {exc}") from None
        return ModelBundle(self.system, new, self.network, self.initial_set, self.unsafe,
                           self.name, self.description, self.raw)


def _get(obj, key, path):
    if not isinstance(obj, dict):
        raise ModelError(f"{path}: expected an object")
    if key not in obj:
        raise ModelError(f"{path}.{key}: missing required field" if path else f"{key}: missing required field")
    return obj[key]


def _matrix(value, path, rows=None, cols=None) -> np.ndarray:
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ModelError(f"{path}: not a numeric matrix") from None
    if M.ndim != 2:
        raise ModelError(f"{path}: expected a 2-D matrix, got {M.ndim}-D")
    if not np.all(np.isfinite(M)):
        raise ModelError(f"{path}: non-finite entries")
    if rows is not None and M.shape[0] != rows or cols is not None and M.shape[1] != cols:
        want = f"({rows if rows is not None else '*'}, {cols if cols is not None else '*'})"
        raise ModelError(f"{path}: shape {M.shape} does not match expected {want}")
    return M


def _vector(value, path, length=None) -> np.ndarray:
    try:
        v = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ModelError(f"{path}: not a numeric vector") from None
    if v.ndim != 1:
        raise ModelError(f"{path}: expected a 1-D vector")
    if not np.all(np.isfinite(v)):
        raise ModelError(f"{path}: non-finite entries")
    if length is not None and v.shape[0] != length:
        raise ModelError(f"{path}: length {v.shape[0]} does not match expected {length}")
    return v


def _polytope(obj, path, dim) -> Polytope:
    if isinstance(obj, dict) and "box" in obj:
        box = obj["box"]
        center = _vector(_get(box, "center", f"{path}.box"), f"{path}.box.center", dim)
        radius = _get(box, "radius", f"{path}.box")
        r = np.array(radius, dtype=float)
        if np.any(r < 0):
            raise ModelError(f"{path}.box.radius: must be non-negative")
        return Polytope.box(center, r if r.ndim else float(r))
    H = _matrix(_get(obj, "H", path), f"{path}.H", cols=dim)
    b = _vector(_get(obj, "b", path), f"{path}.b", H.shape[0])
    return Polytope(H, b)


def _poly_union(obj, path, dim) -> PolyUnion:
    if isinstance(obj, dict) and "box" in obj:
        parts = [_polytope(obj, path, dim)]
    else:
        raw = _get(obj, "parts", path)
        if not isinstance(raw, list) or not raw:
            raise ModelError(f"{path}.parts: expected a non-empty list")
        parts = [_polytope(p, f"{path}.parts[{i}]", dim) for i, p in enumerate(raw)]
    try:
        return PolyUnion(parts)
    except Exception as exc:  # unbounded parts cannot be ordered canonically
        raise ModelError(f"{path}: {exc}") from None


def parse_model(data: dict) -> ModelBundle:
    """Validate a decoded model document and build the bundle."""
    if not isinstance(data, dict):
        raise ModelError("model: top level must be an object")
    modes_raw = _get(_get(data, "system", ""), "modes", "system")
    if not isinstance(modes_raw, list):
        raise ModelError("system.modes: expected a list")
    if not modes_raw:
        raise ModelError("system.modes: N >= 1 required (empty modes list)")

    layers_raw = _get(_get(data, "network", ""), "layers", "network")
    if not isinstance(layers_raw, list) or not layers_raw:
        raise ModelError("network.layers: expected a non-empty list")
    layers = []
    width = None
    for i, L in enumerate(layers_raw):
        p = f"network.layers[{i}]"
        W = _matrix(_get(L, "W", p), f"{p}.W", cols=width)
        theta = _vector(_get(L, "theta", p), f"{p}.theta", W.shape[0])
        kind = L.get("kind", "relu")
        if kind not in ACTIVATIONS:
            raise ModelError(f"{p}.kind: unknown activation kind {kind!r}; expected one of {list(ACTIVATIONS)}")
        layers.append(Layer(W, theta, kind))
        width = W.shape[0]
    net = ReluNetwork(layers)
    n_x, n_u = net.n_in, net.n_out

    modes = []
    for i, m in enumerate(modes_raw):
        p = f"system.modes[{i}]"
        A = _matrix(_get(m, "A", p), f"{p}.A", n_x, n_x)
        B = _matrix(_get(m, "B", p), f"{p}.B", n_x, n_u)
        modes.append((A, B))
    system = PwlSystem(modes)

    sw = data.get("switching", {"kind": "periodic", "order": [1]})
    kind = _get(sw, "kind", "switching")
    try:
        if kind == "periodic":
            signal = SwitchingSignal.periodic(_get(sw, "order", "switching"), sw.get("sigma0", 1))
        elif kind == "explicit":
            signal = SwitchingSignal("explicit", tuple(_get(sw, "sequence", "switching")), sw.get("sigma0"))
        else:
            raise ModelError(f"switching.kind: expected 'periodic' or 'explicit', got {kind!r}")
        signal.validate(len(system))
    except ValueError as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"switching: {exc}") from None

    X0 = _poly_union(_get(data, "initial_set", ""), "initial_set", n_x)
    unsafe = None
    if data.get("unsafe") is not None:
        u = data["unsafe"]
        unsafe = SafetySpec(_poly_union(u, "unsafe", n_x), u.get("label", "unsafe") if isinstance(u, dict) else "unsafe")
    return ModelBundle(system, signal, net, X0, unsafe, data.get("name", ""), data.get("description", ""), data)


def load_model(path) -> ModelBundle:
    """Load and validate a model file; a bundled model name is also accepted."""
    path = Path(path)
    if not path.exists() and str(path) in BUNDLED:
        path = bundled_model_path(str(path))
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_model(data)
