"""File formats: scene JSON, trace/envelope CSV, dataset CSV, model JSON.

All writers are atomic (temp file + rename) and deterministic: floats are
serialized with ``repr`` so identical values produce identical bytes.
"""
from __future__ import annotations

import csv
import io as _io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .backscatter import (
    CarrierConfig,
    GroundTruth,
    IqTrace,
    LinkBudget,
    Scatterer,
    Scene,
)
from .dsp import Envelope
from .errors import InputError
from .features import FEATURE_NAMES
from .svm import LabeledDataset, OvoSvmModel

SCHEMA_VERSION = 1


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, payload: dict) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2) + "\n")


def read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _complex_to_json(z: complex) -> list[float]:
    return [z.real, z.imag]


def _complex_from_json(value, path: str) -> complex:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise InputError(f"{path}: expected [real, imag], got {value!r}")
    return complex(float(value[0]), float(value[1]))


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise InputError(f"{where}: missing required field {key!r}")
    return mapping[key]


def scene_to_dict(scene: Scene) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "link": {
            "p_tx": scene.link.p_tx,
            "g_tx": scene.link.g_tx,
            "g_tag": scene.link.g_tag,
            "lambda": scene.link.wavelength,
            "d": scene.link.d,
            "z_a": _complex_to_json(scene.link.z_a),
            "z_c1": _complex_to_json(scene.link.z_c1),
            "z_c2": _complex_to_json(scene.link.z_c2),
        },
        "carrier": {
            "f_c": scene.carrier.f_c,
            "delta_f": scene.carrier.delta_f,
            "sample_rate": scene.carrier.sample_rate,
        },
        "scatterers": [
            {
                "base_amplitude": _complex_to_json(s.base_amplitude),
                "path_fn": {"samples": s.profile.tolist(), "period": s.period},
                "period_jitter": s.period_jitter,
            }
            for s in scene.scatterers
        ],
        "static_power": scene.static_power,
        "noise_sigma": scene.noise_sigma,
        "n_cycles": scene.n_cycles,
        "rng_seed": scene.rng_seed,
        "label": scene.label,
    }


def scene_from_dict(payload: dict, where: str = "scene") -> Scene:
    link_raw = _require(payload, "link", where)
    carrier_raw = _require(payload, "carrier", where)
    link = LinkBudget(
        p_tx=float(_require(link_raw, "p_tx", f"{where}.link")),
        g_tx=float(_require(link_raw, "g_tx", f"{where}.link")),
        g_tag=float(_require(link_raw, "g_tag", f"{where}.link")),
        wavelength=float(_require(link_raw, "lambda", f"{where}.link")),
        d=float(_require(link_raw, "d", f"{where}.link")),
        z_a=_complex_from_json(_require(link_raw, "z_a", f"{where}.link"), f"{where}.link.z_a"),
        z_c1=_complex_from_json(_require(link_raw, "z_c1", f"{where}.link"), f"{where}.link.z_c1"),
        z_c2=_complex_from_json(_require(link_raw, "z_c2", f"{where}.link"), f"{where}.link.z_c2"),
    )
    carrier = CarrierConfig(
        f_c=float(_require(carrier_raw, "f_c", f"{where}.carrier")),
        delta_f=float(_require(carrier_raw, "delta_f", f"{where}.carrier")),
        sample_rate=float(_require(carrier_raw, "sample_rate", f"{where}.carrier")),
    )
    scatterers = []
    for k, raw in enumerate(payload.get("scatterers", [])):
        spot = f"{where}.scatterers[{k}]"
        path_fn = _require(raw, "path_fn", spot)
        scatterers.append(
            Scatterer(
                base_amplitude=_complex_from_json(
                    _require(raw, "base_amplitude", spot), f"{spot}.base_amplitude"
                ),
                profile=np.asarray(_require(path_fn, "samples", f"{spot}.path_fn"), dtype=np.float64),
                period=float(_require(path_fn, "period", f"{spot}.path_fn")),
                period_jitter=float(raw.get("period_jitter", 0.0)),
            )
        )
    return Scene(
        link=link,
        carrier=carrier,
        scatterers=tuple(scatterers),
        static_power=float(_require(payload, "static_power", where)),
        noise_sigma=float(_require(payload, "noise_sigma", where)),
        n_cycles=int(_require(payload, "n_cycles", where)),
        rng_seed=int(_require(payload, "rng_seed", where)),
        label=payload.get("label"),
    )


def load_scene(path) -> Scene:
    return scene_from_dict(read_json(path), where=str(path))


def save_scene(path, scene: Scene) -> None:
    write_json(path, scene_to_dict(scene))


def trace_sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def write_trace(csv_path, trace: IqTrace, seed: int | None = None) -> None:
    """Write a trace as a ``t,i,q`` CSV plus a JSON sidecar."""
    buf = _io.StringIO()
    buf.write("t,i,q\n")
    fs = trace.sample_rate
    for k in range(len(trace)):
        buf.write(f"{k / fs!r},{trace.i_samples[k]!r},{trace.q_samples[k]!r}\n")
    atomic_write_text(csv_path, buf.getvalue())

    truth = trace.ground_truth
    sidecar = {
        "schema_version": SCHEMA_VERSION,
        "sample_rate": fs,
        "n_samples": len(trace),
        "seed": seed,
        "ground_truth": None
        if truth is None
        else {
            "n_cycles": truth.n_cycles,
            "cycle_bounds": [list(pair) for pair in truth.cycle_bounds],
            "label": truth.label,
        },
    }
    write_json(trace_sidecar_path(csv_path), sidecar)


def read_trace(csv_path) -> IqTrace:
    """Read a trace CSV and its sidecar (falls back to sidecar-less files)."""
    path = Path(csv_path)
    try:
        with path.open() as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["t", "i", "q"]:
                raise InputError(f"{path}: expected header 't,i,q', got {header!r}")
            rows = [(float(t), float(i), float(q)) for t, i, q in reader]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"{path}: malformed trace row: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: trace has no samples")

    sidecar_path = trace_sidecar_path(path)
    truth = None
    if sidecar_path.exists():
        sidecar = read_json(sidecar_path)
        sample_rate = float(_require(sidecar, "sample_rate", str(sidecar_path)))
        raw_truth = sidecar.get("ground_truth")
        if raw_truth is not None:
            truth = GroundTruth(
                n_cycles=int(raw_truth["n_cycles"]),
                cycle_bounds=tuple(tuple(int(v) for v in pair) for pair in raw_truth["cycle_bounds"]),
                label=raw_truth.get("label"),
            )
    elif len(rows) > 1:
        sample_rate = 1.0 / (rows[1][0] - rows[0][0])
    else:
        raise InputError(f"{path}: single-sample trace needs a sidecar for its sample rate")

    data = np.asarray(rows, dtype=np.float64)
    return IqTrace(
        sample_rate=sample_rate,
        i_samples=data[:, 1],
        q_samples=data[:, 2],
        ground_truth=truth,
    )


def write_envelope(path, env: Envelope) -> None:
    buf = _io.StringIO()
    buf.write("t,amplitude\n")
    for k, v in enumerate(env.samples):
        buf.write(f"{k / env.sample_rate!r},{v!r}\n")
    atomic_write_text(path, buf.getvalue())


def read_envelope(path, sample_rate: float | None = None) -> Envelope:
    path = Path(path)
    try:
        with path.open() as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["t", "amplitude"]:
                raise InputError(f"{path}: expected header 't,amplitude', got {header!r}")
            rows = [(float(t), float(v)) for t, v in reader]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"{path}: malformed envelope row: {exc}") from exc
    if len(rows) < 2 and sample_rate is None:
        raise InputError(f"{path}: cannot infer sample rate from {len(rows)} rows")
    if sample_rate is None:
        sample_rate = 1.0 / (rows[1][0] - rows[0][0])
    return Envelope(sample_rate=sample_rate, samples=np.asarray([v for _, v in rows]))


def write_dataset(path, dataset: LabeledDataset) -> None:
    """Feature CSV: the ten feature columns plus a trailing label column."""
    buf = _io.StringIO()
    buf.write(",".join(FEATURE_NAMES) + ",label\n")
    for row, label in zip(dataset.features, dataset.labels):
        buf.write(",".join(repr(float(v)) for v in row) + f",{label}\n")
    atomic_write_text(path, buf.getvalue())


def read_dataset(path, classes=None) -> LabeledDataset:
    path = Path(path)
    expected = list(FEATURE_NAMES) + ["label"]
    try:
        with path.open() as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != expected:
                raise InputError(
                    f"{path}: expected header {','.join(expected)!r}, got {header!r}"
                )
            features = []
            labels = []
            for k, row in enumerate(reader):
                if len(row) != len(expected):
                    raise InputError(f"{path}: row {k + 2} has {len(row)} columns")
                features.append([float(v) for v in row[:-1]])
                labels.append(row[-1])
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"{path}: malformed dataset row: {exc}") from exc
    if not features:
        raise InputError(f"{path}: dataset has no rows")
    return LabeledDataset.build(np.asarray(features), labels, classes=classes)


def save_model(path, model: OvoSvmModel) -> None:
    write_json(path, model.to_dict())


def load_model(path) -> OvoSvmModel:
    return OvoSvmModel.from_dict(read_json(path))
