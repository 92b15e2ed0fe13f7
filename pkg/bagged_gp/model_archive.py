#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""model_archive module saves and loads fitted ensembles.

An archive is one compressed numpy file. Entry `manifest` is a JSON document
with the format name and version, the ensemble config, the kernel template,
the standardization and, per member, its kernel string, log-parameters and
noise. Entries `member_<i>_X` and `member_<i>_y` hold each member's training
subset in standardized units. Cholesky factors are not stored; members are
re-factorized on load. See docs/report_format.md."""

import json
import logging
from dataclasses import asdict

import numpy as np

from .dataset import Dataset, Standardization
from .ensemble import EnsembleConfig, EnsembleModel
from .gp_core import NoiseSpec, fit_exact
from .kernel_grammar import format_kernel, parse_kernel

logger = logging.getLogger(__name__)

ARCHIVE_FORMAT = "bagged-gp-archive"
ARCHIVE_VERSION = 1


class ArchiveFormatError(ValueError):
    """Exception raised when a file is not a readable model archive.

    Attributes:
        path -- the archive path
    """

    def __init__(self, message, path=None):
        super().__init__(message if path is None else f"{message} ({path})")
        self.path = path


def save_model(model: EnsembleModel, path):
    """Writes the ensemble to `path` (numpy appends .npz when missing)."""
    members = []
    arrays = {}
    for index, member in enumerate(model.members):
        members.append({
            "kernel": format_kernel(member.kernel),
            "log_params": [float(value) for value in member.kernel.log_params()],
            "sigma_n_sq": member.noise.sigma_n_sq,
            "noise_fixed": member.noise.fixed,
        })
        arrays[f"member_{index}_X"] = member.data.X
        arrays[f"member_{index}_y"] = member.data.y
    first = model.members[0].data
    manifest = {
        "format": ARCHIVE_FORMAT,
        "version": ARCHIVE_VERSION,
        "config": asdict(model.config),
        "kernel_template": format_kernel(model.template),
        "standardization": model.standardization.to_dict() if model.standardization else None,
        "feature_names": list(first.feature_names),
        "target_name": first.target_name,
        "members": members,
    }
    np.savez_compressed(path, manifest=np.array(json.dumps(manifest)), **arrays)
    logger.info("Saved %s-member ensemble to %s", len(members), path)


def load_model(path) -> EnsembleModel:
    """Reads an archive written by save_model and re-factorizes every member."""
    try:
        with np.load(path, allow_pickle=False) as archive:
            manifest = json.loads(str(archive["manifest"]))
            arrays = {name: archive[name] for name in archive.files if name != "manifest"}
    except (OSError, KeyError, ValueError) as exception:
        raise ArchiveFormatError(f"Could not read model archive: {exception}", path)
    if manifest.get("format") != ARCHIVE_FORMAT or manifest.get("version") != ARCHIVE_VERSION:
        raise ArchiveFormatError(
            f"Unsupported archive format {manifest.get('format')!r} version {manifest.get('version')!r}", path
        )

    standardization = None
    if manifest["standardization"] is not None:
        standardization = Standardization.from_dict(manifest["standardization"])
    members = []
    for index, entry in enumerate(manifest["members"]):
        data = Dataset(
            X=arrays[f"member_{index}_X"],
            y=arrays[f"member_{index}_y"],
            standardization=standardization,
            feature_names=tuple(manifest["feature_names"]),
            target_name=manifest["target_name"],
        )
        kernel = parse_kernel(entry["kernel"]).with_log_params(np.asarray(entry["log_params"], dtype=float))
        noise = NoiseSpec(sigma_n_sq=entry["sigma_n_sq"], fixed=entry["noise_fixed"])
        members.append(fit_exact(data, kernel, noise))
    logger.info("Loaded %s-member ensemble from %s", len(members), path)
    return EnsembleModel(
        members=members,
        config=EnsembleConfig(**manifest["config"]),
        template=parse_kernel(manifest["kernel_template"]),
        standardization=standardization,
    )
