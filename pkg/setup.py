#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#

import sys
from setuptools import setup, find_packages

if sys.version_info < (3, 7):
    raise ValueError("Requires Python 3.7 or superior")

from bagged_gp import __version__  # NOQA

install_requires = [
    "numpy",
    "scipy",
    "pyyaml",
    "ecs_logging",
    "cerberus",
    "pytest",
    "pytest-cov",
    "cached_property"
]

description = ""

with open("README.md") as f:
    description += f.read() + "\n\n"


classifiers = [
    "Programming Language :: Python",
    "Development Status :: 4 - Beta",
    "Programming Language :: Python :: 3 :: Only",
    "Programming Language :: Python :: 3.7",
    "Programming Language :: Python :: 3.8",
    "Programming Language :: Python :: 3.9",
    "Topic :: Scientific/Engineering :: Mathematics",
]


setup(
    name="bagged-gp",
    version=__version__,
    url="someurl",
    packages=find_packages(exclude=["tests"]),
    long_description=description.strip(),
    description=("Bagged Gaussian process regression for large datasets"),
    author="author",
    author_email="email",
    include_package_data=True,
    zip_safe=False,
    classifiers=classifiers,
    install_requires=install_requires,
    data_files=[("config", ["bagged_gp.yml"]), ("config/benchmarks", [
        "configs/sinc.yml",
        "configs/airline.yml",
        "configs/ccpp.yml",
        "configs/ailerons.yml",
        "configs/delta_elevators.yml",
        "configs/cal_housing.yml",
        "configs/hpc.yml",
    ])],
    entry_points="""
      [console_scripts]
      bagged_gp = bagged_gp.cli:main
      """,
)
