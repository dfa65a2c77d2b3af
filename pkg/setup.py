#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from setuptools import setup, find_packages

with open("README.md") as readme_file:
    readme = readme_file.read()

requirements = [
    "ngs-tools>=1.5.6",
    "numpy>=1.19.5",
    "pandas>=1.5.0",
    "scipy>=1.12.0",
    "typing-extensions>=3.7.4",
    "tqdm>=4",
    "parameterized",
]


author = "fracpme developers"

setup(
    name="fracpme",
    python_requires=">=3.8",
    entry_points={
        "console_scripts": ["fracpme = fracpme.cli.fracpme_cli:main"]
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Operating System :: MacOS :: MacOS X",
        "Operating System :: Microsoft :: Windows",
        "Operating System :: POSIX :: Linux",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    long_description=readme + "\n\n",
    description="Self-similar solutions of the time-fractional porous medium "
    "equation by Volterra fixed-point iteration and shooting",
    install_requires=requirements,
    license="MIT license",
    include_package_data=True,
    packages=find_packages(exclude=["test", "test.*"]),
    keywords="fractional-calculus porous-medium free-boundary",
    version="0.1.0",
    zip_safe=False,
    tests_require=["pytest"],
)
