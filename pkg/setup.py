"""Setup script for polarfft."""

from setuptools import find_packages, setup

with open("README.md") as f:
    long_description = f.read()

with open("requirements.txt") as f:
    requirements = [
        line.strip() for line in f if line.strip() and not line.startswith("#")
    ]

setup(
    name="polarfft",
    version="0.1.0",
    description="FFT-based solver for micropolar elastoplastic periodic composites",
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="polarfft developers",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.10",
    install_requires=requirements,
    entry_points={
        "console_scripts": [
            "polarfft=src.cli:main",
        ],
    },
)
