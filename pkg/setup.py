# setup.py
# Version: 2.0.0

import os
from setuptools import setup, find_packages

setup(
    name="pgm_bench",
    version="2.0.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    install_requires=[
        'numpy',
        'scipy',
        'pandas',
        'networkx',
        'PyYAML',
        'termcolor'
    ],
    extras_require={
        'test': ['pytest'],
    },
    entry_points={
        'console_scripts': [
            'pgm-bench=pgm_bench.main:main',
        ],
    },
    description="Workbench für grafische Modelle: Bayes-Netze und GGMs lernen, abfragen und validieren",
    long_description=open('README.md').read() if os.path.exists('README.md') else '',
    long_description_content_type="text/markdown",
    keywords="bayesian-network, graphical-model, d-separation, structure-learning, ggm",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
    python_requires=">=3.9",
)
