from setuptools import setup, find_packages

setup(
    name="coopguards",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    install_requires=[
        "openpyxl>=3.1.0",
        "networkx>=3.0",
        "numpy>=1.24",
    ],
    extras_require={
        "test": ["pytest>=7.0"],
    },
    entry_points={
        "console_scripts": [
            "coopguards=coopguards.cli:main",
        ],
    },
    python_requires=">=3.10",
)
