from setuptools import setup, find_packages

setup(
    name="poincare-kernels",
    version="0.1",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    package_data={"": ["*.yml"]},
    install_requires=[
        "numpy",
        "scipy",
        "matplotlib",
        "mpmath",
        "PyYAML",
        "rich",
        "tqdm",
        "joblib",
    ],
    entry_points={
        "console_scripts": ["poincare-kernels=runner.cli:main"],
    },
)
