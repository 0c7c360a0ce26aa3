from setuptools import find_packages, setup

with open("README.md", "r") as f:
    long_description = f.read()

setup(
    name="simoe",
    version="0.1.0",
    description="A package to simulate Mixture-of-Experts inference split between end devices and the cloud",
    author="Mario Gavidia-Calderón",
    author_email="mario.calderon@iag.usp.br",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=["numpy", "pandas", "xarray", "dask", "pyyaml"],
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="MIT",
    classifiers=[
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.10",
        "Operating System :: OS Independent",
    ],
    extras_require={"dev": ["pytest", "hypothesis", "coverage", "twine"]},
    entry_points={"console_scripts": ["simoe=simoe.cli:main"]},
    python_requires=">=3.10",
)
