from setuptools import find_packages, setup

with open("requirements.txt", encoding="utf-8") as f:
    requirements = [line.strip() for line in f if line.strip() and not line.startswith("#")]

setup(
    name="meslab",
    version="1.0.0",
    description="Exact MUBs, maximally entangled line states and Mean King protocols for odd prime dimensions",
    packages=find_packages(exclude=("tests",)),
    python_requires=">=3.9",
    install_requires=requirements,
    entry_points={"console_scripts": ["meslab=meslab.cli:main"]},
)
