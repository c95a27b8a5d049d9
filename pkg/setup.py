from setuptools import setup, find_packages



setup(
    name="ksforge",
    version="0.1.0",
    description="A CLI for simulating the Kuramoto-Sivashinsky equation and tracking its stripes",
    author="Rose Tovar",
    packages=find_packages(exclude=["tests"]),
    include_package_data=True,
    package_data={"ksforge": ["templates/*.template"]},
    python_requires=">=3.10",
    entry_points={
        "console_scripts": [
            "ksforge=ksforge.main:main",
        ],
    },
    install_requires=["jinja2", "pyyaml", "numpy", "pandas"],
    extras_require={
        "png": ["matplotlib"],
        "test": ["pytest"],
    },
)
