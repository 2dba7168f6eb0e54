import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="py-coresmc",
    version="0.3.0",
    description="Joint inference of sediment core chronologies, climate dynamics and orbital forcing with SMC^2",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=("examples", "examples.*")),
    package_data={
        "coresmc": ["data/*.txt", "data/*.json"],
    },
    python_requires=">=3.7",
    install_requires=[
        'numpy>=1.17',
        'scipy>=1.4',
        'psutil',
        'junit-xml>=1.9',
        'pytz',
    ],
    entry_points={
        "console_scripts": [
            "coresmc=coresmc.cli:main",
        ],
    },
    classifiers=(
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ),
)
