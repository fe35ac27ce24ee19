from setuptools import setup, find_packages

# It's annoying to track dependencies inline with install_requires
dependencies = [
    "numpy>=1.17",
    "scipy>=1.4",
    "matplotlib>=3.1",
    "pyyaml",
    "setuptools",
]

scm_version_options = {
        'write_to': 'src/mfusion/version.py',
        'fallback_version': 'UNKNOWN',
        }

setup(
    name="mfusion",
    description="Maneuver prediction from fused in-cabin and exterior "
                "driving features",
    classifiers=["Private :: Do Not Upload"],
    # The exclude below is a bit of prophylactic. If someone puts a tests dir
    # under src in future, it won't get included in the package (note: don't do
    # that).
    packages=find_packages("src", exclude=['tests*', 'mfusion/tests']),
    package_dir={'': "src"},
    package_data={'mfusion': ['config/*.yaml', 'data/*.json']},
    include_package_data=True,
    install_requires=dependencies,
    setup_requires=['setuptools_scm>=3.3.0'],
    use_scm_version=scm_version_options,
    tests_require=['tox'],
    zip_safe=False,
    entry_points={
        'console_scripts': [
            'mfusion = mfusion.cli:main'
        ]
    },
)
