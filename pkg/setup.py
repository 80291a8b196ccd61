# -*- coding: utf-8 -*-
import os

from setuptools import setup, find_packages

here = os.path.abspath(os.path.dirname(__file__))

# To update the package version number, edit aoisample/__version__.py
version = {}
with open(os.path.join(here, 'aoisample', '__version__.py')) as f:
    exec(f.read(), version)

with open('README.md') as readme_file:
    readme = readme_file.read()

setup(
    name='aoisample',
    version=version['__version__'],
    description='Age of information optimal sampling over channels with '
                'piecewise-stationary random delay',
    long_description=readme + '\n\n',
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['test', 'examples', 'examples.*']),
    include_package_data=True,
    license="Apache Software License 2.0",
    keywords='age-of-information sampling change-detection',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
    ],
    python_requires='>=3.8',
    install_requires=[
        'numpy >= 1.17',
        'scipy',
        'h5py',
        'tqdm',
        'pandas',
        ],
    extras_require={
        'test': ['coverage', 'pytest', 'pytest-cov', 'hypothesis'],
        'dev': ['prospector[with_pyroma]', 'autopep8', 'isort'],
        'doc': ['sphinx'],
        'mpi': ['mpi4py'],
    },
    entry_points={
        'console_scripts': [
            'aoisample-run=aoisample.utils.run_experiment:main',
        ],
    },
)
