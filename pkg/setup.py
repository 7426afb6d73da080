#! /usr/bin/env python

from setuptools import setup
import importlib

# read the version without importing the package (and its dependencies)
rmhtools_version_spec = importlib.util.spec_from_file_location('rmhtools_version',
                                                               'rmhtools/version.py')
rmhtools_version_module = importlib.util.module_from_spec(rmhtools_version_spec)
rmhtools_version_spec.loader.exec_module(rmhtools_version_module)
VERSION = rmhtools_version_module.version

setup(
    name='rmhtools',
    version=VERSION,
    long_description=open('README.md', 'r').read(),
    long_description_content_type='text/markdown',
    description='Variable selection for functional data classification with Recursive Maxima '
                'Hunting, and the benchmark comparing it with Maxima Hunting, PCA and PLS',
    license='MIT',
    keywords='functional-data variable-selection distance-correlation classification',
    packages=['rmhtools', 'rmhtools.selection', 'rmhtools.tools', 'rmhtools.bench'],
    package_data={'': ['LICENSE']},
    install_requires=['numpy>=1.17',
                      'scipy>=1.2',
                      'matplotlib>=1.5',
                      'pandas>=0.25',
                      'dcor>=0.5',
                      'scikit-learn>=0.24',
                      'joblib>=1.0',
                      'tqdm>=4.29'],
    entry_points={'console_scripts': ['rmhtools=rmhtools.bench.cli:main']},
    tests='TESTS',
    )
