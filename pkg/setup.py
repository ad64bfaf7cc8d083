#!/usr/bin/env python
# -*- coding: utf-8 -*-
import os.path
import sys

try:
    from setuptools import setup
except ImportError:
    print('Please install or upgrade setuptools or pip to continue')
    sys.exit(1)


def read_content(filename):
    path = os.path.join(os.path.dirname(os.path.realpath(__file__)), filename)
    with open(path, 'r') as fh:
        content = fh.read()
    return content


long_description = '\n\n'.join([read_content('README.rst'),
                                read_content('AUTHORS.rst'),
                                read_content('CHANGES.rst')])

install_requires = [
    'numpy>=1.17',
    'pandas',
    'PyYAML',
    'scipy',
]

tests_require = [
    'coverage',
    'more-itertools',
    'pytest',
    'pytest-cov',
]

setup(
    name='tenrec',
    description='Low rank tensor completion by weighted tensor Schatten-p norm minimization',
    version='0.1.dev0',
    long_description=long_description,
    long_description_content_type='text/x-rst',
    author='tenrec Authors',
    license='MIT License',
    keywords='tensor completion low rank Schatten ADMM Tucker',
    install_requires=install_requires,
    extras_require={
        'test': tests_require,
    },
    python_requires='>=3.6',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3.6',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    packages=['tenrec',
              'tenrec.testsuite',
              'tenrec.testsuite.fixtures'],
    package_data={
        'tenrec': ['default.yaml'],
        'tenrec.testsuite.fixtures': ['*.yaml', '*.json'],
    },
    entry_points={
        'console_scripts': ['tenrec = tenrec.cli:main'],
    },
    platforms="Linux, Windows, Mac",
    zip_safe=False
)
