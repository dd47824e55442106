# -*- coding: UTF-8 -*-

try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup


from setuptools import find_packages


def get_packages():
    return find_packages(exclude=['docs', 'tests'])


def get_version():
    version = dict()

    with open("tpcpy/__version__.py") as fp:
        exec(fp.read(), version)

    return version['__version__']


setup(name='tpcpy',

      version=get_version(),

      description='Two-phase distributed averaging over noisy links: simulation, spectral gaps and MSE envelopes',

      packages=get_packages(),

      author="tpcpy developers",
      maintainer='tpcpy developers',

      long_description='Monte-Carlo simulator of a two-phase consensus protocol on cycles, grids and random '
                       'geometric graphs with additive Gaussian link noise.',

      keywords=["consensus", "distributed averaging", "gossip", "sensor networks", "stochastic approximation",
                "spectral gap", "monte carlo"],

      # See https://pypi.python.org/pypi?%3Aaction=list_classifiers
      classifiers=[
          'Intended Audience :: Science/Research',
          'Topic :: Scientific/Engineering :: Mathematics',

          'License :: OSI Approved :: GNU General Public License v2 or later (GPLv2+)',

          'Programming Language :: Python :: 3',
          'Operating System :: OS Independent',

      ],
      include_package_data=True,
      python_requires='>=3.8',
      install_requires=['numpy', 'scipy', 'pandas>=1.5'],
      setup_requires=[
          'pytest-runner',
      ],
      tests_require=[
          'pytest',
      ],
      entry_points={
          'console_scripts': ['tpcpy=tpcpy.e_experiment:main'],
      },
      )
