import os
from setuptools import setup

# read the contents of your README file
this_directory = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(this_directory, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(name          = 'pinnlab',
      version       = '0.1.1',
      author        = 'pinnlab contributors',
      description   = 'Automatic-differentiation and finite-difference physics-informed neural network losses, '
                      'reference solvers and non-uniqueness certificates for PDE benchmarks.',
      long_description_content_type='text/markdown',
      long_description=long_description,
      packages      = ['pinnlab'],
      license       = 'Apache',
      classifiers   = [# How mature is this project?
                       'Development Status :: 3 - Alpha',

                       # Indicate who your project is intended for
                       'Intended Audience :: Science/Research',
                       'Topic :: Scientific/Engineering :: Mathematics',

                       # Pick your license as you wish (should match "license" above)
                        'License :: OSI Approved :: Apache Software License',

                       'Programming Language :: Python :: 3',
                       'Programming Language :: Python :: 3.9'],
      keywords      = 'pinn finite difference automatic differentiation poisson schrodinger navier-stokes',
      python_requires  = '>=3.9',
      install_requires = ['numpy>=1.22',
                          'pandas>=1.5',
                          'scipy>=1.12',
                          'configparser',
                          'psutil',
                          'pytest'],
      package_dir   = { 'pinnlab':'pinnlab' },
      package_data  = { 'pinnlab':['configs/*.conf'] },
      entry_points  = { 'console_scripts': ['pinnlab=pinnlab.Run:main']},
      )
