from setuptools import setup

dependencies = [
      'numpy==1.*',
      'scipy==1.*',
      'click==8.*',
      'pyyaml>=5',
      'pandas>=1',
      'importlib_metadata>=2',
      'matplotlib>=3.5'
]

setup(name='fairfold',
      version='1.0',
      description='Fairfold: honest cross-validation of resampling methods for imbalanced classification',
      packages=['fairfold'],
      install_requires=dependencies,
      extras_require={'test': ['pytest>=7']},
      include_package_data=True,
      license='Apache 2.0',
      entry_points='''
            [console_scripts]
            fairfold-run=fairfold.run:run_cmd
            fairfold-probe=fairfold.run:probe_cmd
      ''',
     )
