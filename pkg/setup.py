from setuptools import setup, find_packages

setup(
    name='phase-squeezing',
    version='1.0.0',
    description='Steady state, squeezing spectrum, dressed states and squeezing parameter '
                'of a closed-loop Lambda atom',
    license='MIT',
    package_dir={'': 'src'},
    packages=find_packages(where='src'),
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.10'
    ],
    extras_require={
        'test': ['pytest>=7.0']
    },
    entry_points={
        'console_scripts': [
            'phase-squeezing=phase_squeezing.cli.main:main'
        ]
    }
)
