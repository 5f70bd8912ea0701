from setuptools import setup

setup(
    name='rannlr',
    version='0.1.0',
    packages=['rannlr', 'rannlr.bench', 'rannlr.management', 'rannlr.management.commands'],
    package_dir={'': 'src'},
    license='MIT',
    description='Randomized nonlinear rescaling for convex programs with many inequality constraints',
    install_requires=[
        'Django>=3.2',
        'numpy>=1.17',
        'scipy>=1.4',
        'python-dateutil>=2.6.0',
    ],
    entry_points={
        'console_scripts': [
            'rannlr = rannlr.management:execute_from_command_line',
        ],
    },
    zip_safe=False
)
