import setuptools
from lsc_stego.settings import NAME, VERSION

with open('README.md', encoding='utf-8') as f:
    long_description = f.read()

setuptools.setup(name='lsc_stego',
                 version=VERSION,
                 description='Data hiding in the least significant '
                             'coefficients of grayscale images',
                 license='MIT',
                 long_description=long_description,
                 long_description_content_type='text/markdown',
                 zip_safe=False,
                 python_requires='>=3.8',
                 install_requires=['pyyaml', 'numpy', 'scipy'],
                 extras_require={
                     'test': ['pytest', 'hypothesis'],
                 },
                 packages=setuptools.find_packages(exclude=['tests']),
                 entry_points={
                     'console_scripts': [
                         f'{NAME}=lsc_stego.lscstego:run',
                     ]
                 })
