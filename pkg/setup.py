# Copyright (C) 2024 The twintree authors
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

from setuptools import setup, find_packages

from twintree import __version__, __prog__


def read_requirements(path):
    """
    The requirements of a file, without blank lines, comments and "-r" includes
    :param path:
    :return:
    """
    with open(path) as f_r:
        lines = (line.strip() for line in f_r)
        return [line for line in lines if line and not line.startswith(("#", "-r"))]


with open("README.md") as f:
    long_description = f.read()

setup(
    name=__prog__,
    version=__version__,
    description="Decide isomorphism, embedding and twinning of finitely presented infinite trees",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="GPLv3",
    python_requires=">=3.9",
    install_requires=read_requirements("requirements.txt"),
    extras_require={"test": read_requirements("tests/requirements_tests.txt")},
    packages=find_packages(exclude=["tests"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Environment :: Console",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
    ],
    entry_points={"console_scripts": [f"{__prog__} = twintree.cli:main"]},
)
