"""
twoweight: two-weight testing constants for maximal and fractional operators

Contents
--------

::

	twoweight
	│
	├── geometry
	│	├── rational
	│	├── cubes
	│	├── grids
	│	└── literal
	├── measures
	│	├── lattice
	│	├── measure
	│	├── prefix
	│	└── spec_file
	├── operators
	│	├── masstable
	│	├── maximal
	│	├── fractional
	│	└── fields
	├── constants
	│	├── families
	│	├── variants
	│	├── testing
	│	├── reports
	│	└── counterexample
	├── whitney
	│	├── decompose
	│	├── superlevel
	│	└── verify
	├── proofcheck
	│	├── params
	│	├── instance
	│	├── levels
	│	├── linearization
	│	├── principal
	│	├── packing
	│	├── fractional
	│	└── runner
	├── config
	├── run_metadata
	├── sweeps
	├── errors
	└── cli
"""

__version__ = "0.1.0"
