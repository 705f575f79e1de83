TESTS_PATH = "tests_hybridrupture"
TESTS_INTERRUPTED = "tests interrupted by user!"

OPEN_TEXT_MODE = ['r', 'rb', 'r+', 'rb+', 'w', 'wb', 'w+', 'wb+', 'a', 'ab', 'a+', 'ab+', 'x', 'xb', 'x+', 'xb+']

CFL_SAFETY = 0.4
BLOWUP_VELOCITY = 1.0e6
T_MAX = 100.0
RUPTURE_THRESHOLD = 1.0e-3
SNAPSHOT_BUDGET = 50
SNAPSHOT_QUEUE_SIZE = 4
BENCH_WARMUP = 3
BENCH_STEPS = 10
BENCH_HISTORY = 256
KERNEL_SAMPLES = 2 ** 21
COHESIVE_ZONE_MIN_ELEMENTS = 3
SPECTRAL_PRIMES = (2, 3, 5)

ENV_THREADS = "HYBRIDRUPTURE_THREADS"
ENV_OUTPUT = "HYBRIDRUPTURE_OUTPUT"
ENV_LOG_LEVEL = "HYBRIDRUPTURE_LOG_LEVEL"

MISSING_VARIABLE = "the <NAME> variable does not exist! <COMPLEMENT>"
UNEXPECTED_RULE = 'rules for environment variables must be "required" or "common"! rule: <RULE>.'
PATH_NOT_FOUND = "the <TYPE> <PATH> was not found! <COMPLEMENT>"
NOT_DIRECTORY = "the path <PATH> does not point to a directory! <COMPLEMENT>"
NOT_FILE = "the path <PATH> does not point to a file! <COMPLEMENT>"
DIRECTORY_ALREADY_EXISTS = "the directory in <PATH> already exists! <COMPLEMENT>"
INVALID_OPEN_TEXT_MODE = f'The file open mode "<MODE>" is invalid! Use: {", ".join(OPEN_TEXT_MODE)}.'
UNEXPECTED_EXPECTED = 'expected must be "directory" or "file"! expected: <EXPECTED>.'
UNEXPECTED_TYPE = "<METHOD> expected an <EXPECTED> in the <PARAMETER> parameter, but received a <RECEIVED>!"
UNEXPECTED_VALUE = "<METHOD> received an invalid value in the <PARAMETER> parameter: <RECEIVED>! <COMPLEMENT>"

NON_COMMENSURATE = "the extent <EXTENT> m along x<AXIS> is not a positive multiple of dx = <DX> m! <COMPLEMENT>"
INADMISSIBLE_SIZE = "N<AXIS> = <SIZE> is not admissible for the boundary transform (only factors 2, 3 and 5)! <COMPLEMENT>"
THIN_STRIP = "the strip needs at least 2 element layers along x2, got N2 = <SIZE>! <COMPLEMENT>"
NOT_NODE_PLANE = "x2 = <X2> m does not lie on a node plane of the grid! <COMPLEMENT>"
INVALID_MATERIAL = "invalid material (<REASON>): <MATERIAL>"
REGION_OUTSIDE = "the region <LOWER> - <UPPER> lies outside the strip <STRIP_LOWER> - <STRIP_UPPER>!"
UNKNOWN_MATERIAL = "region <INDEX> refers to material <MATERIAL>, but only <COUNT> materials exist!"

ZERO_MASS = "fault node <NODE> of <FAULT> has zero mass on the <SIDE> side!"
NUCLEATION_OUTSIDE = "the nucleation patch <PATCH> of <FAULT> lies outside the fault region <REGION>!"
FAULT_OUTSIDE = "the fault <FAULT> (<REASON>) does not fit the grid! <COMPLEMENT>"
DIRICHLET_ON_FAULT = "Dirichlet nodes and fault split nodes must be disjoint (<COUNT> shared nodes)!"

INSTABILITY = "the time integration blew up at step <STEP> (t = <TIME> s): max |v| = <VMAX> m/s! <COMPLEMENT>"
NON_FINITE = "non-finite values found in <FIELD> at step <STEP>! <COMPLEMENT>"
DT_MISMATCH = "time step mismatch: <COMPONENT> uses dt = <DT> s, the FE loop uses <FE_DT> s!"
UNMAPPED_NODE = "the boundary <BOUNDARY> has <COUNT> FE nodes without an SBI counterpart!"
DOUBLE_PUSH = "history of boundary <BOUNDARY> already holds step <STEP>; expected step <EXPECTED>!"
MISSING_KERNEL = "no kernel table for wavenumber q = <Q> 1/m (provider <PROVIDER>)!"
UNKNOWN_KERNEL = "the kernel provider <PROVIDER> has no kernel named <NAME>!"
SIZE_MISMATCH = "<METHOD> expected a field of shape <EXPECTED>, but received <RECEIVED>!"
HETEROGENEOUS = "the SBIM reference solver needs a homogeneous medium, but the scenario <SCENARIO> has <COUNT> materials!"

INVALID_SCENARIO = "invalid scenario <SCENARIO>: <REASON>"
UNKNOWN_PRESET = "unknown preset <NAME>! Use: <PRESETS>."
STATION_OUTSIDE = "the station <STATION> at (<X1>, <X3>) is not on the fault <FAULT>!"
STEPOVER_NOT_MULTIPLE = "the step-over distance <DISTANCE> m is not a multiple of dx = <DX> m!"
WRAP_AROUND = "duration * c_p = <DISTANCE> m exceeds the quiescent margin of <MARGIN> m along x<AXIS>; periodic images may reach the fault."
UNDER_RESOLVED = "the cohesive zone of <FAULT> (~<ZONE> m) is resolved by only <COUNT> elements."
CFL_VIOLATED = "dt = <DT> s exceeds the CFL bound <BOUND> s! <COMPLEMENT>"
INVALID_CONFIG = "invalid config <PATH>: <REASON>"
NON_NESTED = "the grid with dx = <DX> m is not nested in the reference grid with dx = <REFERENCE> m!"
UNKNOWN_PLOT = "unknown plot kind <KIND>! Use: <KINDS>."
WRITE_FAILED = "could not write <PATH>: <REASON>"
BACK_PRESSURE = "snapshot queue full at step <STEP>; the stepper waits for the writer."

_STATION_SCHEME_JSON = {
    "type": "object",
    "required": ["name", "fault", "x1", "x3"],
    "properties": {
        "name": {"type": "string"},
        "fault": {"type": "string"},
        "x1": {"type": "number"},
        "x3": {"type": "number"},
        "note": {"type": "string"}
    },
    "additionalProperties": False
}

_RANGE_SCHEME_JSON = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2
}

_VECTOR_SCHEME_JSON = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 3,
    "maxItems": 3
}

_SCENARIO_SCHEME_JSON = {
    "type": "object",
    "required": ["name", "dx", "extents", "origin", "mode", "materials", "regions", "faults", "stations", "duration"],
    "properties": {
        "name": {"type": "string"},
        "dx": {"type": "number", "exclusiveMinimum": 0},
        "extents": _VECTOR_SCHEME_JSON,
        "origin": _VECTOR_SCHEME_JSON,
        "mode": {"enum": ["symmetric", "two_sided"]},
        "materials": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["density", "cp", "cs"],
                "properties": {
                    "density": {"type": "number"},
                    "cp": {"type": "number"},
                    "cs": {"type": "number"},
                    "name": {"type": "string"}
                },
                "additionalProperties": False
            }
        },
        "regions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["lower", "upper", "material"],
                "properties": {
                    "lower": _VECTOR_SCHEME_JSON,
                    "upper": _VECTOR_SCHEME_JSON,
                    "material": {"type": "integer", "minimum": 0}
                },
                "additionalProperties": False
            }
        },
        "faults": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "x2", "x1_range", "x3_range", "law", "prestress"],
                "properties": {
                    "name": {"type": "string"},
                    "x2": {"type": "number"},
                    "x1_range": _RANGE_SCHEME_JSON,
                    "x3_range": _RANGE_SCHEME_JSON,
                    "law": {
                        "type": "object",
                        "required": ["mu_s", "mu_k", "dc"],
                        "properties": {
                            "mu_s": {"type": "number"},
                            "mu_k": {"type": "number"},
                            "dc": {"type": "number"}
                        },
                        "additionalProperties": False
                    },
                    "prestress": {
                        "type": "object",
                        "required": ["tau0", "sigma0"],
                        "properties": {
                            "tau0": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                            "sigma0": {"type": "number"}
                        },
                        "additionalProperties": False
                    },
                    "nucleation": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["x1_range", "x3_range", "mechanism"],
                            "properties": {
                                "x1_range": _RANGE_SCHEME_JSON,
                                "x3_range": _RANGE_SCHEME_JSON,
                                "mechanism": {"enum": ["stress_step", "strength_drop"]},
                                "value": {"type": ["number", "null"]},
                                "onset": {"type": "number", "minimum": 0}
                            },
                            "additionalProperties": False
                        }
                    },
                    "overrides": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["x1_range", "x3_range"],
                            "properties": {
                                "x1_range": _RANGE_SCHEME_JSON,
                                "x3_range": _RANGE_SCHEME_JSON,
                                "mu_k": {"type": ["number", "null"]},
                                "locked": {"type": "boolean"}
                            },
                            "additionalProperties": False
                        }
                    }
                },
                "additionalProperties": False
            }
        },
        "stations": {"type": "array", "items": _STATION_SCHEME_JSON},
        "duration": {"type": "number", "exclusiveMinimum": 0},
        "notes": {"type": "string"}
    },
    "additionalProperties": False
}

_CONFIG_SCHEME_JSON = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["scenario"],
    "properties": {
        "scenario": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["preset", "dx"],
                    "properties": {
                        "preset": {"enum": ["tpv3", "lvfz", "offfault_lvz", "stepover"]},
                        "dx": {"type": "number", "exclusiveMinimum": 0},
                        "overrides": {
                            "type": "object",
                            "properties": {
                                "duration": {"type": "number", "exclusiveMinimum": 0},
                                "tau0": {"type": "number"},
                                "margins": _RANGE_SCHEME_JSON
                            },
                            "additionalProperties": False
                        }
                    },
                    "additionalProperties": False
                },
                {
                    "type": "object",
                    "required": ["explicit"],
                    "properties": {"explicit": _SCENARIO_SCHEME_JSON},
                    "additionalProperties": False
                }
            ]
        },
        "time_step": {
            "type": "object",
            "required": ["policy"],
            "properties": {
                "policy": {"enum": ["cfl", "fixed"]},
                "safety": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "dt": {"type": "number", "exclusiveMinimum": 0}
            },
            "additionalProperties": False
        },
        "duration": {"type": ["number", "null"]},
        "l2": {"type": ["number", "null"]},
        "output": {
            "type": "object",
            "properties": {
                "directory": {"type": ["string", "null"]},
                "snapshot_every": {"type": ["integer", "null"], "minimum": 1},
                "strip_snapshots": {"type": "boolean"},
                "vtk": {"type": "boolean"}
            },
            "additionalProperties": False
        },
        "stations": {"type": "array", "items": _STATION_SCHEME_JSON},
        "kernels": {
            "type": "object",
            "properties": {
                "provider": {"enum": ["halfspace", "synthetic"]},
                "t_max": {"type": "number", "exclusiveMinimum": 0}
            },
            "additionalProperties": False
        },
        "threads": {"type": "integer", "minimum": 1},
        "deterministic": {"type": "boolean"},
        "rupture_threshold": {"type": "number", "exclusiveMinimum": 0}
    },
    "additionalProperties": False
}

_MANIFEST_SCHEME_JSON = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["config", "scenario", "dt", "n_steps", "grid", "rupture_threshold", "timings", "artifacts", "versions"],
    "properties": {
        "config": {"type": "object"},
        "scenario": _SCENARIO_SCHEME_JSON,
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "n_steps": {"type": "integer", "minimum": 0},
        "grid": {
            "type": "object",
            "required": ["shape", "dx", "origin", "n_nodes"],
            "properties": {
                "shape": {"type": "array", "items": {"type": "integer"}},
                "dx": {"type": "number"},
                "origin": _VECTOR_SCHEME_JSON,
                "n_nodes": {"type": "integer"}
            },
            "additionalProperties": False
        },
        "rupture_threshold": {"type": "number"},
        "timings": {
            "type": "object",
            "additionalProperties": {"type": "number", "minimum": 0}
        },
        "artifacts": {"type": "array", "items": {"type": "string"}},
        "versions": {
            "type": "object",
            "additionalProperties": {"type": "string"}
        },
        "status": {"enum": ["completed", "unstable"]},
        "diagnostic": {"type": "string"}
    },
    "additionalProperties": False
}
