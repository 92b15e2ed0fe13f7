#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""schema module contains the run configuration schema and the report schema."""

schema = {
    'data.source': {
        'required': False,
        'type': 'string',
        'default': 'file',
        'allowed': ['file', 'sinc']
    },
    'data.path': {
        'required': False,
        'type': 'string',
        'nullable': True,
        'default': None
    },
    'data.delimiter': {
        'required': False,
        'type': 'string',
        'default': ',',
        'minlength': 1,
        'maxlength': 1
    },
    'data.target_column': {
        'required': False,
        'type': 'string',
        'default': 'y'
    },
    'data.feature_columns': {
        'required': False,
        'type': 'list',
        'schema': {'type': 'string'},
        'nullable': True,
        'default': None
    },
    'data.standardize': {
        'required': False,
        'type': 'boolean',
        'default': True
    },
    'generator.n': {
        'required': False,
        'type': 'integer',
        'default': 100000,
        'min': 2
    },
    'generator.x_min': {
        'required': False,
        'type': 'number',
        'default': -15.0
    },
    'generator.x_max': {
        'required': False,
        'type': 'number',
        'default': 15.0
    },
    'generator.noise_sd': {
        'required': False,
        'type': 'number',
        'default': 0.0,
        'min': 0
    },
    'kernel': {
        'required': False,
        'type': 'string',
        'default': 'rbf',
        'empty': False
    },
    'noise.sigma_n_sq': {
        'required': False,
        'type': 'number',
        'default': 0.1,
        'min': 0
    },
    'noise.fixed': {
        'required': False,
        'type': 'boolean',
        'default': False
    },
    'sizing.method': {
        'required': False,
        'type': 'string',
        'default': 'formula',
        'allowed': ['formula', 'infer', 'explicit']
    },
    'sizing.epsilon': {
        'required': False,
        'type': 'number',
        'default': 0.05,
        'min': 0
    },
    'sizing.C': {
        'required': False,
        'type': 'number',
        'default': 1.0,
        'min': 0
    },
    'sizing.noisy': {
        'required': False,
        'type': 'boolean',
        'default': False
    },
    'sizing.delta': {
        'required': False,
        'type': 'number',
        'nullable': True,
        'default': None,
        'min': 0,
        'max': 1
    },
    'sizing.probe_size': {
        'required': False,
        'type': 'integer',
        'default': 2000,
        'min': 4
    },
    'sizing.delta_start': {
        'required': False,
        'type': 'number',
        'default': 0.1,
        'min': 0,
        'max': 1
    },
    'sizing.delta_step': {
        'required': False,
        'type': 'number',
        'default': 0.05,
        'min': 0,
        'max': 1
    },
    'ensemble.K': {
        'required': False,
        'type': 'integer',
        'default': 30,
        'min': 1
    },
    'ensemble.combination': {
        'required': False,
        'type': 'string',
        'default': 'average',
        'allowed': ['average', 'poe']
    },
    'ensemble.with_replacement': {
        'required': False,
        'type': 'boolean',
        'default': True
    },
    'ensemble.workers': {
        'required': False,
        'type': 'integer',
        'default': 1,
        'min': 1
    },
    'optimizer.restarts': {
        'required': False,
        'type': 'integer',
        'default': 3,
        'min': 1
    },
    'optimizer.max_iterations': {
        'required': False,
        'type': 'integer',
        'default': 200,
        'min': 1
    },
    'optimizer.tolerance': {
        'required': False,
        'type': 'number',
        'default': 1e-5,
        'min': 0
    },
    'optimizer.log_bound_low': {
        'required': False,
        'type': 'number',
        'default': -10.0
    },
    'optimizer.log_bound_high': {
        'required': False,
        'type': 'number',
        'default': 10.0
    },
    'optimizer.restart_workers': {
        'required': False,
        'type': 'integer',
        'default': 1,
        'min': 1
    },
    'sweep.rows': {
        'required': False,
        'type': 'integer',
        'nullable': True,
        'default': 2000,
        'min': 2
    },
    'split_fraction': {
        'required': False,
        'type': 'number',
        'default': 0.7,
        'min': 0,
        'max': 1
    },
    'seed': {
        'required': False,
        'type': 'integer',
        'default': 0,
        'min': 0
    },
    'output.report': {
        'required': False,
        'type': 'string',
        'nullable': True,
        'default': None
    },
    'output.model': {
        'required': False,
        'type': 'string',
        'nullable': True,
        'default': None
    },
    'output.predictions': {
        'required': False,
        'type': 'string',
        'nullable': True,
        'default': None
    },
    'predict.observation_variance': {
        'required': False,
        'type': 'boolean',
        'default': False
    },
    'log_level': {
        'required': False,
        'type': 'string',
        'default': 'INFO',
        'allowed': ['DEBUG', 'INFO', 'WARN', 'ERROR']
    },
    'log_format': {
        'required': False,
        'type': 'string',
        'default': 'plain',
        'allowed': ['plain', 'ecs']
    }
}

sizing_schema = {
    'N': {'type': 'integer', 'min': 1, 'required': True},
    'method': {'type': 'string', 'allowed': ['empirical-formula', 'proportion-inference', 'explicit'], 'required': True},
    'Ns': {'type': 'integer', 'min': 1, 'required': True},
    'delta': {'type': 'number', 'nullable': True},
    'epsilon': {'type': ['number', 'string'], 'nullable': True},
    'C': {'type': 'number', 'nullable': True},
    'target_met': {'type': 'boolean', 'required': True},
    'effective_delta': {'type': 'number', 'min': 0, 'max': 1, 'required': True},
    'trace': {
        'type': 'list',
        'schema': {
            'type': 'dict',
            'schema': {
                'delta': {'type': 'number', 'required': True},
                'subset_size': {'type': 'integer', 'min': 1, 'required': True},
                'rmse': {'type': 'number', 'min': 0, 'required': True}
            }
        }
    }
}

report_schema = {
    'status': {'type': 'string', 'allowed': ['ok', 'failed'], 'required': True},
    'command': {'type': 'string', 'required': True},
    'error': {'type': 'string', 'nullable': True},
    'library_version': {'type': 'string', 'required': True},
    'config': {'type': 'dict', 'required': True},
    'timings': {'type': 'dict', 'required': True, 'valuesrules': {'type': 'number', 'min': 0}},
    'sizing': {'type': 'dict', 'nullable': True, 'schema': sizing_schema},
    'member_lml': {'type': 'list', 'schema': {'type': 'number'}},
    'rmse': {'type': 'number', 'min': 0},
    'rmse_average': {'type': 'number', 'min': 0},
    'rmse_poe': {'type': 'number', 'min': 0},
    'sd_baseline': {'type': 'number', 'min': 0},
    'n_train': {'type': 'integer', 'min': 0},
    'n_test': {'type': 'integer', 'min': 0},
    'repeats': {
        'type': 'list',
        'schema': {
            'type': 'dict',
            'schema': {
                'seed': {'type': 'integer', 'required': True},
                'rmse_average': {'type': 'number', 'min': 0, 'required': True},
                'rmse_poe': {'type': 'number', 'min': 0, 'required': True},
                'sd_baseline': {'type': 'number', 'min': 0, 'required': True},
                'Ns': {'type': 'integer', 'min': 1, 'required': True}
            }
        }
    }
}

# Fields every successful report of a command must carry, beyond report_schema's required ones.
required_on_success = {
    'size': ['sizing'],
    'fit': ['sizing', 'member_lml', 'n_train'],
    'eval': ['sizing', 'member_lml', 'rmse', 'rmse_average', 'rmse_poe', 'sd_baseline', 'n_train', 'n_test'],
    'eval-model': ['rmse', 'rmse_average', 'rmse_poe', 'sd_baseline', 'n_test'],
    'bench-sinc': ['repeats', 'rmse', 'rmse_average', 'rmse_poe', 'sd_baseline'],
}
