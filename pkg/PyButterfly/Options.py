import os
import logging
logging.basicConfig(encoding='utf-8')
import dotenv
import appdirs

from PyButterfly.version import __version__

default_cache_dir = appdirs.user_cache_dir("LegendreButterfly", "LegendreButterfly")

# Load environment variables from .env file
dotenv.load_dotenv()

def env_bool(key, default=False):
    var = os.getenv(key, default)
    return bool(var) and str(var).lower() in ('true', 'yes', '1')

default_options = {
    'version': __version__,
    'epsilon': float(os.getenv('EPSILON', 1e-14)),
    'block_width': int(os.getenv('BLOCK_WIDTH', 60)),
    'seed': int(os.getenv('SEED', 0)),
    'dense_budget': int(os.getenv('DENSE_BUDGET', 1 << 30)),
    'cache_dir': os.getenv('CACHE_DIR', default_cache_dir),
    'use_file_cache': env_bool('USE_FILE_CACHE', True),
    'output_format': os.getenv('OUTPUT_FORMAT', 'csv'),
    'timing_repeats': int(os.getenv('TIMING_REPEATS', 3)),
    'max_newton_iterations': int(os.getenv('MAX_NEWTON_ITERATIONS', 100)),
    'verify_n': int(os.getenv('VERIFY_N', 64)),
    'verify_matrices': int(os.getenv('VERIFY_MATRICES', 20)),
    'perturb': float(os.getenv('PERTURB', 0.0)),
    'mask_timings': env_bool('MASK_TIMINGS', False),
}

class Options:
    def __init__(self, options=None, **kwargs):
        # Initialise from defaults settings
        self.options = default_options.copy()

        if hasattr(options, 'options'):
            options = options.options

        if options:
            # Remove None values from options and merge with defaults
            options = {k: v for k, v in options.items() if v is not None}
            self.options = {**self.options, **options}

        # Apply any explicit parameters
        self.options.update({k: v for k, v in kwargs.items() if v is not None})

    def get(self, option, default=None):
        return self.options.get(option, default)

    def add(self, option, value):
        self.options[option] = value

    def update(self, options):
        if isinstance(options, Options):
            return self.update(options.options)

        options = {k: v for k, v in options.items() if v is not None}
        self.options.update(options)

    def epsilon(self) -> float:
        return float(self.get('epsilon'))

    def block_width(self) -> int:
        return int(self.get('block_width'))

    def seed(self) -> int:
        return int(self.get('seed'))

    def cache_dir(self):
        """
        Directory for the quadrature rule file cache, or None if file caching is disabled
        """
        cache_dir = self.get('cache_dir')
        if not cache_dir or not self.get('use_file_cache'):
            return None
        return cache_dir
