"""
diagcheck configuration
Centralized knobs for tensor semantics, oracles and the theory checker
"""
import os
from typing import Dict, Any

import gmpy2
from dotenv import load_dotenv

load_dotenv()


class Config:
    """Main configuration class for diagcheck"""

    # Tensor semantics
    INDEX_SIZE = int(os.environ.get('DIAGCHECK_INDEX_SIZE', '2'))
    PRIME = int(os.environ.get('DIAGCHECK_PRIME', '1000000007'))
    TOLERANCE = float(os.environ.get('DIAGCHECK_TOLERANCE', '1e-9'))

    # Randomized oracle
    ORACLE_TRIALS = int(os.environ.get('DIAGCHECK_ORACLE_TRIALS', '20'))
    SEED = int(os.environ.get('DIAGCHECK_SEED', '0'))

    # Checker
    MAX_MATCHES = int(os.environ.get('DIAGCHECK_MAX_MATCHES', '10000'))
    CHECK_PARALLEL_WORKERS = int(os.environ.get('DIAGCHECK_WORKERS', '4'))
    THEORY_EXTENSIONS = {'.thy'}

    # Logging
    LOG_LEVEL = os.environ.get('DIAGCHECK_LOG_LEVEL', 'WARNING').upper()
    LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'

    @classmethod
    def get_oracle_config(cls) -> Dict[str, Any]:
        """Get the settings used by randomized equivalence checks"""
        return {
            'prime': cls.PRIME,
            'index_size': cls.INDEX_SIZE,
            'trials': cls.ORACLE_TRIALS,
            'seed': cls.SEED,
        }

    @classmethod
    def validate_config(cls) -> Dict[str, bool]:
        """Validate configuration and report which knobs are usable"""
        return {
            'prime': bool(gmpy2.is_prime(cls.PRIME)) and cls.PRIME < 2 ** 31,
            'index_size': cls.INDEX_SIZE >= 1,
            'tolerance': cls.TOLERANCE > 0,
            'oracle_trials': cls.ORACLE_TRIALS >= 0,
            'max_matches': cls.MAX_MATCHES >= 1,
            'workers': cls.CHECK_PARALLEL_WORKERS >= 1,
        }


class DevelopmentConfig(Config):
    """Development configuration"""
    LOG_LEVEL = os.environ.get('DIAGCHECK_LOG_LEVEL', 'INFO').upper()


class TestingConfig(Config):
    """Testing configuration"""
    ORACLE_TRIALS = 5
    SEED = 1234
    CHECK_PARALLEL_WORKERS = 1


config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'default': Config,
}


def get_config(name: str = None):
    """Select a configuration class, defaulting to DIAGCHECK_ENV"""
    return config.get(name or os.environ.get('DIAGCHECK_ENV', 'default'), Config)
