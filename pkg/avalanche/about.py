import platform
from typing import Dict

import numpy as np

from avalanche import _ROOT_DIRECTORY_PATH


def version() -> str:
    with open(_ROOT_DIRECTORY_PATH / 'VERSION', encoding='utf-8') as f:
        release_version = f.read().strip()
    if release_version == '0.0.0':
        return 'development'
    return release_version


def environment() -> Dict[str, str]:
    """
    Describe the numerical environment a sweep ran in.
    """
    return {
        'avalanche': version(),
        'python': platform.python_version(),
        'platform': platform.platform(),
        'numpy': np.__version__,
    }
