# -*- coding: utf-8 -*-
"""
    tenrec.__main__
    ~~~~~~~~~~~~~~~

    Allows ``python -m tenrec``.

    :copyright: 2021 by tenrec Authors, see AUTHORS for more details.
    :license: MIT, see LICENSE for more details.
"""

import sys

from .cli import main

sys.exit(main())
