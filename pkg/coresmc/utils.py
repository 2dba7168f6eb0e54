#! /usr/bin/env python

# Library Imports
from .environment import *
from ._libs.error_utils import *
from ._libs.csv_utils import *
from ._libs.file_utils import *
from ._libs.log_utils import *
from ._libs.report_utils import *
from ._libs.datetime_utils import *
from ._libs.proc_utils import *
from ._libs.rng_utils import *
from ._libs.stats_utils import *

# logging
log = logging.getLogger('coresmc.utils')

