from .environment import *
from . import utils
# name = "coresmc"
