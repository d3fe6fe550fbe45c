from ._event_type import *
from .engine import *
