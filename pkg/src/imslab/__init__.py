from .domain import *
from .analytic import *
from .exceptions import *
