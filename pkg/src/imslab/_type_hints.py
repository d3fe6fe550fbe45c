from typing import Any, Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, TextIO, Tuple, Union


Num  = Union[float, int]


# milliseconds on the simulation clock / per-link one-way delays
Ms   = float
