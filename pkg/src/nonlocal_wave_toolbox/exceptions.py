from typing import Iterable, Sequence


class NonlocalWaveError(Exception):
    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class GridError(NonlocalWaveError, ValueError):
    pass


class GridMismatchError(NonlocalWaveError, ValueError):
    def __init__(self, left, right):
        super().__init__(f'Fields live on different grids: {left} and {right}')


class SymbolError(NonlocalWaveError, ValueError):
    pass


class ZeroModeError(NonlocalWaveError, ValueError):
    def __init__(self, ratio: float, tolerance: float):
        self.ratio = ratio
        self.tolerance = tolerance
        message = (f'P is undefined on the zero mode: |w(0)|/|w| = {ratio:.3e} '
                   f'exceeds tolerance {tolerance:.1e}')
        super().__init__(message)


class NonIntegrableKernelError(NonlocalWaveError, ValueError):
    pass


class NonlinearityError(NonlocalWaveError, ValueError):
    pass


class CorruptionError(NonlocalWaveError, FloatingPointError):
    def __init__(self, message: str, t: float = float('nan')):
        self.t = t
        super().__init__(message)


class PicardDivergenceError(NonlocalWaveError, ArithmeticError):
    def __init__(self, history: Sequence[float]):
        self.history = list(history)
        last = ', '.join(f'{d:.3e}' for d in self.history[-4:])
        super().__init__(f'Picard iterates diverge, last distances: {last}')


class ConfigError(NonlocalWaveError):
    exit_code = 1

    def __init__(self, errors: Iterable[str]):
        self.errors = list(errors)
        super().__init__('Invalid experiment config:\n' + '\n'.join(f'  - {e}' for e in self.errors))
