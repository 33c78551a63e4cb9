import math

csv_header = ['n', 'm', 'parity', 'k_max', 'k_avg', 'k_sigma', 't_dir', 't_fwd', 't_inv', 't_quad', 't_comp', 'm_max', 'eps_fwd', 'eps_inv']

missing_value = 'NA'

class BenchmarkRow:
    """
    One line of the benchmark table. t_dir and eps_fwd are None when the dense reference was skipped.
    """
    def __init__(self, n : int, m : int, parity : str, k_max : int = 0, k_avg : float = 0.0, k_sigma : float = 0.0,
                 t_dir : float = None, t_fwd : float = 0.0, t_inv : float = 0.0, t_quad : float = 0.0, t_comp : float = 0.0,
                 m_max : int = 0, eps_fwd : float = None, eps_inv : float = 0.0):
        self.n = n
        self.m = m
        self.parity = parity
        self.k_max = k_max
        self.k_avg = k_avg
        self.k_sigma = k_sigma
        self.t_dir = t_dir
        self.t_fwd = t_fwd
        self.t_inv = t_inv
        self.t_quad = t_quad
        self.t_comp = t_comp
        self.m_max = m_max
        self.eps_fwd = eps_fwd
        self.eps_inv = eps_inv

    def __repr__(self) -> str:
        return f"BenchmarkRow(n={self.n}, m={self.m}, parity={self.parity})"

    @property
    def values(self) -> dict:
        return { key: getattr(self, key) for key in csv_header }

    def Validate(self) -> list[str]:
        """
        Return a list of violated consistency rules (empty if the row is consistent)
        """
        problems = []
        for key in ['t_dir', 't_fwd', 't_inv', 't_quad', 't_comp', 'eps_fwd', 'eps_inv']:
            value = getattr(self, key)
            if value is not None and not (value >= 0.0 and math.isfinite(value)):
                problems.append(f"{key} = {value} is not a finite non-negative number")

        if self.k_sigma < 0.0:
            problems.append(f"k_sigma = {self.k_sigma} is negative")

        if self.k_avg > self.k_max:
            problems.append(f"k_avg = {self.k_avg} exceeds k_max = {self.k_max}")

        return problems

    def CsvFields(self, mask_timings : bool = False) -> list[str]:
        fields = []
        for key in csv_header:
            value = getattr(self, key)
            if mask_timings and key.startswith('t_'):
                value = 0.0 if value is not None else None

            fields.append(FormatField(value))
        return fields

def FormatField(value) -> str:
    if value is None:
        return missing_value
    if isinstance(value, float):
        return f"{value:.6e}" if value != 0.0 else "0"
    return str(value)
