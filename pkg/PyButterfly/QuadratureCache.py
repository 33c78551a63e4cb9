import json
import logging
logging.basicConfig(encoding='utf-8')
import os
import threading

from PyButterfly.Legendre import ParseParity
from PyButterfly.Quadrature import BuildRule, QuadratureRule, default_max_iterations
from PyButterfly.Serialisation import ButterflyDecoder, ButterflyEncoder

class QuadratureCache:
    """
    Memoizes quadrature rules by (m, n, parity), in memory and optionally as JSON files
    """
    def __init__(self, cache_dir : str = None):
        self.cache_dir = cache_dir
        self.rules = {}
        self.lock = threading.Lock()

    def GetRule(self, m : int, n : int, parity : str, max_iterations : int = None) -> QuadratureRule:
        parity = ParseParity(parity)
        key = (int(m), int(n), parity)

        with self.lock:
            rule = self.rules.get(key)
            if rule:
                return rule

            rule = self._read_rule_file(key)
            if not rule:
                rule = BuildRule(m, n, parity, max_iterations=max_iterations or default_max_iterations)
                self._write_rule_file(rule)

            self.rules[key] = rule
            return rule

    def Clear(self):
        with self.lock:
            self.rules = {}

    def GetRuleFilepath(self, key) -> str:
        m, n, parity = key
        return os.path.join(self.cache_dir, f"rule_m{m}_n{n}_{parity}.json")

    def _read_rule_file(self, key) -> QuadratureRule:
        if not self.cache_dir:
            return None

        filepath = self.GetRuleFilepath(key)
        if not os.path.exists(filepath):
            return None

        try:
            with open(filepath, 'r', encoding='utf-8') as f:
                rule = json.load(f, cls=ButterflyDecoder)

            if not isinstance(rule, QuadratureRule) or rule.key != key:
                raise ValueError(f"File does not hold the rule for {key}")

            rule.Validate()
            logging.debug(f"Loaded quadrature rule {key} from {filepath}")
            return rule

        except Exception as e:
            logging.warning(f"Unable to read cached rule {filepath}, rebuilding: {e}")
            return None

    def _write_rule_file(self, rule : QuadratureRule):
        if not self.cache_dir:
            return

        filepath = self.GetRuleFilepath(rule.key)
        try:
            os.makedirs(self.cache_dir, exist_ok=True)
            with open(filepath, 'w', encoding='utf-8') as f:
                rule_json = json.dumps(rule, cls=ButterflyEncoder, indent=4)
                f.write(rule_json)

        except OSError as e:
            logging.warning(f"Unable to write cached rule {filepath}: {e}")
