import json
import numpy as np

from PyButterfly.BenchmarkRow import BenchmarkRow
from PyButterfly.ButterflyError import ButterflyError
from PyButterfly.ButterflyPlan import PlanStatistics
from PyButterfly.Quadrature import QuadratureRule

# Serialisation helpers
def classname(obj):
    if isinstance(obj, type):
        return obj.__name__
    return type(obj).__name__

# Convert our custom types to JSON
class ButterflyEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, ButterflyError):
            return {
                "_class": classname(ButterflyError),
                "type": classname(obj),
                "problem": str(obj)
            }

        if isinstance(obj, np.ndarray):
            return obj.tolist()

        if isinstance(obj, np.integer):
            return int(obj)

        if isinstance(obj, np.floating):
            return float(obj)

        _class = classname(obj)
        properties = self.serialize_object(obj)
        if isinstance(properties, dict):
            properties = {k: v for k, v in properties.items() if v is not None}
            return {**{ "_class": _class }, **properties}
        else:
            return properties

    def serialize_object(self, obj):
        if obj is None:
            return None

        if isinstance(obj, QuadratureRule):
            return {
                "m": obj.m,
                "n": obj.n,
                "parity": obj.parity,
                "nodes": obj.nodes,
                "weights": obj.weights,
                "center_weight": obj.center_weight
            }
        elif isinstance(obj, BenchmarkRow):
            return obj.values
        elif isinstance(obj, PlanStatistics):
            return obj.values

        return super().default(obj)

# Reconstruct our custom types from JSON
class ButterflyDecoder(json.JSONDecoder):
    def __init__(self, *args, **kwargs):
        super().__init__(object_hook=self.object_hook, *args, **kwargs)

    def object_hook(self, dct):
        if '_class' in dct:
            class_name = dct.pop('_class')
            if class_name == classname(QuadratureRule):
                return QuadratureRule(dct['m'], dct['n'], dct['parity'], dct['nodes'], dct['weights'], dct.get('center_weight'))
            elif class_name == classname(BenchmarkRow):
                return BenchmarkRow(**dct)

        return dct
