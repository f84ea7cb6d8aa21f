"""Exception hierarchy. Every error knows its module and a machine code."""


class IsoLadderError(Exception):
    module = "isoladder"
    code = "Error"

    def __init__(self, message="", **details):
        super().__init__(message or self.code)
        self.details = details

    def to_json(self):
        out = {"module": self.module, "code": self.code, "message": str(self)}
        for key, value in self.details.items():
            out[key] = value if isinstance(value, (int, str, bool, type(None))) else str(value)
        return out


def _error(name, module, base=IsoLadderError):
    return type(name, (base,), {"module": module, "code": name})


NotSquarefree = _error("NotSquarefree", "algebra_core")
NotInvertible = _error("NotInvertible", "algebra_core")
ZeroDivisor = _error("ZeroDivisor", "algebra_core")
NotIntegral = _error("NotIntegral", "algebra_core")
BadPolynomial = _error("BadPolynomial", "algebra_core")

MismatchedAlgebra = _error("MismatchedAlgebra", "lattices")
NotContained = _error("NotContained", "lattices")
RankDeficient = _error("RankDeficient", "lattices")

NotAnOrder = _error("NotAnOrder", "orders")
NotSingular = _error("NotSingular", "orders")

FactorizationIncomplete = _error("FactorizationIncomplete", "maximalization")

NotMinimal = _error("NotMinimal", "ladders")
NotALadder = _error("NotALadder", "ladders")
EnumerationTooLarge = _error("EnumerationTooLarge", "ladders")
ValuationMismatch = _error("ValuationMismatch", "ladders")

UnknownUnitIndex = _error("UnknownUnitIndex", "classgroup")
NotBass = _error("NotBass", "classgroup")
NotImaginaryQuadratic = _error("NotImaginaryQuadratic", "classgroup")
SchemaError = _error("SchemaError", "classgroup")
InconsistentRatios = _error("InconsistentRatios", "classgroup")

NeedUserN = _error("NeedUserN", "graph")
LadderDisjoint = _error("LadderDisjoint", "graph")
GraphInputError = _error("GraphInputError", "graph")

MissingPrincipalityData = _error("MissingPrincipalityData", "volcano")

BadLabel = _error("BadLabel", "lmfdb_client")
NetworkUnavailable = _error("NetworkUnavailable", "lmfdb_client")
UpstreamSchemaChange = _error("UpstreamSchemaChange", "lmfdb_client")
