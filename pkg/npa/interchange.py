"""
SDP 的 JSON 交换格式，供外部求解器交叉验证

{
  "dim": 13, "level": "2", "words": ["I", "A0", ...],
  "classes": {"0": [[0, 0], [1, 1], ...], ...},
  "class_words": {"0": "I", ...},
  "unit_classes": [0], "free_classes": [1, 2, ...],
  "objective": {"constant": c, "terms": [{"class": id, "coeff": v}, ...]},
  "sense": "maximize"
}
"""
from npa.functionals import noisy_eberhard_objective
from npa.moments import build_moment_structure


def structure_to_interchange(s):
    return {
        "dim": s.dim,
        "level": s.level,
        "words": [str(w) for w in s.words],
        "classes": {str(cid): [list(cell) for cell in cells] for cid, cells in sorted(s.classes.items())},
        "class_words": {str(cid): str(w) for cid, w in enumerate(s.class_words)},
        "unit_classes": sorted(s.unit_classes),
        "free_classes": s.free_entries,
    }


def sdp_to_interchange(s, functional):
    data = structure_to_interchange(s)
    data["objective"] = {
        "constant": functional.constant,
        "terms": [{"class": cid, "coeff": coeff} for cid, coeff in sorted(functional.coeffs.items())],
    }
    data["sense"] = "maximize"
    return data


def export_noisy_eberhard_sdp(eta, xi=0.0, level="2"):
    s = build_moment_structure(level)
    data = sdp_to_interchange(s, noisy_eberhard_objective(s, eta, xi))
    data["parameters"] = {"eta": eta, "xi": xi}
    return data
