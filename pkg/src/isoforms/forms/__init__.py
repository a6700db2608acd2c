from .isochrony import isochrony_report, mirror_search
from .isotropy import IsotropyResult, check_characterization, isotropy
from .oneform import RationalOneForm, pushforward, residues
from .synthesis import SynthesisSpec, sample_stratum, synthesize

__all__ = [
    "IsotropyResult",
    "RationalOneForm",
    "SynthesisSpec",
    "check_characterization",
    "isochrony_report",
    "isotropy",
    "mirror_search",
    "pushforward",
    "residues",
    "sample_stratum",
    "synthesize",
]
