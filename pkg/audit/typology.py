"""
Classification of grounding profiles into fourfold cells and archetypes.

Every cell is a pure function of two high/low bits; the bits are returned in
the verdict's rationale so boundary cases can be inspected.
"""

from __future__ import annotations

from typing import Dict, Optional

from schemas.evaluation import ThresholdPolicy
from schemas.profile import GroundingProfile, TypologyVerdict
from utils.logger import logger

_G2A_G4 = {
    (True, True): "grounded",
    (True, False): "memorizer",
    (False, True): "miscalibrated",
    (False, False): "lost",
}

_G2A_G2B = {
    (True, True): "competent",
    (True, False): "lucky",
    (False, True): "effortful failure",
    (False, False): "random",
}

_G3_G4 = {
    (True, True): "smooth generalist",
    (True, False): "robust lookup",
    (False, True): "brittle algebraist",
    (False, False): "fragile memorizer",
}

_G0_G2A = {
    (True, True): "genuine",
    (True, False): "authentic failure",
    (False, True): "cargo cult",
    (False, False): "broken puppet",
}


def rating_bits(profile: GroundingProfile, policy: ThresholdPolicy) -> Dict[str, bool]:
    """High/low rating of every profile quantity under the policy."""
    g0 = profile.g0_level == "strong"
    return {
        "g0": g0,
        "g1": profile.eps_pres <= policy.g1_max_err,
        "g2a": profile.eps_faith <= policy.g2a_max_err,
        "g2b": g0 and (
            profile.ace >= policy.g2b_min_ace
            or profile.ace_continuous >= policy.g2b_min_ace_continuous
        ),
        "g3": profile.omega_at(policy.g3_ref_scale) <= policy.g3_max_modulus_at_ref_scale,
        "g4": profile.delta_comp <= policy.g4_max_delta,
        "sys": profile.beta >= policy.beta_min,
    }


def classify_cells(profile: GroundingProfile, policy: Optional[ThresholdPolicy] = None) -> TypologyVerdict:
    policy = policy or ThresholdPolicy()
    bits = rating_bits(profile, policy)
    return TypologyVerdict(
        cell_g2a_g4=_G2A_G4[(bits["g2a"], bits["g4"])],
        cell_g2a_g2b=_G2A_G2B[(bits["g2a"], bits["g2b"])],
        cell_g3_g4=_G3_G4[(bits["g3"], bits["g4"])],
        cell_g0_g2a=_G0_G2A[(bits["g0"], bits["g2a"])],
        rationale=bits,
    )


def classify_archetype(
    profile: GroundingProfile,
    policy: Optional[ThresholdPolicy] = None,
    ling_profile: Optional[GroundingProfile] = None,
) -> str:
    """First matching archetype in printed order, else "unclassified".

    "fluent empty" needs a second profile measured under a linguistic meaning
    type; it is never emitted from a single profile.
    """
    policy = policy or ThresholdPolicy()
    b = rating_bits(profile, policy)
    high_g4 = b["g4"] and b["sys"]

    if b["g2a"] and not b["g2b"] and not high_g4:
        return "parrot"
    if high_g4 and not b["g1"]:
        return "calculator"
    # an accurate fragile system with causal warrant is the brittle expert
    if b["g2a"] and not b["g2b"] and not b["g3"]:
        return "glass canon"
    if ling_profile is not None:
        ling = rating_bits(ling_profile, policy)
        if ling["g3"] and ling["g4"] and ling["sys"] and not b["g2b"]:
            return "fluent empty"
    if b["g2a"] and b["g2b"] and not b["g3"]:
        return "brittle expert"
    # atomic errors that carry through into composites
    if not b["g1"] and not b["g2a"]:
        return "drifter"
    if all(b[key] for key in ("g1", "g2a", "g2b", "g3")) and high_g4:
        return "grounded"
    return "unclassified"


def classify(
    profile: GroundingProfile,
    policy: Optional[ThresholdPolicy] = None,
    ling_profile: Optional[GroundingProfile] = None,
) -> TypologyVerdict:
    """Cells plus archetype."""
    verdict = classify_cells(profile, policy)
    verdict.archetype = classify_archetype(profile, policy, ling_profile)
    logger.info(
        f"[Typology] {verdict.cell_g2a_g4} / {verdict.cell_g2a_g2b} / {verdict.cell_g3_g4} / "
        f"{verdict.cell_g0_g2a} -> {verdict.archetype}"
    )
    return verdict
