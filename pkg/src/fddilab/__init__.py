"""fddilab: quantitative machinery of the FDDI standards family.

Subpackages cover the timed-token MAC simulator (mac_sim), FDDI-II
hybrid-mode cycles (fddi2), physical-layer line codes (phy_codec), the
SONET scrambler and its interference analyzer (scrambler), SONET rate
hierarchy and payload mapping (spm), and mixed-media link budgets
(link_planner). The ``fddilab`` command exposes all of them.
"""

__version__ = "0.1.0"
